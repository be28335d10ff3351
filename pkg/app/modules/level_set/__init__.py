# app/modules/level_set/__init__.py

"""Level Set Estimation Module"""

from .module import LevelSetModule

__all__ = ["LevelSetModule"]
