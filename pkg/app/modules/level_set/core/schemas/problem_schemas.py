from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from app.core.exceptions import TabularLookupError
from app.modules.level_set.config import LSESettings
from app.shared.schemas import DomainBounds, Label


@dataclass(frozen=True)
class AnalyticOracle:
    """Closed-form objective evaluated on an (n, d) batch"""
    name: str
    func: Callable[[np.ndarray], np.ndarray]

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(np.atleast_2d(points)), dtype=float).reshape(-1)


@dataclass(frozen=True)
class TabularOracle:
    """Finite dataset standing in for an expensive simulator"""
    points: np.ndarray
    values: np.ndarray
    tolerance: float = LSESettings.TABULAR_TOLERANCE
    _tree: cKDTree = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).reshape(-1))
        object.__setattr__(self, "_tree", cKDTree(points))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def nearest(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Per-coordinate (Chebyshev) distance and index of the nearest stored row"""
        return self._tree.query(np.atleast_2d(points), k=1, p=np.inf)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        distance, index = self.nearest(points)
        misses = np.flatnonzero(distance > self.tolerance)
        if misses.size:
            miss = misses[0]
            raise TabularLookupError(
                f"point {points[miss].tolist()} is not a stored row "
                f"(nearest {self.points[index[miss]].tolist()} at distance {distance[miss]:.3g})",
                nearest=self.points[index[miss]].tolist(),
            )
        return self.values[index]

    def snap(self, points: np.ndarray) -> np.ndarray:
        """Replace each point by its nearest stored row"""
        _, index = self.nearest(points)
        return self.points[np.atleast_1d(index)]


Oracle = Union[AnalyticOracle, TabularOracle]


@dataclass(frozen=True)
class LevelSetProblem:
    """Domain box, threshold h and an oracle"""
    name: str
    bounds: DomainBounds
    threshold: float
    oracle: Oracle
    noise_variance: float = 0.0
    truth_grid_shape: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if not np.isfinite(self.threshold):
            raise ValueError("threshold must be finite")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be >= 0")
        if self.truth_grid_shape is not None and len(self.truth_grid_shape) != self.bounds.dim:
            raise ValueError("truth_grid_shape must have one count per dimension")

    @property
    def dim(self) -> int:
        return self.bounds.dim

    @property
    def is_tabular(self) -> bool:
        return isinstance(self.oracle, TabularOracle)


@dataclass(frozen=True)
class GroundTruth:
    """Noiseless labels on the evaluation grid"""
    points: np.ndarray
    values: np.ndarray
    labels: Tuple[Label, ...]
    _super_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mask = np.array([label == Label.SUPER for label in self.labels], dtype=bool)
        object.__setattr__(self, "_super_mask", mask)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def is_super(self) -> np.ndarray:
        return self._super_mask

    @property
    def superlevel_fraction(self) -> float:
        return float(np.mean(self.is_super)) if len(self) else 0.0
