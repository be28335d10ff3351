"""Shared helpers for the level set commands"""

from typing import List, Optional, Tuple

import click

from app.core.event_bus import EventBus
from app.core.exceptions import InvalidArgumentError


def get_event_bus(ctx: click.Context) -> Optional[EventBus]:
    """Event bus of the owning LSESystem, if the command runs inside one"""
    return getattr(ctx.obj, "event_bus", None)


def parse_float_list(text: str) -> List[float]:
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise InvalidArgumentError(f"could not parse number list '{text}'") from e
    if not values:
        raise InvalidArgumentError("expected at least one value")
    return values


def parse_grid_list(text: str) -> List[Tuple[int, ...]]:
    """'10x10,30x30' -> [(10, 10), (30, 30)]"""
    shapes = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        try:
            shape = tuple(int(n) for n in item.split("x"))
        except ValueError as e:
            raise InvalidArgumentError(f"could not parse grid '{item}'") from e
        if any(n < 1 for n in shape):
            raise InvalidArgumentError(f"grid '{item}' needs counts >= 1")
        shapes.append(shape)
    if not shapes:
        raise InvalidArgumentError("expected at least one grid")
    return shapes


def parse_column_list(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [item.strip() for item in text.split(",") if item.strip()]
