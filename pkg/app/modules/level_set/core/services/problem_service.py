"""Benchmark functions, truth grids, noisy observation and tabular datasets"""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
import csv
import logging

import numpy as np
from scipy.spatial import cKDTree

from app.core.exceptions import (
    DatasetParseError, InvalidArgumentError, TabularLookupError,
)
from app.modules.level_set.config import LSEProblemCatalog, LSESettings
from app.modules.level_set.core.schemas.problem_schemas import (
    AnalyticOracle, GroundTruth, LevelSetProblem, TabularOracle,
)
from app.shared.schemas import DomainBounds, Label

logger = logging.getLogger(__name__)


# ==================== SYNTHETIC FUNCTIONS ====================

def _batch(x, dim: int) -> Tuple[np.ndarray, bool]:
    points = np.asarray(x, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    if points.shape[1] != dim:
        raise InvalidArgumentError(f"expected {dim}-dimensional points, got {points.shape[1]}")
    return points, single


def _result(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


def mc2d_eval(x):
    """Multi-circle 2D: exp(sin^2 x1 * sin^2 x2)"""
    points, single = _batch(x, 2)
    s = np.sin(points) ** 2
    return _result(np.exp(s[:, 0] * s[:, 1]), single)


def mc3d_eval(x):
    """Multi-circle 3D: exp(sin^2 x1 * sin^2 x2 * sin^2 x3)"""
    points, single = _batch(x, 3)
    s = np.sin(points) ** 2
    return _result(np.exp(s[:, 0] * s[:, 1] * s[:, 2]), single)


def sin2d_eval(x):
    """Sinusoidal 2D: sin(10 x1) + cos(4 x2) - cos(3 x1 x2)"""
    points, single = _batch(x, 2)
    x1, x2 = points[:, 0], points[:, 1]
    return _result(np.sin(10.0 * x1) + np.cos(4.0 * x2) - np.cos(3.0 * x1 * x2), single)


_FUNCTIONS = {
    "mc2d": mc2d_eval,
    "mc3d": mc3d_eval,
    "sin2d": sin2d_eval,
}


def make_problem(name: str, noise_variance: float = 0.0) -> LevelSetProblem:
    """Built-in benchmark by name (mc2d, mc3d, sin2d)"""
    key = name.strip().lower()
    try:
        entry = LSEProblemCatalog.get(key)
    except KeyError as e:
        raise InvalidArgumentError(str(e.args[0])) from e
    func = _FUNCTIONS[key]
    return LevelSetProblem(
        name=key,
        bounds=DomainBounds.from_lists(entry["lower"], entry["upper"]),
        threshold=entry["threshold"],
        oracle=AnalyticOracle(name=key, func=func),
        noise_variance=noise_variance,
        truth_grid_shape=tuple(entry["grid"]),
    )


# ==================== GROUND TRUTH ====================

def grid_points(bounds: DomainBounds, shape: Sequence[int]) -> np.ndarray:
    """Endpoint-inclusive grid in row-major order (first coordinate slowest)"""
    if len(shape) != bounds.dim:
        raise InvalidArgumentError(f"grid shape {tuple(shape)} does not match dimension {bounds.dim}")
    if any(int(n) < 1 for n in shape):
        raise InvalidArgumentError("grid counts must be >= 1")
    axes = [
        np.linspace(lo, hi, int(n)) if int(n) > 1 else np.array([0.5 * (lo + hi)])
        for lo, hi, n in zip(bounds.lower, bounds.upper, shape)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def noiseless_values(problem: LevelSetProblem, points) -> np.ndarray:
    return problem.oracle.evaluate(np.atleast_2d(np.asarray(points, dtype=float)))


def _labels_for(values: np.ndarray, h: float) -> Tuple[Label, ...]:
    # f(x) == h is not in the superlevel set
    return tuple(Label.SUPER if v > h else Label.SUB for v in values)


def build_ground_truth(problem: LevelSetProblem) -> GroundTruth:
    """Noiseless labels on the problem's truth grid (all rows for tabular data)"""
    if problem.is_tabular and problem.truth_grid_shape is None:
        oracle: TabularOracle = problem.oracle
        points = oracle.points
        values = oracle.values
    else:
        if problem.truth_grid_shape is None:
            raise InvalidArgumentError(f"problem {problem.name} has no truth grid")
        points = grid_points(problem.bounds, problem.truth_grid_shape)
        if problem.is_tabular:
            distance, _ = problem.oracle.nearest(points)
            missing = points[distance > problem.oracle.tolerance]
            if missing.shape[0]:
                preview = ", ".join(str(p.tolist()) for p in missing[:10])
                raise TabularLookupError(
                    f"{missing.shape[0]} truth grid point(s) missing from the dataset: {preview}",
                    missing=missing.tolist(),
                )
        values = noiseless_values(problem, points)

    truth = GroundTruth(points=points, values=values, labels=_labels_for(values, problem.threshold))
    logger.debug(
        f"Ground truth for {problem.name}: {len(truth)} points, "
        f"superlevel fraction {truth.superlevel_fraction:.4f}"
    )
    return truth


# ==================== OBSERVATION ====================

def observe(problem: LevelSetProblem, x, rng: np.random.Generator) -> float:
    """f(x) plus N(0, noise_variance) noise drawn from rng"""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != problem.dim:
        raise InvalidArgumentError(f"expected a {problem.dim}-dimensional point, got {x.shape[0]}")
    if not problem.is_tabular and not problem.bounds.contains(x, atol=1e-12):
        raise InvalidArgumentError(f"point {x.tolist()} lies outside the domain of {problem.name}")

    value = float(problem.oracle.evaluate(x[None, :])[0])
    if problem.noise_variance == 0:
        return value
    return value + float(rng.normal(0.0, np.sqrt(problem.noise_variance)))


# ==================== TABULAR DATASETS ====================

def _parse_float(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise DatasetParseError(f"non-numeric cell {text!r}", row=row, column=column)
    if not np.isfinite(value):
        raise DatasetParseError(f"non-finite cell {text!r}", row=row, column=column)
    return value


def load_tabular_dataset(path: Union[str, Path], point_columns: Optional[List[str]],
                         value_column: Optional[str], h: float,
                         tolerance: float = LSESettings.TABULAR_TOLERANCE,
                         noise_variance: float = 0.0) -> LevelSetProblem:
    """Load a CSV (header row) into a tabular problem.

    Without explicit columns every column but the last is a coordinate and
    the last column is the value. Row numbers in errors count the header as
    row 1.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetParseError(f"dataset {path} not found")

    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = [name.strip() for name in next(reader)]
        except StopIteration:
            raise DatasetParseError(f"dataset {path} is empty")

        if value_column is None:
            value_column = header[-1]
        if point_columns is None:
            point_columns = [name for name in header if name != value_column]
        for name in list(point_columns) + [value_column]:
            if name not in header:
                raise DatasetParseError(f"column '{name}' not found in header {header}")
        point_idx = [header.index(name) for name in point_columns]
        value_idx = header.index(value_column)

        points, values = [], []
        for row_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DatasetParseError(
                    f"expected {len(header)} cells, found {len(row)}", row=row_number
                )
            points.append([_parse_float(row[i], row_number, header[i]) for i in point_idx])
            values.append(_parse_float(row[value_idx], row_number, value_column))

    if not points:
        raise DatasetParseError(f"dataset {path} has no data rows")
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)

    pairs = cKDTree(points).query_pairs(r=tolerance, p=np.inf)
    if pairs:
        i, j = min(pairs)
        raise DatasetParseError(
            f"duplicate points within tolerance {tolerance:g}: rows {i + 2} and {j + 2}", row=j + 2
        )

    lower, upper = points.min(axis=0), points.max(axis=0)
    flat = [point_columns[k] for k in np.flatnonzero(upper <= lower)]
    if flat:
        raise DatasetParseError(f"column(s) {flat} take a single value; the domain box is empty")

    problem = LevelSetProblem(
        name=path.stem,
        bounds=DomainBounds.from_lists(lower.tolist(), upper.tolist()),
        threshold=float(h),
        oracle=TabularOracle(points=points, values=values, tolerance=tolerance),
        noise_variance=noise_variance,
    )
    logger.info(f"Loaded tabular dataset {path} with {points.shape[0]} rows in {points.shape[1]} dimensions")
    return problem
