"""
Acquisition maximization over a box or a finite candidate set.

Continuous mode probes a scrambled Halton sequence (prefix-extendable, so a
larger probe budget always contains the smaller one), then refines the best
probes by coordinate-wise golden section search inside the box. Score
callables are batched: an (n, d) array in, n values out.
"""

from concurrent.futures import Executor
from typing import Callable, List, Optional, Tuple
import logging

import numpy as np
from scipy.stats import qmc

from app.core.exceptions import InvalidArgumentError, SearchFailureError
from app.modules.level_set.config import LSESettings
from app.modules.level_set.core.schemas.search_schemas import DomainBounds, SearchBudget, SearchResult
from app.modules.level_set.core.services.golden_section import golden_section_max

logger = logging.getLogger(__name__)

BatchScore = Callable[[np.ndarray], np.ndarray]


def _score_batch(score: BatchScore, points: np.ndarray) -> np.ndarray:
    values = np.asarray(score(points), dtype=float).reshape(-1)
    if values.shape[0] != points.shape[0]:
        raise InvalidArgumentError(
            f"score returned {values.shape[0]} values for {points.shape[0]} points"
        )
    return np.where(np.isfinite(values), values, -np.inf)


def _score_point(score: BatchScore, x: np.ndarray) -> float:
    return float(_score_batch(score, x[None, :])[0])


def sample_initial_design(bounds: DomainBounds, n: int, seed: int) -> np.ndarray:
    """Latin hypercube design of n points inside bounds"""
    if n < 1:
        raise InvalidArgumentError("n >= 1 required")
    sampler = qmc.LatinHypercube(d=bounds.dim, seed=seed)
    return bounds.clip(bounds.scale_unit(sampler.random(n)))


def raw_probes(bounds: DomainBounds, n: int, seed: int) -> np.ndarray:
    """First n points of the seeded scrambled Halton sequence, scaled into bounds"""
    sampler = qmc.Halton(d=bounds.dim, scramble=True, seed=seed)
    return bounds.clip(bounds.scale_unit(sampler.random(n)))


def _refine(score: BatchScore, x0: np.ndarray, f0: float, bounds: DomainBounds,
            max_sweeps: int) -> Tuple[np.ndarray, float, int]:
    lower, upper = bounds.lower_array, bounds.upper_array
    step = LSESettings.REFINE_INITIAL_STEP * bounds.widths
    xtol = LSESettings.REFINE_XTOL * bounds.widths

    x = x0.copy()
    fx = f0
    evaluations = 0
    for _ in range(max_sweeps):
        sweep_start = fx
        for j in range(x.shape[0]):
            lo = max(lower[j], x[j] - step[j])
            hi = min(upper[j], x[j] + step[j])

            def line(v: float, j: int = j) -> float:
                trial = x.copy()
                trial[j] = v
                return _score_point(score, trial)

            v, fv, n = golden_section_max(line, lo, hi, xtol[j])
            evaluations += n
            if fv > fx:
                x[j] = v
                fx = fv
        if fx - sweep_start <= 1e-12 * (1.0 + abs(sweep_start)):
            break
    return x, fx, evaluations


def maximize_continuous(score: BatchScore, bounds: DomainBounds, budget: SearchBudget,
                        refine: bool = True, executor: Optional[Executor] = None) -> SearchResult:
    """Best-of-probes plus local refinement; deterministic given budget.seed.

    Restarts may run on an executor; results are reduced in restart order
    so serial and parallel runs agree exactly.
    """
    probes = raw_probes(bounds, budget.n_raw_samples, budget.seed)
    values = _score_batch(score, probes)
    finite = np.isfinite(values)
    if not np.any(finite):
        raise SearchFailureError(f"all {probes.shape[0]} probes returned non-finite scores")
    if not np.all(finite):
        logger.debug(f"Discarded {int(np.sum(~finite))} non-finite probes")

    # descending value, lowest probe index first among ties
    order = np.argsort(-values, kind="stable")
    order = order[finite[order]]
    evaluations = probes.shape[0]

    best_x = probes[order[0]]
    best_value = float(values[order[0]])
    if not refine:
        return SearchResult(argmax=tuple(best_x.tolist()), value=best_value, n_evaluations=evaluations)

    starts = order[: budget.n_restarts]

    def run(index: int) -> Tuple[np.ndarray, float, int]:
        return _refine(score, probes[index], float(values[index]), bounds, budget.max_refine_iters)

    if executor is not None:
        results: List[Tuple[np.ndarray, float, int]] = list(executor.map(run, starts))
    else:
        results = [run(index) for index in starts]

    for x, fx, n in results:
        evaluations += n
        if fx > best_value:
            best_x, best_value = x, fx

    return SearchResult(argmax=tuple(best_x.tolist()), value=best_value, n_evaluations=evaluations)


def maximize_on_grid(score: BatchScore, candidates) -> SearchResult:
    """Exact argmax over candidates; the first index wins ties"""
    candidates = np.asarray(candidates, dtype=float)
    if candidates.size == 0:
        raise InvalidArgumentError("candidates must not be empty")
    if candidates.ndim == 1:
        candidates = candidates.reshape(-1, 1)
    values = _score_batch(score, candidates)
    if not np.any(np.isfinite(values)):
        raise SearchFailureError(f"all {candidates.shape[0]} candidates returned non-finite scores")
    index = int(np.argmax(values))
    return SearchResult(
        argmax=tuple(candidates[index].tolist()),
        value=float(values[index]),
        n_evaluations=candidates.shape[0],
    )
