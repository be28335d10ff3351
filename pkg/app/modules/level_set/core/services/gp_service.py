"""
Exact Gaussian-process regression: kernels, Cholesky posterior,
log marginal likelihood, hyperparameter fitting and information gain.

Posterior quantities follow the usual Cholesky route: L = chol(K + s2 I),
alpha = L^T \\ (L \\ y), mean = k_t(x)^T alpha, var = k(x,x) - |L \\ k_t(x)|^2.
"""

from typing import Iterable, List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np
from scipy.linalg import cho_solve, cholesky, ldl, solve_triangular
from scipy.spatial.distance import cdist

from app.core.exceptions import InvalidArgumentError, NumericalFailureError
from app.modules.level_set.config import LSESettings
from app.modules.level_set.core.schemas.gp_schemas import (
    GPosterior, HyperparameterFit, KernelFamily, KernelSpec, ObservationSet,
)
from app.modules.level_set.core.services.golden_section import golden_section_max

logger = logging.getLogger(__name__)

SQRT5 = math.sqrt(5.0)
LOG_2PI = math.log(2.0 * math.pi)


# ==================== KERNELS ====================

def _as_points(x, dim: int) -> np.ndarray:
    points = np.atleast_2d(np.asarray(x, dtype=float))
    if points.shape[1] != dim:
        raise InvalidArgumentError(
            f"point dimension {points.shape[1]} does not match kernel dimension {dim}"
        )
    return points


def kernel_matrix(spec: KernelSpec, a, b) -> np.ndarray:
    """Covariance matrix between the rows of a (n, d) and b (m, d)"""
    a = _as_points(a, spec.dim)
    b = _as_points(b, spec.dim)
    scale = np.asarray(spec.lengthscales, dtype=float)
    r = cdist(a / scale, b / scale)
    if spec.family == KernelFamily.MATERN_5_2:
        k = (1.0 + SQRT5 * r + 5.0 * r * r / 3.0) * np.exp(-SQRT5 * r)
    else:
        k = np.exp(-0.5 * r * r)
    return spec.outputscale * k


def kernel_eval(spec: KernelSpec, a, b) -> float:
    """k(a, b) for two single points"""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape[0] != spec.dim or b.shape[0] != spec.dim:
        raise InvalidArgumentError(
            f"dimension mismatch: got {a.shape[0]} and {b.shape[0]}, kernel has {spec.dim}"
        )
    return float(kernel_matrix(spec, a[None, :], b[None, :])[0, 0])


# ==================== POSTERIOR ====================

def _smallest_pivot(matrix: np.ndarray) -> float:
    _, d, _ = ldl(matrix, lower=True)
    return float(np.min(np.diag(d)))


def _factorize(gram: np.ndarray, jitter_ladder: Sequence[float]) -> Tuple[np.ndarray, float]:
    try:
        return cholesky(gram, lower=True, check_finite=False), 0.0
    except np.linalg.LinAlgError:
        pass

    eye = np.eye(gram.shape[0])
    for jitter in jitter_ladder:
        try:
            factor = cholesky(gram + jitter * eye, lower=True, check_finite=False)
            logger.debug(f"Gram matrix factorized with jitter {jitter:.1e}")
            return factor, float(jitter)
        except np.linalg.LinAlgError:
            continue

    raise NumericalFailureError(
        f"Gram matrix of {gram.shape[0]} points is not positive definite after jitter escalation",
        smallest_pivot=_smallest_pivot(gram),
    )


def fit(kernel: KernelSpec, obs: ObservationSet, offset: float = 0.0,
        jitter_ladder: Sequence[float] = LSESettings.JITTER_LADDER) -> GPosterior:
    """Condition the zero-mean GP on obs; responses are modelled as offset + f(x)"""
    t = len(obs)
    if t == 0:
        return GPosterior(
            kernel=kernel,
            observations=obs,
            gram_factor=np.empty((0, 0)),
            alpha=np.empty(0),
            offset=offset,
        )
    if obs.dim != kernel.dim:
        raise InvalidArgumentError(f"observations have dimension {obs.dim}, kernel has {kernel.dim}")
    if not np.all(np.isfinite(obs.responses)):
        raise InvalidArgumentError("responses must be finite")

    gram = kernel_matrix(kernel, obs.points, obs.points)
    gram[np.diag_indices_from(gram)] += obs.noise_variance
    factor, jitter = _factorize(gram, jitter_ladder)
    alpha = cho_solve((factor, True), obs.responses - offset, check_finite=False)

    return GPosterior(
        kernel=kernel,
        observations=obs,
        gram_factor=factor,
        alpha=alpha,
        offset=offset,
        jitter=jitter,
    )


def posterior_mean_var(gp: GPosterior, x) -> Tuple[Union[float, np.ndarray], Union[float, np.ndarray]]:
    """Posterior mean and variance at one point (d,) or a batch (n, d)"""
    single = np.ndim(x) == 1
    points = _as_points(x, gp.kernel.dim)
    prior_var = gp.kernel.outputscale

    if gp.is_prior:
        mean = np.full(points.shape[0], gp.offset)
        var = np.full(points.shape[0], prior_var)
    else:
        cross = kernel_matrix(gp.kernel, points, gp.observations.points)
        mean = gp.offset + cross @ gp.alpha
        v = solve_triangular(gp.gram_factor, cross.T, lower=True, check_finite=False)
        var = np.clip(prior_var - np.einsum("ij,ij->j", v, v), 0.0, prior_var)

    if single:
        return float(mean[0]), float(var[0])
    return mean, var


def sequential_variances(kernel: KernelSpec, points, noise_variance: float) -> np.ndarray:
    """sigma^2_{t-1}(x_t) for each point of a query sequence under a fixed kernel"""
    points = _as_points(points, kernel.dim)
    obs = ObservationSet.empty(kernel.dim, noise_variance)
    variances = np.empty(points.shape[0])
    for t, x in enumerate(points):
        _, variances[t] = posterior_mean_var(fit(kernel, obs), x)
        obs = obs.append(x, 0.0)
    return variances


# ==================== MARGINAL LIKELIHOOD ====================

def log_marginal_likelihood(kernel: KernelSpec, obs: ObservationSet, offset: float = 0.0) -> float:
    """log p(y | X, kernel, s2); 0 for an empty observation set"""
    t = len(obs)
    if t == 0:
        return 0.0
    gp = fit(kernel, obs, offset=offset)
    y = obs.responses - offset
    return float(
        -0.5 * y @ gp.alpha
        - np.sum(np.log(np.diag(gp.gram_factor)))
        - 0.5 * t * LOG_2PI
    )


def hyperparameter_bounds(dim: int, widths: Optional[np.ndarray] = None) -> np.ndarray:
    """(dim + 1, 2) log-space bounds: lengthscales relative to widths, then outputscale"""
    widths = np.ones(dim) if widths is None else np.asarray(widths, dtype=float)
    lo_l, hi_l = LSESettings.LENGTHSCALE_BOUNDS
    lo_s, hi_s = LSESettings.OUTPUTSCALE_BOUNDS
    bounds = np.empty((dim + 1, 2))
    bounds[:dim, 0] = np.log(lo_l * widths)
    bounds[:dim, 1] = np.log(hi_l * widths)
    bounds[dim] = (math.log(lo_s), math.log(hi_s))
    return bounds


def fit_hyperparameters(obs: ObservationSet, init_grid: List[KernelSpec], *,
                        offset: float = 0.0,
                        widths: Optional[np.ndarray] = None,
                        max_sweeps: int = LSESettings.HYPERPARAMETER_SWEEPS,
                        window: float = LSESettings.HYPERPARAMETER_WINDOW,
                        tol: float = LSESettings.HYPERPARAMETER_TOL) -> HyperparameterFit:
    """Maximize the log marginal likelihood by multistart coordinate-wise golden section.

    Each start is refined one log-hyperparameter at a time on a window of
    +-window log units around its current value (clipped to the bounds); a
    move is kept only when it raises the likelihood, so the result never
    scores below any init_grid entry.
    """
    if len(obs) == 0:
        raise InvalidArgumentError("fit_hyperparameters needs at least one observation")
    if not init_grid:
        raise InvalidArgumentError("init_grid must not be empty")

    bounds = hyperparameter_bounds(obs.dim, widths)
    evaluations = 0

    def objective(log_params: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        try:
            return log_marginal_likelihood(init_grid[0].with_log_params(log_params), obs, offset)
        except (NumericalFailureError, ValueError):
            return -math.inf

    best_spec: Optional[KernelSpec] = None
    best_value = -math.inf
    for spec in init_grid:
        value = objective(spec.log_params())
        if value > best_value:
            best_spec, best_value = spec, value

    ascended = False
    for spec in init_grid:
        current = np.clip(spec.log_params(), bounds[:, 0], bounds[:, 1])
        current_value = objective(current)
        if not math.isfinite(current_value):
            continue
        ascended = True

        for _ in range(max_sweeps):
            sweep_start = current_value
            for j in range(current.shape[0]):
                lo = max(bounds[j, 0], current[j] - window)
                hi = min(bounds[j, 1], current[j] + window)

                def line(v: float, j: int = j) -> float:
                    trial = current.copy()
                    trial[j] = v
                    return objective(trial)

                v, value, _ = golden_section_max(line, lo, hi, tol)
                if value > current_value:
                    current[j] = v
                    current_value = value
            if current_value - sweep_start < tol:
                break

        if current_value > best_value:
            best_spec = init_grid[0].with_log_params(current)
            best_value = current_value

    if not ascended or best_spec is None:
        fallback = best_spec or init_grid[0]
        logger.warning("All hyperparameter starts failed numerically; keeping best initial kernel")
        return HyperparameterFit(
            kernel=fallback,
            log_marginal_likelihood=best_value,
            used_fallback=True,
            n_evaluations=evaluations,
        )

    return HyperparameterFit(
        kernel=best_spec,
        log_marginal_likelihood=best_value,
        n_evaluations=evaluations,
    )


def default_init_grid(family: KernelFamily, widths: np.ndarray, responses: np.ndarray,
                      offset: float = 0.0) -> List[KernelSpec]:
    """Starting kernels: a few lengthscale fractions of the box, outputscale from the data"""
    centered = np.asarray(responses, dtype=float) - offset
    outputscale = float(np.mean(centered ** 2)) if centered.size else 1.0
    lo_s, hi_s = LSESettings.OUTPUTSCALE_BOUNDS
    outputscale = min(max(outputscale, lo_s), hi_s)
    return [
        KernelSpec(family=family, lengthscales=tuple(float(f * w) for w in widths), outputscale=outputscale)
        for f in LSESettings.INIT_LENGTHSCALE_FRACTIONS
    ]


# ==================== INFORMATION GAIN ====================

def information_gain(variances: Iterable[float], noise_variance: float) -> float:
    """Realized information gain 1/2 sum log(1 + sigma^2_{t-1}(x_t) / s2)"""
    if noise_variance <= 0:
        raise InvalidArgumentError("noise_variance must be > 0 for information gain")
    v = np.asarray(list(variances), dtype=float)
    if v.size == 0:
        return 0.0
    if np.any(v < 0):
        raise InvalidArgumentError("variances must be >= 0")
    return float(0.5 * np.sum(np.log1p(v / noise_variance)))


def information_gain_gram(kernel: KernelSpec, points, noise_variance: float) -> float:
    """1/2 log det(I + K_T / s2) over the queried points"""
    if noise_variance <= 0:
        raise InvalidArgumentError("noise_variance must be > 0 for information gain")
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return 0.0
    gram = kernel_matrix(kernel, points, points)
    sign, logdet = np.linalg.slogdet(np.eye(gram.shape[0]) + gram / noise_variance)
    if sign <= 0:
        raise NumericalFailureError("I + K/s2 is not positive definite", smallest_pivot=_smallest_pivot(gram))
    return float(0.5 * logdet)


def information_gain_lower_bound(variances: Iterable[float], noise_variance: float,
                                 outputscales: Union[float, Iterable[float]] = 1.0) -> float:
    """Sum of log(1 + s/s2)/2 * (sigma^2_{t-1}(x_t) / s) with variances normalized by s.

    Each term is a lower bound of the matching realized gain term as long
    as the normalized variance is at most 1, which the posterior clamp
    guarantees.
    """
    v = np.asarray(list(variances), dtype=float)
    if v.size == 0:
        return 0.0
    s = np.broadcast_to(np.asarray(outputscales, dtype=float), v.shape)
    return float(np.sum(0.5 * np.log1p(s / noise_variance) * (v / s)))
