"""Acquisition scores and the beta-band classification rule.

All scores accept scalars or numpy arrays (broadcast together) and return
a float for scalar input.
"""

from typing import List, Union
import logging
import math

import numpy as np
from scipy.special import erf

from app.core.exceptions import InvalidArgumentError
from app.modules.level_set.config import LSESettings
from app.modules.level_set.core.schemas.acquisition_schemas import AcquisitionSpec
from app.modules.level_set.core.schemas.gp_schemas import GPosterior
from app.modules.level_set.core.services.gp_service import posterior_mean_var
from app.shared.schemas import Label, Method

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SUPER_CODE = 1
SUB_CODE = -1
UNKNOWN_CODE = 0

_CODE_TO_LABEL = {SUPER_CODE: Label.SUPER, SUB_CODE: Label.SUB, UNKNOWN_CODE: Label.UNKNOWN}


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def c2lse_score(mean: ArrayLike, stddev: ArrayLike, h: float, epsilon: float) -> ArrayLike:
    """sigma / max(epsilon, |mu - h|)"""
    if not epsilon > 0:
        raise InvalidArgumentError("epsilon > 0 required")
    mean = np.asarray(mean, dtype=float)
    stddev = np.asarray(stddev, dtype=float)
    return _out(stddev / np.maximum(epsilon, np.abs(mean - h)))


def confidence_score(mean: ArrayLike, stddev: ArrayLike, h: float) -> ArrayLike:
    """|P(f > h) - P(f < h)| = 2 Phi(|mu - h| / sigma) - 1; 1 where sigma = 0"""
    mean = np.asarray(mean, dtype=float)
    stddev = np.asarray(stddev, dtype=float)
    degenerate = stddev <= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.abs(mean - h) / np.where(degenerate, 1.0, stddev)
    # 2 Phi(z) - 1 == erf(z / sqrt 2), without the cancellation near 1
    confidence = np.where(degenerate, 1.0, erf(z / math.sqrt(2.0)))
    if np.any(degenerate):
        logger.debug(f"confidence_score: {int(np.sum(degenerate))} point(s) with zero stddev set to 1")
    return _out(confidence)


def confidence_floor(beta: float) -> float:
    """2 Phi(beta) - 1"""
    return float(erf(beta / math.sqrt(2.0)))


def straddle_score(mean: ArrayLike, stddev: ArrayLike, h: float,
                   scale: float = LSESettings.STRADDLE_SCALE) -> ArrayLike:
    """scale * sigma - |mu - h|"""
    mean = np.asarray(mean, dtype=float)
    stddev = np.asarray(stddev, dtype=float)
    return _out(scale * stddev - np.abs(mean - h))


def lse_ambiguity_score(mean: ArrayLike, stddev: ArrayLike, h: float, beta: float) -> ArrayLike:
    """min(ucb - h, h - lcb) with ucb, lcb = mu +- beta sigma"""
    mean = np.asarray(mean, dtype=float)
    stddev = np.asarray(stddev, dtype=float)
    return _out(np.minimum(mean + beta * stddev - h, h - mean + beta * stddev))


def acquisition_surface(spec: AcquisitionSpec, mean: ArrayLike, stddev: ArrayLike, h: float) -> ArrayLike:
    """Dispatch to the score selected by spec.method"""
    if spec.method == Method.C2LSE:
        return c2lse_score(mean, stddev, h, spec.epsilon)
    if spec.method == Method.STRADDLE:
        return straddle_score(mean, stddev, h, spec.straddle_scale)
    if spec.method == Method.LSE_AMBIGUITY:
        return lse_ambiguity_score(mean, stddev, h, spec.beta)
    raise InvalidArgumentError(f"method {spec.method.value} has no acquisition surface")


# ==================== CLASSIFICATION ====================

def classify_codes(mean: ArrayLike, stddev: ArrayLike, h: float, beta: float) -> np.ndarray:
    """Vectorized beta-band rule: +1 SUPER, -1 SUB, 0 UNKNOWN (ties are UNKNOWN)"""
    mean = np.asarray(mean, dtype=float)
    stddev = np.asarray(stddev, dtype=float)
    codes = np.zeros(np.broadcast(mean, stddev).shape, dtype=int)
    codes[mean - beta * stddev > h] = SUPER_CODE
    codes[mean + beta * stddev < h] = SUB_CODE
    return codes


def classify_point(mean: float, stddev: float, h: float, beta: float) -> Label:
    if stddev < 0 or not beta > 0:
        raise InvalidArgumentError("classify_point needs stddev >= 0 and beta > 0")
    if mean - beta * stddev > h:
        return Label.SUPER
    if mean + beta * stddev < h:
        return Label.SUB
    return Label.UNKNOWN


def classify_set(gp: GPosterior, points, h: float, beta: float) -> List[Label]:
    """Classify every point under the posterior, order preserved"""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise InvalidArgumentError("classify_set needs at least one point")
    mean, var = posterior_mean_var(gp, np.atleast_2d(points))
    return [_CODE_TO_LABEL[int(c)] for c in classify_codes(mean, np.sqrt(var), h, beta)]
