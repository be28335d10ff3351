from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class KernelFamily(str, Enum):
    MATERN_5_2 = "matern52"
    SQUARED_EXPONENTIAL = "squared_exponential"


class KernelSpec(BaseModel):
    """Stationary kernel k(x, x') with per-dimension lengthscales"""
    model_config = ConfigDict(frozen=True)

    family: KernelFamily = KernelFamily.MATERN_5_2
    lengthscales: Tuple[float, ...] = Field(..., min_length=1)
    outputscale: float = Field(1.0, gt=0)

    @field_validator("lengthscales")
    @classmethod
    def _positive_lengthscales(cls, value):
        if any(not (v > 0) for v in value):
            raise ValueError("all lengthscales must be > 0")
        return tuple(float(v) for v in value)

    @property
    def dim(self) -> int:
        return len(self.lengthscales)

    def with_log_params(self, log_params: np.ndarray) -> "KernelSpec":
        """Build a spec from [log lengthscales..., log outputscale]"""
        return KernelSpec(
            family=self.family,
            lengthscales=tuple(float(v) for v in np.exp(log_params[:-1])),
            outputscale=float(np.exp(log_params[-1])),
        )

    def log_params(self) -> np.ndarray:
        return np.log(np.array(list(self.lengthscales) + [self.outputscale], dtype=float))


@dataclass(frozen=True)
class ObservationSet:
    """Queried points (t, d) and their noisy responses (t,)"""
    points: np.ndarray
    responses: np.ndarray
    noise_variance: float

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        responses = np.asarray(self.responses, dtype=float).reshape(-1)
        if points.shape[0] != responses.shape[0]:
            raise ValueError(
                f"points and responses must have equal length ({points.shape[0]} != {responses.shape[0]})"
            )
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be >= 0")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "responses", responses)

    @classmethod
    def empty(cls, dim: int, noise_variance: float) -> "ObservationSet":
        return cls(np.empty((0, dim)), np.empty(0), noise_variance)

    def __len__(self) -> int:
        return int(self.responses.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def append(self, x: np.ndarray, y: float) -> "ObservationSet":
        """Return a new set with one more observation"""
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return ObservationSet(
            np.vstack([self.points, x]),
            np.append(self.responses, float(y)),
            self.noise_variance,
        )


@dataclass(frozen=True)
class GPosterior:
    """Fitted exact GP: Cholesky factor of K + (sigma^2 + jitter) I and alpha"""
    kernel: KernelSpec
    observations: ObservationSet
    gram_factor: np.ndarray
    alpha: np.ndarray
    offset: float = 0.0
    jitter: float = 0.0

    @property
    def is_prior(self) -> bool:
        return len(self.observations) == 0


class HyperparameterFit(BaseModel):
    """Outcome of marginal-likelihood fitting"""
    model_config = ConfigDict(frozen=True)

    kernel: KernelSpec
    log_marginal_likelihood: float
    used_fallback: bool = False
    n_evaluations: int = 0
