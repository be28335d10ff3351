from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


# --- Enums ---
class Label(str, Enum):
    """Level set label of a point (the Algorithm output sets)"""
    SUPER = "SUPER"
    SUB = "SUB"
    UNKNOWN = "UNKNOWN"


class Method(str, Enum):
    C2LSE = "c2lse"
    STRADDLE = "straddle"
    LSE_AMBIGUITY = "lse_ambiguity"
    RANDOM = "random"

    @classmethod
    def normalize(cls, value):
        """Accept upper-case and dashed spellings"""
        if isinstance(value, str):
            return value.strip().lower().replace("-", "_")
        return value


# --- Domain ---
class DomainBounds(BaseModel):
    """Axis-aligned box S = [lower, upper]"""
    model_config = ConfigDict(frozen=True)

    lower: Tuple[float, ...] = Field(..., min_length=1)
    upper: Tuple[float, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_box(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same dimension")
        for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if not lo < hi:
                raise ValueError(f"lower[{i}] < upper[{i}] violated ({lo} >= {hi})")
        return self

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lower_array(self) -> np.ndarray:
        return np.asarray(self.lower, dtype=float)

    @property
    def upper_array(self) -> np.ndarray:
        return np.asarray(self.upper, dtype=float)

    @property
    def widths(self) -> np.ndarray:
        return self.upper_array - self.lower_array

    def contains(self, x, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower_array - atol) and np.all(x <= self.upper_array + atol))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower_array, self.upper_array)

    def scale_unit(self, u: np.ndarray) -> np.ndarray:
        """Map points from the unit cube into the box"""
        return self.lower_array + u * self.widths

    @classmethod
    def from_lists(cls, lower: List[float], upper: List[float]) -> "DomainBounds":
        return cls(lower=tuple(float(v) for v in lower), upper=tuple(float(v) for v in upper))
