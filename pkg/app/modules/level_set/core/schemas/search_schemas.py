from pydantic import BaseModel, ConfigDict, Field

from app.modules.level_set.config import LSESettings
from app.shared.schemas import DomainBounds

__all__ = ["DomainBounds", "SearchBudget", "SearchResult"]


class SearchBudget(BaseModel):
    """Effort spent maximizing one acquisition surface"""
    model_config = ConfigDict(frozen=True)

    n_restarts: int = Field(LSESettings.N_RESTARTS, ge=1)
    n_raw_samples: int = Field(..., ge=1)
    max_refine_iters: int = Field(LSESettings.MAX_REFINE_ITERS, ge=1)
    seed: int = 0

    @classmethod
    def for_dim(cls, dim: int, seed: int = 0, **overrides) -> "SearchBudget":
        values = {"n_raw_samples": LSESettings.RAW_SAMPLES_PER_DIM * dim, "seed": seed}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class SearchResult(BaseModel):
    """Best point found and the number of score evaluations spent"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    argmax: tuple
    value: float
    n_evaluations: int
