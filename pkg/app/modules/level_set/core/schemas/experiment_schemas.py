from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.modules.level_set.config import LSEProblemCatalog, LSESettings
from app.modules.level_set.core.schemas.acquisition_schemas import AcquisitionSpec
from app.modules.level_set.core.schemas.gp_schemas import KernelFamily
from app.modules.level_set.core.schemas.search_schemas import SearchBudget
from app.shared.schemas import Method


# Experiment Configuration
class ExperimentConfig(BaseModel):
    """One experiment: problem, method and loop settings shared by all seeds"""
    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    # problem: a built-in name or the path of a CSV dataset
    problem: str = "mc2d"
    point_columns: Optional[List[str]] = None
    value_column: Optional[str] = None
    threshold: Optional[float] = None

    method: Method = Method.C2LSE
    kernel: KernelFamily = KernelFamily(LSESettings.KERNEL)
    epsilon: float = LSESettings.EPSILON
    beta: float = LSESettings.BETA
    straddle_scale: float = LSESettings.STRADDLE_SCALE

    budget: int = LSESettings.BUDGET
    n_init: Optional[int] = None
    noise_variance: float = LSESettings.NOISE_VARIANCE
    seeds: List[int] = Field(default_factory=lambda: list(LSESettings.SEEDS))
    refit_every: int = LSESettings.REFIT_EVERY
    eval_every: int = LSESettings.EVAL_EVERY
    hyperparameter_sweeps: int = LSESettings.HYPERPARAMETER_SWEEPS

    n_restarts: int = LSESettings.N_RESTARTS
    n_raw_samples: Optional[int] = None
    max_refine_iters: int = LSESettings.MAX_REFINE_ITERS
    candidate_grid: Optional[List[int]] = None

    max_workers: Optional[int] = None
    record_wall_time: bool = False

    @field_validator("method", mode="before")
    @classmethod
    def _normalize_method(cls, value):
        return Method.normalize(value)

    @field_validator("epsilon")
    @classmethod
    def _check_epsilon(cls, value):
        if not value > 0:
            raise ValueError("epsilon > 0")
        return value

    @field_validator("beta", "straddle_scale", "noise_variance")
    @classmethod
    def _check_positive(cls, value, info):
        if not value > 0:
            raise ValueError(f"{info.field_name} > 0")
        return value

    @field_validator("budget", "refit_every", "eval_every", "n_restarts", "max_refine_iters")
    @classmethod
    def _check_count(cls, value, info):
        if value < 1:
            raise ValueError(f"{info.field_name} >= 1")
        return value

    @field_validator("n_init", "n_raw_samples", "max_workers")
    @classmethod
    def _check_optional_count(cls, value, info):
        if value is not None and value < 1:
            raise ValueError(f"{info.field_name} >= 1")
        return value

    @field_validator("hyperparameter_sweeps")
    @classmethod
    def _check_sweeps(cls, value):
        if value < 0:
            raise ValueError("hyperparameter_sweeps >= 0")
        return value

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, value):
        if not value:
            raise ValueError("seeds must not be empty")
        return value

    @field_validator("candidate_grid")
    @classmethod
    def _check_grid(cls, value):
        if value is not None and (not value or any(n < 1 for n in value)):
            raise ValueError("candidate_grid counts >= 1")
        return value

    @property
    def is_tabular(self) -> bool:
        return self.problem.strip().lower() not in LSEProblemCatalog.names()

    def resolved(self, dim: int, max_workers: int = LSESettings.MAX_WORKERS) -> "ExperimentConfig":
        """Copy with every dimension-dependent default filled in"""
        return self.model_copy(update={
            "n_init": self.n_init if self.n_init is not None else 2 * dim + 1,
            "n_raw_samples": (
                self.n_raw_samples if self.n_raw_samples is not None
                else LSESettings.RAW_SAMPLES_PER_DIM * dim
            ),
            "max_workers": self.max_workers if self.max_workers is not None else max_workers,
        })

    def acquisition_spec(self) -> AcquisitionSpec:
        return AcquisitionSpec(
            method=self.method,
            epsilon=self.epsilon,
            beta=self.beta,
            straddle_scale=self.straddle_scale,
        )

    def search_budget(self, dim: int, seed: int) -> SearchBudget:
        return SearchBudget.for_dim(
            dim,
            seed=seed,
            n_restarts=self.n_restarts,
            n_raw_samples=self.n_raw_samples,
            max_refine_iters=self.max_refine_iters,
        )


# Metrics
class MetricsRow(BaseModel):
    """F1 of the resolved classification plus raw label counts on the truth grid"""
    f1_super: float = Field(..., ge=0, le=1)
    f1_sub: float = Field(..., ge=0, le=1)
    f1_macro: float = Field(..., ge=0, le=1)
    n_super: int
    n_sub: int
    n_unknown: int
    super_vacuous: bool = False
    sub_vacuous: bool = False


# Run Records
class IterationRow(BaseModel):
    """One query of the active loop"""
    iteration: int
    query: Tuple[float, ...]
    observation: float
    acq_value: float
    cum_info_gain: float
    f1_macro: Optional[float] = None
    wall_ms: Optional[float] = None
    gp_inferences: int = 0

    # posterior at the query before it was observed
    mean: float
    variance: float
    outputscale: float
    c2lse_value: float
    info_gain_increment: float

    # filled at evaluated iterations
    grid_acq_max: Optional[float] = None
    unknown_far_count: Optional[int] = None
    low_confidence_count: Optional[int] = None


class RunRecord(BaseModel):
    """Trace of one seeded run"""
    seed: int
    problem: str
    method: Method
    threshold: float
    noise_variance: float
    epsilon: float
    beta: float
    initial_points: List[Tuple[float, ...]] = Field(default_factory=list)
    initial_f1: Optional[float] = None
    rows: List[IterationRow] = Field(default_factory=list)
    final_metrics: Optional[MetricsRow] = None
    aborted: bool = False
    failure: Optional[str] = None

    @property
    def queries(self) -> List[Tuple[float, ...]]:
        return [row.query for row in self.rows]

    @property
    def final_f1(self) -> Optional[float]:
        return self.final_metrics.f1_macro if self.final_metrics else None

    @property
    def total_inferences(self) -> int:
        return sum(row.gp_inferences for row in self.rows)


# Aggregates
class SummaryRow(BaseModel):
    iteration: int
    f1_mean: float
    f1_std: float
    n_runs: int


class ReplicateSummary(BaseModel):
    """All seeds of one configuration with the per-iteration F1 aggregate"""
    config: ExperimentConfig
    problem: str
    dim: int
    records: List[RunRecord]
    summary: List[SummaryRow]
    aborted_seeds: List[int] = Field(default_factory=list)

    @property
    def completed(self) -> List[RunRecord]:
        return [record for record in self.records if not record.aborted]

    @property
    def final_row(self) -> Optional[SummaryRow]:
        return self.summary[-1] if self.summary else None


class EpsilonSweepRow(BaseModel):
    epsilon: float
    f1_mean: Optional[float] = None
    f1_std: Optional[float] = None
    mean_pairwise_distance: Optional[float] = None
    n_runs: int
    n_aborted: int = 0


class GridCompareRow(BaseModel):
    grid: str
    baseline_f1_mean: Optional[float] = None
    baseline_f1_std: Optional[float] = None
    baseline_inferences: Optional[float] = None
    c2lse_f1_mean: Optional[float] = None
    c2lse_f1_std: Optional[float] = None
    c2lse_inferences: Optional[float] = None


# Diagnostics
class TheoryReport(BaseModel):
    """Convergence inequalities evaluated on one recorded run"""
    seed: int
    iterations: int
    c1: float
    information_gain: float
    gain_lower_bound: float
    gain_bound_holds: bool
    acq_sum_squared: float
    chain_bound: float
    chain_bound_holds: bool
    headline_bound: float
    headline_bound_holds: bool
    first_confident_iteration: Optional[int] = None
    unknown_far_count: Optional[int] = None
    low_confidence_count: Optional[int] = None
    linkage_holds: bool = True
    violations: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return (
            self.gain_bound_holds
            and self.chain_bound_holds
            and self.headline_bound_holds
            and self.linkage_holds
        )
