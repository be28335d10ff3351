"""
Active level set estimation loop and the experiment drivers built on it.

A run seeds a Latin hypercube design, then for t = 1..T refits the kernel
on schedule, maximizes the configured acquisition, observes and appends.
Every random stream is derived from the run seed, so a run is a pure
function of (config, seed).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple
import logging
import math
import time

import numpy as np
from scipy.spatial.distance import pdist
from sklearn.metrics import f1_score

from app.core.event_bus import EventBus
from app.core.exceptions import (
    ConfigError, InvalidArgumentError, NumericalFailureError, SearchFailureError,
)
from app.core import settings
from app.modules.level_set.core.schemas.experiment_schemas import (
    EpsilonSweepRow, ExperimentConfig, GridCompareRow, IterationRow, MetricsRow,
    ReplicateSummary, RunRecord, SummaryRow,
)
from app.modules.level_set.core.schemas.gp_schemas import GPosterior, KernelSpec, ObservationSet
from app.modules.level_set.core.schemas.problem_schemas import GroundTruth, LevelSetProblem
from app.modules.level_set.core.services import gp_service
from app.modules.level_set.core.services.acquisition_service import (
    SUB_CODE, SUPER_CODE, UNKNOWN_CODE, acquisition_surface, c2lse_score,
    classify_codes, confidence_floor, confidence_score,
)
from app.modules.level_set.core.services.problem_service import (
    build_ground_truth, grid_points, load_tabular_dataset, make_problem, observe,
)
from app.modules.level_set.core.services.search_service import (
    maximize_continuous, maximize_on_grid, sample_initial_design,
)
from app.modules.level_set.events.run_events import (
    RunAbortedEvent, RunCompletedEvent, RunEvent, RunIterationEvent, RunStartedEvent,
)
from app.shared.schemas import Method

logger = logging.getLogger(__name__)

LINKAGE_TOL = 1e-12

# spawn keys of the independent random streams of one run
_NOISE_STREAM = 0
_RANDOM_QUERY_STREAM = 1
_SEARCH_STREAM = 2
_DESIGN_STREAM = 3


def _stream_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1)[0])


def _stream_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# ==================== METRICS ====================

def _metrics(mean: np.ndarray, var: np.ndarray, truth: GroundTruth, h: float, beta: float) -> MetricsRow:
    codes = classify_codes(mean, np.sqrt(var), h, beta)
    # UNKNOWN commits to the side of the posterior mean; mean == h counts as SUB
    resolved = np.where(codes == UNKNOWN_CODE, np.where(mean > h, SUPER_CODE, SUB_CODE), codes)
    y_true = truth.is_super.astype(int)
    y_pred = (resolved == SUPER_CODE).astype(int)
    f1_super, f1_sub = f1_score(y_true, y_pred, labels=[1, 0], average=None, zero_division=1.0)

    return MetricsRow(
        f1_super=float(f1_super),
        f1_sub=float(f1_sub),
        f1_macro=0.5 * (float(f1_super) + float(f1_sub)),
        n_super=int(np.sum(codes == SUPER_CODE)),
        n_sub=int(np.sum(codes == SUB_CODE)),
        n_unknown=int(np.sum(codes == UNKNOWN_CODE)),
        super_vacuous=bool(not y_true.any() and not y_pred.any()),
        sub_vacuous=bool(y_true.all() and y_pred.all()),
    )


def evaluate_f1(gp: GPosterior, truth: GroundTruth, h: float, beta: float) -> MetricsRow:
    """Macro F1 of the beta-band classification against the truth labels"""
    if len(truth) == 0:
        raise InvalidArgumentError("truth must not be empty")
    mean, var = gp_service.posterior_mean_var(gp, truth.points)
    return _metrics(mean, var, truth, h, beta)


def linkage_counts(mean: np.ndarray, var: np.ndarray, h: float, epsilon: float,
                   beta: float) -> Tuple[int, int]:
    """UNKNOWN points farther than epsilon from h, and points beyond epsilon
    whose confidence falls below 2 Phi(beta) - 1"""
    std = np.sqrt(var)
    margin = np.abs(mean - h)
    far = margin > epsilon + LINKAGE_TOL
    codes = classify_codes(mean, std, h, beta)
    unknown_far = int(np.sum(far & (codes == UNKNOWN_CODE)))
    confidence = np.asarray(confidence_score(mean, std, h))
    low_confidence = int(np.sum(far & (confidence < confidence_floor(beta) - LINKAGE_TOL)))
    return unknown_far, low_confidence


def mean_pairwise_distance(records: Sequence[RunRecord]) -> Optional[float]:
    """Average over runs of the mean Euclidean distance between queried points"""
    distances = [
        float(np.mean(pdist(np.asarray(record.queries, dtype=float))))
        for record in records if len(record.rows) > 1
    ]
    return float(np.mean(distances)) if distances else None


def summarize_records(records: Sequence[RunRecord]) -> List[SummaryRow]:
    """Per-iteration mean and population std of macro F1 over completed runs"""
    completed = [record for record in records if not record.aborted]
    if not completed:
        return []

    summary: List[SummaryRow] = []
    initial = [record.initial_f1 for record in completed if record.initial_f1 is not None]
    if len(initial) == len(completed):
        summary.append(_summary_row(0, initial))

    budget = min(len(record.rows) for record in completed)
    for t in range(budget):
        values = [record.rows[t].f1_macro for record in completed]
        if any(v is None for v in values):
            continue
        summary.append(_summary_row(completed[0].rows[t].iteration, values))
    return summary


def _summary_row(iteration: int, values: Sequence[float]) -> SummaryRow:
    array = np.asarray(values, dtype=float)
    return SummaryRow(
        iteration=iteration,
        f1_mean=float(np.mean(array)),
        f1_std=float(np.std(array)),
        n_runs=int(array.shape[0]),
    )


# ==================== PROBLEM SETUP ====================

def prepare_problem(config: ExperimentConfig) -> Tuple[LevelSetProblem, GroundTruth]:
    """Build the configured problem with the config's noise and its truth grid"""
    if config.is_tabular:
        if config.threshold is None:
            raise ConfigError("threshold is required for tabular datasets", key="threshold")
        problem = load_tabular_dataset(
            config.problem,
            config.point_columns,
            config.value_column,
            config.threshold,
            noise_variance=config.noise_variance,
        )
    else:
        problem = make_problem(config.problem, noise_variance=config.noise_variance)
        if config.threshold is not None:
            problem = replace(problem, threshold=float(config.threshold))
    return problem, build_ground_truth(problem)


def candidate_points(config: ExperimentConfig, problem: LevelSetProblem) -> Optional[np.ndarray]:
    """Finite candidate set for grid mode, None for continuous search"""
    if config.candidate_grid is not None:
        if len(config.candidate_grid) != problem.dim:
            raise ConfigError(
                f"candidate_grid needs {problem.dim} counts, got {len(config.candidate_grid)}",
                key="candidate_grid",
            )
        points = grid_points(problem.bounds, config.candidate_grid)
        if problem.is_tabular:
            # lookups raise on grid points that are not stored rows
            problem.oracle.evaluate(points)
        return points
    if problem.is_tabular:
        return problem.oracle.points
    return None


# ==================== SERVICE ====================

class ExperimentService:
    """Runs active loops and the replicate, sweep and grid experiments"""

    def __init__(self, event_bus: Optional[EventBus] = None):
        self.event_bus = event_bus
        self.logger = logging.getLogger(__name__)

    def _publish(self, event: RunEvent) -> None:
        if self.event_bus is not None:
            self.event_bus.publish(event.event_type, event.to_dict(), source_module="level_set")

    # ---------- single run ----------

    def _refit(self, config: ExperimentConfig, kernel: Optional[KernelSpec], obs: ObservationSet,
               problem: LevelSetProblem) -> KernelSpec:
        widths = problem.bounds.widths
        grid = gp_service.default_init_grid(config.kernel, widths, obs.responses, offset=problem.threshold)
        if kernel is not None:
            grid.append(kernel)
        result = gp_service.fit_hyperparameters(
            obs,
            grid,
            offset=problem.threshold,
            widths=widths,
            max_sweeps=config.hyperparameter_sweeps,
        )
        if result.used_fallback:
            self.logger.warning("Hyperparameter fit fell back to an initial kernel")
        return result.kernel

    def _select(self, config: ExperimentConfig, problem: LevelSetProblem, gp: GPosterior,
                candidates: Optional[np.ndarray], seed: int, t: int,
                random_rng: np.random.Generator) -> Tuple[np.ndarray, float, int]:
        """Next query, its acquisition value and the posterior evaluations spent"""
        h = problem.threshold

        if config.method == Method.RANDOM:
            if candidates is None:
                x = problem.bounds.scale_unit(random_rng.random(problem.dim))
            else:
                x = candidates[int(random_rng.integers(candidates.shape[0]))]
            mean, var = gp_service.posterior_mean_var(gp, x)
            return x, float(c2lse_score(mean, math.sqrt(var), h, config.epsilon)), 0

        spec = config.acquisition_spec()
        evaluations = 0

        def score(points: np.ndarray) -> np.ndarray:
            nonlocal evaluations
            evaluations += points.shape[0]
            mean, var = gp_service.posterior_mean_var(gp, points)
            return np.asarray(acquisition_surface(spec, mean, np.sqrt(var), h))

        if candidates is None:
            result = maximize_continuous(
                score, problem.bounds, config.search_budget(problem.dim, _stream_seed(seed, _SEARCH_STREAM, t))
            )
        else:
            result = maximize_on_grid(score, candidates)
        return np.asarray(result.argmax, dtype=float), result.value, evaluations

    def _lse_grid_step(self, config: ExperimentConfig, gp: GPosterior, candidates: np.ndarray,
                       active: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, float, int]:
        """Retire candidates the beta-band rule has classified and query the most ambiguous survivor.

        One posterior pass over the open candidates serves both steps, so the
        inference count is the grid size minus the candidates retired so far.
        When every candidate is classified the full grid reopens and only the
        retired candidates are evaluated again.
        """
        index = np.flatnonzero(active)
        mean, var = gp_service.posterior_mean_var(gp, candidates[index])
        inferences = int(index.shape[0])
        undecided = classify_codes(mean, np.sqrt(var), h, config.beta) == UNKNOWN_CODE
        active = active.copy()
        active[index[~undecided]] = False

        if undecided.any():
            index, mean, var = index[undecided], mean[undecided], var[undecided]
        else:
            self.logger.debug("Every candidate classified; reopening the full grid")
            active[:] = True
            retired = np.flatnonzero(~np.isin(np.arange(candidates.shape[0]), index))
            full_mean = np.empty(candidates.shape[0])
            full_var = np.empty(candidates.shape[0])
            full_mean[index], full_var[index] = mean, var
            if retired.size:
                full_mean[retired], full_var[retired] = gp_service.posterior_mean_var(gp, candidates[retired])
            inferences += int(retired.size)
            index = np.arange(candidates.shape[0])
            mean, var = full_mean, full_var

        scores = np.asarray(acquisition_surface(config.acquisition_spec(), mean, np.sqrt(var), h), dtype=float)
        # first index wins ties, as on any grid
        best = int(np.argmax(scores))
        return active, candidates[index[best]], float(scores[best]), inferences

    def _evaluate(self, config: ExperimentConfig, gp: GPosterior, truth: GroundTruth,
                  h: float) -> Tuple[MetricsRow, float, Optional[int], Optional[int]]:
        mean, var = gp_service.posterior_mean_var(gp, truth.points)
        metrics = _metrics(mean, var, truth, h, config.beta)
        grid_acq_max = float(np.max(c2lse_score(mean, np.sqrt(var), h, config.epsilon)))
        unknown_far = low_confidence = None
        if grid_acq_max <= 1.0 / config.beta:
            unknown_far, low_confidence = linkage_counts(mean, var, h, config.epsilon, config.beta)
        return metrics, grid_acq_max, unknown_far, low_confidence

    def run_active_loop(self, config: ExperimentConfig, problem: LevelSetProblem,
                        truth: GroundTruth, seed: int) -> RunRecord:
        """One seeded run of the active loop; numerical failure returns a partial, aborted record"""
        config = config.resolved(problem.dim, settings.MAX_WORKERS)
        h = problem.threshold
        nv = problem.noise_variance
        noise_rng = _stream_rng(seed, _NOISE_STREAM)
        random_rng = _stream_rng(seed, _RANDOM_QUERY_STREAM)

        record = RunRecord(
            seed=seed,
            problem=problem.name,
            method=config.method,
            threshold=h,
            noise_variance=nv,
            epsilon=config.epsilon,
            beta=config.beta,
        )
        self._publish(RunStartedEvent(problem.name, config.method.value, seed, config.budget, config.n_init))

        candidates = candidate_points(config, problem)
        retiring = candidates is not None and config.method == Method.LSE_AMBIGUITY
        active = np.ones(candidates.shape[0], dtype=bool) if retiring else None

        design = sample_initial_design(problem.bounds, config.n_init, _stream_seed(seed, _DESIGN_STREAM))
        if problem.is_tabular:
            design = problem.oracle.snap(design)
        record.initial_points = [tuple(x.tolist()) for x in design]

        obs = ObservationSet.empty(problem.dim, nv)
        for x in design:
            obs = obs.append(x, observe(problem, x, noise_rng))

        kernel: Optional[KernelSpec] = None
        gp: Optional[GPosterior] = None
        cum_info_gain = 0.0
        t = 0
        try:
            for t in range(1, config.budget + 1):
                started = time.perf_counter()
                if kernel is None or (t - 1) % config.refit_every == 0:
                    kernel = self._refit(config, kernel, obs, problem)
                    gp = gp_service.fit(kernel, obs, offset=h)
                if t == 1:
                    record.initial_f1 = evaluate_f1(gp, truth, h, config.beta).f1_macro

                if retiring:
                    active, x, acq_value, inferences = self._lse_grid_step(config, gp, candidates, active, h)
                else:
                    x, acq_value, inferences = self._select(
                        config, problem, gp, candidates, seed, t, random_rng
                    )

                mean, var = gp_service.posterior_mean_var(gp, x)
                increment = 0.5 * math.log1p(var / nv)
                cum_info_gain += increment
                y = observe(problem, x, noise_rng)
                obs = obs.append(x, y)
                gp = gp_service.fit(kernel, obs, offset=h)

                row = IterationRow(
                    iteration=t,
                    query=tuple(float(v) for v in x),
                    observation=y,
                    acq_value=acq_value,
                    cum_info_gain=cum_info_gain,
                    gp_inferences=inferences,
                    mean=mean,
                    variance=var,
                    outputscale=kernel.outputscale,
                    c2lse_value=float(c2lse_score(mean, math.sqrt(var), h, config.epsilon)),
                    info_gain_increment=increment,
                )
                if t % config.eval_every == 0 or t == config.budget:
                    metrics, grid_acq_max, unknown_far, low_confidence = self._evaluate(config, gp, truth, h)
                    row.f1_macro = metrics.f1_macro
                    row.grid_acq_max = grid_acq_max
                    row.unknown_far_count = unknown_far
                    row.low_confidence_count = low_confidence
                    record.final_metrics = metrics
                if config.record_wall_time:
                    row.wall_ms = 1000.0 * (time.perf_counter() - started)
                record.rows.append(row)
                self._publish(RunIterationEvent(seed, t, list(row.query), y, acq_value, row.f1_macro))

        except (NumericalFailureError, SearchFailureError) as e:
            record.aborted = True
            record.failure = str(e)
            self.logger.warning(f"Run with seed {seed} aborted at iteration {t}: {e}")
            self._publish(RunAbortedEvent(seed, t, str(e)))
            return record

        self._publish(RunCompletedEvent(seed, len(record.rows), record.final_f1, cum_info_gain))
        return record

    # ---------- experiments ----------

    def _run_seeds(self, config: ExperimentConfig, problem: LevelSetProblem,
                   truth: GroundTruth) -> List[RunRecord]:
        def run(seed: int) -> RunRecord:
            return self.run_active_loop(config, problem, truth, seed)

        if config.max_workers > 1 and len(config.seeds) > 1:
            with ThreadPoolExecutor(max_workers=config.max_workers) as executor:
                # map preserves seed order
                return list(executor.map(run, config.seeds))
        return [run(seed) for seed in config.seeds]

    def run_replicates(self, config: ExperimentConfig,
                       prepared: Optional[Tuple[LevelSetProblem, GroundTruth]] = None) -> ReplicateSummary:
        """One run per seed plus the per-iteration F1 aggregate"""
        problem, truth = prepared or prepare_problem(config)
        config = config.resolved(problem.dim, settings.MAX_WORKERS)
        self.logger.info(
            f"Running {config.method.value} on {problem.name} for {len(config.seeds)} seed(s), "
            f"budget {config.budget}"
        )
        records = self._run_seeds(config, problem, truth)
        aborted = [record.seed for record in records if record.aborted]
        if aborted:
            self.logger.warning(f"{len(aborted)} run(s) aborted: seeds {aborted}")

        return ReplicateSummary(
            config=config,
            problem=problem.name,
            dim=problem.dim,
            records=records,
            summary=summarize_records(records),
            aborted_seeds=aborted,
        )

    def sweep_epsilon(self, base: ExperimentConfig,
                      epsilons: Sequence[float],
                      prepared: Optional[Tuple[LevelSetProblem, GroundTruth]] = None
                      ) -> Tuple[List[EpsilonSweepRow], List[ReplicateSummary]]:
        """run_replicates per epsilon, keyed by epsilon"""
        if not epsilons:
            raise InvalidArgumentError("epsilons must not be empty")
        if any(not eps > 0 for eps in epsilons):
            raise InvalidArgumentError("epsilon > 0")

        prepared = prepared or prepare_problem(base)
        rows: List[EpsilonSweepRow] = []
        summaries: List[ReplicateSummary] = []
        for eps in epsilons:
            summary = self.run_replicates(base.model_copy(update={"epsilon": float(eps)}), prepared)
            final = summary.final_row
            rows.append(EpsilonSweepRow(
                epsilon=float(eps),
                f1_mean=final.f1_mean if final else None,
                f1_std=final.f1_std if final else None,
                mean_pairwise_distance=mean_pairwise_distance(summary.completed),
                n_runs=len(summary.completed),
                n_aborted=len(summary.aborted_seeds),
            ))
            summaries.append(summary)
        return rows, summaries

    def grid_compare(self, base: ExperimentConfig,
                     grid_shapes: Sequence[Sequence[int]],
                     prepared: Optional[Tuple[LevelSetProblem, GroundTruth]] = None
                     ) -> Tuple[List[GridCompareRow], List[ReplicateSummary]]:
        """Grid-restricted LSE ambiguity against continuous C2LSE, scored on the shared truth grid"""
        if not grid_shapes:
            raise InvalidArgumentError("grid_shapes must not be empty")

        prepared = prepared or prepare_problem(base)
        if prepared[0].is_tabular:
            raise InvalidArgumentError("grid_compare needs an analytic problem")
        continuous = self.run_replicates(
            base.model_copy(update={"method": Method.C2LSE, "candidate_grid": None}), prepared
        )
        c2lse_final = continuous.final_row
        c2lse_inferences = _mean_inferences(continuous.completed)

        rows: List[GridCompareRow] = []
        summaries: List[ReplicateSummary] = [continuous]
        for shape in grid_shapes:
            shape = [int(n) for n in shape]
            baseline = self.run_replicates(
                base.model_copy(update={"method": Method.LSE_AMBIGUITY, "candidate_grid": shape}), prepared
            )
            final = baseline.final_row
            rows.append(GridCompareRow(
                grid="x".join(str(n) for n in shape),
                baseline_f1_mean=final.f1_mean if final else None,
                baseline_f1_std=final.f1_std if final else None,
                baseline_inferences=_mean_inferences(baseline.completed),
                c2lse_f1_mean=c2lse_final.f1_mean if c2lse_final else None,
                c2lse_f1_std=c2lse_final.f1_std if c2lse_final else None,
                c2lse_inferences=c2lse_inferences,
            ))
            summaries.append(baseline)
        return rows, summaries


def _mean_inferences(records: Sequence[RunRecord]) -> Optional[float]:
    if not records:
        return None
    return float(np.mean([record.total_inferences for record in records]))


