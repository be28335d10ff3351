from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import csv
import io
import json
import logging
import os
import tempfile

from app.core.event_bus import EventBus
from app.core.exceptions import DatasetParseError, OutputDirectoryError
from app.modules.level_set.config import CSVColumns, LSEProblemCatalog
from app.modules.level_set.core.schemas.experiment_schemas import (
    EpsilonSweepRow, ExperimentConfig, GridCompareRow, IterationRow, ReplicateSummary,
    RunRecord, TheoryReport,
)
from app.modules.level_set.core.schemas.problem_schemas import GroundTruth, LevelSetProblem
from app.modules.level_set.core.services.config_service import dump_config, parse_config
from app.modules.level_set.core.services.svg_service import render_f1_curve, render_query_scatter
from app.modules.level_set.events.run_events import ResultsWrittenEvent

logger = logging.getLogger(__name__)

TRACE_FILE = "trace.csv"
THEORY_FILE = "theory.csv"
SUMMARY_FILE = "summary.csv"
CONFIG_FILE = "resolved_config.toml"
F1_CURVE_FILE = "f1_curve.svg"
QUERIES_FILE = "queries.svg"
TRUTH_FILE = "truth.csv"
EPSILON_SWEEP_FILE = "epsilon_sweep.csv"
GRID_COMPARE_FILE = "grid_compare.csv"
DIAGNOSTICS_FILE = "diagnostics.json"


def format_cell(value: Any) -> str:
    """CSV cell: repr for floats, empty for missing values"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def coordinate_columns(dim: int) -> List[str]:
    return [f"x{i}" for i in range(dim)]


def trace_header(dim: int) -> List[str]:
    return list(CSVColumns.TRACE_HEAD) + coordinate_columns(dim) + list(CSVColumns.TRACE_TAIL)


def problem_threshold(config: ExperimentConfig) -> float:
    if config.threshold is not None:
        return float(config.threshold)
    return float(LSEProblemCatalog.get(config.problem)["threshold"])


class ReportingService:
    """
    Writes experiment outputs into one directory.
    Every file is written to a temporary name first and renamed into place.
    """

    def __init__(self, outdir: Union[str, Path], event_bus: Optional[EventBus] = None):
        self.outdir = Path(outdir)
        self.event_bus = event_bus

    # ==================== FILE HANDLING ====================

    def ensure_writable(self) -> None:
        """Create the directory and prove it is writable before any computation"""
        try:
            self.outdir.mkdir(parents=True, exist_ok=True)
            probe = self.outdir / ".write_probe"
            probe.write_text("ok")
            probe.unlink()
        except OSError as e:
            raise OutputDirectoryError(f"output directory {self.outdir} is not writable: {e}") from e

    def _write_text(self, name: str, text: str) -> Path:
        target = self.outdir / name
        try:
            with tempfile.NamedTemporaryFile(
                "w", dir=self.outdir, prefix=f".{name}.", suffix=".tmp", delete=False, newline=""
            ) as handle:
                handle.write(text)
                temp_name = handle.name
            os.replace(temp_name, target)
        except OSError as e:
            raise OutputDirectoryError(f"could not write {target}: {e}") from e
        logger.debug(f"Wrote {target}")
        return target

    def _write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
        return self._write_text(name, buffer.getvalue())

    def _announce(self, files: List[Path]) -> None:
        if self.event_bus is not None:
            event = ResultsWrittenEvent(str(self.outdir), [path.name for path in files])
            self.event_bus.publish(event.event_type, event.to_dict(), source_module="level_set")

    # ==================== RUN OUTPUTS ====================

    def emit_results(self, summary: ReplicateSummary, problem: LevelSetProblem,
                     truth: GroundTruth) -> List[Path]:
        """trace, theory and summary tables, the resolved config and the charts"""
        dim = summary.dim
        files = [
            self._write_csv(TRACE_FILE, trace_header(dim), self._trace_rows(summary.records)),
            self._write_csv(
                THEORY_FILE, CSVColumns.THEORY,
                ([row.iteration, record.seed] + [getattr(row, c) for c in CSVColumns.THEORY[2:]]
                 for record in summary.records for row in record.rows),
            ),
            self._write_csv(
                SUMMARY_FILE, CSVColumns.SUMMARY,
                ([row.iteration, row.f1_mean, row.f1_std, row.n_runs] for row in summary.summary),
            ),
            self._write_text(CONFIG_FILE, dump_config(summary.config)),
            self._write_text(
                F1_CURVE_FILE,
                render_f1_curve(summary.summary, f"{summary.config.method.value} on {summary.problem}"),
            ),
        ]
        if dim == 2 and summary.records:
            record = summary.records[0]
            files.append(self._write_text(
                QUERIES_FILE,
                render_query_scatter(
                    problem.bounds, truth, record.queries, record.initial_points,
                    f"{record.method.value} queries, seed {record.seed}",
                ),
            ))
        self._announce(files)
        return files

    @staticmethod
    def _trace_rows(records: Sequence[RunRecord]):
        for record in records:
            for row in record.rows:
                yield (
                    [row.iteration, record.seed]
                    + list(row.query)
                    + [row.observation, row.acq_value, row.cum_info_gain,
                       row.f1_macro, row.wall_ms, row.gp_inferences]
                )

    def write_truth(self, truth: GroundTruth) -> Path:
        dim = truth.points.shape[1]
        header = coordinate_columns(dim) + list(CSVColumns.TRUTH_TAIL)
        rows = (
            [float(v) for v in point] + [float(value), label.value]
            for point, value, label in zip(truth.points, truth.values, truth.labels)
        )
        path = self._write_csv(TRUTH_FILE, header, rows)
        self._announce([path])
        return path

    def write_epsilon_sweep(self, rows: Sequence[EpsilonSweepRow]) -> Path:
        return self._write_table(EPSILON_SWEEP_FILE, list(EpsilonSweepRow.model_fields), rows)

    def write_grid_compare(self, rows: Sequence[GridCompareRow]) -> Path:
        return self._write_table(GRID_COMPARE_FILE, list(GridCompareRow.model_fields), rows)

    def _write_table(self, name: str, header: List[str], rows: Sequence) -> Path:
        path = self._write_csv(name, header, ([getattr(row, c) for c in header] for row in rows))
        self._announce([path])
        return path

    def write_diagnostics(self, reports: Sequence[TheoryReport]) -> Path:
        payload = {
            "holds": all(report.holds for report in reports),
            "runs": [dict(report.model_dump(), holds=report.holds) for report in reports],
        }
        path = self._write_text(DIAGNOSTICS_FILE, json.dumps(payload, indent=2) + "\n")
        self._announce([path])
        return path


# ==================== READERS ====================

def _read_csv(path: Path) -> List[Dict[str, str]]:
    if not path.is_file():
        raise DatasetParseError(f"{path} not found")
    with path.open(newline="") as handle:
        return list(csv.DictReader(handle))


def _float(text: str) -> Optional[float]:
    return float(text) if text not in ("", None) else None


def _int(text: str) -> Optional[int]:
    return int(text) if text not in ("", None) else None


def load_run_directory(trace_path: Union[str, Path]) -> Tuple[ExperimentConfig, List[RunRecord]]:
    """Rebuild run records from trace.csv, its sibling theory.csv and resolved_config.toml"""
    trace_path = Path(trace_path)
    directory = trace_path.parent
    config = parse_config(directory / CONFIG_FILE)
    h = problem_threshold(config)

    theory: Dict[Tuple[int, int], Dict[str, str]] = {
        (int(row["seed"]), int(row["iteration"])): row for row in _read_csv(directory / THEORY_FILE)
    }
    records: "OrderedDict[int, RunRecord]" = OrderedDict()
    for line, row in enumerate(_read_csv(trace_path), start=2):
        seed = int(row["seed"])
        t = int(row["iteration"])
        extra = theory.get((seed, t))
        if extra is None:
            raise DatasetParseError(f"no theory row for seed {seed}, iteration {t}", row=line)
        if seed not in records:
            records[seed] = RunRecord(
                seed=seed,
                problem=config.problem,
                method=config.method,
                threshold=h,
                noise_variance=config.noise_variance,
                epsilon=config.epsilon,
                beta=config.beta,
            )
        query = tuple(float(row[c]) for c in row if c.startswith("x") and c[1:].isdigit())
        records[seed].rows.append(IterationRow(
            iteration=t,
            query=query,
            observation=float(row["y"]),
            acq_value=float(row["acq_value"]),
            cum_info_gain=float(row["cum_info_gain"]),
            f1_macro=_float(row["f1_macro"]),
            wall_ms=_float(row["wall_ms"]),
            gp_inferences=int(row["gp_inferences"]),
            mean=float(extra["mean"]),
            variance=float(extra["variance"]),
            outputscale=float(extra["outputscale"]),
            c2lse_value=float(extra["c2lse_value"]),
            info_gain_increment=float(extra["info_gain_increment"]),
            grid_acq_max=_float(extra["grid_acq_max"]),
            unknown_far_count=_int(extra["unknown_far_count"]),
            low_confidence_count=_int(extra["low_confidence_count"]),
        ))
    return config, list(records.values())
