import csv
import json
from dataclasses import replace

import pytest

from app.core.exceptions import OutputDirectoryError
from app.modules.level_set.core.schemas.experiment_schemas import (
    EpsilonSweepRow, ExperimentConfig, IterationRow, ReplicateSummary, RunRecord,
)
from app.modules.level_set.core.services import problem_service, reporting_service
from app.modules.level_set.core.services.diagnostics_service import theory_diagnostics
from app.modules.level_set.core.services.experiment_service import summarize_records
from app.modules.level_set.core.services.reporting_service import ReportingService
from app.shared.schemas import Label, Method


def iteration_row(t, f1, **extra):
    return IterationRow(
        iteration=t, query=(0.1 * t, 0.2 * t), observation=0.3 * t, acq_value=1.0 / t,
        cum_info_gain=0.5 * t, f1_macro=f1, gp_inferences=64, mean=0.4, variance=0.02 / t,
        outputscale=1.5, c2lse_value=1.0 / t, info_gain_increment=0.5, **extra,
    )


def seeded_record(seed, f1s):
    return RunRecord(
        seed=seed, problem="sin2d", method=Method.C2LSE, threshold=0.5, noise_variance=1e-4,
        epsilon=0.05, beta=3.0, initial_points=[(0.0, 0.0), (1.0, 1.0)], initial_f1=0.1,
        rows=[
            iteration_row(t + 1, f1, grid_acq_max=0.2 if t == len(f1s) - 1 else None,
                          unknown_far_count=0 if t == len(f1s) - 1 else None,
                          low_confidence_count=0 if t == len(f1s) - 1 else None)
            for t, f1 in enumerate(f1s)
        ],
    )


@pytest.fixture
def replicate_summary():
    config = ExperimentConfig(problem="sin2d", budget=3, seeds=[0, 1]).resolved(2)
    records = [seeded_record(0, [0.2, 0.5, 0.7]), seeded_record(1, [0.4, 0.5, 0.9])]
    return ReplicateSummary(
        config=config, problem="sin2d", dim=2, records=records, summary=summarize_records(records),
    )


@pytest.fixture
def sin2d_coarse():
    problem = replace(problem_service.make_problem("sin2d"), truth_grid_shape=(5, 5))
    return problem, problem_service.build_ground_truth(problem)


def read_rows(path):
    with path.open(newline="") as handle:
        return list(csv.reader(handle))


def test_trace_header():
    assert reporting_service.trace_header(2) == [
        "iteration", "seed", "x0", "x1", "y", "acq_value", "cum_info_gain",
        "f1_macro", "wall_ms", "gp_inferences",
    ]


def test_format_cell():
    assert reporting_service.format_cell(None) == ""
    assert reporting_service.format_cell(True) == "true"
    assert reporting_service.format_cell(0.1) == "0.1"
    assert reporting_service.format_cell(3) == "3"


def test_emit_results_writes_every_file(tmp_path, replicate_summary, sin2d_coarse):
    problem, truth = sin2d_coarse
    files = ReportingService(tmp_path).emit_results(replicate_summary, problem, truth)
    names = {path.name for path in files}
    assert names == {
        "trace.csv", "theory.csv", "summary.csv", "resolved_config.toml", "f1_curve.svg", "queries.svg",
    }
    trace = read_rows(tmp_path / "trace.csv")
    assert trace[0] == reporting_service.trace_header(2)
    assert len(trace) == 1 + 6
    assert trace[1][:4] == ["1", "0", "0.1", "0.2"]
    assert trace[1][8] == ""
    assert (tmp_path / "f1_curve.svg").read_text().startswith("<svg")
    assert not list(tmp_path.glob("*.tmp"))


def test_summary_is_mean_over_seeds(tmp_path, replicate_summary, sin2d_coarse):
    problem, truth = sin2d_coarse
    ReportingService(tmp_path).emit_results(replicate_summary, problem, truth)
    summary = read_rows(tmp_path / "summary.csv")
    assert summary[0] == ["iteration", "f1_mean", "f1_std", "n_runs"]
    assert [row[0] for row in summary[1:]] == ["0", "1", "2", "3"]
    final = summary[-1]
    assert float(final[1]) == pytest.approx(0.8)
    assert float(final[2]) == pytest.approx(0.1)
    assert final[3] == "2"


def test_unwritable_output_directory(tmp_path):
    blocker = tmp_path / "taken"
    blocker.write_text("not a directory")
    with pytest.raises(OutputDirectoryError):
        ReportingService(blocker).ensure_writable()


def test_write_truth(tmp_path, toy_dataset):
    problem = problem_service.load_tabular_dataset(toy_dataset, None, None, 2.5)
    truth = problem_service.build_ground_truth(problem)
    path = ReportingService(tmp_path).write_truth(truth)
    rows = read_rows(path)
    assert rows[0] == ["x0", "x1", "f", "label"]
    assert rows[1:] == [
        ["0.0", "0.0", "1.0", "SUB"],
        ["0.0", "1.0", "2.0", "SUB"],
        ["1.0", "0.0", "3.0", "SUPER"],
        ["1.0", "1.0", "4.0", "SUPER"],
    ]
    reloaded = problem_service.load_tabular_dataset(path, ["x0", "x1"], "f", 2.5)
    assert problem_service.build_ground_truth(reloaded).labels == (Label.SUB, Label.SUB, Label.SUPER, Label.SUPER)


def test_write_epsilon_sweep(tmp_path):
    rows = [EpsilonSweepRow(epsilon=0.01, f1_mean=0.9, f1_std=0.05, mean_pairwise_distance=None, n_runs=2)]
    table = read_rows(ReportingService(tmp_path).write_epsilon_sweep(rows))
    assert table[0] == ["epsilon", "f1_mean", "f1_std", "mean_pairwise_distance", "n_runs", "n_aborted"]
    assert table[1] == ["0.01", "0.9", "0.05", "", "2", "0"]


def test_run_directory_round_trip(tmp_path, replicate_summary, sin2d_coarse):
    problem, truth = sin2d_coarse
    ReportingService(tmp_path).emit_results(replicate_summary, problem, truth)
    config, records = reporting_service.load_run_directory(tmp_path / "trace.csv")
    assert config == replicate_summary.config
    assert [record.seed for record in records] == [0, 1]
    for loaded, original in zip(records, replicate_summary.records):
        assert loaded.rows == original.rows
        assert loaded.threshold == 0.5


def test_write_diagnostics(tmp_path, replicate_summary):
    reports = [theory_diagnostics(record, 1e-4, 0.05, 3.0) for record in replicate_summary.records]
    path = ReportingService(tmp_path).write_diagnostics(reports)
    payload = json.loads(path.read_text())
    assert payload["holds"] == all(report.holds for report in reports)
    assert [run["seed"] for run in payload["runs"]] == [0, 1]
    assert payload["runs"][0]["first_confident_iteration"] == 3
