from dataclasses import replace

import click

from app.core.exceptions import InvalidArgumentError
from app.modules.level_set.cli.dependencies import get_event_bus, parse_column_list
from app.modules.level_set.config import LSEProblemCatalog
from app.modules.level_set.core.services.problem_service import (
    build_ground_truth, load_tabular_dataset, make_problem,
)
from app.modules.level_set.core.services.reporting_service import ReportingService


@click.command("gen-truth")
@click.option("--problem", type=click.Choice(LSEProblemCatalog.names(), case_sensitive=False),
              default=None, help="Built-in benchmark")
@click.option("--data", "data_path", type=click.Path(dir_okay=False), default=None,
              help="CSV dataset with a header row")
@click.option("--columns", default=None, help="Comma-separated coordinate columns of --data")
@click.option("--value", "value_column", default=None, help="Value column of --data")
@click.option("--threshold", type=float, default=None,
              help="Threshold h (required with --data, overrides the benchmark value otherwise)")
@click.option("--out", "outdir", type=click.Path(), required=True)
@click.pass_context
def gen_truth_command(ctx: click.Context, problem, data_path, columns, value_column, threshold, outdir):
    """Write truth.csv for a benchmark or dataset and print its superlevel fraction"""
    if (problem is None) == (data_path is None):
        raise InvalidArgumentError("give exactly one of --problem or --data")

    reporting = ReportingService(outdir, get_event_bus(ctx))
    reporting.ensure_writable()

    if data_path is not None:
        if threshold is None:
            raise InvalidArgumentError("--threshold is required with --data")
        level_set_problem = load_tabular_dataset(
            data_path, parse_column_list(columns), value_column, threshold
        )
    else:
        level_set_problem = make_problem(problem)
        if threshold is not None:
            level_set_problem = replace(level_set_problem, threshold=threshold)

    truth = build_ground_truth(level_set_problem)
    path = reporting.write_truth(truth)
    click.echo(f"{level_set_problem.name}: {len(truth)} points written to {path}")
    click.echo(f"superlevel fraction: {100.0 * truth.superlevel_fraction:.2f}%")
