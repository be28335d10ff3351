from pathlib import Path

import click

from app.core.exceptions import IncompleteRunError
from app.modules.level_set.cli.dependencies import get_event_bus, parse_float_list, parse_grid_list
from app.modules.level_set.config import LSESettings
from app.modules.level_set.core.services.config_service import parse_config
from app.modules.level_set.core.services.experiment_service import ExperimentService, prepare_problem
from app.modules.level_set.core.services.reporting_service import ReportingService

DEFAULT_EPSILONS = ",".join(str(eps) for eps in LSESettings.EPSILON_CANDIDATES)


def _optional(value, spec: str = ".4f") -> str:
    return "-" if value is None else format(value, spec)


# ==================== EPSILON ABLATION ====================

@click.command("sweep-epsilon")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="TOML experiment configuration")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config key (repeatable)")
@click.option("--epsilons", default=DEFAULT_EPSILONS, show_default=True,
              help="Comma-separated epsilon values")
@click.option("--out", "outdir", type=click.Path(), required=True)
@click.pass_context
def sweep_epsilon_command(ctx: click.Context, config_path, overrides, epsilons, outdir):
    """Replicate the configured experiment once per epsilon"""
    config = parse_config(config_path, overrides)
    epsilon_values = parse_float_list(epsilons)
    bus = get_event_bus(ctx)
    reporting = ReportingService(outdir, bus)
    reporting.ensure_writable()

    problem, truth = prepare_problem(config)
    rows, summaries = ExperimentService(bus).sweep_epsilon(config, epsilon_values, (problem, truth))
    reporting.write_epsilon_sweep(rows)
    for eps, summary in zip(epsilon_values, summaries):
        cell = ReportingService(Path(outdir) / f"epsilon_{eps:g}", bus)
        cell.ensure_writable()
        cell.emit_results(summary, problem, truth)

    click.echo("epsilon  f1_mean  f1_std  mean_pairwise_distance")
    for row in rows:
        click.echo(
            f"{row.epsilon:<8g} {_optional(row.f1_mean)}  {_optional(row.f1_std)}  "
            f"{_optional(row.mean_pairwise_distance)}"
        )

    aborted = sorted({seed for summary in summaries for seed in summary.aborted_seeds})
    if aborted:
        raise IncompleteRunError(f"runs aborted for seeds {aborted}", seeds=aborted)


# ==================== DISCRETIZATION COMPARISON ====================

@click.command("grid-compare")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="TOML experiment configuration")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config key (repeatable)")
@click.option("--grids", default="10x10,30x30,100x100", show_default=True,
              help="Comma-separated candidate grids, e.g. 10x10,30x30")
@click.option("--out", "outdir", type=click.Path(), required=True)
@click.pass_context
def grid_compare_command(ctx: click.Context, config_path, overrides, grids, outdir):
    """Grid-restricted LSE ambiguity against continuous C2LSE"""
    config = parse_config(config_path, overrides)
    shapes = parse_grid_list(grids)
    bus = get_event_bus(ctx)
    reporting = ReportingService(outdir, bus)
    reporting.ensure_writable()

    rows, summaries = ExperimentService(bus).grid_compare(config, shapes)
    reporting.write_grid_compare(rows)

    click.echo("grid      baseline_f1  baseline_inferences  c2lse_f1  c2lse_inferences")
    for row in rows:
        click.echo(
            f"{row.grid:<9} {_optional(row.baseline_f1_mean)}       "
            f"{_optional(row.baseline_inferences, '.0f'):<20} {_optional(row.c2lse_f1_mean)}    "
            f"{_optional(row.c2lse_inferences, '.0f')}"
        )

    aborted = sorted({seed for summary in summaries for seed in summary.aborted_seeds})
    if aborted:
        raise IncompleteRunError(f"runs aborted for seeds {aborted}", seeds=aborted)
