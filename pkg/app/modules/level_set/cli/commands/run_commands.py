import click

from app.core.exceptions import IncompleteRunError
from app.modules.level_set.cli.dependencies import get_event_bus
from app.modules.level_set.core.services.config_service import parse_config
from app.modules.level_set.core.services.experiment_service import ExperimentService, prepare_problem
from app.modules.level_set.core.services.reporting_service import ReportingService


@click.command("run")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="TOML experiment configuration")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config key (repeatable)")
@click.option("--out", "outdir", type=click.Path(), required=True,
              help="Output directory")
@click.pass_context
def run_command(ctx: click.Context, config_path, overrides, outdir):
    """Run the active loop for every configured seed and write the results"""
    config = parse_config(config_path, overrides)
    bus = get_event_bus(ctx)
    reporting = ReportingService(outdir, bus)
    reporting.ensure_writable()

    problem, truth = prepare_problem(config)
    summary = ExperimentService(bus).run_replicates(config, (problem, truth))
    files = reporting.emit_results(summary, problem, truth)

    final = summary.final_row
    if final is not None:
        click.echo(
            f"{summary.config.method.value} on {summary.problem}: final macro F1 "
            f"{final.f1_mean:.4f} +- {final.f1_std:.4f} over {final.n_runs} run(s)"
        )
    click.echo(f"wrote {len(files)} files to {outdir}")

    if summary.aborted_seeds:
        raise IncompleteRunError(
            f"{len(summary.aborted_seeds)} run(s) aborted", seeds=summary.aborted_seeds
        )
