from pathlib import Path

import click

from app.core.exceptions import InequalityViolationError
from app.modules.level_set.cli.dependencies import get_event_bus
from app.modules.level_set.core.services.diagnostics_service import diagnose_records
from app.modules.level_set.core.services.reporting_service import ReportingService, load_run_directory


@click.command("diagnose")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False, exists=True), required=True,
              help="trace.csv written by run (theory.csv and resolved_config.toml must sit beside it)")
@click.option("--out", "outdir", type=click.Path(), default=None,
              help="Output directory (defaults to the trace directory)")
@click.pass_context
def diagnose_command(ctx: click.Context, trace_path, outdir):
    """Check the information-gain and averaged-acquisition inequalities on a recorded run"""
    reporting = ReportingService(outdir or Path(trace_path).parent, get_event_bus(ctx))
    reporting.ensure_writable()

    config, records = load_run_directory(trace_path)
    reports = diagnose_records(records, config.noise_variance, config.epsilon, config.beta)
    path = reporting.write_diagnostics(reports)

    for report in reports:
        status = "ok" if report.holds else "VIOLATED"
        confident = report.first_confident_iteration
        click.echo(
            f"seed {report.seed}: I = {report.information_gain:.4f} >= {report.gain_lower_bound:.4f}; "
            f"(sum a)^2 = {report.acq_sum_squared:.4g} <= {report.chain_bound:.4g}; "
            f"confident at {confident if confident is not None else '-'}; {status}"
        )
    click.echo(f"C1 = {reports[0].c1:.5f}" if reports else "no iterations to diagnose")
    click.echo(f"report written to {path}")

    failed = [report.seed for report in reports if not report.holds]
    if failed:
        raise InequalityViolationError(f"inequalities violated for seeds {failed}")
