import json
import logging

import click

from app.core.exceptions import LSEError
from app.core.lse_system import LSESystem
from app.core.settings import configure_logging
from app.modules.level_set import LevelSetModule

logger = logging.getLogger(__name__)


def _error_line(payload) -> str:
    return f"error: {json.dumps(payload)}"


# bare invocation prints help; click 8.2 signals it with a UsageError subclass
_HELP_ERRORS = tuple(filter(None, [getattr(click.exceptions, "NoArgsIsHelpError", None)]))


def _usage_failure(ctx: click.Context, e: click.ClickException):
    click.echo(_error_line({"type": type(e).__name__, "message": e.format_message()}), err=True)
    ctx.exit(e.exit_code)


class LSEGroup(click.Group):
    """Root group: library errors exit 1, anything unexpected exits 2, one JSON line on stderr.

    Usage errors keep click's exit code and use the same line format.
    """

    def parse_args(self, ctx: click.Context, args):
        try:
            return super().parse_args(ctx, args)
        except _HELP_ERRORS:
            raise
        except click.ClickException as e:
            _usage_failure(ctx, e)

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (click.exceptions.Exit, click.exceptions.Abort, *_HELP_ERRORS):
            raise
        except click.ClickException as e:
            _usage_failure(ctx, e)
        except LSEError as e:
            click.echo(_error_line(e.to_dict()), err=True)
            ctx.exit(1)
        except Exception as e:
            logger.debug("Unexpected failure", exc_info=True)
            click.echo(_error_line({"type": type(e).__name__, "message": str(e)}), err=True)
            ctx.exit(2)


def create_app() -> click.Group:
    """Build the root command group with every module mounted"""

    @click.group(cls=LSEGroup)
    @click.pass_context
    def cli(ctx: click.Context):
        """Confidence-based continuous level set estimation"""
        ctx.obj = system
        ctx.call_on_close(system.shutdown_all_modules)

    system = LSESystem(cli)
    system.add_module(LevelSetModule())
    system.initialize_all_modules()
    return cli


app = create_app()


def run():
    configure_logging()
    app()


if __name__ == "__main__":
    run()
