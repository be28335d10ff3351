# app/modules/level_set/cli/__init__.py
from app.modules.level_set.cli.commands.run_commands import run_command
from app.modules.level_set.cli.commands.sweep_commands import grid_compare_command, sweep_epsilon_command
from app.modules.level_set.cli.commands.truth_commands import gen_truth_command
from app.modules.level_set.cli.commands.diagnose_commands import diagnose_command

# Every command contributed by the level set module, in help order
commands = [
    run_command,
    sweep_epsilon_command,
    grid_compare_command,
    gen_truth_command,
    diagnose_command,
]

__all__ = ["commands"]
