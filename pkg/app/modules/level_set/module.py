"""Level set module implementation"""

from typing import Dict, Any

from app.core.base_module import BaseLSEModule
from app.modules.level_set.config import LSEEventTypes


class LevelSetModule(BaseLSEModule):
    """Active level set estimation: experiments, truth grids and diagnostics"""

    def __init__(self, *args, **kwargs):
        self.module_name = "level_set"
        self.version_number = "1.0.0"
        self.description = "Confidence-based continuous level set estimation"
        super().__init__(*args, **kwargs)
        self._logger.debug("Level set module created")

    @property
    def name(self) -> str:
        """Module name"""
        return self.module_name

    @property
    def version(self) -> str:
        """Module version"""
        return self.version_number

    def get_info(self) -> Dict[str, Any]:
        """Get module information"""
        return {
            "name": self.name,
            "version": self.version,
            "description": self.description,
            "commands": [command.name for command in self.commands],
        }

    def _setup_commands(self):
        """Setup module commands"""
        from .cli import commands

        self._commands.extend(commands)

    def _subscribe_to_events(self):
        """Log run lifecycle events"""
        if self.event_bus is None:
            return
        from .events.handlers import LSEEventHandlers

        handlers = LSEEventHandlers()
        self.event_bus.subscribe(LSEEventTypes.RUN_STARTED, handlers.handle_run_started)
        self.event_bus.subscribe(LSEEventTypes.RUN_ITERATION, handlers.handle_run_iteration)
        self.event_bus.subscribe(LSEEventTypes.RUN_COMPLETED, handlers.handle_run_completed)
        self.event_bus.subscribe(LSEEventTypes.RUN_ABORTED, handlers.handle_run_aborted)
        self.event_bus.subscribe(LSEEventTypes.RESULTS_WRITTEN, handlers.handle_results_written)
