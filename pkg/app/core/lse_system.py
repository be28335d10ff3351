# app/core/lse_system.py
from typing import Dict, List
import logging

import click

from .base_module import BaseLSEModule
from .event_bus import EventBus


class LSESystem:
    """Owns the loaded modules, the shared event bus and the root command group"""

    def __init__(self, cli: click.Group):
        self.cli = cli
        self.modules: Dict[str, BaseLSEModule] = {}
        self.event_bus = EventBus()
        self._logger = logging.getLogger("LSESystem")

    def add_module(self, module: BaseLSEModule) -> None:
        """Add a module and mount its commands on the root group"""
        if module.name in self.modules:
            raise ValueError(f"Module {module.name} already exists")
        module.set_event_bus(self.event_bus)
        for command in module.commands:
            if command.name in self.cli.commands:
                raise ValueError(f"Command {command.name} already registered")
            self.cli.add_command(command)
        self.modules[module.name] = module
        self._logger.debug(f"Module {module.name} added with {len(module.commands)} commands")

    def initialize_all_modules(self) -> None:
        """Initialize all modules (call after all modules are added)"""
        for module in self.modules.values():
            try:
                module.initialize()
            except Exception as e:
                self._logger.error(f"Failed to initialize module {module.name}: {e}")

    def shutdown_all_modules(self) -> None:
        for module in self.modules.values():
            try:
                module.shutdown()
            except Exception as e:
                self._logger.error(f"Failed to shutdown module {module.name}: {e}")

    def get_module(self, name: str) -> BaseLSEModule:
        """Get a module by name"""
        if name not in self.modules:
            raise KeyError(f"Module {name} not found")
        return self.modules[name]

    def list_modules(self) -> List[str]:
        return list(self.modules.keys())
