# app/core/base_module.py
from abc import ABC, abstractmethod
from typing import List, Optional
import logging

import click

from .event_bus import EventBus


class BaseLSEModule(ABC):
    """Base class for all level set modules"""

    def __init__(self):
        self._commands: List[click.Command] = []
        self._event_bus: Optional[EventBus] = None
        self._logger = logging.getLogger(self.name)
        self._setup_commands()

    @property
    @abstractmethod
    def name(self) -> str:
        """Module name"""
        pass

    @property
    @abstractmethod
    def version(self) -> str:
        """Module version"""
        pass

    @property
    def commands(self) -> List[click.Command]:
        """Command-line commands contributed by this module"""
        return self._commands

    @property
    def event_bus(self) -> Optional[EventBus]:
        return self._event_bus

    def set_event_bus(self, event_bus: EventBus) -> None:
        """Set the event bus used to publish run lifecycle events"""
        self._event_bus = event_bus

    def _setup_commands(self) -> None:
        """Register module-specific commands. Override in subclasses."""
        pass

    def _subscribe_to_events(self) -> None:
        """Subscribe to events. Override in subclasses."""
        pass

    def initialize(self) -> None:
        """Initialize the module (called after all modules are loaded)"""
        self._subscribe_to_events()
        self._logger.info(f"Module {self.name} v{self.version} initialized")

    def shutdown(self) -> None:
        """Cleanup when shutting down"""
        self._logger.info(f"Module {self.name} shutting down")
