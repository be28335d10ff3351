# app/core/event_bus.py
from typing import Dict, List, Callable, Any
import logging
import threading
import time
from dataclasses import dataclass


@dataclass
class Event:
    event_type: str
    data: Dict[str, Any]
    source_module: str
    timestamp: float


class EventBus:
    """Synchronous event bus for run lifecycle notifications"""

    def __init__(self):
        self._subscribers: Dict[str, List[Callable[[Event], None]]] = {}
        self._lock = threading.Lock()
        self._logger = logging.getLogger("EventBus")

    def subscribe(self, event_type: str, handler: Callable[[Event], None]) -> None:
        """Subscribe to an event type"""
        with self._lock:
            self._subscribers.setdefault(event_type, []).append(handler)
        self._logger.debug(f"Handler subscribed to event: {event_type}")

    def publish(self, event_type: str, data: Dict[str, Any], source_module: str = "unknown") -> None:
        """Publish an event to all subscribers; handler failures are logged, not raised"""
        event = Event(
            event_type=event_type,
            data=data,
            source_module=source_module,
            timestamp=time.time(),
        )
        with self._lock:
            handlers = list(self._subscribers.get(event_type, []))

        if not handlers:
            self._logger.debug(f"No subscribers for event: {event_type}")
            return

        for handler in handlers:
            try:
                handler(event)
            except Exception as e:
                self._logger.error(f"Error in handler for event {event_type}: {e}")

    def get_subscribers_count(self, event_type: str) -> int:
        """Get number of subscribers for an event type"""
        with self._lock:
            return len(self._subscribers.get(event_type, []))
