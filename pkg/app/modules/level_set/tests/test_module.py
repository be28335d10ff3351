import logging

import click
import pytest

from app.core.event_bus import EventBus
from app.core.lse_system import LSESystem
from app.modules.level_set import LevelSetModule
from app.modules.level_set.config import LSEEventTypes
from app.modules.level_set.events.run_events import RunAbortedEvent, RunStartedEvent


def test_module_info():
    info = LevelSetModule().get_info()
    assert info["name"] == "level_set"
    assert info["version"] == "1.0.0"
    assert info["commands"] == ["run", "sweep-epsilon", "grid-compare", "gen-truth", "diagnose"]


def test_system_mounts_module_commands():
    system = LSESystem(click.Group())
    system.add_module(LevelSetModule())
    system.initialize_all_modules()
    assert system.list_modules() == ["level_set"]
    assert set(system.cli.commands) == {"run", "sweep-epsilon", "grid-compare", "gen-truth", "diagnose"}
    assert system.event_bus.get_subscribers_count(LSEEventTypes.RUN_STARTED) == 1


def test_duplicate_module_rejected():
    system = LSESystem(click.Group())
    system.add_module(LevelSetModule())
    with pytest.raises(ValueError):
        system.add_module(LevelSetModule())


def test_unknown_module_lookup():
    with pytest.raises(KeyError):
        LSESystem(click.Group()).get_module("missing")


def test_handler_failures_do_not_propagate():
    bus = EventBus()
    calls = []

    def broken(event):
        raise RuntimeError("boom")

    bus.subscribe("lse.test", broken)
    bus.subscribe("lse.test", lambda event: calls.append(event.data))
    bus.publish("lse.test", {"value": 1})
    assert calls == [{"value": 1}]


def test_handlers_log_run_events(caplog):
    system = LSESystem(click.Group())
    system.add_module(LevelSetModule())
    system.initialize_all_modules()

    with caplog.at_level(logging.INFO):
        started = RunStartedEvent("mc2d", "c2lse", 3, 100, 5)
        system.event_bus.publish(started.event_type, started.to_dict())
        aborted = RunAbortedEvent(3, 7, "gram matrix not positive definite")
        system.event_bus.publish(aborted.event_type, aborted.to_dict())

    assert "Run started: c2lse on mc2d (seed 3, budget 100, n_init 5)" in caplog.text
    assert "Run aborted: seed 3 at iteration 7" in caplog.text


def test_event_payload_shape():
    payload = RunStartedEvent("sin2d", "random", 0, 10, 5).to_dict()
    assert payload["event_type"] == LSEEventTypes.RUN_STARTED
    assert payload["data"] == {"problem": "sin2d", "method": "random", "seed": 0, "budget": 10, "n_init": 5}


def test_shutdown_logs_each_module(caplog):
    system = LSESystem(click.Group())
    system.add_module(LevelSetModule())
    with caplog.at_level(logging.INFO):
        system.shutdown_all_modules()
    assert "Module level_set shutting down" in caplog.text
