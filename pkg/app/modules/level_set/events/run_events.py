from typing import Optional, List, Dict, Any
from datetime import datetime
import logging
from abc import ABC, abstractmethod

from app.modules.level_set.config import LSEEventTypes

# Set up logging
logger = logging.getLogger(__name__)


class RunEvent(ABC):
    """Base class for all active-run events"""
    event_type: str
    timestamp: datetime

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Convert event to dictionary for serialization"""
        pass


class RunStartedEvent(RunEvent):
    """Event fired when a seeded active run starts"""
    event_type = LSEEventTypes.RUN_STARTED

    def __init__(
        self,
        problem: str,
        method: str,
        seed: int,
        budget: int,
        n_init: int,
        timestamp: Optional[datetime] = None
    ):
        self.problem = problem
        self.method = method
        self.seed = seed
        self.budget = budget
        self.n_init = n_init
        self.timestamp = timestamp or datetime.now()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event_type": self.event_type,
            "timestamp": self.timestamp.isoformat(),
            "data": {
                "problem": self.problem,
                "method": self.method,
                "seed": self.seed,
                "budget": self.budget,
                "n_init": self.n_init,
            }
        }


class RunIterationEvent(RunEvent):
    """Event fired after every query of an active run"""
    event_type = LSEEventTypes.RUN_ITERATION

    def __init__(
        self,
        seed: int,
        iteration: int,
        query: List[float],
        observation: float,
        acq_value: float,
        f1_macro: Optional[float] = None,
        timestamp: Optional[datetime] = None
    ):
        self.seed = seed
        self.iteration = iteration
        self.query = query
        self.observation = observation
        self.acq_value = acq_value
        self.f1_macro = f1_macro
        self.timestamp = timestamp or datetime.now()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event_type": self.event_type,
            "timestamp": self.timestamp.isoformat(),
            "data": {
                "seed": self.seed,
                "iteration": self.iteration,
                "query": list(self.query),
                "observation": self.observation,
                "acq_value": self.acq_value,
                "f1_macro": self.f1_macro,
            }
        }


class RunCompletedEvent(RunEvent):
    """Event fired when a run reaches its budget"""
    event_type = LSEEventTypes.RUN_COMPLETED

    def __init__(
        self,
        seed: int,
        iterations: int,
        final_f1: Optional[float],
        info_gain: float,
        timestamp: Optional[datetime] = None
    ):
        self.seed = seed
        self.iterations = iterations
        self.final_f1 = final_f1
        self.info_gain = info_gain
        self.timestamp = timestamp or datetime.now()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event_type": self.event_type,
            "timestamp": self.timestamp.isoformat(),
            "data": {
                "seed": self.seed,
                "iterations": self.iterations,
                "final_f1": self.final_f1,
                "info_gain": self.info_gain,
            }
        }


class RunAbortedEvent(RunEvent):
    """Event fired when a run stops early on a numerical failure"""
    event_type = LSEEventTypes.RUN_ABORTED

    def __init__(
        self,
        seed: int,
        iteration: int,
        reason: str,
        timestamp: Optional[datetime] = None
    ):
        self.seed = seed
        self.iteration = iteration
        self.reason = reason
        self.timestamp = timestamp or datetime.now()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event_type": self.event_type,
            "timestamp": self.timestamp.isoformat(),
            "data": {
                "seed": self.seed,
                "iteration": self.iteration,
                "reason": self.reason,
            }
        }


class ResultsWrittenEvent(RunEvent):
    """Event fired when result files have been written"""
    event_type = LSEEventTypes.RESULTS_WRITTEN

    def __init__(
        self,
        outdir: str,
        files: List[str],
        timestamp: Optional[datetime] = None
    ):
        self.outdir = outdir
        self.files = files
        self.timestamp = timestamp or datetime.now()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event_type": self.event_type,
            "timestamp": self.timestamp.isoformat(),
            "data": {
                "outdir": self.outdir,
                "files": list(self.files),
            }
        }
