# app/modules/level_set/events/handlers.py
"""Level set module event handlers"""

import logging

from app.core.event_bus import Event


class LSEEventHandlers:
    """Event handlers for the level set module"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def handle_run_started(self, event: Event):
        """Handle run started event"""
        data = event.data["data"]
        self.logger.info(
            f"Run started: {data['method']} on {data['problem']} "
            f"(seed {data['seed']}, budget {data['budget']}, n_init {data['n_init']})"
        )

    def handle_run_iteration(self, event: Event):
        """Handle per-iteration event"""
        data = event.data["data"]
        self.logger.debug(
            f"seed {data['seed']} t={data['iteration']}: x={data['query']} "
            f"y={data['observation']:.5g} a={data['acq_value']:.5g}"
        )

    def handle_run_completed(self, event: Event):
        """Handle run completed event"""
        data = event.data["data"]
        self.logger.info(
            f"Run completed: seed {data['seed']}, {data['iterations']} iterations, "
            f"final F1 {data['final_f1']}"
        )

    def handle_run_aborted(self, event: Event):
        """Handle run aborted event"""
        data = event.data["data"]
        self.logger.warning(
            f"Run aborted: seed {data['seed']} at iteration {data['iteration']}: {data['reason']}"
        )

    def handle_results_written(self, event: Event):
        """Handle results written event"""
        data = event.data["data"]
        self.logger.info(f"Wrote {len(data['files'])} files to {data['outdir']}")
