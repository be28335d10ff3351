# app/modules/level_set/config.py
"""Level set module configuration"""

from typing import Dict, Tuple


class LSEEventTypes:
    """Level set module event types"""
    RUN_STARTED = "lse.run.started"
    RUN_ITERATION = "lse.run.iteration"
    RUN_COMPLETED = "lse.run.completed"
    RUN_ABORTED = "lse.run.aborted"

    RESULTS_WRITTEN = "lse.results.written"


class LSESettings:
    """Level set module default settings"""

    # Acquisition
    EPSILON = 0.05
    EPSILON_CANDIDATES = (0.01, 0.02, 0.05, 0.1, 0.2)
    BETA = 3.0
    STRADDLE_SCALE = 1.96

    # Active loop
    BUDGET = 100
    NOISE_VARIANCE = 1e-4
    REFIT_EVERY = 1
    EVAL_EVERY = 1
    SEEDS = tuple(range(10))
    MAX_WORKERS = 1

    # Acquisition search
    RAW_SAMPLES_PER_DIM = 512
    N_RESTARTS = 10
    MAX_REFINE_ITERS = 40
    REFINE_INITIAL_STEP = 0.25  # fraction of the box width
    REFINE_XTOL = 1e-5  # fraction of the box width

    # Gaussian process
    KERNEL = "matern52"
    JITTER_LADDER = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)
    LENGTHSCALE_BOUNDS = (1e-3, 1e3)  # multiples of the domain width
    OUTPUTSCALE_BOUNDS = (1e-6, 1e3)
    HYPERPARAMETER_SWEEPS = 3
    HYPERPARAMETER_WINDOW = 3.0  # log units searched around the current value
    HYPERPARAMETER_TOL = 1e-2
    INIT_LENGTHSCALE_FRACTIONS = (0.1, 0.3)  # initial lengthscales as box-width fractions

    # Problems
    TABULAR_TOLERANCE = 1e-9


class LSEProblemCatalog:
    """Built-in synthetic benchmarks: bounds, threshold and truth grid"""

    MC2D: Dict = {
        "lower": (0.0, 0.0),
        "upper": (9.0, 9.0),
        "threshold": 2.2,
        "grid": (100, 100),
    }
    MC3D: Dict = {
        "lower": (0.0, 0.0, 0.0),
        "upper": (6.0, 6.0, 6.0),
        "threshold": 1.6,
        "grid": (30, 30, 30),
    }
    SIN2D: Dict = {
        "lower": (0.0, 0.0),
        "upper": (2.0, 3.0),
        "threshold": 0.5,
        "grid": (100, 100),
    }

    @classmethod
    def names(cls) -> Tuple[str, ...]:
        return ("mc2d", "mc3d", "sin2d")

    @classmethod
    def get(cls, name: str) -> Dict:
        key = name.strip().upper()
        if not hasattr(cls, key) or key.lower() not in cls.names():
            raise KeyError(f"problem '{name}' not found. available: {list(cls.names())}")
        return getattr(cls, key)


class CSVColumns:
    """Column layout of the emitted result files"""
    TRACE_HEAD = ("iteration", "seed")
    TRACE_TAIL = ("y", "acq_value", "cum_info_gain", "f1_macro", "wall_ms", "gp_inferences")
    SUMMARY = ("iteration", "f1_mean", "f1_std", "n_runs")
    THEORY = (
        "iteration", "seed", "mean", "variance", "outputscale", "c2lse_value",
        "info_gain_increment", "grid_acq_max", "unknown_far_count", "low_confidence_count",
    )
    TRUTH_TAIL = ("f", "label")
