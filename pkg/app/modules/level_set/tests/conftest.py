# app/modules/level_set/tests/conftest.py
import csv

import numpy as np
import pytest
from click.testing import CliRunner

from main import create_app


class CommandClient:
    """Invokes the root command group the way a shell would"""

    def __init__(self):
        self.runner = CliRunner()
        self.app = create_app()

    def invoke(self, *args):
        return self.runner.invoke(self.app, [str(arg) for arg in args])


@pytest.fixture
def client():
    return CommandClient()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_dataset(tmp_path):
    """2x2 grid dataset with a header row"""
    path = tmp_path / "toy.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["a", "b", "f"])
        writer.writerows([[0.0, 0.0, 1.0], [0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [1.0, 1.0, 4.0]])
    return path


@pytest.fixture
def fast_overrides():
    """Overrides that keep a CLI run to a few seconds"""
    return [
        "--set", "problem=sin2d",
        "--set", "budget=3",
        "--set", "n_init=3",
        "--set", "seeds=[0]",
        "--set", "n_raw_samples=64",
        "--set", "n_restarts=2",
        "--set", "max_refine_iters=5",
        "--set", "hyperparameter_sweeps=1",
    ]
