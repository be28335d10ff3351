from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from app.core.exceptions import InvalidArgumentError, SearchFailureError
from app.modules.level_set.core.schemas.search_schemas import SearchBudget
from app.modules.level_set.core.services import search_service
from app.modules.level_set.core.services.golden_section import golden_section_max
from app.shared.schemas import DomainBounds

UNIT_SQUARE = DomainBounds(lower=(0.0, 0.0), upper=(1.0, 1.0))
UNIT_INTERVAL = DomainBounds(lower=(0.0,), upper=(1.0,))


def quadratic(points):
    return -np.sum((points - np.array([0.3, 0.7])) ** 2, axis=1)


def kink(points):
    return -np.abs(points[:, 0] - 0.5)


# ==================== GOLDEN SECTION ====================

def test_golden_section_finds_parabola_peak():
    x, value, evaluations = golden_section_max(lambda v: -(v - 0.42) ** 2, 0.0, 1.0, 1e-6)
    assert x == pytest.approx(0.42, abs=1e-5)
    assert value == pytest.approx(0.0, abs=1e-9)
    assert evaluations > 2


def test_golden_section_degenerate_interval():
    x, value, evaluations = golden_section_max(lambda v: v, 1.0, 1.0, 1e-6)
    assert (x, value, evaluations) == (1.0, 1.0, 1)


def test_golden_section_treats_nan_as_worst():
    x, value, _ = golden_section_max(lambda v: float("nan") if v < 0.5 else -v, 0.0, 1.0, 1e-6)
    assert x >= 0.5
    assert value == pytest.approx(-0.5, abs=1e-4)


# ==================== CONTINUOUS ====================

def test_maximize_concave_quadratic():
    result = search_service.maximize_continuous(quadratic, UNIT_SQUARE, SearchBudget.for_dim(2))
    np.testing.assert_allclose(result.argmax, (0.3, 0.7), atol=1e-3)


def test_maximize_constant_score():
    result = search_service.maximize_continuous(
        lambda points: np.full(points.shape[0], 2.5), UNIT_SQUARE, SearchBudget.for_dim(2)
    )
    assert result.value == 2.5
    assert UNIT_SQUARE.contains(result.argmax)


def test_maximize_non_differentiable_peak():
    result = search_service.maximize_continuous(kink, UNIT_INTERVAL, SearchBudget.for_dim(1))
    assert result.argmax[0] == pytest.approx(0.5, abs=1e-3)


def test_value_matches_score_at_argmax():
    result = search_service.maximize_continuous(quadratic, UNIT_SQUARE, SearchBudget.for_dim(2, seed=5))
    assert result.value == pytest.approx(float(quadratic(np.array([result.argmax]))[0]))


def test_result_never_below_best_probe():
    budget = SearchBudget.for_dim(2, seed=9, n_raw_samples=128)
    probes = search_service.raw_probes(UNIT_SQUARE, 128, 9)
    result = search_service.maximize_continuous(quadratic, UNIT_SQUARE, budget)
    assert result.value >= quadratic(probes).max()


def test_search_is_deterministic():
    budget = SearchBudget.for_dim(2, seed=3)
    first = search_service.maximize_continuous(quadratic, UNIT_SQUARE, budget)
    second = search_service.maximize_continuous(quadratic, UNIT_SQUARE, budget)
    assert first == second


def test_argmax_stays_in_bounds():
    box = DomainBounds(lower=(-2.0, 5.0), upper=(-1.0, 6.0))
    result = search_service.maximize_continuous(
        lambda points: points.sum(axis=1), box, SearchBudget.for_dim(2)
    )
    assert box.contains(result.argmax)
    np.testing.assert_allclose(result.argmax, (-1.0, 6.0), atol=1e-4)


def test_larger_probe_budget_never_worse():
    def bumpy(points):
        return np.sin(13 * points[:, 0]) * np.cos(7 * points[:, 1])

    small = search_service.maximize_continuous(
        bumpy, UNIT_SQUARE, SearchBudget.for_dim(2, seed=1, n_raw_samples=64), refine=False
    )
    large = search_service.maximize_continuous(
        bumpy, UNIT_SQUARE, SearchBudget.for_dim(2, seed=1, n_raw_samples=256), refine=False
    )
    assert large.value >= small.value


def test_probe_sequence_extends_its_prefix():
    short = search_service.raw_probes(UNIT_SQUARE, 64, 4)
    long = search_service.raw_probes(UNIT_SQUARE, 256, 4)
    np.testing.assert_array_equal(long[:64], short)


def test_all_non_finite_scores_fail():
    with pytest.raises(SearchFailureError):
        search_service.maximize_continuous(
            lambda points: np.full(points.shape[0], np.nan), UNIT_SQUARE, SearchBudget.for_dim(2)
        )


def test_executor_matches_serial():
    budget = SearchBudget.for_dim(2, seed=2, n_restarts=4)
    serial = search_service.maximize_continuous(quadratic, UNIT_SQUARE, budget)
    with ThreadPoolExecutor(max_workers=3) as pool:
        parallel = search_service.maximize_continuous(quadratic, UNIT_SQUARE, budget, executor=pool)
    assert serial == parallel


def test_score_must_return_one_value_per_point():
    with pytest.raises(InvalidArgumentError):
        search_service.maximize_continuous(lambda points: np.zeros(1), UNIT_SQUARE, SearchBudget.for_dim(2))


# ==================== GRID ====================

def test_grid_identity_score():
    result = search_service.maximize_on_grid(lambda points: points[:, 0], [[0.0], [1.0]])
    assert result.argmax == (1.0,)
    assert result.value == 1.0


def test_grid_ties_pick_first_candidate():
    candidates = np.array([[0.2, 0.1], [0.5, 0.5], [0.9, 0.3]])
    result = search_service.maximize_on_grid(lambda points: np.ones(points.shape[0]), candidates)
    assert result.argmax == (0.2, 0.1)
    assert result.n_evaluations == 3


def test_grid_matches_brute_force(rng):
    candidates = rng.uniform(size=(1000, 2))

    def score(points):
        return np.sin(5 * points[:, 0]) + points[:, 1] ** 2

    result = search_service.maximize_on_grid(score, candidates)
    best = max(range(1000), key=lambda i: float(score(candidates[i:i + 1])[0]))
    assert result.argmax == tuple(candidates[best])


def test_grid_equals_unrefined_search_on_same_points():
    budget = SearchBudget.for_dim(2, seed=6, n_raw_samples=100)
    probes = search_service.raw_probes(UNIT_SQUARE, 100, 6)
    continuous = search_service.maximize_continuous(quadratic, UNIT_SQUARE, budget, refine=False)
    grid = search_service.maximize_on_grid(quadratic, probes)
    assert continuous.argmax == grid.argmax
    assert continuous.value == grid.value


def test_grid_rejects_empty_candidates():
    with pytest.raises(InvalidArgumentError):
        search_service.maximize_on_grid(quadratic, np.empty((0, 2)))


def test_grid_all_non_finite_fails():
    with pytest.raises(SearchFailureError):
        search_service.maximize_on_grid(lambda points: np.full(points.shape[0], np.inf), [[0.0], [1.0]])


# ==================== INITIAL DESIGN ====================

def test_design_single_point():
    design = search_service.sample_initial_design(UNIT_SQUARE, 1, 0)
    assert design.shape == (1, 2)
    assert UNIT_SQUARE.contains(design[0])


def test_design_one_point_per_decile():
    design = search_service.sample_initial_design(UNIT_INTERVAL, 10, 7)
    strata = np.floor(design[:, 0] * 10).astype(int)
    assert sorted(strata.tolist()) == list(range(10))


def test_design_is_deterministic():
    first = search_service.sample_initial_design(UNIT_SQUARE, 5, 11)
    second = search_service.sample_initial_design(UNIT_SQUARE, 5, 11)
    np.testing.assert_array_equal(first, second)


def test_design_rejects_empty():
    with pytest.raises(InvalidArgumentError):
        search_service.sample_initial_design(UNIT_SQUARE, 0, 0)
