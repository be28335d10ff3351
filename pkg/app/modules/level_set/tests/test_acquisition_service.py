import numpy as np
import pytest
from scipy.stats import norm

from app.core.exceptions import InvalidArgumentError
from app.modules.level_set.core.schemas.acquisition_schemas import AcquisitionSpec
from app.modules.level_set.core.schemas.gp_schemas import KernelSpec, ObservationSet
from app.modules.level_set.core.services import acquisition_service as acq
from app.modules.level_set.core.services import gp_service
from app.shared.schemas import Label, Method


# ==================== SCORES ====================

def test_c2lse_far_from_threshold():
    assert acq.c2lse_score(1.5, 0.2, 1.0, 0.1) == pytest.approx(0.4)


def test_c2lse_on_threshold_uses_epsilon():
    assert acq.c2lse_score(1.0, 0.2, 1.0, 0.1) == pytest.approx(2.0)


def test_c2lse_zero_stddev():
    assert acq.c2lse_score(7.3, 0.0, 1.0, 0.1) == 0.0


def test_c2lse_rejects_non_positive_epsilon():
    with pytest.raises(InvalidArgumentError):
        acq.c2lse_score(1.0, 0.2, 1.0, 0.0)


def test_c2lse_vectorized_matches_scalar(rng):
    mean = rng.normal(size=50)
    stddev = rng.uniform(0.0, 1.0, size=50)
    batch = acq.c2lse_score(mean, stddev, 0.3, 0.05)
    assert batch.shape == (50,)
    for m, s, value in zip(mean, stddev, batch):
        assert acq.c2lse_score(float(m), float(s), 0.3, 0.05) == pytest.approx(value)


def test_confidence_one_sigma():
    assert acq.confidence_score(1.2, 0.2, 1.0) == pytest.approx(0.68269, abs=1e-5)


def test_confidence_on_threshold():
    assert acq.confidence_score(1.0, 0.3, 1.0) == pytest.approx(0.0)


def test_confidence_three_sigma():
    assert acq.confidence_score(1.6, 0.2, 1.0) == pytest.approx(0.99730, abs=1e-5)


def test_confidence_zero_stddev_is_one():
    assert acq.confidence_score(1.6, 0.0, 1.0) == 1.0


def test_confidence_matches_normal_cdf(rng):
    mean = rng.normal(size=30)
    stddev = rng.uniform(0.1, 1.0, size=30)
    expected = 2 * norm.cdf(np.abs(mean - 0.2) / stddev) - 1
    np.testing.assert_allclose(acq.confidence_score(mean, stddev, 0.2), expected, atol=1e-12)


def test_small_c2lse_means_confident_classification(rng):
    beta = 3.0
    mean = rng.normal(0.0, 1.0, size=500)
    stddev = rng.uniform(0.0, 0.5, size=500)
    epsilon = 0.05
    score = acq.c2lse_score(mean, stddev, 0.0, epsilon)
    codes = acq.classify_codes(mean, stddev, 0.0, beta)
    far = np.abs(mean) >= epsilon
    # away from the epsilon floor the score is exactly 1 / (normalized margin)
    assert np.all((score[far] < 1 / beta) <= (codes[far] != acq.UNKNOWN_CODE))
    confidence = acq.confidence_score(mean, stddev, 0.0)
    assert np.all(confidence[far & (score < 1 / beta)] > acq.confidence_floor(beta))


def test_confidence_floor():
    assert acq.confidence_floor(1.0) == pytest.approx(0.68269, abs=1e-5)
    assert acq.confidence_floor(3.0) == pytest.approx(0.99730, abs=1e-5)


def test_straddle_examples():
    assert acq.straddle_score(1.0, 1.0, 1.0) == pytest.approx(1.96)
    assert acq.straddle_score(2.0, 0.0, 1.0) < 0
    assert acq.straddle_score(1.0 + 1.96 * 0.5, 0.5, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_lse_ambiguity_examples():
    assert acq.lse_ambiguity_score(1.0, 1.0, 1.0, 3.0) == pytest.approx(3.0)
    assert acq.lse_ambiguity_score(1.4, 0.0, 1.0, 3.0) == pytest.approx(-0.4)
    assert acq.lse_ambiguity_score(0.6, 0.0, 1.0, 3.0) == pytest.approx(-0.4)


def test_lse_ambiguity_positive_inside_band(rng):
    mean = rng.normal(size=200)
    stddev = rng.uniform(0.0, 0.5, size=200)
    score = acq.lse_ambiguity_score(mean, stddev, 0.0, 3.0)
    inside = (mean - 3.0 * stddev < 0.0) & (0.0 < mean + 3.0 * stddev)
    np.testing.assert_array_equal(score > 0, inside)


def test_scores_are_translation_invariant(rng):
    mean = rng.normal(size=20)
    stddev = rng.uniform(0.01, 1.0, size=20)
    shift = 4.2
    np.testing.assert_allclose(
        acq.c2lse_score(mean, stddev, 0.5, 0.05), acq.c2lse_score(mean + shift, stddev, 0.5 + shift, 0.05)
    )
    np.testing.assert_allclose(
        acq.straddle_score(mean, stddev, 0.5), acq.straddle_score(mean + shift, stddev, 0.5 + shift)
    )


def test_acquisition_surface_dispatch():
    spec = AcquisitionSpec(method=Method.STRADDLE)
    assert acq.acquisition_surface(spec, 1.0, 1.0, 1.0) == pytest.approx(1.96)
    spec = AcquisitionSpec(method=Method.LSE_AMBIGUITY, beta=2.0)
    assert acq.acquisition_surface(spec, 1.0, 1.0, 1.0) == pytest.approx(2.0)
    spec = AcquisitionSpec(epsilon=0.1)
    assert acq.acquisition_surface(spec, 1.0, 0.2, 1.0) == pytest.approx(2.0)


def test_random_has_no_surface():
    with pytest.raises(ValueError):
        AcquisitionSpec(method=Method.RANDOM)


# ==================== CLASSIFICATION ====================

def test_classify_point_examples():
    assert acq.classify_point(1.2, 0.05, 1.0, 3.0) == Label.SUPER
    assert acq.classify_point(0.8, 0.05, 1.0, 3.0) == Label.SUB
    assert acq.classify_point(1.01, 0.05, 1.0, 3.0) == Label.UNKNOWN


def test_band_touching_threshold_is_unknown():
    assert acq.classify_point(1.5, 0.25, 1.0, 2.0) == Label.UNKNOWN
    assert acq.classify_codes(0.5, 0.25, 1.0, 2.0) == acq.UNKNOWN_CODE


def test_classify_point_rejects_bad_arguments():
    with pytest.raises(InvalidArgumentError):
        acq.classify_point(1.0, -0.1, 1.0, 3.0)
    with pytest.raises(InvalidArgumentError):
        acq.classify_point(1.0, 0.1, 1.0, 0.0)


def test_classify_set_on_prior_is_unknown(rng):
    gp = gp_service.fit(KernelSpec(lengthscales=(1.0, 1.0)), ObservationSet.empty(2, 0.1))
    labels = acq.classify_set(gp, rng.uniform(size=(25, 2)), 0.0, 3.0)
    assert labels == [Label.UNKNOWN] * 25


def test_classify_set_with_tiny_beta_follows_sign():
    points = np.array([[0.0], [0.5], [1.0]])
    obs = ObservationSet(points, np.array([-1.0, 0.2, 1.0]), 1e-4)
    gp = gp_service.fit(KernelSpec(lengthscales=(0.2,)), obs)
    mean, _ = gp_service.posterior_mean_var(gp, points)
    labels = acq.classify_set(gp, points, 0.0, 1e-9)
    assert labels == [Label.SUPER if m > 0 else Label.SUB for m in mean]


def test_classify_set_agrees_with_point_calls(rng):
    points = rng.uniform(size=(8, 2))
    obs = ObservationSet(points, np.sin(4 * points[:, 0]), 1e-3)
    gp = gp_service.fit(KernelSpec(lengthscales=(0.3, 0.3)), obs)
    probes = rng.uniform(size=(40, 2))
    labels = acq.classify_set(gp, probes, 0.1, 2.0)
    for x, label in zip(probes, labels):
        mean, var = gp_service.posterior_mean_var(gp, x)
        assert acq.classify_point(mean, float(np.sqrt(var)), 0.1, 2.0) == label


def test_classify_set_needs_points():
    gp = gp_service.fit(KernelSpec(lengthscales=(1.0,)), ObservationSet.empty(1, 0.1))
    with pytest.raises(InvalidArgumentError):
        acq.classify_set(gp, np.empty((0, 1)), 0.0, 3.0)
