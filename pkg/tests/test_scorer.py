"""Tests for scoring observations against trained models."""

import math

import numpy as np
import pytest

from app.exceptions import InvalidInputError
from app.models import HyperParams, ProcessWindow
from app.services.scorer import distances, inlier_mask, score, score_batch
from app.services.trainer import train


def test_far_point_approaches_one_plus_offset(small_disk_model):
    """Every kernel term vanishes, leaving dist^2 = 1 + w."""
    result = score(small_disk_model, np.array([1e4, -1e4]))
    assert result.dist2 == pytest.approx(1.0 + small_disk_model.offset_w, abs=1e-12)
    assert result.is_outlier


def test_center_is_inlier(small_disk_model):
    result = score(small_disk_model, np.array([0.0, 0.0]))
    assert not result.is_outlier
    assert 0.0 <= result.dist2 <= small_disk_model.threshold_r2


def test_score_batch_matches_single_scores(small_disk_model, rng):
    z = rng.uniform(-3.0, 3.0, size=(50, 2))
    batch = score_batch(small_disk_model, z)
    assert len(batch) == 50
    for row, result in zip(z, batch, strict=True):
        assert score(small_disk_model, row) == result


def test_distances_independent_of_chunking(small_disk_model, rng):
    z = rng.uniform(-3.0, 3.0, size=(101, 2))
    reference = distances(small_disk_model, z)
    np.testing.assert_array_equal(distances(small_disk_model, z, chunk_rows=7), reference)
    np.testing.assert_array_equal(distances(small_disk_model, z, chunk_rows=1), reference)


def test_empty_batch(small_disk_model):
    assert score_batch(small_disk_model, np.empty((0, 2))) == []
    assert inlier_mask(small_disk_model, np.empty((0, 2))).shape == (0,)


def test_distances_are_never_negative(small_disk_model):
    np.testing.assert_array_equal(distances(small_disk_model, small_disk_model.support_vectors) >= 0, True)


def test_dimension_mismatch(small_disk_model):
    with pytest.raises(InvalidInputError, match="expects 2"):
        distances(small_disk_model, np.zeros((3, 3)))
    with pytest.raises(InvalidInputError):
        score(small_disk_model, np.zeros(3))


def test_non_finite_rows_rejected(small_disk_model):
    with pytest.raises(InvalidInputError):
        distances(small_disk_model, np.array([[0.0, np.nan]]))


def test_boundary_support_vectors_sit_on_threshold(disk_model):
    boundary = disk_model.support_vectors[disk_model.boundary_mask]
    assert len(boundary) > 0
    np.testing.assert_allclose(
        distances(disk_model, boundary), disk_model.threshold_r2, rtol=1e-6, atol=1e-12
    )


def test_far_point_and_support_vector_batch(disk_model):
    sv = disk_model.support_vectors[disk_model.boundary_mask][0]
    far, on_boundary = score_batch(disk_model, np.vstack([[1e4, 1e4], sv]))
    assert far.is_outlier
    assert on_boundary.dist2 == pytest.approx(disk_model.threshold_r2, rel=1e-6)
    assert not on_boundary.is_outlier


def test_single_point_model_scores_its_point_as_inlier():
    window = ProcessWindow(observations=np.array([[1.5, -0.5]]))
    model = train(window, HyperParams(bandwidth=1.0, outlier_fraction=1.0))
    result = score(model, np.array([1.5, -0.5]))
    assert result.dist2 == 0.0
    assert not result.is_outlier

def test_training_window_respects_outlier_budget(disk_window, disk_model):
    dist2 = distances(disk_model, disk_window.observations)
    assert np.count_nonzero(dist2 > disk_model.threshold_r2 + 1e-9) <= 1


def test_distance_grows_along_a_ray(small_disk_model):
    """Past the support vectors every kernel term shrinks, so dist^2 rises toward 1 + w."""
    direction = np.array([0.6, -0.8])
    t = np.arange(3.0, 12.0, 0.25)
    rays = small_disk_model.center_a + t[:, None] * direction
    dist2 = distances(small_disk_model, rays)
    assert np.all(np.diff(dist2) > 0)
    assert np.all(dist2 < 1.0 + small_disk_model.offset_w)
    limit = score(small_disk_model, small_disk_model.center_a + 1e4 * direction).dist2
    assert limit == pytest.approx(1.0 + small_disk_model.offset_w, abs=1e-12)


def test_two_point_model_far_limit():
    window = ProcessWindow(observations=np.array([[0.0, 0.0], [1.0, 0.0]]))
    model = train(window, HyperParams(bandwidth=1.0))
    k = math.exp(-0.5)
    assert model.offset_w == pytest.approx(0.5 + 0.5 * k, abs=1e-12)
    assert score(model, np.array([1e4, 0.0])).dist2 == pytest.approx(1.5 + 0.5 * k, abs=1e-12)
