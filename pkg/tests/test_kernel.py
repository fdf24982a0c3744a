"""Tests for the Gaussian kernel."""

import math

import numpy as np
import pytest

from app.exceptions import InvalidInputError
from app.models import SpecLimits
from app.services.kernel import (
    cross_kernel,
    kernel_eval,
    kernel_matrix,
    median_bandwidth,
    spec_center,
)


def test_kernel_eval_identical_points():
    """K(x, x) = 1 for any bandwidth."""
    assert kernel_eval([0.0, 0.0], [0.0, 0.0], 1.0) == 1.0
    assert kernel_eval([3.5, -2.0, 7.0], [3.5, -2.0, 7.0], 0.01) == 1.0


def test_kernel_eval_known_values():
    """exp(-||x - y||^2 / (2 s^2)) on hand-computed pairs."""
    assert kernel_eval([0.0, 0.0], [1.0, 0.0], 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert kernel_eval([1.0, 2.0], [4.0, 6.0], 5.0) == pytest.approx(math.exp(-0.5), rel=1e-15)


def test_kernel_eval_far_points_underflow_to_zero():
    assert kernel_eval([0.0], [1e6], 1.0) == 0.0


def test_kernel_eval_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        kernel_eval([0.0, 0.0], [0.0, 0.0], 0.0)
    with pytest.raises(InvalidInputError):
        kernel_eval([0.0, 0.0], [0.0], 1.0)


def test_kernel_is_translation_invariant(rng):
    """Computed from the difference vector, so shifting both points changes nothing."""
    x = rng.normal(size=3)
    y = rng.normal(size=3)
    shift = np.array([100.0, -40.0, 7.0])
    assert kernel_eval(x + shift, y + shift, 1.3) == pytest.approx(kernel_eval(x, y, 1.3), abs=1e-12)


def test_kernel_matrix_symmetric_unit_diagonal(rng):
    data = rng.normal(size=(40, 3))
    K = kernel_matrix(data, 0.8)
    assert K.shape == (40, 40)
    np.testing.assert_array_equal(K, K.T)
    np.testing.assert_array_equal(np.diag(K), np.ones(40))
    assert np.all((K > 0) & (K <= 1))


@pytest.mark.parametrize("m", [2, 3, 5, 10])
def test_kernel_matrix_positive_semidefinite(rng, m):
    data = rng.normal(size=(m, 2))
    eigenvalues = np.linalg.eigvalsh(kernel_matrix(data, 0.5))
    assert eigenvalues.min() >= -1e-10


def test_kernel_matrix_independent_of_threads_and_chunks(rng):
    data = rng.normal(size=(150, 2))
    reference = kernel_matrix(data, 1.1, threads=1)
    np.testing.assert_array_equal(kernel_matrix(data, 1.1, threads=4), reference)
    np.testing.assert_array_equal(kernel_matrix(data, 1.1, threads=3, chunk_rows=7), reference)


def test_cross_kernel_matches_pointwise(rng):
    rows = rng.normal(size=(4, 2))
    columns = rng.normal(size=(3, 2))
    K = cross_kernel(rows, columns, 0.9)
    for i in range(4):
        for j in range(3):
            assert K[i, j] == pytest.approx(kernel_eval(rows[i], columns[j], 0.9), rel=1e-14)


def test_spec_center_is_midpoint():
    spec = SpecLimits(lsl=[64.0, 0.0, 70.0], usl=[171.0, 132.0, 147.0])
    np.testing.assert_array_equal(spec_center(spec), [117.5, 66.0, 108.5])


def test_median_bandwidth():
    data = np.array([[0.0], [1.0], [3.0]])
    # pairwise distances 1, 3, 2
    assert median_bandwidth(data) == 2.0


def test_median_bandwidth_needs_distinct_rows():
    with pytest.raises(InvalidInputError):
        median_bandwidth(np.array([[1.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        median_bandwidth(np.zeros((5, 2)))


def test_kernel_eval_rises_to_one_with_bandwidth():
    values = [kernel_eval([0.0, 0.0], [3.0, 4.0], s) for s in (0.5, 1.0, 2.0, 8.0, 64.0, 1e4)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] < 1.0
    assert values[-1] == pytest.approx(1.0, abs=1e-6)
