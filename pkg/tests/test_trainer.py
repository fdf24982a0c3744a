"""Tests for the SVDD dual solver, threshold and training pipeline."""

import itertools
import math

import numpy as np
import pytest

from app.exceptions import ConvergenceError, DegenerateModelError, InvalidInputError
from app.models import DualSolution, HyperParams, ProcessWindow
from app.services.datagen import default_shape, generate
from app.services.kernel import kernel_matrix
from app.services.scorer import distances
from app.services.trainer import (
    compute_threshold,
    fit,
    prune_solution,
    refine_solution,
    solve_dual,
    threshold_candidates,
    train,
)
from tests.conftest import FIXTURE_TOL


def active_set_optimum(K: np.ndarray, C: float) -> float:
    """Maximum dual objective by enumerating every (zero, bounded, free) index split.

    On the free set the stationarity conditions 2 K_FF a_F - lambda = d_F - 2 K_FU C
    together with the sum constraint form a linear system; the optimum is the best
    box-feasible solution over all splits.
    """
    n = K.shape[0]
    d = np.diag(K)
    best = -math.inf
    for labels in itertools.product((0, 1, 2), repeat=n):
        labels = np.array(labels)
        bounded = labels == 1
        free = labels == 2
        alpha = np.where(bounded, C, 0.0)
        remaining = 1.0 - C * bounded.sum()
        m = int(free.sum())
        if m == 0:
            if abs(remaining) > 1e-12:
                continue
        else:
            system = np.zeros((m + 1, m + 1))
            system[:m, :m] = 2.0 * K[np.ix_(free, free)]
            system[:m, m] = -1.0
            system[m, :m] = 1.0
            rhs = np.empty(m + 1)
            rhs[:m] = d[free] - 2.0 * K[np.ix_(free, bounded)] @ alpha[bounded]
            rhs[m] = remaining
            try:
                solution = np.linalg.solve(system, rhs)
            except np.linalg.LinAlgError:
                continue
            alpha[free] = solution[:m]
        if alpha.min() < -1e-12 or alpha.max() > C + 1e-12:
            continue
        best = max(best, float(d @ alpha - alpha @ K @ alpha))
    return best


def _window(points) -> ProcessWindow:
    return ProcessWindow(observations=np.asarray(points, dtype=float))


def test_single_point_has_zero_radius():
    window = _window([[2.0, -1.0]])
    model = train(window, HyperParams(bandwidth=1.0))
    np.testing.assert_array_equal(model.alphas, [1.0])
    assert model.threshold_r2 == 0.0
    np.testing.assert_array_equal(model.center_a, [2.0, -1.0])
    assert distances(model, [[2.0, -1.0]])[0] <= model.threshold_r2


def test_two_points_split_mass_evenly():
    window = _window([[0.0, 0.0], [1.0, 0.0]])
    model = train(window, HyperParams(bandwidth=1.0))
    k12 = math.exp(-0.5)
    np.testing.assert_allclose(model.alphas, [0.5, 0.5], atol=1e-12)
    assert model.threshold_r2 == pytest.approx((1.0 - k12) / 2.0, abs=1e-12)
    np.testing.assert_allclose(model.center_a, [0.5, 0.0], atol=1e-12)


def test_equilateral_triangle():
    h = math.sqrt(3.0) / 2.0
    window = _window([[0.0, 0.0], [1.0, 0.0], [0.5, h]])
    model = train(window, HyperParams(bandwidth=0.7))
    k = math.exp(-1.0 / (2.0 * 0.49))
    np.testing.assert_allclose(model.alphas, np.full(3, 1.0 / 3.0), atol=1e-12)
    assert model.threshold_r2 == pytest.approx((2.0 - 2.0 * k) / 3.0, abs=1e-12)
    assert model.boundary_mask.all()


def test_outlier_fraction_one_pins_every_coefficient(rng):
    """C = 1/n leaves the uniform point as the only feasible solution."""
    window = _window(rng.normal(size=(8, 2)))
    model = train(window, HyperParams(bandwidth=1.0, outlier_fraction=1.0))
    np.testing.assert_allclose(model.alphas, np.full(8, 1.0 / 8.0), atol=1e-15)
    K = kernel_matrix(window.observations, 1.0)
    values = np.diag(K) - 2.0 * K @ model.alphas + model.offset_w
    assert model.threshold_r2 == pytest.approx(values.min(), abs=1e-12)


def test_solver_matches_active_set_oracle():
    """200 random problems with n in 2..6 and q in 1..3."""
    rng = np.random.default_rng(2017)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        q = int(rng.integers(1, 4))
        data = rng.normal(size=(n, q))
        s = float(rng.uniform(0.3, 2.0))
        f = float(10 ** rng.uniform(-6, 0))
        C = 1.0 / (n * f)
        K = kernel_matrix(data, s)
        solution = solve_dual(K, C)
        assert solution.converged
        assert solution.objective_value == pytest.approx(active_set_optimum(K, C), abs=1e-6)


def test_solver_iterates_are_feasible_and_monotone(rng):
    data = rng.normal(size=(60, 2))
    K = kernel_matrix(data, 0.6)
    C = 1.0 / (60 * 0.05)
    trace: list[float] = []
    solution = solve_dual(K, C, objective_trace=trace)
    assert solution.converged
    assert len(trace) == solution.iterations + 1
    assert np.all(np.diff(trace) >= -1e-12)
    assert solution.alphas.sum() == pytest.approx(1.0, abs=1e-9)
    assert solution.alphas.min() >= 0.0
    assert solution.alphas.max() <= C


def test_solver_rejects_infeasible_penalty():
    with pytest.raises(InvalidInputError):
        solve_dual(np.eye(4), 0.1)


def test_solver_reports_iteration_cap(rng):
    K = kernel_matrix(rng.normal(size=(30, 2)), 0.5)
    solution = solve_dual(K, 1e6, max_iterations=2)
    assert not solution.converged
    assert solution.iterations == 2
    assert solution.kkt_violation > 1e-6


def test_train_raises_convergence_error(rng):
    window = _window(rng.normal(size=(30, 2)))
    with pytest.raises(ConvergenceError) as excinfo:
        train(window, HyperParams(bandwidth=0.5), max_iterations=2)
    assert excinfo.value.exit_code == 3
    assert excinfo.value.solution.iterations == 2


def test_train_raises_degenerate_model():
    """Both outer points sit at C = 1/2 and the middle one gets nothing."""
    window = _window([[-1.0], [1.0], [0.0]])
    with pytest.raises(DegenerateModelError):
        train(window, HyperParams(bandwidth=1.0, outlier_fraction=2.0 / 3.0))


def test_prune_moves_dropped_mass_to_free_coefficients():
    raw = DualSolution(
        alphas=np.array([0.5, 0.5 - 1e-12, 1e-12]),
        objective_value=0.0,
        iterations=1,
        kkt_violation=0.0,
        converged=True,
    )
    pruned = prune_solution(raw, C=1.0)
    assert pruned.alphas[2] == 0.0
    assert pruned.alphas.sum() == pytest.approx(1.0, abs=1e-15)


def test_prune_keeps_bounded_coefficients_at_the_bound():
    C = 0.4
    raw = DualSolution(
        alphas=np.array([C, C, 0.2 - 3.9e-8] + [3.9e-9] * 10),
        objective_value=0.0,
        iterations=1,
        kkt_violation=0.0,
        converged=True,
    )
    pruned = prune_solution(raw, C)
    np.testing.assert_array_equal(pruned.alphas[:2], [C, C])
    np.testing.assert_array_equal(pruned.alphas[3:], 0.0)
    assert pruned.alphas[2] == pytest.approx(0.2, abs=1e-15)
    assert pruned.alphas.max() <= C
    assert pruned.alphas.sum() == pytest.approx(1.0, abs=1e-15)


def test_refinement_reaches_the_exact_optimum(rng):
    data = rng.normal(size=(6, 2))
    K = kernel_matrix(data, 0.9)
    C = 1.0 / (6 * 0.2)
    loose = solve_dual(K, C, tol=1e-3)
    refined = refine_solution(K, loose, C)
    assert refined.objective_value >= loose.objective_value
    assert refined.objective_value == pytest.approx(active_set_optimum(K, C), abs=1e-12)

    eps = 1e-8 * C
    free = (refined.alphas > eps) & (refined.alphas < C - eps)
    candidates = threshold_candidates(refined, K)[free]
    assert candidates.max() - candidates.min() < 1e-12


def test_refinement_leaves_pinned_solutions_alone():
    K = kernel_matrix(np.array([[0.0], [1.0], [3.0]]), 1.0)
    pinned = solve_dual(K, 1.0 / 3.0)
    assert refine_solution(K, pinned, 1.0 / 3.0) is pinned


@pytest.mark.parametrize("model_name", ["disk_model", "small_disk_model"])
def test_trained_model_satisfies_kkt(request, model_name):
    model = request.getfixturevalue(model_name)
    eps = model.eps_bound
    assert model.converged
    assert model.alphas.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(model.alphas > 0)
    assert np.all(model.alphas <= model.penalty + eps)
    assert model.boundary_mask.any()

    boundary = model.support_vectors[model.boundary_mask]
    dist2 = distances(model, boundary)
    spread = dist2.max() - dist2.min()
    assert spread < 1e-6 * model.threshold_r2
    np.testing.assert_allclose(dist2, model.threshold_r2, atol=1e-6)
    assert np.all(dist2 <= model.threshold_r2)


def test_threshold_is_mean_of_unbounded_candidates(rng):
    data = rng.normal(size=(40, 2))
    K = kernel_matrix(data, 0.8)
    C = 1.0 / (40 * 0.1)
    solution = prune_solution(solve_dual(K, C, tol=FIXTURE_TOL), C)
    candidates = threshold_candidates(solution, K)
    unbounded = (solution.alphas > 1e-8 * C) & (solution.alphas < C - 1e-8 * C)
    assert compute_threshold(solution, K, C) == pytest.approx(candidates[unbounded].mean(), rel=1e-12)


@pytest.mark.parametrize("f", [1e-6, 0.001, 0.05])
def test_training_outliers_within_budget(f):
    window = generate(default_shape("disk", n=500, seed=21))
    model = train(window, HyperParams(bandwidth=1.0, outlier_fraction=f))
    dist2 = distances(model, window.observations)
    assert int(np.count_nonzero(dist2 > model.threshold_r2 + 1e-9)) <= math.ceil(500 * f)
    boundary = distances(model, model.support_vectors[model.boundary_mask])
    assert np.all(boundary <= model.threshold_r2)


def test_training_is_translation_equivariant(rng):
    window = _window(rng.normal(size=(60, 2)))
    shift = np.array([3.0, -2.0])
    hp = HyperParams(bandwidth=0.9, outlier_fraction=0.02)
    model = train(window, hp, tol=FIXTURE_TOL)
    moved = train(window.shifted(shift), hp, tol=FIXTURE_TOL)

    z = rng.normal(size=(25, 2))
    np.testing.assert_allclose(distances(moved, z + shift), distances(model, z), atol=1e-10)
    np.testing.assert_allclose(moved.center_a, model.center_a + shift, atol=1e-10)
    assert moved.threshold_r2 == pytest.approx(model.threshold_r2, abs=1e-10)


def test_training_is_deterministic(rng):
    window = _window(rng.normal(size=(80, 3)))
    hp = HyperParams(bandwidth=1.2, outlier_fraction=0.01)
    first = train(window, hp)
    second = train(window, hp, threads=4)
    np.testing.assert_array_equal(first.alphas, second.alphas)
    assert first.threshold_r2 == second.threshold_r2


def test_fit_uses_heuristic_when_bandwidth_missing():
    window = generate(default_shape("disk", n=200, seed=5))
    model, source = fit(window)
    assert source == "heuristic"
    assert model.hyperparams.outlier_fraction == 1e-6
    supplied, source = fit(window, bandwidth=1.0)
    assert source == "supplied"
    assert supplied.hyperparams.bandwidth == 1.0


def test_fit_rejects_outlier_fraction_out_of_range():
    window = generate(default_shape("disk", n=20, seed=5))
    with pytest.raises(InvalidInputError, match="0 < f <= 1"):
        fit(window, bandwidth=1.0, outlier_fraction=2.0)
    with pytest.raises(InvalidInputError, match="0 < f <= 1"):
        fit(window, bandwidth=1.0, outlier_fraction=0.0)


def test_fit_standardized_model_scores_raw_units():
    window = generate(default_shape("box", centers=[[100.0, 0.0]], widths=[50.0, 1.0], n=300, seed=9))
    model, _source = fit(window, bandwidth=0.8, standardize=True)
    assert model.scaling is not None
    assert distances(model, [[100.0, 0.0]])[0] < model.threshold_r2
    assert distances(model, [[100.0, 5.0]])[0] > model.threshold_r2
