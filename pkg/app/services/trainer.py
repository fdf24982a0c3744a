"""SVDD training: the kernelized dual, threshold R^2 and input-space center a.

The dual maximizes  sum_i a_i K_ii - sum_ij a_i a_j K_ij  subject to  sum_i a_i = 1
and 0 <= a_i <= C. Internally the solver minimizes the negated objective

    f(a) = a' K a - diag(K)' a,   gradient g = 2 K a - diag(K),

by pairwise descent: each step moves mass from the coefficient with the largest
gradient that can still decrease (a_j > 0) to the one with the smallest gradient
that can still increase (a_i < C). The two-variable subproblem is solved in closed
form and clipped to the box, so the sum constraint holds at every iterate and the
objective never gets worse. KKT holds when max_{a_j>0} g_j - min_{a_i<C} g_i <= tol.
"""

import logging

import numpy as np
from pydantic import ValidationError

from app.config import settings
from app.exceptions import ConvergenceError, DegenerateModelError, InvalidInputError
from app.models import (
    EPS_BOUND_FACTOR,
    ColumnScaling,
    DualSolution,
    HyperParams,
    ProcessWindow,
    SvddModel,
)
from app.services.kernel import kernel_matrix, median_bandwidth
from app.services.scorer import distances

logger = logging.getLogger(__name__)

# Floor for the curvature of a pair update (coincident points give zero).
MIN_CURVATURE = 1e-12

# Relative spread of per-point thresholds above which training logs a warning.
THRESHOLD_SPREAD_WARNING = 1e-6

# Active-set refinement: round limit and the gradient slack for entering or leaving
# the free set.
REFINE_MAX_ROUNDS = 50
REFINE_TOLERANCE = 1e-12

# Boundary support vectors scoring this far above the mean threshold are rounding ties.
TIE_TOLERANCE = 1e-12

PROGRESS_LOG_EVERY = 10_000


def default_max_iterations(n: int) -> int:
    return int(min(100 * n * n, settings.max_iterations_cap))


def solve_dual(
    kernel: np.ndarray,
    C: float,
    tol: float | None = None,
    max_iterations: int | None = None,
    objective_trace: list[float] | None = None,
) -> DualSolution:
    """Solve the box-constrained simplex QP of the SVDD dual.

    Starts from the uniform point a_i = 1/n. Pair selection takes the lowest index
    among ties. When ``max_iterations`` is reached the last iterate is returned with
    ``converged=False``. ``objective_trace`` receives the dual objective after every
    step when given.
    """
    K = np.asarray(kernel, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] < 1:
        raise InvalidInputError(f"kernel must be a non-empty square matrix, got {K.shape}")
    n = K.shape[0]
    if not np.isfinite(C) or C * n < 1.0 - 1e-12:
        raise InvalidInputError(
            f"penalty C={C!r} is below 1/n={1.0 / n!r}: the dual has no feasible point"
        )
    tol = settings.kkt_tolerance if tol is None else tol
    max_iterations = default_max_iterations(n) if max_iterations is None else max_iterations

    diag = np.diag(K).copy()
    alpha = np.full(n, min(1.0 / n, C))
    grad = 2.0 * (K @ alpha) - diag
    # negated dual objective, updated incrementally
    value = float(alpha @ (K @ alpha) - diag @ alpha)
    if objective_trace is not None:
        objective_trace.append(-value)

    iterations = 0
    gap = 0.0
    converged = False
    while True:
        can_increase = alpha < C
        can_decrease = alpha > 0.0
        if not can_increase.any() or not can_decrease.any():
            gap = 0.0
            converged = True
            break
        i = int(np.argmin(np.where(can_increase, grad, np.inf)))
        j = int(np.argmax(np.where(can_decrease, grad, -np.inf)))
        gap = float(grad[j] - grad[i])
        if gap <= tol:
            converged = True
            break
        if iterations >= max_iterations:
            break

        Ki = K[i]
        Kj = K[j]
        curvature = max(Ki[i] + Kj[j] - 2.0 * Ki[j], MIN_CURVATURE)
        step = gap / (2.0 * curvature)
        room_i = C - alpha[i]
        room_j = alpha[j]
        old_i = alpha[i]
        old_j = alpha[j]
        if step >= room_i and room_i <= room_j:
            alpha[i] = C
            alpha[j] = old_j - room_i if room_i < room_j else 0.0
        elif step >= room_j:
            alpha[i] = old_i + room_j
            alpha[j] = 0.0
        else:
            alpha[i] = old_i + step
            alpha[j] = old_j - step
        d_i = alpha[i] - old_i
        d_j = alpha[j] - old_j

        value += (
            d_i * grad[i]
            + d_j * grad[j]
            + d_i * d_i * Ki[i]
            + d_j * d_j * Kj[j]
            + 2.0 * d_i * d_j * Ki[j]
        )
        grad += 2.0 * (d_i * Ki + d_j * Kj)
        iterations += 1
        if objective_trace is not None:
            objective_trace.append(-value)
        if iterations % PROGRESS_LOG_EVERY == 0:
            logger.debug(f"Dual solver iteration {iterations}: KKT gap {gap:.3e}")

    objective = float(diag @ alpha - alpha @ (K @ alpha))
    if not converged:
        logger.warning(
            f"Dual solver stopped after {iterations} iterations with KKT violation {gap:.3e}"
        )
    return DualSolution(
        alphas=alpha,
        objective_value=objective,
        iterations=iterations,
        kkt_violation=max(gap, 0.0),
        converged=converged,
    )


def refine_solution(kernel: np.ndarray, solution: DualSolution, C: float) -> DualSolution:
    """Polish a converged solution by solving the KKT system on its active set.

    Coefficients at the bound are fixed at C, coefficients at or below eps_bound at 0,
    and the free ones solve

        [2 K_FF  -1] [a_F   ]   [diag_F - 2 C K_FB 1]
        [  1'     0] [lambda] = [1 - C |B|          ]

    so every free gradient equals lambda. Points whose gradient violates the KKT sign
    for their set move between sets and the system is solved again. Returns the input
    unchanged when no free coefficient exists, the system is singular, or the sets
    do not settle within REFINE_MAX_ROUNDS.
    """
    K = np.asarray(kernel, dtype=np.float64)
    diag = np.diag(K)
    eps = EPS_BOUND_FACTOR * C
    alpha = solution.alphas
    at_bound = alpha >= C - eps
    free = (alpha > eps) & ~at_bound

    for _ in range(REFINE_MAX_ROUNDS):
        m = int(free.sum())
        if m == 0:
            break
        candidate = np.where(at_bound, C, 0.0)
        K_ff = K[np.ix_(free, free)]
        system = np.block([
            [2.0 * K_ff, -np.ones((m, 1))],
            [np.ones((1, m)), np.zeros((1, 1))],
        ])
        rhs = np.append(
            diag[free] - 2.0 * (K[np.ix_(free, at_bound)] @ candidate[at_bound]),
            1.0 - candidate.sum(),
        )
        try:
            sol = np.linalg.solve(system, rhs)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(sol)):
            break
        candidate[free] = sol[:m]
        level = sol[m]

        grad = 2.0 * (K @ candidate) - diag
        leaving_low = free & (candidate <= eps)
        leaving_high = free & (candidate >= C - eps)
        entering = ~free & ~at_bound & (grad < level - REFINE_TOLERANCE)
        released = at_bound & (grad > level + REFINE_TOLERANCE)
        if not (leaving_low.any() or leaving_high.any() or entering.any() or released.any()):
            objective = float(diag @ candidate - candidate @ (K @ candidate))
            if objective < solution.objective_value - 1e-12:
                break
            logger.debug(f"Active-set refinement settled on {m} free coefficients")
            return DualSolution(
                alphas=candidate,
                objective_value=objective,
                iterations=solution.iterations,
                kkt_violation=solution.kkt_violation,
                converged=solution.converged,
            )
        free = (free & ~leaving_low & ~leaving_high) | entering | released
        at_bound = (at_bound & ~released) | leaving_high

    logger.debug("Active-set refinement did not settle; keeping the pairwise solution")
    return solution


def threshold_candidates(
    solution: DualSolution, kernel: np.ndarray
) -> np.ndarray:
    """Per-point squared distance K_kk - 2 sum_i a_i K_ik + sum_ij a_i a_j K_ij."""
    K = np.asarray(kernel, dtype=np.float64)
    alpha = solution.alphas
    k_alpha = K @ alpha
    offset = float(alpha @ k_alpha)
    return np.diag(K) - 2.0 * k_alpha + offset


def compute_threshold(solution: DualSolution, kernel: np.ndarray, C: float) -> float:
    """Threshold R^2 averaged over all unbounded support vectors (0 < a_k < C).

    When every coefficient is pinned at C = 1/n the feasible set is a single point and
    R^2 is the smallest per-point value, the largest radius that keeps every pinned
    point on or outside the boundary.
    """
    eps = EPS_BOUND_FACTOR * C
    alpha = solution.alphas
    support = alpha > eps
    unbounded = support & (alpha < C - eps)
    candidates = threshold_candidates(solution, kernel)

    if unbounded.any():
        values = candidates[unbounded]
        r2 = float(np.mean(values))
        spread = float(values.max() - values.min())
        if spread > THRESHOLD_SPREAD_WARNING * max(abs(r2), 1e-12):
            logger.warning(
                f"Per-point thresholds spread {spread:.3e} around R^2={r2:.6g}"
            )
    elif len(alpha) * C <= 1.0 + 1e-9:
        r2 = float(candidates[support].min())
    else:
        raise DegenerateModelError(
            "every support vector sits at the bound C; no unbounded support vector "
            "defines the threshold (lower the outlier fraction)"
        )
    return max(r2, 0.0)


def compute_center(solution: DualSolution, window: ProcessWindow) -> np.ndarray:
    """Input-space center a = sum_i a_i x_i."""
    alpha = solution.alphas
    if alpha.shape[0] != window.n:
        raise InvalidInputError(
            f"{alpha.shape[0]} coefficients for a window of {window.n} rows"
        )
    nonzero = alpha > 0.0
    return alpha[nonzero] @ window.observations[nonzero]


def prune_solution(solution: DualSolution, C: float) -> DualSolution:
    """Zero coefficients at or below eps_bound and hand their mass to the free ones.

    The dropped mass is shared among free coefficients in proportion to their room
    below C, so no coefficient is pushed past the bound. Without a free coefficient
    the retained ones are rescaled and clipped at C.
    """
    eps = EPS_BOUND_FACTOR * C
    kept = solution.alphas > eps
    alpha = np.where(kept, solution.alphas, 0.0)
    dropped = 1.0 - float(alpha.sum())
    free = kept & (alpha < C - eps)
    if free.any():
        room = C - alpha[free]
        alpha[free] += dropped * room / room.sum()
    else:
        alpha = alpha / alpha.sum()
    alpha = np.minimum(alpha, C)
    return DualSolution(
        alphas=alpha,
        objective_value=solution.objective_value,
        iterations=solution.iterations,
        kkt_violation=solution.kkt_violation,
        converged=solution.converged,
    )


def admit_boundary_ties(model: SvddModel) -> SvddModel:
    """Raise R^2 to the largest boundary-SV score when they differ only by rounding.

    Boundary support vectors lie on the boundary, and ties count as inliers.
    """
    if not model.boundary_mask.any():
        return model
    highest = float(distances(model, model.support_vectors[model.boundary_mask]).max())
    excess = highest - model.threshold_r2
    if 0.0 < excess <= TIE_TOLERANCE * max(model.threshold_r2, 1.0):
        return model.model_copy(update={"threshold_r2": highest})
    return model


def train(
    window: ProcessWindow,
    hp: HyperParams,
    tol: float | None = None,
    max_iterations: int | None = None,
    threads: int | None = None,
) -> SvddModel:
    """Train an SVDD on ``window``; deterministic for fixed inputs.

    Raises:
        ConvergenceError: the solver hit its iteration cap.
        DegenerateModelError: no unbounded support vector.
    """
    n = window.n
    C = hp.penalty(n)
    logger.debug(f"Training SVDD on {n}x{window.q} window, s={hp.bandwidth!r}, C={C!r}")

    K = kernel_matrix(window.observations, hp.bandwidth, threads=threads)
    raw = solve_dual(K, C, tol=tol, max_iterations=max_iterations)
    if not raw.converged:
        raise ConvergenceError(
            f"dual solver did not converge after {raw.iterations} iterations "
            f"(KKT violation {raw.kkt_violation:.3e})",
            solution=raw,
        )

    solution = prune_solution(refine_solution(K, raw, C), C)
    threshold = compute_threshold(solution, K, C)
    center = compute_center(solution, window)

    support = solution.alphas > 0.0
    alphas = solution.alphas[support]
    offset = float(alphas @ (K[np.ix_(support, support)] @ alphas))
    boundary = alphas < C - EPS_BOUND_FACTOR * C

    model = SvddModel(
        support_vectors=window.observations[support],
        alphas=alphas,
        threshold_r2=threshold,
        center_a=center,
        offset_w=offset,
        hyperparams=hp,
        penalty=C,
        boundary_mask=boundary,
        column_names=list(window.column_names),
        n_train=n,
        iterations=raw.iterations,
        kkt_violation=raw.kkt_violation,
        converged=raw.converged,
    )
    model = admit_boundary_ties(model)
    logger.info(
        f"Trained SVDD: n={n}, q={window.q}, support vectors={model.n_support} "
        f"({int(boundary.sum())} on boundary), R^2={model.threshold_r2:.6g}, "
        f"iterations={raw.iterations}"
    )
    return model


def fit(
    window: ProcessWindow,
    bandwidth: float | None = None,
    outlier_fraction: float | None = None,
    standardize: bool = False,
    tol: float | None = None,
) -> tuple[SvddModel, str]:
    """Train with front-end defaults.

    A missing bandwidth falls back to the median heuristic (computed on the
    standardized data when ``standardize`` is set), a missing outlier fraction to
    ``settings.default_outlier_fraction``. Returns the model and ``"supplied"`` or
    ``"heuristic"`` for the bandwidth source.
    """
    scaling = ColumnScaling.fit(window) if standardize else None
    training = scaling.transform_window(window) if scaling is not None else window
    hp, source = resolve_hyperparams(training, bandwidth, outlier_fraction)

    model = train(training, hp, tol=tol)
    if scaling is not None:
        model = model.model_copy(update={"scaling": scaling})
    return model, source


def resolve_hyperparams(
    training: ProcessWindow,
    bandwidth: float | None = None,
    outlier_fraction: float | None = None,
) -> tuple[HyperParams, str]:
    """Validated HyperParams, filling gaps with the heuristic and the default f."""
    source = "supplied"
    if bandwidth is None:
        bandwidth = median_bandwidth(training.observations)
        source = "heuristic"
        logger.warning(f"No bandwidth given; median heuristic chose s={bandwidth!r}")
    if outlier_fraction is None:
        outlier_fraction = settings.default_outlier_fraction
    try:
        return HyperParams(bandwidth=bandwidth, outlier_fraction=outlier_fraction), source
    except ValidationError as e:
        raise InvalidInputError(_hyperparam_message(e)) from None


def _hyperparam_message(error: ValidationError) -> str:
    field = str(error.errors()[0]["loc"][0])
    if field == "outlier_fraction":
        return "outlier fraction f must satisfy 0 < f <= 1"
    return "bandwidth s must be positive and finite"
