"""Gaussian kernel evaluation and helpers shared by training, scoring and simulation."""

import logging
from multiprocessing.pool import ThreadPool

import numpy as np
from scipy.spatial.distance import pdist

from app.config import settings
from app.exceptions import InvalidInputError
from app.models import SpecLimits

logger = logging.getLogger(__name__)

# Rows used by the median heuristic.
MEDIAN_HEURISTIC_MAX_ROWS = 2000

# Upper bound on elements of one difference buffer (rows x columns x q).
DIFF_BUFFER_ELEMENTS = 1 << 20


def _as_matrix(data: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(data, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    if matrix.ndim != 2:
        raise InvalidInputError(f"{name} must be a matrix, got {matrix.ndim} dimensions")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError(f"{name} contains NaN or infinite values")
    return matrix


def _check_bandwidth(s: float) -> float:
    s = float(s)
    if not (np.isfinite(s) and s > 0):
        raise InvalidInputError(f"bandwidth must be positive and finite, got {s!r}")
    return s


def squared_distances(rows: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, accumulated through the difference vector.

    Each entry depends only on its own pair of rows, so any row partitioning of
    ``rows`` yields bit-identical entries.
    """
    diff = rows[:, None, :] - columns[None, :, :]
    return np.sum(diff * diff, axis=-1)


def gaussian(d2: np.ndarray, s: float) -> np.ndarray:
    """exp(-d2 / (2 s^2)) elementwise."""
    return np.exp(-d2 / (2.0 * s * s))


def cross_kernel(rows: np.ndarray, columns: np.ndarray, s: float) -> np.ndarray:
    """K(rows_i, columns_j) for already validated inputs."""
    return gaussian(squared_distances(rows, columns), s)


def kernel_eval(x: np.ndarray, y: np.ndarray, s: float) -> float:
    """Gaussian kernel exp(-||x - y||^2 / (2 s^2)) for two q-vectors."""
    s = _check_bandwidth(s)
    xv = _as_matrix(x, "x")
    yv = _as_matrix(y, "y")
    if xv.shape != yv.shape or xv.shape[0] != 1:
        raise InvalidInputError(
            f"kernel arguments must be vectors of equal length, got {xv.shape[1]} and {yv.shape[1]}"
        )
    return float(cross_kernel(xv, yv, s)[0, 0])


def kernel_matrix(
    data: np.ndarray,
    s: float,
    threads: int | None = None,
    chunk_rows: int | None = None,
) -> np.ndarray:
    """Symmetric n x n Gaussian Gram matrix with unit diagonal.

    Row blocks are filled by up to ``threads`` workers; the result does not depend on
    the worker count.
    """
    s = _check_bandwidth(s)
    matrix = _as_matrix(data, "data")
    threads = threads or settings.threads
    n, q = matrix.shape
    chunk_rows = chunk_rows or max(1, DIFF_BUFFER_ELEMENTS // (n * q))
    gram = np.empty((n, n), dtype=np.float64)

    def fill(start: int) -> None:
        stop = min(start + chunk_rows, n)
        gram[start:stop] = cross_kernel(matrix[start:stop], matrix, s)

    starts = list(range(0, n, chunk_rows))
    if threads > 1 and len(starts) > 1:
        with ThreadPool(min(threads, len(starts))) as pool:
            pool.map(fill, starts)
    else:
        for start in starts:
            fill(start)
    return gram


def spec_center(spec: SpecLimits) -> np.ndarray:
    """Midpoints (lsl_j + usl_j) / 2 of the specification box."""
    return spec.center


def median_bandwidth(data: np.ndarray, max_rows: int = MEDIAN_HEURISTIC_MAX_ROWS) -> float:
    """Median pairwise Euclidean distance over the first ``max_rows`` rows.

    Fallback when no bandwidth is supplied; not a substitute for a tuned value.
    """
    matrix = _as_matrix(data, "data")[:max_rows]
    if matrix.shape[0] < 2:
        raise InvalidInputError("median bandwidth heuristic needs at least two rows")
    distances = pdist(matrix, metric="euclidean")
    s = float(np.median(distances))
    if s <= 0:
        positive = distances[distances > 0]
        if positive.size == 0:
            raise InvalidInputError("median bandwidth heuristic needs two distinct rows")
        s = float(np.median(positive))
    logger.debug(f"Median heuristic bandwidth s={s!r} from {matrix.shape[0]} rows")
    return s
