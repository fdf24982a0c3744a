"""Scoring observations against a trained SVDD model."""

import logging

import numpy as np

from app.config import settings
from app.exceptions import InvalidInputError
from app.models import ScoreResult, SvddModel
from app.services.kernel import cross_kernel

logger = logging.getLogger(__name__)


def _prepare(model: SvddModel, data: np.ndarray) -> np.ndarray:
    matrix = np.asarray(data, dtype=np.float64)
    if matrix.size == 0:
        return matrix.reshape(0, model.q)
    if matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    if matrix.ndim != 2:
        raise InvalidInputError(f"scoring data must be a matrix, got {matrix.ndim} dimensions")
    if matrix.shape[0] and matrix.shape[1] != model.q:
        raise InvalidInputError(
            f"scoring data has {matrix.shape[1]} columns, model expects {model.q}"
        )
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError("scoring data contains NaN or infinite values")
    if model.scaling is not None:
        matrix = model.scaling.transform(matrix)
    return matrix


def distances(
    model: SvddModel, data: np.ndarray, chunk_rows: int | None = None
) -> np.ndarray:
    """dist^2(z) = 1 - 2 sum_i a_i K(x_i, z) + w for every row z of ``data``.

    Rows are independent: the value for a row does not depend on the chunking or on
    the other rows, so any partitioning gives bit-identical results.
    """
    matrix = _prepare(model, data)
    m = matrix.shape[0]
    out = np.empty(m, dtype=np.float64)
    if m == 0:
        return out
    chunk_rows = chunk_rows or settings.score_chunk_rows
    s = model.hyperparams.bandwidth
    for start in range(0, m, chunk_rows):
        stop = min(start + chunk_rows, m)
        cross = cross_kernel(matrix[start:stop], model.support_vectors, s)
        weighted = np.sum(cross * model.alphas, axis=1)
        out[start:stop] = 1.0 - 2.0 * weighted + model.offset_w
    # rounding can push exact boundary/center points just below zero
    np.maximum(out, 0.0, out=out)
    return out


def inlier_mask(model: SvddModel, data: np.ndarray, chunk_rows: int | None = None) -> np.ndarray:
    """True where dist^2 <= R^2 (boundary ties count as inliers)."""
    return distances(model, data, chunk_rows) <= model.threshold_r2


def score(model: SvddModel, z: np.ndarray) -> ScoreResult:
    """Score a single q-vector."""
    vector = np.asarray(z, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != model.q:
        raise InvalidInputError(
            f"observation must be a vector of length {model.q}, got shape {vector.shape}"
        )
    dist2 = float(distances(model, vector.reshape(1, -1))[0])
    return ScoreResult(dist2=dist2, is_outlier=dist2 > model.threshold_r2)


def score_batch(model: SvddModel, data: np.ndarray) -> list[ScoreResult]:
    """Score every row of an m x q matrix, preserving order."""
    dist2 = distances(model, data)
    r2 = model.threshold_r2
    return [ScoreResult(dist2=float(d), is_outlier=bool(d > r2)) for d in dist2]
