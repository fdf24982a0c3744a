"""Deterministic synthetic process windows: disk, annulus, boomerang, two donuts, box."""

import logging
import math

import numpy as np

from app.exceptions import InvalidInputError
from app.models import ProcessWindow, ShapeKind, ShapeSpec, default_column_names

logger = logging.getLogger(__name__)

# Defaults fit the preset specification boxes: boomerang [-2, 12]^2 centered (5, 5),
# two donuts x in [-10, 20], y in [-10, 30] centered (5, 10).
DEFAULT_SHAPES: dict[ShapeKind, dict] = {
    ShapeKind.DISK: {"centers": [[0.0, 0.0]], "radii": [2.0]},
    ShapeKind.ANNULUS: {"centers": [[0.0, 0.0]], "radii": [2.0, 4.0]},
    ShapeKind.BOOMERANG: {
        "centers": [[5.0, 5.0]],
        "radii": [3.5, 5.0],
        "angular_extent": 180.0,
    },
    ShapeKind.TWO_DONUT: {"centers": [[0.0, 0.0], [10.0, 20.0]], "radii": [2.0, 4.0]},
    ShapeKind.BOX: {"centers": [[0.0, 0.0]], "widths": [2.0, 2.0]},
}


def default_shape(kind: ShapeKind | str, **overrides) -> ShapeSpec:
    """ShapeSpec with the default geometry of ``kind``; keyword arguments override."""
    try:
        kind = ShapeKind(kind)
    except ValueError:
        valid = ", ".join(k.value for k in ShapeKind)
        raise InvalidInputError(f"unknown shape {kind!r}; valid shapes: {valid}") from None
    params = {**DEFAULT_SHAPES[kind], **{k: v for k, v in overrides.items() if v is not None}}
    return ShapeSpec(kind=kind, **params)


def _annulus(rng: np.random.Generator, n: int, r_in: float, r_out: float,
             theta_lo: float = 0.0, theta_hi: float = 2.0 * math.pi) -> np.ndarray:
    # area-uniform: r^2 is uniform on [r_in^2, r_out^2]
    u = rng.random(n)
    v = rng.random(n)
    r = np.sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in))
    theta = theta_lo + v * (theta_hi - theta_lo)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sector_centroid_offset(r_in: float, r_out: float, extent_degrees: float) -> float:
    """Distance from the arc origin to the area centroid of an annulus sector."""
    half = math.radians(extent_degrees) / 2.0
    return (2.0 * math.sin(half) / (3.0 * half)) * (r_out**3 - r_in**3) / (r_out**2 - r_in**2)


def generate(shape: ShapeSpec) -> ProcessWindow:
    """Draw ``shape.n`` points uniformly from the region; deterministic in ``shape.seed``."""
    rng = np.random.default_rng(shape.seed)
    center = np.asarray(shape.centers[0], dtype=np.float64)
    kind = shape.kind

    if kind == ShapeKind.DISK:
        points = center + _annulus(rng, shape.n, 0.0, shape.radii[0])
    elif kind == ShapeKind.ANNULUS:
        points = center + _annulus(rng, shape.n, *shape.radii)
    elif kind == ShapeKind.BOOMERANG:
        # arc symmetric about the upward vertical, placed so its area centroid is `center`
        r_in, r_out = shape.radii
        half = math.radians(shape.angular_extent) / 2.0
        origin = center - np.array([0.0, sector_centroid_offset(r_in, r_out, shape.angular_extent)])
        points = origin + _annulus(rng, shape.n, r_in, r_out, math.pi / 2 - half, math.pi / 2 + half)
    elif kind == ShapeKind.TWO_DONUT:
        first = shape.n - shape.n // 2
        second_center = np.asarray(shape.centers[1], dtype=np.float64)
        points = np.vstack(
            (
                center + _annulus(rng, first, *shape.radii),
                second_center + _annulus(rng, shape.n // 2, *shape.radii),
            )
        )
    elif kind == ShapeKind.BOX:
        widths = np.asarray(shape.widths, dtype=np.float64)
        points = center - widths / 2.0 + rng.random((shape.n, center.size)) * widths
    else:  # pragma: no cover - enum is exhaustive
        raise InvalidInputError(f"unsupported shape {kind}")

    q = points.shape[1]
    names = ["x", "y"] if q == 2 else default_column_names(q)
    logger.debug(f"Generated {shape.n} {kind.value} points (seed {shape.seed})")
    return ProcessWindow(observations=points, column_names=names)
