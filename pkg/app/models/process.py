"""Domain types for process windows, specification limits and SVDD models."""

from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

# Coefficients at or below this fraction of C count as zero, and within it of C as bounded.
EPS_BOUND_FACTOR = 1e-8

# Largest seed accepted (64-bit unsigned).
MAX_SEED = 2**64 - 1


def _frozen_array(value: Any, ndim: int, name: str) -> np.ndarray:
    """Copy ``value`` into a read-only float64 array of the given rank."""
    try:
        array = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ValueError(f"{name} must be numeric: {e}") from e
    if ndim == 2 and array.ndim == 1 and array.size == 0:
        array = array.reshape(0, 0)
    if array.ndim != ndim:
        raise ValueError(f"{name} must have {ndim} dimension(s), got {array.ndim}")
    array.setflags(write=False)
    return array


def default_column_names(q: int) -> list[str]:
    """Column labels used when none are supplied."""
    return [f"x{j + 1}" for j in range(q)]


class ProcessWindow(BaseModel):
    """An n x q matrix of in-control process measurements."""

    observations: np.ndarray = Field(..., description="n x q measurement matrix")
    column_names: list[str] = Field(default_factory=list, description="q column labels")

    class Config:
        """Pydantic config."""

        frozen = True
        arbitrary_types_allowed = True

    @field_validator("observations", mode="before")
    @classmethod
    def _coerce_observations(cls, value: Any) -> np.ndarray:
        array = _frozen_array(value, 2, "observations")
        n, q = array.shape
        if n < 1 or q < 1:
            raise ValueError(f"window needs at least one row and one column, got {n}x{q}")
        if not np.all(np.isfinite(array)):
            raise ValueError("observations contain NaN or infinite values")
        return array

    @model_validator(mode="after")
    def _check_names(self) -> "ProcessWindow":
        q = self.observations.shape[1]
        if not self.column_names:
            object.__setattr__(self, "column_names", default_column_names(q))
        elif len(self.column_names) != q:
            raise ValueError(
                f"{len(self.column_names)} column names for {q} columns"
            )
        return self

    @property
    def n(self) -> int:
        return int(self.observations.shape[0])

    @property
    def q(self) -> int:
        return int(self.observations.shape[1])

    def shifted(self, offset: np.ndarray) -> "ProcessWindow":
        """Window translated by a constant vector."""
        return ProcessWindow(
            observations=self.observations + np.asarray(offset, dtype=np.float64),
            column_names=list(self.column_names),
        )


class SpecLimits(BaseModel):
    """Per-variable engineering specification limits [LSL_j, USL_j]."""

    names: list[str] = Field(default_factory=list, description="Variable labels")
    lsl: np.ndarray = Field(..., description="Lower specification limits")
    usl: np.ndarray = Field(..., description="Upper specification limits")

    class Config:
        """Pydantic config."""

        frozen = True
        arbitrary_types_allowed = True

    @field_validator("lsl", "usl", mode="before")
    @classmethod
    def _coerce_limits(cls, value: Any) -> np.ndarray:
        array = _frozen_array(value, 1, "limits")
        if array.size < 1:
            raise ValueError("at least one variable is required")
        if not np.all(np.isfinite(array)):
            raise ValueError("specification limits must be finite")
        return array

    @model_validator(mode="after")
    def _check_limits(self) -> "SpecLimits":
        if self.lsl.shape != self.usl.shape:
            raise ValueError("lsl and usl must have the same length")
        bad = np.flatnonzero(~(self.lsl < self.usl))
        if bad.size:
            j = int(bad[0])
            label = self.names[j] if j < len(self.names) else f"#{j + 1}"
            raise ValueError(
                f"variable {label}: lsl ({self.lsl[j]!r}) must be < usl ({self.usl[j]!r})"
            )
        if not self.names:
            object.__setattr__(self, "names", default_column_names(self.q))
        elif len(self.names) != self.q:
            raise ValueError(f"{len(self.names)} names for {self.q} variables")
        return self

    @property
    def q(self) -> int:
        return int(self.lsl.shape[0])

    @property
    def center(self) -> np.ndarray:
        return (self.lsl + self.usl) / 2.0

    @property
    def volume(self) -> float:
        return float(np.prod(self.usl - self.lsl))


class HyperParams(BaseModel):
    """Gaussian bandwidth s and expected outlier fraction f."""

    bandwidth: float = Field(..., gt=0, allow_inf_nan=False, description="Gaussian bandwidth s")
    outlier_fraction: float = Field(
        1e-6, gt=0, le=1, allow_inf_nan=False, description="Expected outlier fraction f"
    )

    class Config:
        """Pydantic config."""

        frozen = True

    def penalty(self, n: int) -> float:
        """C = 1 / (n f); never below 1/n since f <= 1."""
        return 1.0 / (n * self.outlier_fraction)


class ColumnScaling(BaseModel):
    """Per-column z-score transform fitted on a training window."""

    mean: np.ndarray
    scale: np.ndarray

    class Config:
        """Pydantic config."""

        frozen = True
        arbitrary_types_allowed = True

    @field_validator("mean", "scale", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, 1, "scaling")

    @classmethod
    def fit(cls, window: ProcessWindow) -> "ColumnScaling":
        """Mean and population standard deviation; constant columns keep scale 1."""
        mean = window.observations.mean(axis=0)
        scale = window.observations.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(mean=mean, scale=scale)

    def transform(self, data: np.ndarray) -> np.ndarray:
        return (np.asarray(data, dtype=np.float64) - self.mean) / self.scale

    def transform_window(self, window: ProcessWindow) -> ProcessWindow:
        return ProcessWindow(
            observations=self.transform(window.observations),
            column_names=list(window.column_names),
        )

    def transform_spec(self, spec: SpecLimits) -> SpecLimits:
        return SpecLimits(
            names=list(spec.names),
            lsl=self.transform(spec.lsl),
            usl=self.transform(spec.usl),
        )


class DualSolution(BaseModel):
    """Lagrange coefficients of the SVDD dual and solver diagnostics."""

    alphas: np.ndarray = Field(..., description="n nonnegative coefficients")
    objective_value: float = Field(..., description="Dual objective (maximized)")
    iterations: int = Field(..., ge=0)
    kkt_violation: float = Field(..., ge=0)
    converged: bool = True

    class Config:
        """Pydantic config."""

        frozen = True
        arbitrary_types_allowed = True

    @field_validator("alphas", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, 1, "alphas")


class SvddModel(BaseModel):
    """A trained support vector data description."""

    support_vectors: np.ndarray = Field(..., description="k x q support vectors")
    alphas: np.ndarray = Field(..., description="k positive coefficients summing to 1")
    threshold_r2: float = Field(..., ge=0, description="Squared boundary radius R^2")
    center_a: np.ndarray = Field(..., description="Input-space center sum(alpha_i x_i)")
    offset_w: float = Field(..., description="sum_ij alpha_i alpha_j K(x_i, x_j)")
    hyperparams: HyperParams
    penalty: float = Field(..., gt=0, description="Box bound C = 1/(n f)")
    boundary_mask: np.ndarray = Field(..., description="True where 0 < alpha < C")
    column_names: list[str] = Field(default_factory=list)
    n_train: int = Field(..., ge=1)
    iterations: int = Field(0, ge=0)
    kkt_violation: float = Field(0.0, ge=0)
    converged: bool = True
    scaling: ColumnScaling | None = None

    class Config:
        """Pydantic config."""

        frozen = True
        arbitrary_types_allowed = True

    @field_validator("support_vectors", mode="before")
    @classmethod
    def _coerce_sv(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, 2, "support_vectors")

    @field_validator("alphas", "center_a", mode="before")
    @classmethod
    def _coerce_vec(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, 1, "vector")

    @field_validator("boundary_mask", mode="before")
    @classmethod
    def _coerce_mask(cls, value: Any) -> np.ndarray:
        mask = np.array(value, dtype=bool)
        mask.setflags(write=False)
        return mask

    @model_validator(mode="after")
    def _check_shapes(self) -> "SvddModel":
        k, q = self.support_vectors.shape
        if k < 1:
            raise ValueError("model has no support vectors")
        if self.alphas.shape != (k,) or self.boundary_mask.shape != (k,):
            raise ValueError("alphas and boundary_mask must have one entry per support vector")
        if self.center_a.shape != (q,):
            raise ValueError("center_a must have q entries")
        if not self.column_names:
            object.__setattr__(self, "column_names", default_column_names(q))
        return self

    @property
    def q(self) -> int:
        return int(self.support_vectors.shape[1])

    @property
    def n_support(self) -> int:
        return int(self.support_vectors.shape[0])

    @property
    def eps_bound(self) -> float:
        return EPS_BOUND_FACTOR * self.penalty


class ScoreResult(BaseModel):
    """Squared feature-space distance of one observation and its classification."""

    dist2: float = Field(..., ge=0)
    is_outlier: bool

    class Config:
        """Pydantic config."""

        frozen = True


class MonteCarloConfig(BaseModel):
    """Simulation size, master seed and work partitioning."""

    n_es: int = Field(..., ge=1, description="Number of simulated observations N_ES")
    seed: int = Field(0, ge=0, le=MAX_SEED)
    partitions: int = Field(1, ge=1)

    class Config:
        """Pydantic config."""

        frozen = True


class CapabilityVector(BaseModel):
    """PC_SVDD = [Cp, dist, p] with Monte Carlo diagnostics."""

    cp: float = Field(..., gt=0)
    dist: float = Field(..., ge=0)
    p: float = Field(..., ge=0, le=1)
    n_es: int = Field(..., ge=1)
    count_1: int = Field(..., ge=1)
    cp_standard_error: float = Field(..., ge=0, description="Delta-method diagnostic")
    seed: int = Field(0, ge=0)
    model_fingerprint: str = ""

    class Config:
        """Pydantic config."""

        frozen = True

    def as_triple(self) -> tuple[float, float, float]:
        return (self.cp, self.dist, self.p)


class ShapeKind(str, Enum):
    """Synthetic process-region shapes."""

    DISK = "disk"
    ANNULUS = "annulus"
    BOOMERANG = "boomerang"
    TWO_DONUT = "two_donut"
    BOX = "box"


class ShapeSpec(BaseModel):
    """Parameters of a synthetic process region.

    ``radii`` is ``(r,)`` for a disk and ``(r_in, r_out)`` for annuli, boomerangs and
    each donut. ``centers`` holds one center, or two for ``two_donut``. ``widths`` are
    the side lengths of a ``box``. ``angular_extent`` is in degrees.
    """

    kind: ShapeKind
    centers: list[list[float]] = Field(..., min_length=1, max_length=2)
    radii: list[float] = Field(default_factory=list)
    widths: list[float] = Field(default_factory=list)
    angular_extent: float = Field(180.0, gt=0, le=360)
    n: int = Field(500, ge=1)
    seed: int = Field(0, ge=0, le=MAX_SEED)

    class Config:
        """Pydantic config."""

        frozen = True

    @model_validator(mode="after")
    def _check_shape(self) -> "ShapeSpec":
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if any(w <= 0 for w in self.widths):
            raise ValueError("widths must be positive")
        kind = self.kind
        if kind == ShapeKind.BOX:
            if len(self.widths) != len(self.centers[0]):
                raise ValueError("box needs one width per center coordinate")
        elif len(self.centers[0]) != 2:
            raise ValueError(f"{kind.value} is a two-dimensional shape")
        if kind == ShapeKind.DISK and len(self.radii) != 1:
            raise ValueError("disk needs exactly one radius")
        if kind in (ShapeKind.ANNULUS, ShapeKind.BOOMERANG, ShapeKind.TWO_DONUT):
            if len(self.radii) != 2:
                raise ValueError(f"{kind.value} needs inner and outer radii")
            if not self.radii[0] < self.radii[1]:
                raise ValueError("inner radius must be smaller than outer radius")
        expected_centers = 2 if kind == ShapeKind.TWO_DONUT else 1
        if len(self.centers) != expected_centers:
            raise ValueError(f"{kind.value} needs {expected_centers} center(s)")
        if any(len(c) != len(self.centers[0]) for c in self.centers):
            raise ValueError("centers must share one dimension")
        return self
