"""Pydantic request/response models for the HTTP API."""

from datetime import datetime

from pydantic import BaseModel, Field

from .process import MAX_SEED, ShapeKind


class TrainRequest(BaseModel):
    """Request model for SVDD training."""

    observations: list[list[float]] = Field(..., min_length=1, description="Process window rows")
    column_names: list[str] = Field(default_factory=list, description="Column labels")
    bandwidth: float | None = Field(None, gt=0, description="Gaussian bandwidth s; median heuristic if omitted")
    outlier_fraction: float | None = Field(None, gt=0, le=1, description="Expected outlier fraction f")
    standardize: bool = Field(False, description="z-score columns before training")

    class Config:
        """Pydantic config."""

        json_schema_extra = {
            "example": {
                "observations": [[0.1, 0.2], [1.0, -0.5], [-0.7, 0.4]],
                "column_names": ["x", "y"],
                "bandwidth": 1.0,
                "outlier_fraction": 1e-6,
            }
        }


class TrainResponse(BaseModel):
    """Response model for SVDD training."""

    fingerprint: str = Field(..., description="Model fingerprint (store key)")
    n: int = Field(..., description="Training rows")
    q: int = Field(..., description="Variables")
    support_vectors: int = Field(..., description="Support vector count")
    boundary_support_vectors: int = Field(..., description="Support vectors with 0 < alpha < C")
    threshold_r2: float = Field(..., description="Threshold R^2")
    bandwidth: float = Field(..., description="Bandwidth used")
    bandwidth_source: str = Field(..., description="'supplied' or 'heuristic'")
    iterations: int = Field(..., description="Solver iterations")
    converged: bool = Field(..., description="Solver status")
    trained_at: datetime = Field(..., description="Timestamp of training")

    class Config:
        """Pydantic config."""

        json_schema_extra = {
            "example": {
                "fingerprint": "3f2a9c0d81b7e645",
                "n": 500,
                "q": 2,
                "support_vectors": 42,
                "boundary_support_vectors": 42,
                "threshold_r2": 0.8123,
                "bandwidth": 1.8,
                "bandwidth_source": "heuristic",
                "iterations": 1312,
                "converged": True,
                "trained_at": "2024-01-15T10:00:30Z",
            }
        }


class ModelDocument(BaseModel):
    """Stored model document."""

    fingerprint: str
    document: str = Field(..., description="Versioned key-value model text")


class ScoreRequest(BaseModel):
    """Rows to score against a stored model."""

    observations: list[list[float]] = Field(default_factory=list)


class ScoreResponse(BaseModel):
    """Per-row scores in input order."""

    fingerprint: str
    threshold_r2: float
    dist2: list[float]
    outlier: list[bool]


class SpecLimitsPayload(BaseModel):
    """Specification limits in request bodies."""

    names: list[str] = Field(default_factory=list)
    lsl: list[float] = Field(..., min_length=1)
    usl: list[float] = Field(..., min_length=1)


class CapabilityRequest(BaseModel):
    """Request model for a capability analysis of a stored model."""

    spec: SpecLimitsPayload
    observations: list[list[float]] = Field(..., min_length=1, description="Process window for p")
    n_es: int = Field(100_000, ge=1, le=10_000_000)
    seed: int = Field(0, ge=0, le=MAX_SEED)
    partitions: int = Field(1, ge=1)

    class Config:
        """Pydantic config."""

        json_schema_extra = {
            "example": {
                "spec": {"names": ["x", "y"], "lsl": [-4, -4], "usl": [4, 4]},
                "observations": [[0.1, 0.2], [1.0, -0.5]],
                "n_es": 100000,
                "seed": 7,
            }
        }


class CapabilityResponse(BaseModel):
    """PC_SVDD vector with diagnostics."""

    cp: float
    dist: float
    p: float
    n_es: int
    count_1: int
    standard_error: float
    seed: int
    model_fingerprint: str
    report: str = Field(..., description="Plain-text capability report")


class GenerateRequest(BaseModel):
    """Synthetic data request; unspecified geometry uses the shape defaults."""

    kind: ShapeKind
    centers: list[list[float]] | None = None
    radii: list[float] | None = None
    widths: list[float] | None = None
    angular_extent: float | None = None
    n: int = Field(500, ge=1, le=1_000_000)
    seed: int = Field(0, ge=0, le=MAX_SEED)


class GenerateResponse(BaseModel):
    """Generated process window."""

    column_names: list[str]
    observations: list[list[float]]


class HealthResponse(BaseModel):
    """Health check response model."""

    status: str = Field(..., description="Service health status")
    service: str = Field(..., description="Service name")
    version: str = Field(..., description="Service version")
    timestamp: datetime = Field(..., description="Current timestamp")
    dependencies: dict[str, str] = Field(default_factory=dict, description="Dependency status")
