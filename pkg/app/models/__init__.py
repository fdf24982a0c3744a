"""Domain and API models."""

from .process import (
    EPS_BOUND_FACTOR,
    MAX_SEED,
    CapabilityVector,
    ColumnScaling,
    DualSolution,
    HyperParams,
    MonteCarloConfig,
    ProcessWindow,
    ScoreResult,
    ShapeKind,
    ShapeSpec,
    SpecLimits,
    SvddModel,
    default_column_names,
)
from .schemas import (
    CapabilityRequest,
    CapabilityResponse,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    ModelDocument,
    ScoreRequest,
    ScoreResponse,
    SpecLimitsPayload,
    TrainRequest,
    TrainResponse,
)

__all__ = [
    "EPS_BOUND_FACTOR",
    "MAX_SEED",
    "CapabilityVector",
    "ColumnScaling",
    "DualSolution",
    "HyperParams",
    "MonteCarloConfig",
    "ProcessWindow",
    "ScoreResult",
    "ShapeKind",
    "ShapeSpec",
    "SpecLimits",
    "SvddModel",
    "default_column_names",
    "CapabilityRequest",
    "CapabilityResponse",
    "GenerateRequest",
    "GenerateResponse",
    "HealthResponse",
    "ModelDocument",
    "ScoreRequest",
    "ScoreResponse",
    "SpecLimitsPayload",
    "TrainRequest",
    "TrainResponse",
]
