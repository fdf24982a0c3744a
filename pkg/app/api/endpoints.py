"""API endpoints for training, scoring and capability analysis."""

import logging
from datetime import datetime, timezone

import numpy as np
from fastapi import APIRouter, HTTPException, status
from fastapi.concurrency import run_in_threadpool
from prometheus_client import Counter, Histogram
from pydantic import ValidationError

from app import __version__
from app.config import settings
from app.exceptions import InvalidInputError
from app.models import (
    CapabilityRequest,
    CapabilityResponse,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    ModelDocument,
    MonteCarloConfig,
    ProcessWindow,
    ScoreRequest,
    ScoreResponse,
    SpecLimits,
    SvddModel,
    TrainRequest,
    TrainResponse,
)
from app.services.capability import capability_from_model, render_report
from app.services.datagen import default_shape, generate
from app.services.scorer import distances
from app.services.serialization import validation_message
from app.services.storage import model_store
from app.services.trainer import fit

logger = logging.getLogger(__name__)

# Create router
router = APIRouter(prefix=settings.api_prefix, tags=["svdd"])

# Metrics
models_trained = Counter(
    "svddcap_models_trained_total",
    "Total number of SVDD models trained",
    ["bandwidth_source"],
)

capability_runs = Counter(
    "svddcap_capability_runs_total", "Total number of capability analyses"
)

training_duration = Histogram(
    "svddcap_training_duration_seconds", "Time spent training SVDD models"
)

simulation_duration = Histogram(
    "svddcap_simulation_duration_seconds", "Time spent in Monte Carlo capability runs"
)


def _window(observations: list[list[float]], column_names: list[str] | None = None) -> ProcessWindow:
    try:
        return ProcessWindow(observations=observations, column_names=column_names or [])
    except ValidationError as e:
        raise InvalidInputError(validation_message(e)) from None


async def _stored_model(fingerprint: str) -> SvddModel:
    model = await model_store.get_model(fingerprint)
    if model is None:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND, detail="Model not found"
        )
    return model


@router.post("/models", response_model=TrainResponse)
async def train_model(request: TrainRequest) -> TrainResponse:
    """Train an SVDD on the posted window and store it.

    Args:
        request: Training window and hyperparameters

    Returns:
        Training summary with the model fingerprint
    """
    window = _window(request.observations, request.column_names)
    with training_duration.time():
        model, source = await run_in_threadpool(
            fit,
            window,
            request.bandwidth,
            request.outlier_fraction,
            request.standardize,
        )
    fingerprint = await model_store.save_model(model)
    models_trained.labels(bandwidth_source=source).inc()

    return TrainResponse(
        fingerprint=fingerprint,
        n=model.n_train,
        q=model.q,
        support_vectors=model.n_support,
        boundary_support_vectors=int(model.boundary_mask.sum()),
        threshold_r2=model.threshold_r2,
        bandwidth=model.hyperparams.bandwidth,
        bandwidth_source=source,
        iterations=model.iterations,
        converged=model.converged,
        trained_at=datetime.now(timezone.utc),
    )


@router.get("/models/{fingerprint}", response_model=ModelDocument)
async def get_model(fingerprint: str) -> ModelDocument:
    """Return the stored model document."""
    document = await model_store.get_document(fingerprint)
    if document is None:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND, detail="Model not found"
        )
    return ModelDocument(fingerprint=fingerprint, document=document)


@router.post("/models/{fingerprint}/score", response_model=ScoreResponse)
async def score_rows(fingerprint: str, request: ScoreRequest) -> ScoreResponse:
    """Score rows against a stored model."""
    model = await _stored_model(fingerprint)
    data = np.asarray(request.observations, dtype=np.float64)
    dist2 = await run_in_threadpool(distances, model, data)
    return ScoreResponse(
        fingerprint=fingerprint,
        threshold_r2=model.threshold_r2,
        dist2=[float(d) for d in dist2],
        outlier=[bool(d > model.threshold_r2) for d in dist2],
    )


@router.post("/models/{fingerprint}/capability", response_model=CapabilityResponse)
async def capability(fingerprint: str, request: CapabilityRequest) -> CapabilityResponse:
    """Compute PC_SVDD for a stored model.

    Args:
        fingerprint: Model fingerprint
        request: Specification limits, process window and simulation settings

    Returns:
        Capability vector, diagnostics and the plain-text report
    """
    model = await _stored_model(fingerprint)
    window = _window(request.observations)
    try:
        spec = SpecLimits(**request.spec.model_dump())
        mc = MonteCarloConfig(n_es=request.n_es, seed=request.seed, partitions=request.partitions)
    except ValidationError as e:
        raise InvalidInputError(validation_message(e)) from None

    with simulation_duration.time():
        vector = await run_in_threadpool(capability_from_model, model, window, spec, mc)
    capability_runs.inc()

    return CapabilityResponse(
        cp=vector.cp,
        dist=vector.dist,
        p=vector.p,
        n_es=vector.n_es,
        count_1=vector.count_1,
        standard_error=vector.cp_standard_error,
        seed=vector.seed,
        model_fingerprint=vector.model_fingerprint,
        report=render_report(vector),
    )


@router.post("/datasets/generate", response_model=GenerateResponse)
async def generate_dataset(request: GenerateRequest) -> GenerateResponse:
    """Generate a synthetic process window."""
    try:
        shape = default_shape(
            request.kind,
            centers=request.centers,
            radii=request.radii,
            widths=request.widths,
            angular_extent=request.angular_extent,
            n=request.n,
            seed=request.seed,
        )
    except ValidationError as e:
        raise InvalidInputError(validation_message(e)) from None
    window = await run_in_threadpool(generate, shape)
    return GenerateResponse(
        column_names=list(window.column_names),
        observations=window.observations.tolist(),
    )


@router.get("/health", response_model=HealthResponse)
async def health_check() -> HealthResponse:
    """Health check endpoint.

    Returns:
        Service health status
    """
    dependencies = {}

    try:
        store_path = getattr(model_store.backend, "base_path", None)
        if store_path is None or store_path.is_dir():
            dependencies["model_store"] = "healthy"
        else:
            dependencies["model_store"] = "missing"
    except Exception:
        dependencies["model_store"] = "error"

    return HealthResponse(
        status="healthy",
        service=settings.service_name,
        version=__version__,
        timestamp=datetime.now(timezone.utc),
        dependencies=dependencies,
    )
