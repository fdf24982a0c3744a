"""PC_SVDD = [Cp, dist, p]: Monte Carlo volume ratio, center distance, out-of-spec fraction.

Simulated draws come from fixed-size blocks. Block k is generated by a PCG64 stream
seeded with ``SeedSequence(seed, spawn_key=(k,))``, so the simulated matrix depends
only on (seed, n_es); ``partitions`` only decides how consecutive blocks are grouped
into work units, and ``settings.threads`` how many units run at once.
"""

import logging
import math
from multiprocessing.pool import ThreadPool
from pathlib import Path

import numpy as np
from jinja2 import Environment, FileSystemLoader, StrictUndefined

from app.config import settings
from app.exceptions import EmptyIntersectionError, InvalidInputError, SvddCapError
from app.models import (
    CapabilityVector,
    ColumnScaling,
    HyperParams,
    MonteCarloConfig,
    ProcessWindow,
    SpecLimits,
    SvddModel,
)
from app.services.kernel import spec_center
from app.services.scorer import inlier_mask
from app.services.serialization import model_fingerprint
from app.services.trainer import train

logger = logging.getLogger(__name__)

TEMPLATES_DIR = Path(__file__).resolve().parent.parent / "templates"
REPORT_TEMPLATE = "capability_report.txt.j2"


def block_stream(seed: int, block: int) -> np.random.Generator:
    """Independent generator for block ``block`` of the master ``seed``."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))
    )


def partition_plan(
    n_es: int, partitions: int, block_size: int
) -> list[list[tuple[int, int, int]]]:
    """Group (block, first_row, rows) triples into ``partitions`` consecutive runs."""
    blocks = [
        (k, start, min(block_size, n_es - start))
        for k, start in enumerate(range(0, n_es, block_size))
    ]
    bounds = np.linspace(0, len(blocks), partitions + 1).round().astype(int)
    return [blocks[bounds[p] : bounds[p + 1]] for p in range(partitions)]


def _draw_block(spec: SpecLimits, seed: int, block: int, rows: int) -> np.ndarray:
    u = block_stream(seed, block).random((rows, spec.q))
    return spec.lsl + u * (spec.usl - spec.lsl)


def _run_partitions(worker, plan: list, threads: int | None) -> list:
    threads = min(threads or settings.threads, len(plan))
    if threads > 1:
        with ThreadPool(threads) as pool:
            return pool.map(worker, plan)
    return [worker(part) for part in plan]


def simulate_spec_uniform(
    spec: SpecLimits,
    mc: MonteCarloConfig,
    block_size: int | None = None,
    threads: int | None = None,
) -> np.ndarray:
    """N_ES x q matrix of independent uniform draws over the specification box."""
    block_size = block_size or settings.mc_block_size
    out = np.empty((mc.n_es, spec.q), dtype=np.float64)

    def worker(part: list[tuple[int, int, int]]) -> None:
        for block, start, rows in part:
            out[start : start + rows] = _draw_block(spec, mc.seed, block, rows)

    _run_partitions(worker, partition_plan(mc.n_es, mc.partitions, block_size), threads)
    return out


def _check_dimensions(model_q: int, spec: SpecLimits) -> None:
    if model_q != spec.q:
        raise InvalidInputError(
            f"model has {model_q} variables but the specification has {spec.q}"
        )


def compute_cp(
    model: SvddModel,
    spec: SpecLimits,
    mc: MonteCarloConfig,
    block_size: int | None = None,
    threads: int | None = None,
) -> tuple[float, int, float]:
    """Cp = N_ES / COUNT_1 with COUNT_1 = #{draws with dist^2 <= R^2}.

    Returns ``(cp, count_1, standard_error)``; the standard error is a delta-method
    diagnostic, Cp * sqrt((1 - pi) / (N_ES * pi)) with pi = COUNT_1 / N_ES.

    Only the part of the process region inside the specification box is visible,
    since draws come from the box alone.
    """
    _check_dimensions(model.q, spec)
    block_size = block_size or settings.mc_block_size

    def worker(part: list[tuple[int, int, int]]) -> int:
        count = 0
        for block, _start, rows in part:
            count += int(np.count_nonzero(inlier_mask(model, _draw_block(spec, mc.seed, block, rows))))
        logger.debug(f"Partition of {len(part)} blocks: {count} inliers")
        return count

    counts = _run_partitions(worker, partition_plan(mc.n_es, mc.partitions, block_size), threads)
    count_1 = int(sum(counts))
    if count_1 == 0:
        raise EmptyIntersectionError(
            "process region does not intersect specification box at this simulation size "
            f"(n_es={mc.n_es}); increase n_es or inspect the model"
        )
    cp = mc.n_es / count_1
    pi = count_1 / mc.n_es
    standard_error = cp * math.sqrt((1.0 - pi) / (mc.n_es * pi))
    return cp, count_1, standard_error


def compute_dist(model: SvddModel, spec: SpecLimits) -> float:
    """Euclidean distance between the process center a and the specification center c.

    For a standardized model both centers are compared in standardized units.
    """
    _check_dimensions(model.q, spec)
    center = spec_center(spec)
    if model.scaling is not None:
        center = model.scaling.transform(center)
    return float(np.linalg.norm(model.center_a - center))


def compute_p(window: ProcessWindow, spec: SpecLimits) -> float:
    """Fraction of window rows with at least one coordinate outside [lsl_j, usl_j]."""
    _check_dimensions(window.q, spec)
    if window.n == 0:
        raise InvalidInputError("window is empty")
    data = window.observations
    outside = np.any((data < spec.lsl) | (data > spec.usl), axis=1)
    return int(np.count_nonzero(outside)) / window.n


def capability_from_model(
    model: SvddModel,
    window: ProcessWindow,
    spec: SpecLimits,
    mc: MonteCarloConfig,
    block_size: int | None = None,
    threads: int | None = None,
) -> CapabilityVector:
    """Assemble [Cp, dist, p] for an already trained model."""
    stage = "cp"
    try:
        cp, count_1, standard_error = compute_cp(model, spec, mc, block_size, threads)
        stage = "dist"
        dist = compute_dist(model, spec)
        stage = "p"
        p = compute_p(window, spec)
    except SvddCapError as e:
        raise e.with_stage(stage)
    vector = CapabilityVector(
        cp=cp,
        dist=dist,
        p=p,
        n_es=mc.n_es,
        count_1=count_1,
        cp_standard_error=standard_error,
        seed=mc.seed,
        model_fingerprint=model_fingerprint(model),
    )
    logger.info(f"PC_SVDD = [{cp:.6g}, {dist:.6g}, {p:.6g}] (COUNT_1={count_1}, N_ES={mc.n_es})")
    return vector


def compute_pcsvdd(
    window: ProcessWindow,
    spec: SpecLimits,
    hp: HyperParams,
    mc: MonteCarloConfig,
    standardize: bool = False,
    tol: float | None = None,
    block_size: int | None = None,
    threads: int | None = None,
) -> CapabilityVector:
    """Train on ``window`` and compute the capability vector; deterministic per seed.

    Errors from each step carry the stage label ``train``, ``cp``, ``dist`` or ``p``.
    """
    try:
        _check_dimensions(window.q, spec)
        if standardize:
            scaling = ColumnScaling.fit(window)
            model = train(scaling.transform_window(window), hp, tol=tol, threads=threads)
            model = model.model_copy(update={"scaling": scaling})
        else:
            model = train(window, hp, tol=tol, threads=threads)
    except SvddCapError as e:
        raise e.with_stage("train")
    return capability_from_model(model, window, spec, mc, block_size, threads)


def _full(value: float) -> str:
    return repr(float(value))


_environment = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    autoescape=False,  # noqa: S701 - plain-text report
)
_environment.filters["full"] = _full


def render_report(vector: CapabilityVector) -> str:
    """Capability report with a stable field order, suitable for diffing."""
    return _environment.get_template(REPORT_TEMPLATE).render(v=vector)
