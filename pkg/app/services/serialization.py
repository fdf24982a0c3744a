"""File formats: window CSV, specification file, model document."""

import csv
import hashlib
import io
import logging
from collections.abc import Iterable
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.exceptions import InvalidInputError
from app.models import (
    ColumnScaling,
    HyperParams,
    ProcessWindow,
    SpecLimits,
    SvddModel,
)

logger = logging.getLogger(__name__)

MODEL_FORMAT = "svddcap-model"
MODEL_VERSION = 1
SPEC_HEADER = ["name", "lsl", "usl"]


def validation_message(error: ValidationError) -> str:
    """First pydantic error as a single line."""
    first = error.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    message = first.get("msg", str(error))
    return f"{location}: {message}" if location else message


def _number(text: str, where: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InvalidInputError(f"{where}: {text!r} is not a decimal number") from None
    if not np.isfinite(value):
        raise InvalidInputError(f"{where}: {text!r} is not finite")
    return value


def _fmt(value: float) -> str:
    return repr(float(value))


# Window CSV


def parse_window_csv(text: str, source: str = "<csv>") -> ProcessWindow:
    """Header row of column names, then one decimal row per observation."""
    rows = [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]
    if not rows:
        raise InvalidInputError(f"{source}: file is empty")
    header = [name.strip() for name in rows[0]]
    if any(not name for name in header):
        raise InvalidInputError(f"{source}: header has an empty column name")
    q = len(header)
    values: list[list[float]] = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != q:
            raise InvalidInputError(
                f"{source}: line {line_no} has {len(row)} fields, expected {q}"
            )
        values.append(
            [_number(cell.strip(), f"{source}: line {line_no}") for cell in row]
        )
    if not values:
        raise InvalidInputError(f"{source}: no observations after the header")
    try:
        return ProcessWindow(observations=values, column_names=header)
    except ValidationError as e:
        raise InvalidInputError(f"{source}: {validation_message(e)}") from None


def read_window_csv(path: str | Path) -> ProcessWindow:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e.strerror}") from None
    return parse_window_csv(text, str(path))


def format_table_csv(
    column_names: Iterable[str], columns: Iterable[np.ndarray], formats: Iterable | None = None
) -> str:
    """CSV text from equally long columns; floats use shortest round-trip digits."""
    names = list(column_names)
    cols = [np.asarray(c) for c in columns]
    fmts = list(formats) if formats is not None else [_fmt] * len(cols)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(names)
    for i in range(len(cols[0]) if cols else 0):
        writer.writerow([fmt(col[i]) for fmt, col in zip(fmts, cols, strict=True)])
    return buffer.getvalue()


def format_window_csv(window: ProcessWindow) -> str:
    data = window.observations
    return format_table_csv(window.column_names, [data[:, j] for j in range(window.q)])


def format_scores_csv(window: ProcessWindow, dist2: np.ndarray, outlier: np.ndarray) -> str:
    """Original columns plus ``dist2`` and ``outlier`` (0/1)."""
    data = window.observations
    return format_table_csv(
        [*window.column_names, "dist2", "outlier"],
        [*(data[:, j] for j in range(window.q)), dist2, outlier],
        [_fmt] * (window.q + 1) + [lambda flag: "1" if flag else "0"],
    )


# Specification file


def parse_spec_file(text: str, source: str = "<spec>") -> SpecLimits:
    """One ``name,lsl,usl`` line per variable; blank and ``#`` lines are skipped."""
    names: list[str] = []
    lsl: list[float] = []
    usl: list[float] = []
    for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not any(c.strip() for c in row) or row[0].lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in row]
        if cells == SPEC_HEADER:
            continue
        if len(cells) != 3:
            raise InvalidInputError(
                f"{source}: line {line_no} must have three fields name,lsl,usl"
            )
        names.append(cells[0])
        lsl.append(_number(cells[1], f"{source}: line {line_no}"))
        usl.append(_number(cells[2], f"{source}: line {line_no}"))
    if not names:
        raise InvalidInputError(f"{source}: no specification limits found")
    try:
        return SpecLimits(names=names, lsl=lsl, usl=usl)
    except ValidationError as e:
        raise InvalidInputError(f"{source}: {validation_message(e)}") from None


def read_spec_file(path: str | Path) -> SpecLimits:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e.strerror}") from None
    return parse_spec_file(text, str(path))


def format_spec_file(spec: SpecLimits) -> str:
    lines = [
        f"{name},{_fmt(lo)},{_fmt(hi)}"
        for name, lo, hi in zip(spec.names, spec.lsl, spec.usl, strict=True)
    ]
    return "\n".join(lines) + "\n"


# Model document


def dump_model(model: SvddModel) -> str:
    """Versioned key-value text; floats are written with round-trip precision."""
    lines = [
        f"{MODEL_FORMAT}: {MODEL_VERSION}",
        f"q: {model.q}",
        f"n_train: {model.n_train}",
        f"s: {_fmt(model.hyperparams.bandwidth)}",
        f"f: {_fmt(model.hyperparams.outlier_fraction)}",
        f"C: {_fmt(model.penalty)}",
        f"columns: {','.join(model.column_names)}",
        f"threshold_r2: {_fmt(model.threshold_r2)}",
        f"offset_w: {_fmt(model.offset_w)}",
        f"center_a: {' '.join(_fmt(v) for v in model.center_a)}",
        f"iterations: {model.iterations}",
        f"kkt_violation: {_fmt(model.kkt_violation)}",
    ]
    if model.scaling is not None:
        lines.append(f"scaling_mean: {' '.join(_fmt(v) for v in model.scaling.mean)}")
        lines.append(f"scaling_scale: {' '.join(_fmt(v) for v in model.scaling.scale)}")
    lines.append(f"support_vectors: {model.n_support}")
    for alpha, on_boundary, row in zip(
        model.alphas, model.boundary_mask, model.support_vectors, strict=True
    ):
        coords = " ".join(_fmt(v) for v in row)
        lines.append(f"sv: {_fmt(alpha)} {int(bool(on_boundary))} {coords}")
    return "\n".join(lines) + "\n"


def _vector(text: str, where: str) -> list[float]:
    return [_number(part, where) for part in text.split()]


def load_model(text: str, source: str = "<model>") -> SvddModel:
    """Parse a document written by :func:`dump_model`."""
    fields: dict[str, str] = {}
    rows: list[str] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise InvalidInputError(f"{source}: line {line_no} is not 'key: value'")
        key = key.strip()
        if key == "sv":
            rows.append(value.strip())
        elif key in fields:
            raise InvalidInputError(f"{source}: duplicate key {key!r}")
        else:
            fields[key] = value.strip()

    version = fields.pop(MODEL_FORMAT, None)
    if version is None:
        raise InvalidInputError(f"{source}: not an svddcap model document")
    if version != str(MODEL_VERSION):
        raise InvalidInputError(f"{source}: unsupported model format version {version}")

    try:
        q = int(fields["q"])
        k = int(fields["support_vectors"])
        alphas, boundary, vectors = [], [], []
        for row in rows:
            parts = row.split()
            if len(parts) != q + 2:
                raise InvalidInputError(f"{source}: support vector row has {len(parts)} fields")
            alphas.append(_number(parts[0], source))
            boundary.append(parts[1] == "1")
            vectors.append([_number(p, source) for p in parts[2:]])
        if len(vectors) != k:
            raise InvalidInputError(f"{source}: expected {k} support vectors, found {len(vectors)}")
        scaling = None
        if "scaling_mean" in fields:
            scaling = ColumnScaling(
                mean=_vector(fields["scaling_mean"], source),
                scale=_vector(fields["scaling_scale"], source),
            )
        columns = fields["columns"].split(",") if fields["columns"] else []
        return SvddModel(
            support_vectors=vectors,
            alphas=alphas,
            threshold_r2=_number(fields["threshold_r2"], source),
            center_a=_vector(fields["center_a"], source),
            offset_w=_number(fields["offset_w"], source),
            hyperparams=HyperParams(
                bandwidth=_number(fields["s"], source),
                outlier_fraction=_number(fields["f"], source),
            ),
            penalty=_number(fields["C"], source),
            boundary_mask=boundary,
            column_names=columns,
            n_train=int(fields["n_train"]),
            iterations=int(fields.get("iterations", "0")),
            kkt_violation=_number(fields.get("kkt_violation", "0"), source),
            scaling=scaling,
        )
    except KeyError as e:
        raise InvalidInputError(f"{source}: missing key {e.args[0]!r}") from None
    except InvalidInputError:
        raise
    except ValidationError as e:
        raise InvalidInputError(f"{source}: {validation_message(e)}") from None
    except ValueError as e:
        raise InvalidInputError(f"{source}: {e}") from None


def write_text_file(path: str | Path, text: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot write {path}: {e.strerror}") from None
    return path


def save_model(model: SvddModel, path: str | Path) -> Path:
    path = write_text_file(path, dump_model(model))
    logger.info(f"Model written to {path}")
    return path


def read_model(path: str | Path) -> SvddModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e.strerror}") from None
    return load_model(text, str(path))


def model_fingerprint(model: SvddModel) -> str:
    """First 16 hex digits of the SHA-256 of the model document."""
    return hashlib.sha256(dump_model(model).encode("utf-8")).hexdigest()[:16]
