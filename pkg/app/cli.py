"""Command-line front end: train, score, capability, generate, plot, preset, serve."""

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn

from pydantic import ValidationError

from app import __version__
from app.config import settings
from app.exceptions import InvalidInputError, SvddCapError
from app.models import ColumnScaling, MonteCarloConfig, ShapeSpec
from app.services.capability import capability_from_model, compute_pcsvdd, render_report
from app.services.datagen import default_shape, generate
from app.services.plotting import render_region_plot
from app.services.presets import PRESETS, get_preset
from app.services.scorer import distances
from app.services.serialization import (
    format_scores_csv,
    format_spec_file,
    format_window_csv,
    read_model,
    read_spec_file,
    read_window_csv,
    save_model,
    validation_message,
    write_text_file,
)
from app.services.trainer import fit, resolve_hyperparams

logger = logging.getLogger("app.cli")


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors are single-line and exit with status 2."""

    def error(self, message: str) -> NoReturn:
        sys.stderr.write(InvalidInputError(message).one_line() + "\n")
        sys.exit(InvalidInputError.exit_code)


def _floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of numbers") from None


def _write_output(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    write_text_file(output, text)
    logger.info(f"Wrote {output}")


def cmd_train(args: argparse.Namespace) -> int:
    """Train a model and print its summary."""
    window = read_window_csv(args.data)
    model, source = fit(window, args.bandwidth, args.outlier_fraction, args.standardize)
    save_model(model, args.output)
    lines = [
        f"n: {model.n_train}",
        f"q: {model.q}",
        f"support_vectors: {model.n_support}",
        f"boundary_support_vectors: {int(model.boundary_mask.sum())}",
        f"alpha_sum: {float(model.alphas.sum())!r}",
        f"threshold_r2: {model.threshold_r2!r}",
        f"bandwidth: {model.hyperparams.bandwidth!r} ({source})",
        f"outlier_fraction: {model.hyperparams.outlier_fraction!r}",
        f"iterations: {model.iterations}",
        f"converged: {'yes' if model.converged else 'no'}",
        f"model: {args.output}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    """Score a CSV against a model; adds dist2 and outlier columns."""
    model = read_model(args.model)
    window = read_window_csv(args.data)
    dist2 = distances(model, window.observations)
    _write_output(format_scores_csv(window, dist2, dist2 > model.threshold_r2), args.output)
    return 0


def cmd_capability(args: argparse.Namespace) -> int:
    """Compute the PC_SVDD report."""
    preset = get_preset(args.preset) if args.preset else None
    if args.spec:
        spec = read_spec_file(args.spec)
    elif preset is not None:
        spec = preset.spec
    else:
        raise InvalidInputError("--spec is required unless --preset is given")

    bandwidth = args.bandwidth
    outlier_fraction = args.outlier_fraction
    n_es = args.n_es
    if preset is not None:
        bandwidth = bandwidth if bandwidth is not None else preset.hyperparams.bandwidth
        if outlier_fraction is None:
            outlier_fraction = preset.hyperparams.outlier_fraction
        n_es = n_es if n_es is not None else preset.n_es

    try:
        mc = MonteCarloConfig(
            n_es=n_es if n_es is not None else settings.default_n_es,
            seed=args.seed if args.seed is not None else settings.default_seed,
            partitions=args.partitions,
        )
    except ValidationError as e:
        raise InvalidInputError(validation_message(e)) from None

    window = read_window_csv(args.data)
    if args.model:
        vector = capability_from_model(read_model(args.model), window, spec, mc)
    else:
        training = ColumnScaling.fit(window).transform_window(window) if args.standardize else window
        hp, _source = resolve_hyperparams(training, bandwidth, outlier_fraction)
        vector = compute_pcsvdd(window, spec, hp, mc, standardize=args.standardize)
    _write_output(render_report(vector), args.output)
    return 0


def _load_shape_config(path: str) -> dict:
    try:
        return ShapeSpec.model_validate_json(Path(path).read_text(encoding="utf-8")).model_dump()
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e.strerror}") from None
    except ValidationError as e:
        raise InvalidInputError(f"{path}: {validation_message(e)}") from None


def cmd_generate(args: argparse.Namespace) -> int:
    """Write a synthetic process window as CSV."""
    params: dict = {}
    shape_name = args.shape
    if args.config:
        params = _load_shape_config(args.config)
        shape_name = shape_name or params.pop("kind")
        params.pop("kind", None)
    if not shape_name:
        raise InvalidInputError("a shape name or --config is required")
    overrides = {
        "centers": args.center,
        "radii": args.radii,
        "widths": args.widths,
        "angular_extent": args.extent,
        "n": args.n,
        "seed": args.seed,
    }
    params.update({k: v for k, v in overrides.items() if v is not None})
    try:
        shape = default_shape(shape_name, **params)
    except ValidationError as e:
        raise InvalidInputError(validation_message(e)) from None
    _write_output(format_window_csv(generate(shape)), args.output)
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    """Render the inlier/outlier region over the specification box as SVG."""
    model = read_model(args.model)
    spec = read_spec_file(args.spec)
    points = read_window_csv(args.points) if args.points else None
    svg, _grid = render_region_plot(
        model, spec, args.grid_resolution, points=points, title=args.title or ""
    )
    _write_output(svg, args.output)
    return 0


def cmd_preset(args: argparse.Namespace) -> int:
    """Print a reference configuration and optionally write its spec file."""
    preset = get_preset(args.name)
    if args.output:
        _write_output(format_spec_file(preset.spec), args.output)
    cp, dist, p = preset.reported
    lines = [
        f"name: {preset.name}",
        f"description: {preset.description}",
        f"bandwidth: {preset.hyperparams.bandwidth!r}",
        f"outlier_fraction: {preset.hyperparams.outlier_fraction!r}",
        f"n_es: {preset.n_es}",
        f"reported: [{cp}, {dist}, {p}]",
    ]
    for name, lo, hi in zip(preset.spec.names, preset.spec.lsl, preset.spec.usl, strict=True):
        lines.append(f"limits {name}: [{lo:g}, {hi:g}]")
    lines.extend(f"note: {note}" for note in preset.notes)
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port, log_level=settings.log_level.lower())
    return 0


def _add_training_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-s", "--bandwidth", type=float, help="Gaussian bandwidth s (default: median heuristic)")
    parser.add_argument("-f", "--outlier-fraction", type=float, help="Expected outlier fraction f, 0 < f <= 1")
    parser.add_argument("--standardize", action="store_true", help="z-score columns with training statistics")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="svddcap", description="SVDD-based multivariate process capability")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    train = commands.add_parser("train", help="Train an SVDD model")
    train.add_argument("data", help="Training CSV")
    train.add_argument("-o", "--output", required=True, help="Model file to write")
    _add_training_flags(train)
    train.set_defaults(handler=cmd_train)

    score = commands.add_parser("score", help="Score observations")
    score.add_argument("data", help="CSV to score")
    score.add_argument("--model", required=True)
    score.add_argument("-o", "--output")
    score.set_defaults(handler=cmd_score)

    cap = commands.add_parser("capability", help="Compute [Cp, dist, p]")
    cap.add_argument("data", help="Process window CSV")
    cap.add_argument("--spec", help="Specification file (name,lsl,usl per line)")
    cap.add_argument("--model", help="Use a trained model instead of training on DATA")
    cap.add_argument("--preset", choices=sorted(PRESETS), help="Fill missing settings from a preset")
    cap.add_argument("--n-es", type=int, help="Simulated observations N_ES")
    cap.add_argument("--seed", type=int, help="Master seed")
    cap.add_argument("--partitions", type=int, default=1, help="Work partitions (results do not depend on it)")
    cap.add_argument("-o", "--output")
    _add_training_flags(cap)
    cap.set_defaults(handler=cmd_capability)

    gen = commands.add_parser("generate", help="Generate synthetic process data")
    gen.add_argument("shape", nargs="?", help="disk, annulus, boomerang, two_donut or box")
    gen.add_argument("-n", type=int, help="Number of points")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--center", type=_floats, action="append", help="Center as x,y (twice for two_donut)")
    gen.add_argument("--radii", type=_floats, help="r or r_in,r_out")
    gen.add_argument("--widths", type=_floats, help="Box side lengths")
    gen.add_argument("--extent", type=float, help="Boomerang angular extent in degrees")
    gen.add_argument("--config", help="JSON file with shape parameters")
    gen.add_argument("-o", "--output")
    gen.set_defaults(handler=cmd_generate)

    plot = commands.add_parser("plot", help="SVG inlier/outlier region plot (two variables)")
    plot.add_argument("--model", required=True)
    plot.add_argument("--spec", required=True)
    plot.add_argument("--grid-resolution", type=int, help="Cells per axis")
    plot.add_argument("--points", help="Overlay observations from a CSV")
    plot.add_argument("--title")
    plot.add_argument("-o", "--output")
    plot.set_defaults(handler=cmd_plot)

    preset = commands.add_parser("preset", help="Show a reference configuration")
    preset.add_argument("name", help=", ".join(sorted(PRESETS)))
    preset.add_argument("-o", "--output", help="Write the preset's spec file")
    preset.set_defaults(handler=cmd_preset)

    serve = commands.add_parser("serve", help="Run the HTTP service")
    serve.add_argument("--host", default=settings.host)
    serve.add_argument("--port", type=int, default=settings.port)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, settings.log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except SvddCapError as e:
        sys.stderr.write(e.one_line() + "\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
