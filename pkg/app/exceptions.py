"""Error hierarchy shared by the library, the CLI and the HTTP service."""

from typing import Any


class SvddCapError(Exception):
    """Base error. ``code`` is a stable slug, ``exit_code`` the CLI status."""

    code = "error"
    exit_code = 1

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def with_stage(self, stage: str) -> "SvddCapError":
        """Attach a pipeline stage label unless one is already set."""
        if self.stage is None:
            self.stage = stage
        return self

    def one_line(self) -> str:
        """Single-line, machine-parsable rendering used by the CLI."""
        stage = f"[{self.stage}]" if self.stage else ""
        text = " ".join(self.message.split())
        return f"svddcap: error: {self.code}{stage}: {text}"


class InvalidInputError(SvddCapError, ValueError):
    """Bad file, bad flag value, dimension mismatch or infeasible hyperparameters."""

    code = "invalid_input"
    exit_code = 2


class ConvergenceError(SvddCapError):
    """The dual solver hit its iteration cap."""

    code = "not_converged"
    exit_code = 3

    def __init__(self, message: str, solution: Any = None, stage: str | None = None):
        super().__init__(message, stage)
        self.solution = solution


class DegenerateModelError(SvddCapError):
    """No support vector strictly inside the box (0 < alpha < C)."""

    code = "degenerate_model"
    exit_code = 4


class EmptyIntersectionError(SvddCapError):
    """No simulated draw fell inside the process region."""

    code = "empty_intersection"
    exit_code = 5


class PlotDimensionError(SvddCapError):
    """Region plots are two-dimensional only."""

    code = "unsupported_dimension"
    exit_code = 6
