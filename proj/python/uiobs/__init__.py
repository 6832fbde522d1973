"""Observability of control-affine systems with unknown inputs."""

import json
from dataclasses import dataclass, field

from ._core import (
    EXIT_NOT_HANDLED,
    EXIT_OK,
    EXIT_SAMPLING_ERROR,
    EXIT_SPEC_ERROR,
    EXIT_UNDECIDED,
    DimensionError,
    DomainError,
    Error,
    ParseError,
    SamplingError,
    SpecError,
    UnknownIdentifier,
    analyze_file,
    analyze_text,
    differentiate,
    evaluate,
    lie_bracket,
    lie_derivative,
    normalize_spec,
    render_text,
    simplify,
)

__all__ = [
    "Report", "analyze", "analyze_spec", "simplify", "differentiate", "evaluate", "lie_derivative",
    "lie_bracket", "normalize_spec", "render_text", "Error", "SpecError", "ParseError", "UnknownIdentifier",
    "DimensionError", "DomainError", "SamplingError", "EXIT_OK", "EXIT_SPEC_ERROR", "EXIT_SAMPLING_ERROR",
    "EXIT_UNDECIDED", "EXIT_NOT_HANDLED",
]


@dataclass
class Report:
    exit_code: int
    raw: str = field(repr=False)

    @property
    def data(self):
        return json.loads(self.raw)

    @property
    def text(self):
        return render_text(self.raw)

    @property
    def verdicts(self):
        return {v["state"]: v["verdict"] for v in self.data["verdicts"]}


def analyze(path, **options):
    """Analyze a JSON spec file. Options mirror the CLI flags (mode, k, max_m, seed, ...)."""
    return Report(*analyze_file(str(path), **options))


def analyze_spec(spec, **options):
    """Analyze a spec given as a dict or JSON text."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return Report(*analyze_text(text, **options))
