"""Python bindings for the telesched simulator."""

from . import _core
from ._core import (
    __version__,
    adaptive_batch_values,
    cond_error_given_minus,
    cond_error_given_plus,
    interchange_gap,
    phase_flip_prob,
    select_for_service,
    success_prob,
    teleport_fidelity,
    verify_theorem,
)


def _settings(kwargs):
    out = {}
    for key, value in kwargs.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        elif value is None or value == float("inf"):
            value = "inf"
        out[key.replace("_", "-")] = str(value)
    return out


def simulate(**kwargs):
    """One run. Keyword names follow the CLI flags, e.g. lambda_r=90."""
    return _core.simulate(_settings(kwargs))


def fig1(**kwargs):
    return _core.fig1(_settings(kwargs))


def fig2(**kwargs):
    return _core.fig2(_settings(kwargs))


def fig3(**kwargs):
    return _core.fig3(_settings(kwargs))


__all__ = [
    "__version__",
    "adaptive_batch_values",
    "cond_error_given_minus",
    "cond_error_given_plus",
    "fig1",
    "fig2",
    "fig3",
    "interchange_gap",
    "phase_flip_prob",
    "select_for_service",
    "simulate",
    "success_prob",
    "teleport_fidelity",
    "verify_theorem",
]
