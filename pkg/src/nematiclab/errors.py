"""Shared exception types.

Split so the CLI can map failure classes to distinct exit codes.
"""


class ConfigError(ValueError):
    """Experiment configuration failed validation."""


class SolverHalt(RuntimeError):
    """A time integration stopped early (non-finite field, pivot breakdown,
    or the gradient guard tripped)."""

    def __init__(self, reason: str, t: float | None = None):
        self.reason = reason
        self.t = t
        msg = reason if t is None else f"{reason} at t={t:.6g}"
        super().__init__(msg)
