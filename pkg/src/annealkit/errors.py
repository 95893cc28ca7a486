"""Exception types shared across the toolkit."""

from __future__ import annotations


class ParameterError(ValueError):
    """A physical or statistical parameter is outside its allowed domain."""


class CapacityError(ValueError):
    """Requested system size exceeds what the dense representation supports."""


class ConfigError(ValueError):
    """Run configuration is malformed (unknown keys, bad types, missing sections)."""


class SchemaError(ValueError):
    """An input file does not match the expected table or document schema."""


class IntegrationAbort(RuntimeError):
    """Adaptive stepper failed (step-size underflow).

    Carries the time reached and the solver's last error estimate so sweep
    drivers can annotate which run died.
    """

    def __init__(self, message: str, t: float, step: float):
        super().__init__(f"{message} (t={t:.6g}, last step={step:.3g})")
        self.t = t
        self.step = step


class FitConvergenceError(RuntimeError):
    """Nonlinear fit did not converge; `.best` holds the last iterate."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class HorizonError(RuntimeError):
    """A purity curve never crossed the coherence threshold within t_max."""

    def __init__(self, message: str, final_purity: float):
        super().__init__(f"{message} (final purity {final_purity:.6f})")
        self.final_purity = final_purity
