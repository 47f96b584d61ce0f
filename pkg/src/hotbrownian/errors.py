"""Exception and warning types shared across the toolkit.

The hierarchy is intentionally shallow: callers that want to treat every
toolkit failure uniformly can catch :class:`HotBrownianError`; the CLI maps
the two broad failure classes onto distinct exit codes (invalid input
configuration vs. a fit/calibration that did not succeed on valid input).
"""

from __future__ import annotations

__all__ = [
    "HotBrownianError",
    "DomainError",
    "ConfigError",
    "CalibrationError",
    "EstimationError",
    "AccommodationWarning",
]


class HotBrownianError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HotBrownianError, ValueError):
    """An argument lies outside the physical domain of an operation
    (negative power, non-positive temperature, out-of-range inversion...).
    """


class ConfigError(HotBrownianError, ValueError):
    """A configuration object is structurally or numerically invalid
    (undersampled oscillation, non-monotone calibration law, bad JSON...).
    """


class CalibrationError(HotBrownianError, RuntimeError):
    """The zero-power calibration could not be established
    (non-positive or non-significant intercept, degenerate sweep...).
    """


class EstimationError(HotBrownianError, RuntimeError):
    """A downstream estimate is undefined on the given data
    (temperature slope consistent with zero, degenerate regressor...).
    """


class AccommodationWarning(UserWarning):
    """Emitted when an accommodation coefficient above 1 is used.

    Values slightly above 1 arise as *effective* coefficients when a
    non-spherical particle is analysed with the sphere model; they are
    accepted everywhere but flagged, since alpha_c > 1 is not physically
    meaningful for a true sphere.
    """
