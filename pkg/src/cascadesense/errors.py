"""Exception types shared across the package."""


class NumericsError(RuntimeError):
    """A numerical procedure failed in a way that invalidates its result."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ParameterError(ValueError):
    """A parameter block (function orders, coefficient lists) is inconsistent."""


class ConvergenceError(NumericsError):
    """Adaptive refinement did not converge; carries the last two refinements."""

    def __init__(self, message, last=None, previous=None):
        super().__init__(message)
        self.last = last
        self.previous = previous


class DivergentIntegralError(ConvergenceError):
    """The integrand's tail fails to decay; the integral is treated as divergent."""


class BranchError(NumericsError):
    """A nominally real quantity came back with a non-negligible imaginary part."""


class OverflowRangeError(NumericsError):
    """The result exceeds the representable double-precision range."""


# Roundoff-scale excursions outside [0, 1] are clamped; larger ones indicate
# an algorithmic failure rather than floating-point noise.
PROBABILITY_SLACK = 1e-9


def as_probability(value, context=""):
    """Clamp a nominally-probability value to [0, 1] within roundoff slack.

    Raises NumericsError for excursions beyond PROBABILITY_SLACK, which
    signal a broken computation rather than accumulated roundoff.
    """
    v = float(value)
    if v < 0.0:
        if v >= -PROBABILITY_SLACK:
            return 0.0
        raise NumericsError(f"probability {v!r} below 0 beyond roundoff slack"
                            + (f" in {context}" if context else ""))
    if v > 1.0:
        if v <= 1.0 + PROBABILITY_SLACK:
            return 1.0
        raise NumericsError(f"probability {v!r} above 1 beyond roundoff slack"
                            + (f" in {context}" if context else ""))
    return v
