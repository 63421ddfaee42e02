"""Exception hierarchy.

Configuration problems derive from :class:`ConfigError` (CLI exit code 2);
everything raised by an engine at evaluation time derives from
:class:`ComputationError` (CLI exit code 1).
"""


class EqlocError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EqlocError, ValueError):
    """Malformed or unreadable configuration document."""


class ValidationError(ConfigError):
    """A configuration value violates a type invariant.

    ``field`` names the offending entry, e.g. ``fixed_points[0].weights[0]``.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class ComputationError(EqlocError, ArithmeticError):
    """An engine could not evaluate the requested quantity."""


class SingularParameterError(ComputationError):
    """The parameter lies on a wall (some weight pairing vanishes)."""


class ChamberError(ComputationError):
    """The parameter lies in no declared chamber."""


class MissingEntryError(ComputationError):
    """A required table entry (integrand or multiplicity) is absent."""


class PolarizationError(ComputationError):
    """No usable polarization direction for a set of weights."""


class UnboundedSupportError(ComputationError):
    """A pushforward measure failed to have bounded support."""


class InconsistencyError(ComputationError):
    """A quantity that must be an integer came out fractional."""


class HeightExceededError(ComputationError):
    """Highest weight too large for the brute-force oracle."""


class WallContactError(ComputationError):
    """A test function's support reaches a chamber wall."""


class QuadratureWarning(UserWarning):
    """Quadrature refinement did not reach the requested stability."""
