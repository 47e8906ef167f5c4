"""Exception types shared across the package.

Numerical singularities surface as typed errors rather than NaN so that
sweep engines can tell a pole from a bug.
"""


class CapsError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CapsError, ValueError):
    """Input lies on (or beyond) a singular point of an expression.

    Examples: equal external and internal cavity rates (group-delay pole),
    a heralding probability of exactly zero (conditional fidelity 0/0),
    or a drive inversion that would deplete the ground amplitude.
    """


class ConvergenceError(CapsError, RuntimeError):
    """A quadrature or integrator failed its self-consistency check."""


class ConfigError(CapsError, ValueError):
    """A scenario configuration failed schema validation."""
