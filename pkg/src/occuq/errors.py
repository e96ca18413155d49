"""Exception taxonomy for the analytic pipeline and the CLI."""


class OccuqError(Exception):
    """Base class for all package-specific failures."""


class DegenerateRoots(OccuqError):
    """Two spectral roots coincide within tolerance at the requested argument.

    The determinant and linear-system machinery assumes distinct roots;
    callers retry at a slightly perturbed argument before giving up.
    """


class SingularSolve(OccuqError):
    """A matrix that must be inverted is numerically singular."""


class IllConditioned(OccuqError):
    """A linear system's condition estimate exceeds the trust threshold."""


class ZeroDenominator(OccuqError):
    """A denominator fell below the cancellation threshold."""


class EvaluationFailure(OccuqError):
    """A transform evaluator failed at a specific inversion node."""


class ConfigError(OccuqError):
    """A run configuration file is malformed; message carries file:line."""
