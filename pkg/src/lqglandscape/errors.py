"""Exception types raised by the numerical routines in this package.

Everything derives from :class:`LandscapeError` so callers (and the CLI) can
distinguish semantic/numerical failures from plain usage errors, which are
reported as built-in ``ValueError``/``TypeError``.
"""

__all__ = [
    "LandscapeError",
    "AssumptionViolated",
    "UnstableCoefficient",
    "IllConditioned",
    "NotStabilizable",
    "NoStabilizingSolution",
    "NotStabilizing",
    "SingularTransform",
    "PoleHit",
    "NotControllable",
    "NotSISO",
    "NonMinimalController",
    "NotStationary",
    "UnstablePadding",
    "PlantNotStable",
    "NonDiagonalizable",
    "InvariantViolated",
    "DegeneratePi",
    "NoPathFound",
    "StabilityLostOnPath",
    "PlacementFailed",
    "RetriesExhausted",
]


class LandscapeError(Exception):
    """Base class for all package-specific failures."""


class AssumptionViolated(LandscapeError):
    """The plant fails one of the standing controllability/observability
    assumptions required for the optimal-controller construction."""


class UnstableCoefficient(LandscapeError):
    """A Lyapunov equation was posed with an unstable coefficient matrix."""


class IllConditioned(LandscapeError):
    """A matrix-equation solve produced a residual beyond the allowed bound."""


class NotStabilizable(LandscapeError):
    """The pair (A, B) fails the stabilizability rank test."""


class NoStabilizingSolution(LandscapeError):
    """A Riccati solve did not yield a stabilizing solution."""


class NotStabilizing(LandscapeError):
    """The controller does not stabilize the plant it was paired with."""


class SingularTransform(LandscapeError):
    """A coordinate change matrix is singular or numerically unusable."""


class PoleHit(LandscapeError):
    """A transfer function was evaluated at (or too close to) a pole."""


class NotControllable(LandscapeError):
    """The controller state-space realization is not controllable."""


class NotSISO(LandscapeError):
    """An operation restricted to single-input single-output data was asked
    to run on a multivariable instance."""


class NonMinimalController(LandscapeError):
    """The controller realization is not minimal (controllable + observable),
    so the requested orbit/tangent-space computation is undefined."""


class NotStationary(LandscapeError):
    """The gradient norm exceeds the stationarity tolerance."""


class UnstablePadding(LandscapeError):
    """The block used to pad a controller to a higher order is not stable."""


class PlantNotStable(LandscapeError):
    """The operation requires an open-loop stable plant."""


class NonDiagonalizable(LandscapeError):
    """The supplied matrix is too far from diagonalizable for the
    eigenvector-based formula to be trusted."""


class InvariantViolated(LandscapeError):
    """A convex-lift tuple fails one of its defining matrix inequalities."""


class DegeneratePi(LandscapeError):
    """The lift's coupling block is singular and could not be repaired by a
    small perturbation."""


class NoPathFound(LandscapeError):
    """No stabilizing path between the requested controllers was produced."""


class StabilityLostOnPath(LandscapeError):
    """A sample on a constructed path failed the stability verification.
    This cannot happen for exact arithmetic and flags a defect."""


class PlacementFailed(LandscapeError):
    """Pole placement failed for the sampled pole sets."""


class RetriesExhausted(LandscapeError):
    """A randomized initializer ran out of retries."""
