"""Exception types shared across the package.

Every failure mode that callers are expected to catch gets its own class so
that the outer optimizer and the CLI can distinguish "this parameter point is
infeasible" from "the numerics are broken".
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class NonFiniteError(ArithmeticError):
    """A user-supplied function returned NaN or infinity."""


class DepthExceededError(RuntimeError):
    """Adaptive quadrature could not reach tolerance within the depth cap."""


class NoBracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


class BracketOverflowError(RuntimeError):
    """Bracket expansion ran past its growth cap without a sign change."""


class DegenerateBoundError(ArithmeticError):
    """The energy-per-bit expression degenerates (0/0) at this boundary pair."""


class NoFeasiblePointError(RuntimeError):
    """Every grid point of the outer search was degenerate."""


class ProfileMismatchError(RuntimeError):
    """The cumulative integral of the A-profile disagrees with its endpoint."""


class DenominatorCollapseError(ArithmeticError):
    """A recursion denominator that must stay positive fell below tolerance."""


class FactorizationFailureError(ArithmeticError):
    """A matrix that must be positive definite failed its factorization."""
