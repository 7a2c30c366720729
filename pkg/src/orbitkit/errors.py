"""Exception types shared across the package."""


class OrbitkitError(Exception):
    """Base class for all orbitkit errors."""


class DomainError(OrbitkitError, ValueError):
    """Input parameters outside the domain of an operation."""


class SupercriticalError(DomainError):
    """Attractive inverse-square part too strong: fall to the center.

    Classically 1 + 2b/L^2 <= 0, quantum mechanically 1 + 2b/(l+1/2)^2 <= 0.
    """


class NoCircularOrbitError(DomainError):
    """f(r) + L^2/r^3 has no root on the search bracket."""


class UnboundOrbitError(DomainError):
    """Requested (E, L) does not produce a bound orbit."""


class FactorizationImpossibleError(DomainError):
    """Radial operator admits no first-order factorization for this exponent."""


class IntegrationFailureError(OrbitkitError, RuntimeError):
    """Trajectory integration aborted (collapse to the center or solver failure)."""


class BoundStateNotFoundError(OrbitkitError, RuntimeError):
    """Eigenvalue search exhausted its bracket without finding the state."""
