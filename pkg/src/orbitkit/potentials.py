"""Power-law plus inverse-square central potential and its circular-orbit algebra.

Everything works in natural units (unit mass, hbar = 1, unit charge). The
potential is V(r) = a*r**nu + b/r**2; the inverse-square piece rescales the
centrifugal term, which is what makes otherwise familiar orbit and spectrum
formulas survive with shifted parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoCircularOrbitError, SupercriticalError

__all__ = [
    "CombinedPotential",
    "CircularOrbit",
    "ShapeIndicators",
    "PotentialValues",
    "evaluate",
    "circular_orbit",
    "shape_indicators",
    "angular_momentum_for_kappa",
]


@dataclass(frozen=True)
class CombinedPotential:
    """V(r) = a*r**nu + b/r**2 with a != 0, nu != 0.

    ``a == 0`` (pure inverse-square) and ``nu == 0`` (no force from the
    power-law part) are degenerate and rejected at construction.
    """

    a: float
    nu: float
    b: float = 0.0

    def __post_init__(self):
        if self.a == 0.0:
            raise DomainError("a = 0: power-law part vanishes, potential is degenerate")
        if self.nu == 0.0:
            raise DomainError("nu = 0: constant power-law part exerts no force")

    @classmethod
    def alkali(cls, lam: float) -> "CombinedPotential":
        """Valence-electron model -1/r - lam/r**2 (lam > 0 weakens the barrier)."""
        return cls(a=-1.0, nu=-1.0, b=-lam)

    def value(self, r):
        """V(r); r must be positive (scalar or array)."""
        r = _check_radius(r)
        return self.a * r**self.nu + self.b / r**2

    def force(self, r):
        """Radial force f(r) = -dV/dr."""
        r = _check_radius(r)
        return -self.a * self.nu * r ** (self.nu - 1.0) + 2.0 * self.b / r**3

    def force_derivative(self, r):
        """df/dr, used by the circular-orbit stability test."""
        r = _check_radius(r)
        return -self.a * self.nu * (self.nu - 1.0) * r ** (self.nu - 2.0) - 6.0 * self.b / r**4

    def effective_potential(self, r, L: float):
        """U(r) = V(r) + L**2/(2 r**2)."""
        r = _check_radius(r)
        return self.value(r) + 0.5 * L**2 / r**2

    @property
    def stability_factor(self) -> float:
        """a*nu*(nu+2); positive iff circular orbits of the family are stable."""
        return self.a * self.nu * (self.nu + 2.0)

    @property
    def supports_bound_family(self) -> bool:
        """True when the family admits stable bounded motion.

        Requires the stability factor positive and excludes nu < -2 with
        a > 0, where motion is never bounded.
        """
        if self.stability_factor <= 0.0:
            return False
        return not (self.nu < -2.0 and self.a > 0.0)

    def require_bound_family(self) -> None:
        if not self.supports_bound_family:
            raise DomainError(
                f"a={self.a}, nu={self.nu}: no stable bounded orbit family "
                "(need a*nu*(nu+2) > 0 with nu > -2 or a < 0)"
            )


def _check_radius(r):
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("potential evaluation requires r > 0")
    return arr if arr.ndim else float(arr)


class PotentialValues(NamedTuple):
    V: float
    f: float
    u_eff: float | None


def evaluate(potential: CombinedPotential, r, L: float | None = None) -> PotentialValues:
    """Potential, force and (if L given) effective potential at radius r."""
    u_eff = None if L is None else potential.effective_potential(r, L)
    return PotentialValues(potential.value(r), potential.force(r), u_eff)


@dataclass(frozen=True)
class CircularOrbit:
    r0: float
    E: float
    L: float
    stable: bool


def circular_orbit(
    potential: CombinedPotential,
    L: float,
    bracket: tuple[float, float] = (1e-6, 1e6),
    points_per_decade: int = 20,
) -> CircularOrbit:
    """Circular orbit radius and energy at angular momentum L.

    Solves f(r0) = -L**2/r0**3 by scanning a geometric grid over ``bracket``
    for a sign change and polishing the root to 1e-12 relative. The
    ``stable`` flag is the sign of the effective-potential curvature
    -f'(r0) - 3 f(r0)/r0 at the solution.
    """
    if L <= 0.0:
        raise DomainError("circular orbit requires L > 0")
    if potential.a * potential.nu > 0.0 and L**2 + 2.0 * potential.b <= 0.0:
        raise SupercriticalError(
            f"L^2 + 2b = {L**2 + 2.0 * potential.b:g} <= 0: "
            "no centrifugal barrier, trajectories fall to the center"
        )

    def residual(r: float) -> float:
        return potential.force(r) + L**2 / r**3

    lo, hi = bracket
    prod = potential.a * potential.nu
    rhs = L**2 + 2.0 * potential.b
    if prod != 0.0 and rhs / prod > 0.0:
        # widen the scan around the root of the monotone scaled residual
        # -a*nu*r^(nu+2) + (L^2 + 2b), so extreme exponents stay bracketed
        r_est = (rhs / prod) ** (1.0 / (potential.nu + 2.0))
        lo = min(lo, r_est / 10.0)
        hi = max(hi, r_est * 10.0)
    n = max(2, int(round(points_per_decade * math.log10(hi / lo))))
    grid = np.geomspace(lo, hi, n)
    vals = np.array([residual(r) for r in grid])
    signs = np.sign(vals)
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if idx.size == 0:
        exact = np.nonzero(vals == 0.0)[0]
        if exact.size:
            r0 = float(grid[exact[0]])
        else:
            raise NoCircularOrbitError(
                f"f(r) + L^2/r^3 has no sign change on [{lo:g}, {hi:g}]"
            )
    else:
        i = int(idx[0])
        r0 = brentq(residual, grid[i], grid[i + 1], rtol=1e-12, xtol=1e-300)

    E = 0.5 * L**2 / r0**2 + potential.value(r0)
    curvature = -potential.force_derivative(r0) - 3.0 * potential.force(r0) / r0
    return CircularOrbit(r0=float(r0), E=float(E), L=float(L), stable=bool(curvature > 0.0))


@dataclass(frozen=True)
class ShapeIndicators:
    """Radial-oscillation and angle-rescaling indicators of an orbit family.

    ``beta_sq`` = nu + 2 measures the radial oscillation frequency of
    near-circular orbits, ``kappa`` = sqrt(1 + 2b/L^2) the angular
    rescaling by the inverse-square part. Near-circular orbits close when
    the product beta*kappa is rational.
    """

    beta_sq: float
    kappa: float
    beta_kappa: float

    @property
    def beta(self) -> float:
        return math.sqrt(self.beta_sq)


def shape_indicators(potential: CombinedPotential, L: float) -> ShapeIndicators:
    """beta^2 = nu+2, kappa = sqrt(1 + 2b/L^2) and their product beta*kappa."""
    if L <= 0.0:
        raise DomainError("shape indicators require L > 0")
    radicand = 1.0 + 2.0 * potential.b / L**2
    if radicand <= 0.0:
        raise SupercriticalError(
            f"1 + 2b/L^2 = {radicand:g} <= 0: supercritical inverse-square attraction"
        )
    beta_sq = potential.nu + 2.0
    if beta_sq <= 0.0:
        raise DomainError(
            f"nu = {potential.nu}: unstable family, radial frequency beta is imaginary"
        )
    kappa = math.sqrt(radicand)
    return ShapeIndicators(beta_sq=beta_sq, kappa=kappa, beta_kappa=math.sqrt(beta_sq) * kappa)


def angular_momentum_for_kappa(potential: CombinedPotential, kappa: float | Fraction) -> float:
    """Angular momentum that tunes the indicator kappa to the requested value.

    Inverts kappa = sqrt(1 + 2b/L^2): L = sqrt(2b/(kappa^2 - 1)). Requires
    b and kappa^2 - 1 to share a sign (kappa < 1 needs attractive b < 0,
    kappa > 1 repulsive b > 0).
    """
    kappa = float(kappa)
    if kappa <= 0.0:
        raise DomainError("kappa must be positive")
    denom = kappa**2 - 1.0
    if denom == 0.0 or potential.b * denom <= 0.0:
        raise DomainError(
            f"no real L gives kappa={kappa:g} for b={potential.b:g} "
            "(b and kappa^2 - 1 must share a sign)"
        )
    L = math.sqrt(2.0 * potential.b / denom)
    return L
