"""Radial bound states of the combined potential: eigensolver, semiclassical
spectrum, operator factorization and energy ladders.

The inverse-square part of the potential is absorbed into a real effective
angular momentum l' with l'(l'+1) = l(l+1) + 2b, after which the radial
equation looks like the plain power-law problem with a non-integer
centrifugal index. Bound states are found by Numerov shooting (outward and
inward sweeps matched at the outer classical turning point); the radial
operator factorizes into first-order ladder operators exactly for the
attractive 1/r and the r^2 power laws, for any b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .errors import (
    BoundStateNotFoundError,
    DomainError,
    FactorizationImpossibleError,
    SupercriticalError,
)
from .potentials import CombinedPotential

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency, but stay importable
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

__all__ = [
    "RadialGrid",
    "RadialProblem",
    "EigenSolution",
    "LadderSpec",
    "LadderApplication",
    "LadderReport",
    "WkbSpectrumParams",
    "effective_l",
    "wkb_params",
    "wkb_energy",
    "default_grid",
    "solve_radial",
    "solve_spectrum",
    "closed_form_energy",
    "spectral_index",
    "factorize",
    "scaling_apply",
    "apply_ladder",
    "verify_ladder",
    "verify_factorization_identity",
    "no_angular_ladder_check",
    "AngularLadderReport",
    "grid_derivative",
    "overlap",
    "emit_spectrum_csv",
    "emit_wavefunction_csv",
]

DEFECT_TOL = 1e-10
ANNIHILATION_NORM = 1e-8


def effective_l(l: int, b: float) -> float:
    """Effective angular momentum l' with l'(l'+1) = l(l+1) + 2b.

    l' = -1/2 + (l+1/2)*sqrt(1 + 2b/(l+1/2)^2); real only while the
    radicand is positive, otherwise the attraction is supercritical.
    """
    if l < 0 or int(l) != l:
        raise DomainError("l must be a nonnegative integer")
    half = l + 0.5
    radicand = 1.0 + 2.0 * b / half**2
    if radicand <= 0.0:
        raise SupercriticalError(
            f"b = {b:g} is supercritical for l = {l}: "
            f"need b > {-0.5 * half**2:g}"
        )
    return -0.5 + half * math.sqrt(radicand)


@dataclass(frozen=True)
class WkbSpectrumParams:
    """Semiclassical spectrum E_n = alpha_nu * n**exponent with n = n_r + n_offset."""

    alpha_nu: float
    exponent: float
    n_offset: float


def _alpha_nu(a: float, nu: float) -> float:
    power = 2.0 * nu / (nu + 2.0)
    if a > 0.0:
        if nu <= 0.0:
            raise DomainError("confining branch requires nu > 0 with a > 0")
        bracket = nu * math.sqrt(math.pi) * math.gamma(1.0 / nu + 1.5) / math.gamma(1.0 / nu)
        return a ** (2.0 / (nu + 2.0)) * 2.0 ** (nu / (nu + 2.0)) * bracket**power
    if not -2.0 < nu < 0.0:
        raise DomainError("attractive branch requires -2 < nu < 0 with a < 0")
    # prefactor normalized so nu = -1 reproduces the exact hydrogen-like -a^2/2
    bracket = (-nu) * math.sqrt(math.pi) * math.gamma(1.0 - 1.0 / nu) / math.gamma(-0.5 - 1.0 / nu)
    return -((-a) ** (2.0 / (nu + 2.0))) * 2.0 ** (nu / (nu + 2.0)) * bracket**power


def spectral_index_offset(potential: CombinedPotential, l_prime: float) -> float:
    """Constant added to the radial node count to form the spectral index n."""
    if potential.a > 0.0:
        return 0.5 * l_prime + 0.75
    return (2.0 * l_prime + potential.nu + 3.0) / (2.0 * (potential.nu + 2.0))


def spectral_index(potential: CombinedPotential, l_prime: float, n_r: int) -> float:
    return n_r + spectral_index_offset(potential, l_prime)


def wkb_params(potential: CombinedPotential, l_prime: float) -> WkbSpectrumParams:
    return WkbSpectrumParams(
        alpha_nu=_alpha_nu(potential.a, potential.nu),
        exponent=2.0 * potential.nu / (potential.nu + 2.0),
        n_offset=spectral_index_offset(potential, l_prime),
    )


def wkb_energy(potential: CombinedPotential, n: float) -> float:
    """Semiclassical energy alpha_nu * n**(2*nu/(nu+2)) at spectral index n."""
    if n <= 0.0:
        raise DomainError("spectral index n must be positive")
    alpha = _alpha_nu(potential.a, potential.nu)
    return alpha * n ** (2.0 * potential.nu / (potential.nu + 2.0))


def closed_form_energy(potential: CombinedPotential, l_prime: float, n_r: int) -> float | None:
    """Exact eigenvalue for the two solvable power laws, None otherwise.

    nu = -1, a < 0: E = -a^2 / (2 (n_r + l' + 1)^2)
    nu = 2,  a > 0: E = sqrt(2a) (2 n_r + l' + 3/2)
    """
    if potential.nu == -1.0 and potential.a < 0.0:
        return -potential.a**2 / (2.0 * (n_r + l_prime + 1.0) ** 2)
    if potential.nu == 2.0 and potential.a > 0.0:
        return math.sqrt(2.0 * potential.a) * (2.0 * n_r + l_prime + 1.5)
    return None


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid; by default the first point sits one spacing from the origin."""

    r_min: float
    r_max: float
    n: int

    def __post_init__(self):
        if self.r_min <= 0.0 or self.r_max <= self.r_min:
            raise DomainError("grid requires 0 < r_min < r_max")
        if self.n < 16:
            raise DomainError("grid needs at least 16 points")

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.n - 1)

    def radii(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n)


def default_grid(
    potential: CombinedPotential,
    l_prime: float,
    n_r_max: int = 6,
    n_points: int | None = None,
) -> RadialGrid:
    """Grid sized to hold bound states up to n_r_max radial nodes.

    r_max covers the outer classical turning point of the highest requested
    state plus a tail long enough for the decaying solution to be
    negligible; r_min is one grid spacing (keeps the first Numerov
    coefficient well conditioned for non-integer l'). When ``n_points`` is
    not given, it grows with r_max so the spacing never exceeds a small
    fraction of the potential's characteristic length (wide grids would
    otherwise degrade the eigenfunctions enough to break the 1e-8
    ladder-annihilation threshold).
    """
    a, nu = potential.a, potential.nu
    if nu == -1.0 and a < 0.0:
        char = 1.0 / -a
        n_top = n_r_max + l_prime + 1.0
        r_max = (2.0 * n_top**2 + 30.0 * n_top + 10.0) * char
    elif nu == 2.0 and a > 0.0:
        omega = math.sqrt(2.0 * a)
        char = omega**-0.5
        E_top = omega * (2.0 * n_r_max + l_prime + 1.5)
        r_turn_sq = E_top / a
        r_max = math.sqrt(r_turn_sq + 80.0 / omega) + 4.0 / math.sqrt(omega)
    else:
        char = (2.0 * abs(a)) ** (-1.0 / (nu + 2.0))
        r_max = 50.0 * char
        try:
            n_top = spectral_index(potential, l_prime, n_r_max)
            E_top = wkb_energy(potential, n_top)
            r_turn = (E_top / a) ** (1.0 / nu)
            if a > 0.0:
                r_max = max(r_max, 2.5 * r_turn)
            else:
                r_max = max(r_max, r_turn + 40.0 / math.sqrt(-2.0 * E_top))
        except DomainError:
            pass
    if n_points is None:
        n_points = max(20000, int(math.ceil(r_max / (0.003 * char))))
    h = r_max / n_points
    return RadialGrid(r_min=h, r_max=r_max, n=n_points)


@dataclass(frozen=True)
class RadialProblem:
    """Radial eigenproblem at fixed l: potential, l' mapping and grid."""

    potential: CombinedPotential
    l: int
    l_prime: float
    grid: RadialGrid

    @classmethod
    def build(
        cls,
        potential: CombinedPotential,
        l: int,
        grid: RadialGrid | None = None,
        n_r_max: int = 6,
        n_points: int | None = None,
    ) -> "RadialProblem":
        l_prime = effective_l(l, potential.b)
        if grid is None:
            grid = default_grid(potential, l_prime, n_r_max=n_r_max, n_points=n_points)
        return cls(potential=potential, l=l, l_prime=l_prime, grid=grid)


@dataclass(frozen=True)
class EigenSolution:
    """Bound state: node count, energy, normalized chi(r) and spectral index n."""

    problem: RadialProblem
    n_r: int
    E: float
    chi: np.ndarray
    n: float
    matching_defect: float

    def radii(self) -> np.ndarray:
        return self.problem.grid.radii()


@njit(cache=True)
def _numerov_sweeps(base, two_E, h, i_start, y0, y1, i_match):
    """Outward and inward Numerov sweeps for chi'' = (base - two_E) * chi.

    Outward runs from i_start over the whole grid counting sign changes
    (node count); values up to i_match+1 are stored. Inward runs from the
    outer edge down to i_match-1. Both sweeps rescale when the running
    amplitude exceeds 1e250 (growth in classically forbidden regions).
    Returns (y_out, y_in, nodes).
    """
    n = base.size
    c = h * h / 12.0
    y_out = np.zeros(n)
    y_in = np.zeros(n)

    y_out[i_start] = y0
    y_out[i_start + 1] = y1
    nodes = 0
    ym = y0
    yc = y1
    for i in range(i_start + 1, n - 1):
        fm = base[i - 1] - two_E
        f0 = base[i] - two_E
        fp = base[i + 1] - two_E
        yn = (2.0 * (1.0 + 5.0 * c * f0) * yc - (1.0 - c * fm) * ym) / (1.0 - c * fp)
        if i + 1 <= i_match + 1:
            y_out[i + 1] = yn
        if yc != 0.0 and yn != 0.0 and ((yc > 0.0) != (yn > 0.0)):
            nodes += 1
        ym = yc
        yc = yn
        if abs(yc) > 1e250:
            s = 1.0 / abs(yc)
            ym *= s
            yc *= s
            top = i + 1
            if top > i_match + 1:
                top = i_match + 1
            for j in range(top + 1):
                y_out[j] *= s

    y_in[n - 1] = 0.0
    y_in[n - 2] = 1e-30
    lo = i_match - 1
    if lo < 1:
        lo = 1
    for i in range(n - 2, lo - 1, -1):
        fm = base[i - 1] - two_E
        f0 = base[i] - two_E
        fp = base[i + 1] - two_E
        y_in[i - 1] = (
            2.0 * (1.0 + 5.0 * c * f0) * y_in[i] - (1.0 - c * fp) * y_in[i + 1]
        ) / (1.0 - c * fm)
        if abs(y_in[i - 1]) > 1e250:
            s = 1.0 / abs(y_in[i - 1])
            for j in range(i - 1, n):
                y_in[j] *= s
    return y_out, y_in, nodes


class _Shooter:
    """Per-problem state for the Numerov eigenvalue search."""

    def __init__(self, problem: RadialProblem):
        self.problem = problem
        self.r = problem.grid.radii()
        self.h = problem.grid.h
        lp = problem.l_prime
        pot = problem.potential
        self.base = lp * (lp + 1.0) / self.r**2 + 2.0 * pot.a * self.r**pot.nu
        self.v_eff = 0.5 * self.base
        # first index where the Numerov coefficient 1 - h^2 f/12 stays well
        # conditioned against the centrifugal singularity
        r_needed = self.h * math.sqrt(lp * (lp + 1.0) / 9.6)
        if self.r[0] >= r_needed:
            i_start = 0
        else:
            i_start = int(math.ceil((r_needed - self.r[0]) / self.h))
        self.i_start = min(i_start, self.r.size // 4)
        self.lp = lp

    def _boundary(self, i: int, E: float) -> float:
        """Series start chi ~ r^(l'+1) * (1 + ...) with the leading corrections.

        The bare power is only first-order accurate in r and would seed the
        sweep with an irregular-solution admixture; the correction terms
        push the boundary error below the Numerov truncation order.
        """
        r = self.r[i]
        lp = self.lp
        pot = self.problem.potential
        a, nu = pot.a, pot.nu
        if nu == -1.0:
            c1 = a / (lp + 1.0)
            c2 = (a * c1 - E) / (2.0 * lp + 3.0)
            c3 = (2.0 * a * c2 - 2.0 * E * c1) / (3.0 * (2.0 * lp + 4.0))
            series = 1.0 + c1 * r + c2 * r**2 + c3 * r**3
        elif nu == 2.0:
            c2 = -E / (2.0 * lp + 3.0)
            c4 = (-E * c2 + a) / (2.0 * (2.0 * lp + 5.0))
            c6 = (-2.0 * E * c4 + 2.0 * a * c2) / (6.0 * (2.0 * lp + 7.0))
            series = 1.0 + c2 * r**2 + c4 * r**4 + c6 * r**6
        else:
            c_v = 2.0 * a / ((nu + 2.0) * (2.0 * lp + nu + 3.0))
            c_e = -E / (2.0 * lp + 3.0)
            series = 1.0 + c_v * r ** (nu + 2.0) + c_e * r**2
        return r ** (lp + 1.0) * series

    def _match_index(self, E: float) -> int:
        f = self.base - 2.0 * E
        allowed = np.nonzero(f < 0.0)[0]
        n = f.size
        if allowed.size == 0:
            i = int(np.argmin(f))
        else:
            i = int(allowed[-1])
        return min(max(i, self.i_start + 2), n - 3)

    def sweep(self, E: float):
        i_match = self._match_index(E)
        y_out, y_in, nodes = _numerov_sweeps(
            self.base,
            2.0 * E,
            self.h,
            self.i_start,
            self._boundary(self.i_start, E),
            self._boundary(self.i_start + 1, E),
            i_match,
        )
        return y_out, y_in, nodes, i_match

    def nodes(self, E: float) -> int:
        return self.sweep(E)[2]

    def defect(self, E: float) -> float:
        """Normalized log-derivative mismatch at the matching point."""
        y_out, y_in, _, m = self.sweep(E)
        num = (y_out[m + 1] - y_out[m - 1]) * y_in[m] - (y_in[m + 1] - y_in[m - 1]) * y_out[m]
        den = (
            abs((y_out[m + 1] - y_out[m - 1]) * y_in[m])
            + abs((y_in[m + 1] - y_in[m - 1]) * y_out[m])
        )
        if den == 0.0:
            return 2.0
        return num / den

    def assemble(self, E: float) -> np.ndarray:
        y_out, y_in, _, m = self.sweep(E)
        if y_in[m] == 0.0:
            raise BoundStateNotFoundError("inward solution vanished at the matching point")
        chi = np.empty_like(y_out)
        chi[: m + 1] = y_out[: m + 1]
        chi[m:] = y_in[m:] * (y_out[m] / y_in[m])
        for j in range(self.i_start):  # grid points below the sweep start
            chi[j] = self._boundary(j, E)
        return chi


def _count_interior_nodes(chi: np.ndarray) -> int:
    scale = np.max(np.abs(chi))
    significant = chi[np.abs(chi) > 1e-10 * scale]
    return int(np.count_nonzero(np.diff(np.sign(significant)) != 0))


def _sign_fix(chi: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(chi))
    idx = np.nonzero(np.abs(chi) > 0.01 * scale)[0]
    if idx.size and chi[idx[0]] < 0.0:
        return -chi
    return chi


def solve_radial(
    problem: RadialProblem,
    n_r: int,
    defect_tol: float = DEFECT_TOL,
) -> EigenSolution:
    """Bound state with n_r radial nodes by Numerov shooting.

    The energy is bracketed by bisection on the node count of the outward
    sweep, then polished by a secant iteration on the matching defect at
    the outer classical turning point until the normalized defect falls
    below ``defect_tol``. chi is normalized to unit integral of chi^2 and
    sign-fixed (first significant lobe positive).
    """
    if n_r < 0 or int(n_r) != n_r:
        raise DomainError("n_r must be a nonnegative integer")
    shooter = _Shooter(problem)
    v_min = float(shooter.v_eff.min())
    E_lo = v_min - 1e-6 * (1.0 + abs(v_min))

    if problem.potential.a < 0.0:
        E_hi = -1e-12 * max(abs(v_min), 1.0)
        if shooter.nodes(E_hi) <= n_r:
            raise BoundStateNotFoundError(
                f"state n_r = {n_r} not bound for l' = {problem.l_prime:g} "
                "(bracket exhausted below the continuum)"
            )
    else:
        E_hi = v_min + max(1.0, abs(v_min))
        for _ in range(200):
            if shooter.nodes(E_hi) > n_r:
                break
            E_hi = E_lo + 2.0 * (E_hi - E_lo)
        else:
            raise BoundStateNotFoundError(f"state n_r = {n_r} not found (bracket exhausted)")

    lo, hi = E_lo, E_hi
    for _ in range(240):
        if hi - lo <= 1e-12 * max(abs(lo), abs(hi), 1e-30):
            break
        mid = 0.5 * (lo + hi)
        if shooter.nodes(mid) > n_r:
            hi = mid
        else:
            lo = mid

    e0, e1 = lo, hi
    d0, d1 = shooter.defect(e0), shooter.defect(e1)
    best_E, best_d = (e0, d0) if abs(d0) < abs(d1) else (e1, d1)
    for _ in range(60):
        if abs(best_d) < defect_tol:
            break
        if d1 == d0:
            break
        e2 = e1 - d1 * (e1 - e0) / (d1 - d0)
        width = max(hi - lo, 1e-15 * max(abs(lo), 1.0))
        if not (lo - width <= e2 <= hi + width):
            e2 = 0.5 * (e0 + e1)
        d2 = shooter.defect(e2)
        if abs(d2) < abs(best_d):
            best_E, best_d = e2, d2
        if abs(e2 - e1) <= 1e-17 * max(abs(e2), 1e-30):
            break
        e0, d0, e1, d1 = e1, d1, e2, d2
    E = best_E

    chi = shooter.assemble(E)
    nodes = _count_interior_nodes(chi)
    if nodes != n_r:
        raise BoundStateNotFoundError(
            f"converged state has {nodes} nodes, expected {n_r} (grid too small?)"
        )
    r = shooter.r
    norm = math.sqrt(simpson(chi**2, x=r))
    chi = _sign_fix(chi / norm)
    return EigenSolution(
        problem=problem,
        n_r=n_r,
        E=float(E),
        chi=chi,
        n=spectral_index(problem.potential, problem.l_prime, n_r),
        matching_defect=abs(best_d),
    )


def solve_spectrum(problem: RadialProblem, n_r_values) -> list[EigenSolution]:
    return [solve_radial(problem, n_r) for n_r in n_r_values]


@dataclass(frozen=True)
class LadderSpec:
    """Coefficients of the first-order factorization at spectral index n.

    The factored operators are (r d/dr + W(r) + A)(r d/dr - W(r) + B) with
    W = sqrt(2a) r^2 on the confining branch and W = -a r/n on the
    attractive one; A + B + 1 = 0 always. ``n_step`` is the index change of
    one ladder application; ``scaling_k`` is the length rescaling n/(n+1)
    used by the raising operator on the attractive branch (the lowering
    operator uses n/(n-1)).
    """

    branch: str  # "harmonic" | "coulomb"
    A: float
    B: float
    n_step: int
    n: float
    scaling_k: float | None

    def scaling_factor(self, direction: str) -> float | None:
        if self.branch != "coulomb":
            return None
        step = 1.0 if direction == "up" else -1.0
        if self.n + step <= 0.0:
            raise DomainError(
                f"no rung below n = {self.n:g}: the lowering operator should "
                "have annihilated the state"
            )
        return self.n / (self.n + step)


def factorize(potential: CombinedPotential, n: float) -> LadderSpec:
    """Factorization coefficients of the radial operator at spectral index n.

    Only the confining r^2 (a > 0) and attractive 1/r (a < 0) power laws
    admit the factorization; any other exponent raises
    :class:`FactorizationImpossibleError`. The value of b is immaterial:
    it only shifts l', which the factorization never touches.
    """
    if n <= 0.0:
        raise DomainError("spectral index n must be positive")
    if potential.nu == 2.0 and potential.a > 0.0:
        return LadderSpec(
            branch="harmonic",
            A=2.0 * n - 1.5,
            B=-(2.0 * n - 0.5),
            n_step=2,
            n=n,
            scaling_k=None,
        )
    if potential.nu == -1.0 and potential.a < 0.0:
        return LadderSpec(
            branch="coulomb",
            A=n - 1.0,
            B=-n,
            n_step=1,
            n=n,
            scaling_k=n / (n + 1.0),
        )
    raise FactorizationImpossibleError(
        f"factorization impossible for nu = {potential.nu:g}, a = {potential.a:g}: "
        "only nu = 2 (a > 0) and nu = -1 (a < 0) factorize"
    )


def grid_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """4th-order first derivative: central stencils inside, one-sided at the edges."""
    y = np.asarray(values, dtype=float)
    if y.size < 5:
        raise DomainError("derivative stencil needs at least 5 points")
    d = np.empty_like(y)
    d[2:-2] = (-y[4:] + 8.0 * y[3:-1] - 8.0 * y[1:-3] + y[:-4]) / (12.0 * h)
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h)
    d[-2] = (3.0 * y[-1] + 10.0 * y[-2] - 18.0 * y[-3] + 6.0 * y[-4] - y[-5]) / (12.0 * h)
    d[-1] = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3] - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    return d


def _second_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """4th-order second derivative, 2nd-order one-sided near the edges."""
    y = np.asarray(values, dtype=float)
    d2 = np.empty_like(y)
    d2[2:-2] = (
        -y[4:] + 16.0 * y[3:-1] - 30.0 * y[2:-2] + 16.0 * y[1:-3] - y[:-4]
    ) / (12.0 * h * h)
    d2[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (h * h)
    d2[1] = (y[0] - 2.0 * y[1] + y[2]) / (h * h)
    d2[-2] = (y[-1] - 2.0 * y[-2] + y[-3]) / (h * h)
    d2[-1] = (2.0 * y[-1] - 5.0 * y[-2] + 4.0 * y[-3] - y[-4]) / (h * h)
    return d2


def scaling_apply(k: float, r: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Length rescaling (M(k) f)(r) = f(k r) by cubic interpolation.

    Arguments beyond the grid edge are treated as a decayed bound-state
    tail and set to zero.
    """
    if k <= 0.0:
        raise DomainError("scaling factor k must be positive")
    if k == 1.0:
        return np.array(values, dtype=float, copy=True)
    spline = CubicSpline(r, values, extrapolate=True)
    target = k * np.asarray(r)
    out = spline(target)
    out[target > r[-1]] = 0.0
    return out


@dataclass(frozen=True)
class LadderApplication:
    chi: np.ndarray
    annihilated: bool
    raw_norm: float


def apply_ladder(sol: EigenSolution, spec: LadderSpec, direction: str) -> LadderApplication:
    """Apply the energy raising or lowering operator to a solved eigenstate.

    Confining branch (index step 2):
        up:   r chi' - sqrt(2a) r^2 chi + (2n + 1/2) chi
        down: r chi' + sqrt(2a) r^2 chi - (2n - 1/2) chi
    Attractive branch (index step 1, followed by the length rescaling
    M(n/(n+-1))):
        up:   r chi' + (a r / n) chi + n chi
        down: r chi' - (a r / n) chi - n chi

    The output is normalized and sign-fixed. When the raw output norm falls
    below ``ANNIHILATION_NORM`` the state was annihilated (stepping down
    from the lowest rung) and the unnormalized remainder is returned.
    """
    if direction not in ("up", "down"):
        raise DomainError("direction must be 'up' or 'down'")
    pot = sol.problem.potential
    r = sol.radii()
    h = sol.problem.grid.h
    n = spec.n
    rdchi = r * grid_derivative(sol.chi, h)

    if spec.branch == "harmonic":
        w = math.sqrt(2.0 * pot.a) * r**2
        if direction == "up":
            out = rdchi - w * sol.chi + (2.0 * n + 0.5) * sol.chi
        else:
            out = rdchi + w * sol.chi - (2.0 * n - 0.5) * sol.chi
    elif spec.branch == "coulomb":
        lin = (pot.a / n) * r
        if direction == "up":
            out = rdchi + lin * sol.chi + n * sol.chi
        else:
            out = rdchi - lin * sol.chi - n * sol.chi
    else:
        raise FactorizationImpossibleError(f"unknown branch {spec.branch!r}")

    raw_norm = math.sqrt(simpson(out**2, x=r))
    if raw_norm < ANNIHILATION_NORM:
        return LadderApplication(chi=out, annihilated=True, raw_norm=raw_norm)

    if spec.branch == "coulomb":
        k = spec.scaling_factor(direction)
        out = scaling_apply(k, r, out)
        raw_after = math.sqrt(simpson(out**2, x=r))
        if raw_after < ANNIHILATION_NORM:
            return LadderApplication(chi=out, annihilated=True, raw_norm=raw_after)
        out = out / raw_after
    else:
        out = out / raw_norm
    return LadderApplication(chi=_sign_fix(out), annihilated=False, raw_norm=raw_norm)


def overlap(chi_a: np.ndarray, chi_b: np.ndarray, r: np.ndarray) -> float:
    return float(simpson(chi_a * chi_b, x=r))


@dataclass(frozen=True)
class LadderReport:
    branch: str
    n: float
    direction: str
    overlap: float | None
    annihilated: bool

    def to_json_dict(self) -> dict:
        return {
            "branch": self.branch,
            "n": self.n,
            "direction": self.direction,
            "overlap": self.overlap,
            "annihilated": self.annihilated,
        }


def verify_ladder(
    potential: CombinedPotential,
    l: int,
    n_r: int,
    direction: str,
    grid: RadialGrid | None = None,
) -> LadderReport:
    """Ladder a solved state and overlap it with the independently solved target."""
    problem = RadialProblem.build(potential, l, grid=grid, n_r_max=n_r + 2)
    sol = solve_radial(problem, n_r)
    spec = factorize(potential, sol.n)
    app = apply_ladder(sol, spec, direction)
    if app.annihilated:
        return LadderReport(
            branch=spec.branch, n=sol.n, direction=direction, overlap=None, annihilated=True
        )
    target_nr = n_r + (1 if direction == "up" else -1)
    if target_nr < 0:
        raise BoundStateNotFoundError(
            "ladder output did not annihilate below the lowest state"
        )
    target = solve_radial(problem, target_nr)
    ov = overlap(app.chi, target.chi, problem.grid.radii())
    return LadderReport(
        branch=spec.branch, n=sol.n, direction=direction, overlap=abs(ov), annihilated=False
    )


def verify_factorization_identity(
    sol: EigenSolution, spec: LadderSpec, edge_fraction: float = 1.0 / 500.0
) -> float:
    """Max-norm relative residual of the operator-product identity.

    Applies the two first-order factors successively and compares with the
    second-order radial operator plus the A*B constant, on the grid
    interior (a small fraction at each edge is excluded, where one-sided
    stencils and the fractional-power behavior near the origin dominate).
    """
    pot = sol.problem.potential
    r = sol.radii()
    h = sol.problem.grid.h
    chi = sol.chi
    n = spec.n

    if spec.branch == "harmonic":
        w = math.sqrt(2.0 * pot.a) * r**2
        alpha_term = 2.0 * _alpha_nu(pot.a, pot.nu) * n * r**2
    else:
        w = -(pot.a / n) * r
        alpha_term = 2.0 * _alpha_nu(pot.a, pot.nu) * n**-2.0 * r**2

    inner = r * grid_derivative(chi, h) + w * chi + spec.B * chi
    lhs = r * grid_derivative(inner, h) - w * inner + spec.A * inner
    d2 = _second_derivative(chi, h)
    curvature = r**2 * d2
    power_term = -2.0 * pot.a * r ** (pot.nu + 2.0) * chi
    rhs = curvature + power_term + alpha_term * chi + spec.A * spec.B * chi

    margin = max(8, int(round(edge_fraction * r.size)))
    sl = slice(margin, -margin)
    # scale by the constituent terms: the combination itself can vanish
    # identically (l' = 0 states annihilated by the lowering factor)
    scale = float(
        np.max(
            np.abs(curvature[sl])
            + np.abs(power_term[sl])
            + np.abs(alpha_term[sl] * chi[sl])
            + abs(spec.A * spec.B) * np.abs(chi[sl])
        )
    )
    if scale == 0.0:
        raise DomainError("identity residual undefined: trivial state")
    return float(np.max(np.abs(lhs[sl] - rhs[sl])) / scale)


@dataclass(frozen=True)
class AngularLadderReport:
    """Spacing of consecutive effective angular momenta.

    A unit spacing would let an operator step l' by exactly one and thus
    connect physical l values; any b != 0 makes the spacing non-integer,
    so no angular-momentum ladder exists for the combined potential.
    """

    b: float
    l: int
    l_prime_low: float
    l_prime_high: float
    spacing: float
    unit_spacing: bool

    def to_json_dict(self) -> dict:
        return {
            "b": self.b,
            "l": self.l,
            "l_prime_low": self.l_prime_low,
            "l_prime_high": self.l_prime_high,
            "spacing": self.spacing,
            "unit_spacing": self.unit_spacing,
        }


def no_angular_ladder_check(b: float, l: int) -> AngularLadderReport:
    lo = effective_l(l, b)
    hi = effective_l(l + 1, b)
    spacing = hi - lo
    return AngularLadderReport(
        b=b,
        l=l,
        l_prime_low=lo,
        l_prime_high=hi,
        spacing=spacing,
        unit_spacing=abs(spacing - 1.0) < 1e-12,
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_spectrum_csv(rows, path, reference_label: str = "E_closed_form") -> None:
    """Write l, l_prime, n_r, E_numeric, <reference>, abs_error rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"l,l_prime,n_r,E_numeric,{reference_label},abs_error\n")
        for l, lp, n_r, e_num, e_ref, err in rows:
            fh.write(
                ",".join([str(l), _fmt(lp), str(n_r), _fmt(e_num), _fmt(e_ref), _fmt(err)])
                + "\n"
            )


def emit_wavefunction_csv(sol: EigenSolution, path) -> None:
    r = sol.radii()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("r,chi\n")
        for i in range(r.size):
            fh.write(f"{_fmt(r[i])},{_fmt(sol.chi[i])}\n")
