"""Planar orbit dynamics in the combined potential: integration and closure tests.

The equations of motion for (r, theta, p_r) at fixed angular momentum L are
integrated with an adaptive high-order Runge-Kutta scheme; pericenter
passages are located by event detection on p_r. Orbit closure is decided by
measuring the apsidal angle, approximating 2*pi/delta_theta by a rational
q/p, and integrating p full revolutions to confirm the phase-space gap
vanishes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import (
    DomainError,
    IntegrationFailureError,
    UnboundOrbitError,
)
from .potentials import CombinedPotential, circular_orbit, shape_indicators

__all__ = [
    "OrbitState",
    "OrbitTrajectory",
    "ClosureReport",
    "RungeLenzSample",
    "RungeLenzTrack",
    "ScanRow",
    "ScanClassification",
    "BertrandScanResult",
    "integrate_orbit",
    "integrate_revolutions",
    "turning_points",
    "pericenter_state",
    "energy_for_eccentricity",
    "eccentric_state",
    "analytic_alkali_orbit",
    "AlkaliOrbit",
    "apsidal_angle",
    "measure_apsidal_angle",
    "best_rational",
    "closure_analysis",
    "bertrand_scan",
    "runge_lenz_track",
    "runge_lenz_at_pericenters",
    "apsis_precession_per_radial_period",
    "emit_orbit_csv",
    "emit_scan_csv",
]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
CLOSURE_GAP_TOL = 1e-5
COLLAPSE_FRACTION = 1e-8


@dataclass(frozen=True)
class OrbitState:
    """Phase-space point of the planar motion; theta is cumulative (unwrapped)."""

    r: float
    theta: float
    p_r: float
    L: float
    t: float = 0.0

    def __post_init__(self):
        if self.r <= 0.0:
            raise DomainError("orbit state requires r > 0")
        if self.L <= 0.0:
            raise DomainError("orbit state requires L > 0")

    @property
    def u(self) -> float:
        """Inverse radius 1/r."""
        return 1.0 / self.r


@dataclass(frozen=True)
class OrbitTrajectory:
    """Recorded solution of the radial equations of motion.

    States are sampled at the accepted integrator steps; ``pericenters``
    holds (t, theta) pairs located by sign change of p_r (- to +), refined
    on the dense output.
    """

    potential: CombinedPotential
    t: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    p_r: np.ndarray
    L0: float
    E0: float
    max_energy_drift: float
    pericenters: np.ndarray  # shape (n, 2): columns t, theta
    pericenter_radii: np.ndarray  # shape (n,): r at each pericenter passage

    @property
    def states(self) -> tuple[OrbitState, ...]:
        return tuple(
            OrbitState(r=float(r), theta=float(th), p_r=float(pr), L=self.L0, t=float(t))
            for t, r, th, pr in zip(self.t, self.r, self.theta, self.p_r)
        )

    def energy(self) -> np.ndarray:
        return (
            0.5 * self.p_r**2
            + 0.5 * self.L0**2 / self.r**2
            + self.potential.value(self.r)
        )

    def energy_drift(self) -> np.ndarray:
        scale = abs(self.E0) if abs(self.E0) > 1e-12 else 1.0
        return np.abs(self.energy() - self.E0) / scale

    @property
    def final_state(self) -> OrbitState:
        return OrbitState(
            r=float(self.r[-1]),
            theta=float(self.theta[-1]),
            p_r=float(self.p_r[-1]),
            L=self.L0,
            t=float(self.t[-1]),
        )


def _rhs_and_events(potential: CombinedPotential, L: float, r_collapse: float, theta_stop=None):
    a, nu, b = potential.a, potential.nu, potential.b
    L2 = L * L

    def rhs(t, y):
        r = y[0]
        force = -a * nu * r ** (nu - 1.0) + 2.0 * b / r**3
        return (y[2], L / (r * r), L2 / (r * r * r) + force)

    def pericenter(t, y):
        return y[2]

    pericenter.direction = 1.0

    def collapse(t, y):
        return y[0] - r_collapse

    collapse.direction = -1.0
    collapse.terminal = True

    events = [pericenter, collapse]
    if theta_stop is not None:
        def revolutions_done(t, y):
            return y[1] - theta_stop

        revolutions_done.direction = 1.0
        revolutions_done.terminal = True
        events.append(revolutions_done)
    return rhs, events


def _integrate(
    potential: CombinedPotential,
    init: OrbitState,
    t_end: float,
    tol: float,
    atol: float,
    theta_stop: float | None,
) -> OrbitTrajectory:
    if tol <= 0.0:
        raise DomainError("integration tolerance must be positive")
    r_collapse = COLLAPSE_FRACTION * init.r
    rhs, events = _rhs_and_events(potential, init.L, r_collapse, theta_stop)
    sol = solve_ivp(
        rhs,
        (init.t, init.t + t_end),
        (init.r, init.theta, init.p_r),
        method="DOP853",
        rtol=tol,
        atol=atol,
        events=events,
        dense_output=False,
    )
    if sol.t_events[1].size > 0:
        raise IntegrationFailureError(
            f"trajectory fell to the center (r < {r_collapse:g}) at t = {sol.t_events[1][0]:g}"
        )
    if sol.status == -1:
        raise IntegrationFailureError(f"integration failed: {sol.message}")

    t = np.asarray(sol.t)
    r, theta, p_r = (np.asarray(sol.y[i]) for i in range(3))
    E0 = (
        0.5 * init.p_r**2
        + 0.5 * init.L**2 / init.r**2
        + potential.value(init.r)
    )
    peri_t = np.asarray(sol.t_events[0])
    if peri_t.size:
        peri_y = np.asarray(sol.y_events[0])
        pericenters = np.column_stack([peri_t, peri_y[:, 1]])
        pericenter_radii = peri_y[:, 0]
    else:
        pericenters = np.empty((0, 2))
        pericenter_radii = np.empty(0)

    traj = OrbitTrajectory(
        potential=potential,
        t=t,
        r=r,
        theta=theta,
        p_r=p_r,
        L0=init.L,
        E0=float(E0),
        max_energy_drift=0.0,
        pericenters=pericenters,
        pericenter_radii=pericenter_radii,
    )
    drift = float(traj.energy_drift().max()) if t.size else 0.0
    object.__setattr__(traj, "max_energy_drift", drift)
    return traj


def integrate_orbit(
    potential: CombinedPotential,
    init: OrbitState,
    t_end: float,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> OrbitTrajectory:
    """Integrate (r, theta, p_r) for a time span t_end from the given state.

    L is an exact constant of the motion (it is never integrated). Aborts
    with :class:`IntegrationFailureError` when r collapses below
    ``COLLAPSE_FRACTION`` of the initial radius.
    """
    return _integrate(potential, init, t_end, tol, atol, theta_stop=None)


def integrate_revolutions(
    potential: CombinedPotential,
    init: OrbitState,
    revolutions: float,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> OrbitTrajectory:
    """Integrate until theta has advanced by 2*pi*revolutions (terminal event).

    theta is monotone for L > 0, so the stopping event is unambiguous. The
    returned trajectory ends exactly (to event tolerance) at the stop angle.
    """
    if revolutions <= 0.0:
        raise DomainError("revolutions must be positive")
    theta_stop = init.theta + 2.0 * math.pi * revolutions
    t_cap = _time_cap(potential, init, revolutions)
    traj = _integrate(potential, init, t_cap, tol, atol, theta_stop=theta_stop)
    if traj.theta[-1] < theta_stop - 1e-6:
        raise IntegrationFailureError(
            f"orbit did not complete {revolutions:g} revolutions within t = {t_cap:g}"
        )
    return traj


def _time_cap(potential: CombinedPotential, init: OrbitState, revolutions: float) -> float:
    """Upper bound on the time needed for the requested revolutions."""
    E = (
        0.5 * init.p_r**2
        + 0.5 * init.L**2 / init.r**2
        + potential.value(init.r)
    )
    try:
        _, r_apo = turning_points(potential, float(E), init.L)
        r_big = max(r_apo, init.r)
    except (DomainError, UnboundOrbitError):
        r_big = 10.0 * init.r
    return 1.25 * revolutions * 2.0 * math.pi * r_big**2 / init.L + 1e-9


def turning_points(potential: CombinedPotential, E: float, L: float) -> tuple[float, float]:
    """Radial turning points (r_peri, r_apo) of the bound orbit at (E, L)."""
    circ = circular_orbit(potential, L)
    if E < circ.E:
        raise DomainError(
            f"E = {E:g} is below the effective-potential minimum {circ.E:g}"
        )
    if potential.a < 0.0 and E >= 0.0:
        raise UnboundOrbitError(f"E = {E:g} >= 0: motion is unbound")

    def g(r: float) -> float:
        return potential.effective_potential(r, L) - E

    r0 = circ.r0
    if g(r0) > -1e-15 * max(abs(E), 1.0):
        return r0, r0

    lo = r0
    for _ in range(400):
        lo *= 0.75
        if g(lo) > 0.0:
            break
    else:
        raise DomainError("no inner turning point found")
    r_peri = brentq(g, lo, r0, rtol=1e-13, xtol=1e-300)

    hi = r0
    for _ in range(400):
        hi *= 1.5
        if g(hi) > 0.0:
            break
    else:
        raise UnboundOrbitError("no outer turning point found: motion is unbound")
    r_apo = brentq(g, r0, hi, rtol=1e-13, xtol=1e-300)
    return float(r_peri), float(r_apo)


def pericenter_state(potential: CombinedPotential, E: float, L: float) -> OrbitState:
    """Orbit state at the inner turning point, theta = 0, t = 0."""
    r_peri, _ = turning_points(potential, E, L)
    return OrbitState(r=r_peri, theta=0.0, p_r=0.0, L=L)


def energy_for_eccentricity(potential: CombinedPotential, L: float, eccentricity: float) -> float:
    """Energy of the orbit family member with the given radial-excursion parameter.

    For a < 0 (potentials vanishing at infinity) E = E_circ*(1 - ecc^2),
    which reduces to the Kepler eccentricity for the attractive 1/r
    potential. For confining a > 0, E = E_circ/(1 - ecc^2). ecc = 0 is the
    circular orbit; ecc -> 1 approaches escape (a < 0) or grows without
    bound (a > 0).
    """
    if not 0.0 <= eccentricity < 1.0:
        raise DomainError("eccentricity parameter must lie in [0, 1)")
    circ = circular_orbit(potential, L)
    if potential.a < 0.0:
        return circ.E * (1.0 - eccentricity**2)
    return circ.E / (1.0 - eccentricity**2)


def eccentric_state(potential: CombinedPotential, L: float, eccentricity: float) -> OrbitState:
    """Pericenter state of the orbit family member with the given eccentricity."""
    E = energy_for_eccentricity(potential, L, eccentricity)
    if eccentricity == 0.0:
        circ = circular_orbit(potential, L)
        return OrbitState(r=circ.r0, theta=0.0, p_r=0.0, L=L)
    return pericenter_state(potential, E, L)


@dataclass(frozen=True)
class AlkaliOrbit:
    """Closed-form orbit u(theta) for the potential -1/r - lam/r^2.

    u(theta) = [1 + amplitude*cos(kappa*(theta - theta0))] / (L^2 kappa^2)
    with kappa = sqrt(1 - 2*lam/L^2) and amplitude = sqrt(1 + 2*E*L^2*kappa^2).
    amplitude = 0 is a circular orbit.
    """

    E: float
    L: float
    lam: float
    theta0: float
    kappa: float
    amplitude: float

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        u = (1.0 + self.amplitude * np.cos(self.kappa * (theta - self.theta0))) / (
            self.L**2 * self.kappa**2
        )
        return u if u.ndim else float(u)

    @property
    def u_max(self) -> float:
        return (1.0 + self.amplitude) / (self.L**2 * self.kappa**2)

    @property
    def u_min(self) -> float:
        return (1.0 - self.amplitude) / (self.L**2 * self.kappa**2)

    @property
    def r_min(self) -> float:
        return 1.0 / self.u_max

    @property
    def r_max(self) -> float:
        return 1.0 / self.u_min


def analytic_alkali_orbit(E: float, L: float, lam: float, theta0: float = 0.0) -> AlkaliOrbit:
    """Exact orbit of V(r) = -1/r - lam/r^2 as a function u(theta) = 1/r."""
    if L <= 0.0:
        raise DomainError("analytic orbit requires L > 0")
    kappa_sq = 1.0 - 2.0 * lam / L**2
    if kappa_sq <= 0.0:
        raise DomainError(
            f"kappa^2 = 1 - 2*lam/L^2 = {kappa_sq:g} <= 0: supercritical attraction"
        )
    s = 1.0 + 2.0 * E * L**2 * kappa_sq
    if s < 0.0:
        if s > -1e-13:
            s = 0.0
        else:
            raise DomainError(
                f"1 + 2*E*L^2*kappa^2 = {s:g} < 0: no real orbit at this (E, L)"
            )
    return AlkaliOrbit(
        E=E, L=L, lam=lam, theta0=theta0, kappa=math.sqrt(kappa_sq), amplitude=math.sqrt(s)
    )


class ApsidalAngle(NamedTuple):
    mean: float
    spread: float


def apsidal_angle(traj: OrbitTrajectory) -> ApsidalAngle:
    """Mean and spread (max - min) of theta advance between successive pericenters."""
    if traj.pericenters.shape[0] < 3:
        raise DomainError(
            f"insufficient radial oscillations: {traj.pericenters.shape[0]} pericenters, need >= 3"
        )
    gaps = np.diff(traj.pericenters[:, 1])
    return ApsidalAngle(mean=float(gaps.mean()), spread=float(gaps.max() - gaps.min()))


def measure_apsidal_angle(
    potential: CombinedPotential,
    E: float,
    L: float,
    tol: float = DEFAULT_RTOL,
    pericenter_count: int = 4,
) -> ApsidalAngle:
    """Integrate from pericenter long enough to average the apsidal angle."""
    potential.require_bound_family()
    ind = shape_indicators(potential, L)
    init = pericenter_state(potential, E, L)
    # near-circular estimate of the pericenter spacing, padded for anharmonicity
    revs = (pericenter_count + 1) * (1.0 / ind.beta_kappa) + 1.0
    for _ in range(4):
        traj = integrate_revolutions(potential, init, revs, tol=tol)
        if traj.pericenters.shape[0] >= pericenter_count:
            return apsidal_angle(traj)
        revs *= 2.0
    return apsidal_angle(traj)


def best_rational(x: float, max_denominator: int) -> Fraction:
    """Closest fraction to x with denominator bounded by max_denominator."""
    if max_denominator < 1:
        raise DomainError("max_denominator must be >= 1")
    return Fraction(x).limit_denominator(max_denominator)


@dataclass(frozen=True)
class ClosureReport:
    """Verdict on orbit closure at a particular (E, L).

    ``beta_kappa`` is the measured value 2*pi/(apsidal angle) for eccentric
    orbits (the algebraic value for circular ones); ``rational`` is its best
    bounded-denominator approximation q/p when accepted, and the orbit is
    closed when the phase-space gap after p revolutions is below tolerance.
    """

    kappa: float
    beta: float
    beta_kappa: float
    rational: Fraction | None
    closed: bool
    closure_period_revolutions: int | None
    numeric_gap: float | None

    def to_json_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "beta": self.beta,
            "beta_kappa": self.beta_kappa,
            "rational": (
                {"p": self.rational.denominator, "q": self.rational.numerator}
                if self.rational is not None
                else None
            ),
            "closed": self.closed,
            "period_revolutions": self.closure_period_revolutions,
            "numeric_gap": self.numeric_gap,
        }


def closure_analysis(
    potential: CombinedPotential,
    L: float,
    E: float,
    tol_rational: float = 1e-6,
    max_denominator: int = 64,
    tol: float = DEFAULT_RTOL,
    closure_tol: float = CLOSURE_GAP_TOL,
) -> ClosureReport:
    """Decide whether the bound orbit at (E, L) closes, and after how many revolutions.

    Measures the apsidal angle (or uses the near-circular prediction when E
    sits at the effective-potential minimum), approximates
    beta*kappa = 2*pi/delta_theta by a rational q/p with p bounded by
    ``max_denominator``, and confirms closure by integrating p full
    revolutions and measuring the scaled phase-space gap
    sqrt((dr/r0)^2 + (dp_r*r0/L)^2).
    """
    potential.require_bound_family()
    ind = shape_indicators(potential, L)
    circ = circular_orbit(potential, L)
    if E < circ.E:
        raise UnboundOrbitError(f"E = {E:g} below the circular-orbit energy {circ.E:g}")
    if potential.a < 0.0 and E >= 0.0:
        raise UnboundOrbitError(f"E = {E:g} >= 0: not bound")

    near_circular = abs(E - circ.E) <= 1e-9 * max(abs(circ.E), 1.0)
    if near_circular:
        beta_kappa = ind.beta_kappa
        init = OrbitState(r=circ.r0, theta=0.0, p_r=0.0, L=L)
    else:
        measured = measure_apsidal_angle(potential, E, L, tol=tol)
        beta_kappa = 2.0 * math.pi / measured.mean
        init = pericenter_state(potential, E, L)

    frac = best_rational(beta_kappa, max_denominator)
    if abs(beta_kappa - float(frac)) >= tol_rational or frac.numerator <= 0:
        return ClosureReport(
            kappa=ind.kappa,
            beta=ind.beta,
            beta_kappa=beta_kappa,
            rational=None,
            closed=False,
            closure_period_revolutions=None,
            numeric_gap=None,
        )

    p = frac.denominator
    traj = integrate_revolutions(potential, init, p, tol=tol)
    end = traj.final_state
    gap = math.hypot((end.r - init.r) / circ.r0, (end.p_r - init.p_r) * circ.r0 / L)
    closed = gap < closure_tol
    return ClosureReport(
        kappa=ind.kappa,
        beta=ind.beta,
        beta_kappa=beta_kappa,
        rational=frac,
        closed=closed,
        closure_period_revolutions=p if closed else None,
        numeric_gap=gap,
    )


@dataclass(frozen=True)
class ScanRow:
    nu: float
    b: float
    L: float
    E: float
    eccentricity: float
    apsidal_angle: float
    rational: Fraction | None
    closed: bool


@dataclass(frozen=True)
class ScanClassification:
    closed_for_all: bool
    rational: Fraction | None
    ratio_spread: float


@dataclass(frozen=True)
class BertrandScanResult:
    rows: tuple[ScanRow, ...]
    classifications: dict[float, ScanClassification]

    @property
    def closed_exponents(self) -> tuple[float, ...]:
        return tuple(nu for nu, c in self.classifications.items() if c.closed_for_all)


def _scan_point(args) -> ScanRow:
    nu, b, L, ecc, tol, tol_rational, max_denominator = args
    a = 1.0 if nu > 0.0 else -1.0
    potential = CombinedPotential(a=a, nu=nu, b=b)
    E = energy_for_eccentricity(potential, L, ecc)
    if ecc == 0.0:
        circ = circular_orbit(potential, L)
        ind = shape_indicators(potential, L)
        angle = 2.0 * math.pi / ind.beta_kappa
    else:
        angle = measure_apsidal_angle(potential, E, L, tol=tol).mean
    ratio = angle / math.pi
    frac = best_rational(ratio, max_denominator)
    ok = abs(ratio - float(frac)) < tol_rational
    return ScanRow(
        nu=nu,
        b=b,
        L=L,
        E=E,
        eccentricity=ecc,
        apsidal_angle=angle,
        rational=frac if ok else None,
        closed=ok,
    )


def bertrand_scan(
    nu_values: Sequence[float],
    eccentricity_samples: Sequence[float],
    b: float = 0.0,
    L: float = 1.0,
    tol: float = DEFAULT_RTOL,
    tol_rational: float = 1e-4,
    max_denominator: int = 16,
) -> BertrandScanResult:
    """Classify power-law exponents by orbit closure across eccentricities.

    An exponent closes "for all sampled eccentricities" iff every sample's
    apsidal angle over pi matches one and the same rational within
    ``tol_rational``. The denominator bound is kept small: genuinely closed
    families have small closure periods, while large denominators approximate
    any ratio within the scan tolerance. Points are independent; set
    ORBITKIT_THREADS > 1 to evaluate them in parallel (results are
    order-independent).
    """
    for nu in nu_values:
        if nu <= -2.0 or nu == 0.0:
            raise DomainError(f"nu = {nu:g} does not support a stable bounded family")
    tasks = [
        (nu, b, L, ecc, tol, tol_rational, max_denominator)
        for nu in nu_values
        for ecc in eccentricity_samples
    ]
    threads = int(os.environ.get("ORBITKIT_THREADS", "1") or "1")
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(_scan_point, tasks))
    else:
        rows = tuple(map(_scan_point, tasks))

    classifications: dict[float, ScanClassification] = {}
    for nu in nu_values:
        nu_rows = [row for row in rows if row.nu == nu]
        ratios = [row.apsidal_angle / math.pi for row in nu_rows]
        spread = max(ratios) - min(ratios) if len(ratios) > 1 else 0.0
        fracs = {row.rational for row in nu_rows}
        closed_all = all(row.closed for row in nu_rows) and len(fracs) == 1
        classifications[nu] = ScanClassification(
            closed_for_all=closed_all,
            rational=next(iter(fracs)) if closed_all else None,
            ratio_spread=spread,
        )
    return BertrandScanResult(rows=rows, classifications=classifications)


@dataclass(frozen=True)
class RungeLenzSample:
    t: float
    R: tuple[float, float]
    magnitude: float


@dataclass(frozen=True)
class RungeLenzTrack:
    """Eccentricity vector R = p x L - k*rhat along a trajectory (k = -a).

    Conserved for the pure attractive 1/r potential; an inverse-square
    addition makes its direction precess while |R| returns to the same
    value at matching orbit phases.
    """

    t: np.ndarray
    Rx: np.ndarray
    Ry: np.ndarray
    magnitude: np.ndarray

    @property
    def samples(self) -> tuple[RungeLenzSample, ...]:
        return tuple(
            RungeLenzSample(t=float(t), R=(float(x), float(y)), magnitude=float(m))
            for t, x, y, m in zip(self.t, self.Rx, self.Ry, self.magnitude)
        )

    def angle(self) -> np.ndarray:
        return np.arctan2(self.Ry, self.Rx)


def runge_lenz_track(traj: OrbitTrajectory) -> RungeLenzTrack:
    """Evaluate the eccentricity vector at every recorded state.

    Defined relative to the attractive 1/r problem, so the power-law part
    must have nu = -1 and a < 0. For b = 0, |R| equals the Kepler orbit
    eccentricity.
    """
    pot = traj.potential
    if pot.nu != -1.0 or pot.a >= 0.0:
        raise DomainError(
            "eccentricity vector undefined: power-law part must be attractive 1/r"
        )
    k = -pot.a
    L = traj.L0
    cos_t, sin_t = np.cos(traj.theta), np.sin(traj.theta)
    p_x = traj.p_r * cos_t - (L / traj.r) * sin_t
    p_y = traj.p_r * sin_t + (L / traj.r) * cos_t
    Rx = p_y * L - k * cos_t
    Ry = -p_x * L - k * sin_t
    return RungeLenzTrack(t=traj.t, Rx=Rx, Ry=Ry, magnitude=np.hypot(Rx, Ry))


def runge_lenz_at_pericenters(traj: OrbitTrajectory) -> np.ndarray:
    """|R| at each pericenter passage.

    With p_r = 0 there, R points along the apsis and |R| = |L^2/r - k|;
    same-phase samples must agree even when b != 0 makes R precess.
    """
    pot = traj.potential
    if pot.nu != -1.0 or pot.a >= 0.0:
        raise DomainError(
            "eccentricity vector undefined: power-law part must be attractive 1/r"
        )
    return np.abs(traj.L0**2 / traj.pericenter_radii - (-pot.a))


def apsis_precession_per_radial_period(traj: OrbitTrajectory) -> float:
    """Mean advance of the apsis line per radial oscillation: <dtheta_peri> - 2*pi."""
    if traj.pericenters.shape[0] < 2:
        raise DomainError("need at least 2 pericenters to measure precession")
    gaps = np.diff(traj.pericenters[:, 1])
    return float(gaps.mean()) - 2.0 * math.pi


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_orbit_csv(traj: OrbitTrajectory, path) -> None:
    """Write t, r, theta, x, y, p_r, E_rel_drift rows (17 significant digits)."""
    drift = traj.energy_drift() if traj.t.size else np.empty(0)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,r,theta,x,y,p_r,E_rel_drift\n")
        for i in range(traj.t.size):
            x = traj.r[i] * math.cos(traj.theta[i])
            y = traj.r[i] * math.sin(traj.theta[i])
            row = (traj.t[i], traj.r[i], traj.theta[i], x, y, traj.p_r[i], drift[i])
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def emit_scan_csv(result: BertrandScanResult, path) -> None:
    """Write nu, b, L, E, apsidal_angle, closed rows for every scan point."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("nu,b,L,E,apsidal_angle,closed\n")
        for row in result.rows:
            fh.write(
                ",".join(
                    [
                        _fmt(row.nu),
                        _fmt(row.b),
                        _fmt(row.L),
                        _fmt(row.E),
                        _fmt(row.apsidal_angle),
                        "true" if row.closed else "false",
                    ]
                )
                + "\n"
            )
