"""Orbit integration, apsidal/closure analysis, and eccentricity-vector tests."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbitkit.classical import (
    AlkaliOrbit,
    OrbitState,
    OrbitTrajectory,
    analytic_alkali_orbit,
    apsidal_angle,
    apsis_precession_per_radial_period,
    bertrand_scan,
    best_rational,
    closure_analysis,
    eccentric_state,
    emit_orbit_csv,
    emit_scan_csv,
    energy_for_eccentricity,
    integrate_orbit,
    integrate_revolutions,
    measure_apsidal_angle,
    pericenter_state,
    runge_lenz_at_pericenters,
    runge_lenz_track,
    turning_points,
)
from orbitkit.errors import DomainError, IntegrationFailureError, UnboundOrbitError
from orbitkit.potentials import CombinedPotential, angular_momentum_for_kappa, circular_orbit

COULOMB = CombinedPotential(-1.0, -1.0, 0.0)
HARMONIC = CombinedPotential(0.5, 2.0, 0.0)
ALKALI = CombinedPotential.alkali(0.2)
L_HALF = angular_momentum_for_kappa(ALKALI, 0.5)  # kappa = 1/2


def kepler_energy(ecc: float, L: float = 1.0) -> float:
    return -(1.0 - ecc**2) / (2.0 * L**2)


# ---------------------------------------------------------------- integration


def test_circular_orbit_is_fixed_point():
    init = OrbitState(r=1.0, theta=0.0, p_r=0.0, L=1.0)
    traj = integrate_orbit(COULOMB, init, 100.0)
    assert np.abs(traj.r - 1.0).max() < 1e-9
    assert traj.L0 == init.L


def test_energy_conservation_short_window():
    # ~8 periods: drift must stay below 10x the integrator tolerance
    tol = 1e-10
    init = pericenter_state(COULOMB, kepler_energy(0.6), 1.0)
    traj = integrate_orbit(COULOMB, init, 200.0, tol=tol)
    assert traj.max_energy_drift < 10.0 * tol


def test_energy_conservation_long_window_scales_with_periods():
    # over 10^3 time units a non-symplectic scheme accumulates roughly
    # linearly with the number of periods; bound it at 2*tol per period
    tol = 1e-10
    init = pericenter_state(COULOMB, kepler_energy(0.6), 1.0)
    traj = integrate_orbit(COULOMB, init, 1000.0, tol=tol)
    n_periods = traj.pericenters.shape[0] + 1
    assert traj.max_energy_drift < 2.0 * tol * n_periods


def test_fall_to_center_aborts():
    # L^2 + 2b < 0: no centrifugal barrier
    init = OrbitState(r=0.5, theta=0.0, p_r=-0.1, L=0.5)
    with pytest.raises(IntegrationFailureError):
        integrate_orbit(ALKALI, init, 50.0)


def test_pericenter_times_strictly_increasing():
    init = pericenter_state(COULOMB, kepler_energy(0.4), 1.0)
    traj = integrate_orbit(COULOMB, init, 120.0)
    times = traj.pericenters[:, 0]
    assert times.size >= 3
    assert np.all(np.diff(times) > 0.0)


def test_integrate_revolutions_stops_at_angle():
    init = pericenter_state(COULOMB, kepler_energy(0.3), 1.0)
    traj = integrate_revolutions(COULOMB, init, 3)
    assert traj.theta[-1] == pytest.approx(6.0 * math.pi, abs=1e-8)


def test_orbit_state_validation():
    with pytest.raises(DomainError):
        OrbitState(r=-1.0, theta=0.0, p_r=0.0, L=1.0)
    with pytest.raises(DomainError):
        OrbitState(r=1.0, theta=0.0, p_r=0.0, L=0.0)


def test_turning_points_bracket_circular_radius():
    E = kepler_energy(0.5)
    r_peri, r_apo = turning_points(COULOMB, E, 1.0)
    circ = circular_orbit(COULOMB, 1.0)
    assert r_peri < circ.r0 < r_apo
    # Kepler: r = L^2/(1 +- e)
    assert r_peri == pytest.approx(1.0 / 1.5, rel=1e-10)
    assert r_apo == pytest.approx(1.0 / 0.5, rel=1e-10)
    with pytest.raises(UnboundOrbitError):
        turning_points(COULOMB, 0.1, 1.0)


def test_eccentric_state_sits_at_pericenter():
    state = eccentric_state(COULOMB, 1.0, 0.5)
    assert state.p_r == 0.0
    assert state.theta == 0.0
    E = energy_for_eccentricity(COULOMB, 1.0, 0.5)
    assert E == pytest.approx(kepler_energy(0.5), rel=1e-12)
    assert state.r == pytest.approx(1.0 / 1.5, rel=1e-9)


# ------------------------------------------------------------- analytic orbit


def test_analytic_orbit_circular_limit():
    # amplitude = 0: u is constant 1/(L^2 kappa^2)
    L = L_HALF
    E = -1.0 / (2.0 * L**2 * 0.25)
    orb = analytic_alkali_orbit(E, L, 0.2)
    assert orb.amplitude == pytest.approx(0.0, abs=1e-6)
    theta = np.linspace(0.0, 10.0, 50)
    assert np.allclose(orb(theta), 1.0 / (L**2 * 0.25), rtol=1e-6)


def test_analytic_orbit_kepler_reduction():
    # lam = 0 is the conic u = (1/L^2)(1 + e cos theta)
    E, L = kepler_energy(0.4), 1.0
    orb = analytic_alkali_orbit(E, L, 0.0)
    assert orb.kappa == 1.0
    assert orb.amplitude == pytest.approx(0.4, rel=1e-12)
    theta = np.linspace(0.0, 2.0 * math.pi, 17)
    assert np.allclose(orb(theta), (1.0 + 0.4 * np.cos(theta)) / L**2, rtol=1e-12)


def test_analytic_orbit_matches_integration_both_ways():
    # start the numeric orbit at the analytic pericenter and compare u(theta)
    E, L = -3.0, L_HALF
    orb = analytic_alkali_orbit(E, L, 0.2)
    init = OrbitState(r=orb.r_min, theta=0.0, p_r=0.0, L=L)
    traj = integrate_revolutions(ALKALI, init, 2, tol=1e-11, atol=1e-13)
    u_numeric = 1.0 / traj.r
    assert np.abs(u_numeric - orb(traj.theta)).max() < 1e-6
    # and the numeric pericenter matches the analytic r_min again at 4 pi
    end = traj.final_state
    assert end.r == pytest.approx(orb.r_min, rel=1e-8)


def test_analytic_orbit_errors():
    with pytest.raises(DomainError):
        analytic_alkali_orbit(-3.0, 0.5, 0.2)  # kappa^2 <= 0
    with pytest.raises(DomainError):
        analytic_alkali_orbit(-10.0, L_HALF, 0.2)  # 1 + 2 E L^2 kappa^2 < 0


# ------------------------------------------------------------- apsidal angles


def test_apsidal_angle_kepler_any_eccentricity():
    for ecc in (0.2, 0.7):
        angle = measure_apsidal_angle(COULOMB, kepler_energy(ecc), 1.0)
        assert angle.mean == pytest.approx(2.0 * math.pi, abs=1e-6)
        assert angle.spread < 1e-6


def test_apsidal_angle_alkali_half():
    # u has theta-period 2 pi / kappa = 4 pi
    angle = measure_apsidal_angle(ALKALI, -3.0, L_HALF)
    assert angle.mean == pytest.approx(4.0 * math.pi, abs=1e-6)


def test_apsidal_angle_harmonic():
    # centered ellipse: pericenter-to-pericenter advance is pi for any
    # eccentricity (= 2 pi / (beta kappa) with beta = 2)
    E = energy_for_eccentricity(HARMONIC, 1.0, 0.3)
    angle = measure_apsidal_angle(HARMONIC, E, 1.0)
    assert angle.mean == pytest.approx(math.pi, abs=1e-4)
    assert angle.mean == pytest.approx(math.pi, abs=1e-8)  # closure is exact


def test_apsidal_angle_requires_three_pericenters():
    init = pericenter_state(COULOMB, kepler_energy(0.3), 1.0)
    traj = integrate_revolutions(COULOMB, init, 1.5)
    with pytest.raises(DomainError):
        apsidal_angle(traj)


def test_apsidal_angle_near_circular_limit():
    # error against 2 pi / (beta kappa) shrinks at least linearly in ecc
    pot = CombinedPotential(1.0, 1.0, 0.0)
    limit = 2.0 * math.pi / math.sqrt(3.0)
    errs = []
    for ecc in (0.3, 0.15):
        E = energy_for_eccentricity(pot, 1.0, ecc)
        errs.append(abs(measure_apsidal_angle(pot, E, 1.0).mean - limit))
    assert errs[1] <= 0.5 * errs[0] * 1.25


# ------------------------------------------------------------------- closure


def test_best_rational_recovers_simple_fractions():
    assert best_rational(0.5, 64) == Fraction(1, 2)
    assert best_rational(2.0 / 3.0, 64) == Fraction(2, 3)
    assert best_rational(math.sqrt(2.5), 64) != Fraction(0)  # merely bounded


@given(st.integers(1, 40), st.integers(1, 64))
@settings(max_examples=100, deadline=None)
def test_best_rational_round_trip(q, p):
    frac = Fraction(q, p)
    got = best_rational(float(frac) + 3e-10, 64)
    assert got == frac


def test_closure_kepler():
    rep = closure_analysis(COULOMB, 1.0, kepler_energy(0.5))
    assert rep.closed
    assert rep.rational == Fraction(1, 1)
    assert rep.closure_period_revolutions == 1
    assert rep.numeric_gap < 1e-5


def test_closure_harmonic():
    E = energy_for_eccentricity(HARMONIC, 1.0, 0.4)
    rep = closure_analysis(HARMONIC, 1.0, E)
    assert rep.closed
    assert rep.rational == Fraction(2, 1)
    assert rep.closure_period_revolutions == 1


@pytest.mark.parametrize(
    "kappa,period",
    [(Fraction(1, 2), 2), (Fraction(2, 3), 3), (Fraction(3, 4), 4)],
)
def test_closure_alkali_rational_kappa(kappa, period):
    L = angular_momentum_for_kappa(ALKALI, kappa)
    E = energy_for_eccentricity(ALKALI, L, 0.5)
    rep = closure_analysis(ALKALI, L, E)
    assert rep.closed
    assert rep.rational == kappa
    assert rep.closure_period_revolutions == period
    assert rep.numeric_gap < 1e-5


def test_closure_harmonic_with_inverse_square_term():
    # beta*kappa = 2*kappa: tuned kappa = 3/4 gives 3/2, closing after 2
    # revolutions (3 radial oscillations); repulsive b works through kappa > 1
    pot = CombinedPotential(0.5, 2.0, -0.2)
    L = angular_momentum_for_kappa(pot, 0.75)
    rep = closure_analysis(pot, L, energy_for_eccentricity(pot, L, 0.4))
    assert rep.closed
    assert rep.rational == Fraction(3, 2)
    assert rep.closure_period_revolutions == 2

    pot2 = CombinedPotential(0.5, 2.0, 1.0)
    L2 = angular_momentum_for_kappa(pot2, 1.25)
    rep2 = closure_analysis(pot2, L2, energy_for_eccentricity(pot2, L2, 0.4))
    assert rep2.closed
    assert rep2.rational == Fraction(5, 2)
    assert rep2.closure_period_revolutions == 2


def test_closure_generic_angular_momentum_fails():
    rep = closure_analysis(ALKALI, 1.0, -0.3)
    assert not rep.closed
    # kappa = sqrt(0.6) is irrational: no accepted rational at 1e-6
    assert rep.rational is None


def test_closure_irrational_exponent():
    pot = CombinedPotential(1.0, 0.5, 0.0)
    E = energy_for_eccentricity(pot, 1.0, 0.2)
    rep = closure_analysis(pot, 1.0, E)
    assert not rep.closed


def test_closure_energy_independent():
    L = angular_momentum_for_kappa(ALKALI, Fraction(2, 3))
    reports = [
        closure_analysis(ALKALI, L, energy_for_eccentricity(ALKALI, L, ecc))
        for ecc in (0.3, 0.55, 0.8)
    ]
    assert all(rep.closed for rep in reports)
    assert len({rep.closure_period_revolutions for rep in reports}) == 1
    spreads = [rep.beta_kappa for rep in reports]
    assert max(spreads) - min(spreads) < 1e-6


def test_closure_near_circular_uses_indicator():
    circ = circular_orbit(ALKALI, L_HALF)
    rep = closure_analysis(ALKALI, L_HALF, circ.E)
    assert rep.beta_kappa == pytest.approx(0.5, rel=1e-9)
    assert rep.closed


def test_closure_rejects_unbound():
    with pytest.raises(UnboundOrbitError):
        closure_analysis(COULOMB, 1.0, 0.2)
    with pytest.raises(UnboundOrbitError):
        closure_analysis(COULOMB, 1.0, -10.0)


def test_closure_report_json_schema():
    rep = closure_analysis(COULOMB, 1.0, kepler_energy(0.5))
    payload = rep.to_json_dict()
    assert set(payload) == {
        "kappa", "beta", "beta_kappa", "rational", "closed",
        "period_revolutions", "numeric_gap",
    }
    assert set(payload["rational"]) == {"p", "q"}


# -------------------------------------------------------------- bertrand scan


def test_bertrand_scan_small():
    result = bertrand_scan([-1.0, 0.5, 2.0], [0.1, 0.3])
    assert result.closed_exponents == (-1.0, 2.0)
    assert not result.classifications[0.5].closed_for_all
    assert result.classifications[-1.0].rational == Fraction(2, 1)
    assert result.classifications[2.0].rational == Fraction(1, 1)


def test_bertrand_scan_inverse_square_term():
    # generic L: not closed; tuned L (kappa = 1/2): closed
    generic = bertrand_scan([-1.0], [0.2, 0.4], b=-0.2, L=1.0)
    assert not generic.classifications[-1.0].closed_for_all
    tuned = bertrand_scan([-1.0], [0.2, 0.4], b=-0.2, L=L_HALF)
    assert tuned.classifications[-1.0].closed_for_all
    assert tuned.classifications[-1.0].rational == Fraction(4, 1)


def test_bertrand_scan_rejects_unstable_exponent():
    with pytest.raises(DomainError):
        bertrand_scan([-2.5], [0.1])


def test_bertrand_scan_parallel_matches_serial(monkeypatch):
    serial = bertrand_scan([-1.0, 2.0], [0.1, 0.3])
    monkeypatch.setenv("ORBITKIT_THREADS", "2")
    parallel = bertrand_scan([-1.0, 2.0], [0.1, 0.3])
    assert serial.rows == parallel.rows
    assert serial.classifications == parallel.classifications


# ---------------------------------------------------------------- runge-lenz


def test_runge_lenz_kepler_constant():
    E, L = -0.3, 1.0
    init = pericenter_state(COULOMB, E, L)
    traj = integrate_orbit(COULOMB, init, 140.0, tol=1e-12, atol=1e-14)
    track = runge_lenz_track(traj)
    expected = math.sqrt(1.0 - 2.0 * abs(E) * L**2)
    assert np.abs(track.magnitude - expected).max() < 1e-8
    assert np.abs(track.magnitude - track.magnitude[0]).max() < 1e-8 * (
        1.0 + track.magnitude[0]
    )


def test_runge_lenz_circular_is_zero():
    init = OrbitState(r=1.0, theta=0.0, p_r=0.0, L=1.0)
    traj = integrate_orbit(COULOMB, init, 30.0)
    track = runge_lenz_track(traj)
    assert np.abs(track.magnitude).max() < 1e-12


def test_runge_lenz_alkali_precession():
    init = pericenter_state(ALKALI, -3.0, L_HALF)
    traj = integrate_revolutions(ALKALI, init, 13, tol=1e-12, atol=1e-14)
    assert traj.pericenters.shape[0] >= 3
    prec = apsis_precession_per_radial_period(traj)
    assert prec == pytest.approx(2.0 * math.pi * (1.0 / 0.5 - 1.0), abs=1e-4)
    # |R| returns to the same value at matched phases
    mags = runge_lenz_at_pericenters(traj)
    assert mags.max() - mags.min() < 1e-6
    # strong-coupling case: the vector direction winds monotonically
    track = runge_lenz_track(traj)
    dangle = np.diff(np.unwrap(track.angle()))
    assert (dangle >= -1e-12).all() or (dangle <= 1e-12).all()


def test_runge_lenz_requires_coulomb_power_law():
    init = pericenter_state(HARMONIC, 2.0, 1.0)
    traj = integrate_orbit(HARMONIC, init, 10.0)
    with pytest.raises(DomainError):
        runge_lenz_track(traj)


# ----------------------------------------------------------------- csv output


def test_emit_orbit_csv_round_trip(tmp_path):
    E, L = kepler_energy(0.35), 1.0
    init = pericenter_state(COULOMB, E, L)
    traj = integrate_revolutions(COULOMB, init, 2, tol=1e-11, atol=1e-13)
    path = tmp_path / "orbit.csv"
    emit_orbit_csv(traj, path)
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert data.dtype.names == ("t", "r", "theta", "x", "y", "p_r", "E_rel_drift")
    assert data.size == traj.t.size
    # emitted points satisfy the conic equation u = (1 + e cos theta)/L^2
    u = 1.0 / data["r"]
    conic = (1.0 + 0.35 * np.cos(data["theta"])) / L**2
    assert np.abs(u - conic).max() < 1e-6
    assert np.allclose(data["x"], data["r"] * np.cos(data["theta"]))


def test_emit_orbit_csv_empty_trajectory(tmp_path):
    traj = OrbitTrajectory(
        potential=COULOMB,
        t=np.empty(0),
        r=np.empty(0),
        theta=np.empty(0),
        p_r=np.empty(0),
        L0=1.0,
        E0=-0.5,
        max_energy_drift=0.0,
        pericenters=np.empty((0, 2)),
        pericenter_radii=np.empty(0),
    )
    path = tmp_path / "empty.csv"
    emit_orbit_csv(traj, path)
    assert path.read_text() == "t,r,theta,x,y,p_r,E_rel_drift\n"


def test_emit_outputs_deterministic(tmp_path):
    init = pericenter_state(COULOMB, kepler_energy(0.3), 1.0)
    paths = []
    for tag in ("one", "two"):
        traj = integrate_revolutions(COULOMB, init, 2)
        path = tmp_path / f"{tag}.csv"
        emit_orbit_csv(traj, path)
        paths.append(path.read_bytes())
    assert paths[0] == paths[1]


def test_emit_scan_csv_columns(tmp_path):
    result = bertrand_scan([-1.0], [0.1, 0.3])
    path = tmp_path / "scan.csv"
    emit_scan_csv(result, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "nu,b,L,E,apsidal_angle,closed"
    assert len(lines) == 3
    assert lines[1].endswith("true")


def test_trajectory_states_view():
    init = pericenter_state(COULOMB, kepler_energy(0.3), 1.0)
    traj = integrate_orbit(COULOMB, init, 5.0)
    states = traj.states
    assert len(states) == traj.t.size
    assert states[0].r == pytest.approx(init.r)
    assert states[0].u == pytest.approx(1.0 / init.r)
    assert all(s.L == traj.L0 for s in states)
