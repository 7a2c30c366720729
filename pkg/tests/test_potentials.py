"""Potential, circular-orbit and shape-indicator checks."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from orbitkit.errors import (
    DomainError,
    NoCircularOrbitError,
    SupercriticalError,
)
from orbitkit.potentials import (
    CombinedPotential,
    angular_momentum_for_kappa,
    circular_orbit,
    evaluate,
    shape_indicators,
)


def test_evaluate_coulomb_closed_form():
    pot = CombinedPotential(a=-1.0, nu=-1.0, b=0.0)
    vals = evaluate(pot, 2.0)
    assert vals.V == pytest.approx(-0.5, abs=1e-15)
    assert vals.f == pytest.approx(-0.25, abs=1e-15)


def test_evaluate_alkali_hand_values():
    # V = -1/r - 0.2/r^2, f = -1/r^2 - 0.4/r^3 evaluated at r = 1
    pot = CombinedPotential(a=-1.0, nu=-1.0, b=-0.2)
    vals = evaluate(pot, 1.0)
    assert vals.V == pytest.approx(-1.2, abs=1e-15)
    assert vals.f == pytest.approx(-1.4, abs=1e-15)


def test_evaluate_effective_potential():
    pot = CombinedPotential(a=0.5, nu=2.0, b=0.0)
    vals = evaluate(pot, 1.0, L=1.0)
    assert vals.u_eff == pytest.approx(1.0, abs=1e-15)


def test_evaluate_rejects_nonpositive_radius():
    pot = CombinedPotential(a=-1.0, nu=-1.0)
    with pytest.raises(DomainError):
        pot.value(0.0)
    with pytest.raises(DomainError):
        evaluate(pot, -2.0)


def test_degenerate_parameters_rejected():
    with pytest.raises(DomainError):
        CombinedPotential(a=0.0, nu=2.0)
    with pytest.raises(DomainError):
        CombinedPotential(a=1.0, nu=0.0)


def test_circular_orbit_coulomb():
    orbit = circular_orbit(CombinedPotential(-1.0, -1.0, 0.0), L=1.0)
    assert orbit.r0 == pytest.approx(1.0, rel=1e-10)
    assert orbit.E == pytest.approx(-0.5, rel=1e-10)
    assert orbit.stable


def test_circular_orbit_harmonic():
    orbit = circular_orbit(CombinedPotential(0.5, 2.0, 0.0), L=1.0)
    assert orbit.r0 == pytest.approx(1.0, rel=1e-10)
    assert orbit.E == pytest.approx(1.0, rel=1e-10)
    assert orbit.stable


def test_circular_orbit_alkali_hand_solution():
    # a*nu*r0^(nu+2) = L^2 + 2b with a=-1, nu=-1: r0 = L^2 - 0.4 = 2/15
    L = math.sqrt(8.0 * 0.2 / 3.0)
    orbit = circular_orbit(CombinedPotential.alkali(0.2), L=L)
    assert orbit.r0 == pytest.approx(2.0 / 15.0, rel=1e-10)
    assert orbit.E == pytest.approx(-3.75, rel=1e-10)


def test_circular_orbit_residual_tolerance():
    for pot, L in [
        (CombinedPotential(-1.0, -1.0, 0.0), 1.3),
        (CombinedPotential(0.5, 2.0, 0.7), 0.8),
        (CombinedPotential(-2.0, -0.5, -0.1), 2.0),
    ]:
        orbit = circular_orbit(pot, L)
        target = L**2 / orbit.r0**3
        assert abs(pot.force(orbit.r0) + target) < 1e-10 * abs(target)


def test_circular_orbit_unstable_family_flagged():
    # a < 0 with nu < -2: a circular orbit exists but sits on a maximum
    orbit = circular_orbit(CombinedPotential(-1.0, -3.0, 0.0), L=1.0)
    assert orbit.r0 == pytest.approx(3.0, rel=1e-10)
    assert not orbit.stable


def test_circular_orbit_errors():
    with pytest.raises(NoCircularOrbitError):
        circular_orbit(CombinedPotential(1.0, -1.0, 0.0), L=1.0)  # repulsive
    with pytest.raises(SupercriticalError):
        circular_orbit(CombinedPotential.alkali(0.2), L=0.5)  # L^2 + 2b < 0


def test_shape_indicators_bertrand_pair():
    coulomb = shape_indicators(CombinedPotential(-1.0, -1.0, 0.0), L=2.0)
    assert coulomb.beta_sq == 1.0
    assert coulomb.kappa == pytest.approx(1.0, abs=1e-15)
    harmonic = shape_indicators(CombinedPotential(0.5, 2.0, 0.0), L=0.7)
    assert harmonic.beta_sq == 4.0
    assert harmonic.kappa == pytest.approx(1.0, abs=1e-15)


def test_shape_indicators_alkali_half():
    L = (2.0 / 3.0) * math.sqrt(6.0 * 0.2)
    ind = shape_indicators(CombinedPotential.alkali(0.2), L=L)
    assert ind.kappa == pytest.approx(0.5, rel=1e-12)
    assert ind.beta_kappa == pytest.approx(0.5, rel=1e-12)


def test_shape_indicators_errors():
    with pytest.raises(SupercriticalError):
        shape_indicators(CombinedPotential.alkali(0.2), L=0.5)
    with pytest.raises(DomainError):
        shape_indicators(CombinedPotential(-1.0, -2.5, 0.0), L=1.0)  # beta^2 <= 0


def test_angular_momentum_for_kappa_values():
    alk = CombinedPotential.alkali(0.2)
    assert angular_momentum_for_kappa(alk, 0.5) == pytest.approx(
        (2.0 / 3.0) * math.sqrt(6.0 * 0.2), rel=1e-12
    )
    assert angular_momentum_for_kappa(alk, 2.0 / 3.0) == pytest.approx(
        (3.0 / 5.0) * math.sqrt(10.0 * 0.2), rel=1e-12
    )
    assert angular_momentum_for_kappa(
        CombinedPotential(1.0, 2.0, 1.5), 2.0
    ) == pytest.approx(1.0, rel=1e-12)


def test_angular_momentum_for_kappa_sign_mismatch():
    alk = CombinedPotential.alkali(0.2)  # b < 0 requires kappa < 1
    with pytest.raises(DomainError):
        angular_momentum_for_kappa(alk, 2.0)
    with pytest.raises(DomainError):
        angular_momentum_for_kappa(alk, 1.0)
    with pytest.raises(DomainError):
        angular_momentum_for_kappa(CombinedPotential(-1.0, -1.0, 0.0), 0.5)


@st.composite
def bound_family(draw):
    """Potential with a stable bounded orbit family plus a valid L."""
    if draw(st.booleans()):
        a = draw(st.floats(0.1, 10.0))
        nu = draw(st.floats(0.2, 5.0))
    else:
        a = draw(st.floats(-10.0, -0.1))
        nu = draw(st.floats(-1.8, -0.3))
    L = draw(st.floats(0.5, 4.0))
    b = draw(st.floats(-0.4 * L * L, 3.0))
    return CombinedPotential(a=a, nu=nu, b=b), L


@given(bound_family())
@settings(max_examples=150, deadline=None)
def test_beta_kappa_algebra(case):
    pot, L = case
    ind = shape_indicators(pot, L)
    assert ind.beta_sq == pot.nu + 2.0
    lhs = ind.kappa**2 - 1.0
    rhs = 2.0 * pot.b / L**2
    assert abs(lhs - rhs) <= 1e-14 * max(abs(rhs), 1.0)
    assert ind.beta_kappa == pytest.approx(ind.beta * ind.kappa, rel=1e-15)


@given(bound_family())
@settings(max_examples=60, deadline=None)
def test_circular_orbit_residual_property(case):
    pot, L = case
    orbit = circular_orbit(pot, L)
    target = L**2 / orbit.r0**3
    assert abs(pot.force(orbit.r0) + target) < 1e-10 * abs(target)
    assert orbit.E == pytest.approx(
        0.5 * L**2 / orbit.r0**2 + pot.value(orbit.r0), rel=1e-14
    )
    # the inverse-square term must not alter the stability verdict
    assert orbit.stable == (pot.stability_factor > 0.0)


@given(bound_family(), st.floats(0.05, 0.999))
@settings(max_examples=100, deadline=None)
def test_kappa_round_trip(case, frac):
    # kappa -> L -> kappa is the contract direction (given kappa, the tuned
    # L must reproduce it through shape_indicators within 1e-12)
    pot, L_unused = case
    if pot.b == 0.0:
        return
    kappa = frac if pot.b < 0.0 else 1.0 / frac
    L = angular_momentum_for_kappa(pot, kappa)
    assert shape_indicators(pot, L).kappa == pytest.approx(kappa, rel=1e-12)
