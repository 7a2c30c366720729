#!/usr/bin/env python3
"""Spectra and energy ladders with and without the inverse-square term.

Solves the radial bound states for the plain attractive 1/r potential and
for the alkali case b = -0.2, prints the Numerov energies against the
closed forms (shifted to the effective l'), then applies the raising and
lowering operators and reports overlaps with independently solved targets.
"""

import argparse

from orbitkit.potentials import CombinedPotential
from orbitkit.quantum import (
    RadialProblem,
    apply_ladder,
    closed_form_energy,
    factorize,
    no_angular_ladder_check,
    overlap,
    solve_radial,
    verify_factorization_identity,
)


def run_case(pot: CombinedPotential, l: int, n_r_max: int) -> None:
    problem = RadialProblem.build(pot, l, n_r_max=n_r_max + 2)
    print(f"\npotential a={pot.a:g} nu={pot.nu:g} b={pot.b:g}, l={l} -> l'={problem.l_prime:.6f}")
    sols = [solve_radial(problem, n_r) for n_r in range(n_r_max + 1)]
    r = problem.grid.radii()

    print("  n_r   E_numeric        E_closed_form    |diff|")
    for sol in sols:
        exact = closed_form_energy(pot, problem.l_prime, sol.n_r)
        print(f"  {sol.n_r:3d}   {sol.E:+.12f}  {exact:+.12f}  {abs(sol.E - exact):.2e}")

    print("  ladder  direction  overlap/annihilated")
    for sol in sols[:-1]:
        spec = factorize(pot, sol.n)
        up = apply_ladder(sol, spec, "up")
        ov = abs(overlap(up.chi, sols[sol.n_r + 1].chi, r))
        print(f"  n_r={sol.n_r}   up         {ov:.10f}")
        down = apply_ladder(sol, spec, "down")
        if down.annihilated:
            print(f"  n_r={sol.n_r}   down       annihilated (raw norm {down.raw_norm:.1e})")
        elif sol.n_r == 0:
            print(f"  n_r=0   down       UNEXPECTED survivor (raw norm {down.raw_norm:.1e})")
        else:
            ov = abs(overlap(down.chi, sols[sol.n_r - 1].chi, r))
            print(f"  n_r={sol.n_r}   down       {ov:.10f}")

    residual = verify_factorization_identity(sols[0], factorize(pot, sols[0].n))
    print(f"  factorization identity residual (ground state): {residual:.2e}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-r-max", type=int, default=3)
    args = parser.parse_args()

    run_case(CombinedPotential(-1.0, -1.0, 0.0), l=0, n_r_max=args.n_r_max)
    run_case(CombinedPotential.alkali(0.2), l=1, n_r_max=args.n_r_max)
    run_case(CombinedPotential(0.5, 2.0, 0.0), l=0, n_r_max=args.n_r_max)

    print("\neffective-l spacing (angular ladders need spacing exactly 1):")
    for b in (0.0, -0.2, 1.5):
        for l in (1,):
            rep = no_angular_ladder_check(b, l)
            print(
                f"  b={b:+.2f}: l'({l+1}) - l'({l}) = {rep.spacing:.6f}"
                f"  unit={rep.unit_spacing}"
            )


if __name__ == "__main__":
    main()
