#!/usr/bin/env python3
"""Generate the closed-orbit gallery for the alkali potential -1/r - 0.2/r^2.

For kappa = 1/2, 2/3, 3/4 (angular momentum tuned accordingly) the orbit
closes after 2, 3 and 4 revolutions. Writes one trajectory CSV per kappa
plus a closure-report JSON, at three energies each to show the geometry is
energy-independent.
"""

import argparse
import json
import pathlib
from fractions import Fraction

from orbitkit.classical import (
    closure_analysis,
    emit_orbit_csv,
    energy_for_eccentricity,
    integrate_revolutions,
    pericenter_state,
)
from orbitkit.potentials import CombinedPotential, angular_momentum_for_kappa

LAM = 0.2
KAPPAS = (Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))
ECCENTRICITIES = (0.35, 0.55, 0.75)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-o", "--out-dir", default="gallery", type=pathlib.Path)
    parser.add_argument("--tol", type=float, default=1e-11)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    pot = CombinedPotential.alkali(LAM)
    for kappa in KAPPAS:
        L = angular_momentum_for_kappa(pot, kappa)
        tag = f"kappa_{kappa.numerator}_{kappa.denominator}"
        for i, ecc in enumerate(ECCENTRICITIES):
            E = energy_for_eccentricity(pot, L, ecc)
            init = pericenter_state(pot, E, L)
            traj = integrate_revolutions(pot, init, kappa.denominator, tol=args.tol)
            emit_orbit_csv(traj, args.out_dir / f"{tag}_E{i}.csv")
        report = closure_analysis(pot, L, energy_for_eccentricity(pot, L, 0.55))
        with open(args.out_dir / f"{tag}_closure.json", "w", encoding="utf-8") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
        print(
            f"kappa={kappa}: L={L:.6f} closed={report.closed} "
            f"period={report.closure_period_revolutions} "
            f"gap={report.numeric_gap:.2e}"
        )
    print(f"wrote gallery to {args.out_dir}/")


if __name__ == "__main__":
    main()
