"""orbitkit: closed orbits and energy ladders for V(r) = a*r^nu + b/r^2.

Classical side: planar orbit integration, apsidal angles, and the rational
closure condition on beta*kappa (beta^2 = nu + 2, kappa = sqrt(1 + 2b/L^2)).
Quantum side: radial bound states through the l -> l' mapping, the
semiclassical power-law spectrum, and the first-order factorizations whose
ladder operators step the energy index even when b != 0.
"""

from .errors import (
    BoundStateNotFoundError,
    DomainError,
    FactorizationImpossibleError,
    IntegrationFailureError,
    NoCircularOrbitError,
    OrbitkitError,
    SupercriticalError,
    UnboundOrbitError,
)
from .potentials import (
    CircularOrbit,
    CombinedPotential,
    ShapeIndicators,
    angular_momentum_for_kappa,
    circular_orbit,
    evaluate,
    shape_indicators,
)
from .classical import (
    AlkaliOrbit,
    BertrandScanResult,
    ClosureReport,
    OrbitState,
    OrbitTrajectory,
    analytic_alkali_orbit,
    apsidal_angle,
    bertrand_scan,
    closure_analysis,
    eccentric_state,
    emit_orbit_csv,
    emit_scan_csv,
    energy_for_eccentricity,
    integrate_orbit,
    integrate_revolutions,
    measure_apsidal_angle,
    pericenter_state,
    runge_lenz_track,
    turning_points,
)
from .quantum import (
    EigenSolution,
    LadderReport,
    LadderSpec,
    RadialGrid,
    RadialProblem,
    WkbSpectrumParams,
    apply_ladder,
    closed_form_energy,
    default_grid,
    effective_l,
    factorize,
    no_angular_ladder_check,
    scaling_apply,
    solve_radial,
    solve_spectrum,
    spectral_index,
    verify_factorization_identity,
    verify_ladder,
    wkb_energy,
    wkb_params,
)

__version__ = "0.1.0"
