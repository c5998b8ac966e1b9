"""Defocusing Ablowitz-Ladik lattice toolkit.

Four cross-validating pipelines: direct simulation of the lattice ODEs,
transfer-matrix direct scattering, numerical solution of the
reconstruction Riemann-Hilbert problem on the unit circle, and the
explicit long-time leading-order prediction on slow rays.
"""

from .asymptotics import (
    PhaseGeometry,
    ZMPrediction,
    alpha_at_S,
    delta0,
    delta0_inv,
    fast_region_scale,
    log_gamma,
    m1_entry,
    nu,
    phase,
    phi_at_S,
    stationary_points,
    zm_predict,
)
from .errors import (
    AdmissibilityError,
    DomainError,
    InconsistencyError,
    RegionError,
    ResolutionError,
    SolverError,
)
from .harness import (
    Experiment,
    FitResult,
    compare_pipelines,
    fit_decay,
    route_ray,
    run_experiment,
)
from .lattice import (
    LatticeField,
    SimConfig,
    al_rhs,
    conserved_log_mass,
    gaussian_field,
    simulate,
    single_site_field,
    step,
)
from .rh import (
    BealsCoifmanSolve,
    JumpData,
    build_jump,
    cauchy_project,
    reconstruct_q,
    solve_beals_coifman,
)
from .scattering import (
    ReflectionGrid,
    evolve_reflection,
    reflect_grid,
    reflection_grid,
    scattering_coeffs,
    symmetry_check,
    transfer_matrix,
)

__version__ = "0.1.0"
