"""Computational integral geometry: chord integrals, chord measures, and
their Minkowski problems for convex bodies in R^n (2 <= n <= 6).
"""

__version__ = "0.1.0"

from .geometry import (
    Ball,
    Ellipsoid,
    HPolytope,
    VPolytope,
    Body,
    FacetGeometry,
    unit_ball_volume,
    support,
    radial_extended,
    xray,
    wulff,
    facet_decomposition,
    volume,
    surface_area,
    hausdorff_distance,
    body_to_json,
    body_from_json,
)
from .quadrature import SphereQuadrature
from .dual_quermass import dual_v, dual_v_signed, riesz_dual_v, mean_curvature_limit
from .chord_integral import (
    ChordEstimate,
    chord_line_mc,
    chord_volume_form,
    chord_riesz_double,
    chord_closed,
    chord_directional,
    ball_chord_integral,
)
from .chord_measure import (
    DiscreteSphericalMeasure,
    MeasureDiagnostics,
    MeasureConfig,
    chord_measure_polytope,
    cone_chord_measure,
    lp_chord_measure,
    measure_diagnostics,
    variational_check,
    log_variational_check,
    q_zero_limit_check,
)
from .minkowski import (
    SolverConfig,
    SolverResult,
    validate_chord_data,
    validate_log_data,
    solve_chord_minkowski,
    solve_chord_log_minkowski,
    entropy,
    CollapseDetected,
)
from .estimators import ChordMinkowskiSolver, ChordLogMinkowskiSolver
from .concentration import (
    SubspaceSpec,
    subspace_mass_ratio,
    sharpness_sequence,
    ellipsoid_chord_bound_check,
    ellipsoid_entropy_bound_check,
)
