"""widthlab: numerical convex geometry for bodies induced by orthonormal systems.

Monte-Carlo volume ratios, sphere expectations, greedy covering nets,
section radii, and Gelfand/Kolmogorov widths, with exact oracles at desk
scale and a verification harness for every inequality the package relies on.
"""

from .bodies import (
    Body,
    InducedBall,
    LinearImageBody,
    LpBall,
    MultiplierSpec,
    PolarBody,
    dual_gauge,
    euclidean_ball,
    induced_ball,
    linear_image,
    multiplier_diagonal,
    support_function,
    truncate_multiplier,
)
from .errors import WidthLabError
from .harness import ExperimentConfig, VerificationReport, run, verify_all
from .linalg import (
    Subspace,
    jacobi_singular_values,
    min_singular_value,
    orthonormalize,
    project,
    random_subspace,
    singular_values,
)
from .manifolds import (
    TwoPointSpace,
    cayley_plane,
    complex_projective,
    quaternionic_projective,
    real_projective,
    sobolev_multiplier,
    sphere,
    spectral_table,
)
from .stochastic import (
    EstimateWithCI,
    NetReport,
    brunn_section_check,
    expectation_norm,
    expected_norm_bound,
    greedy_net,
    haar_sphere_sample,
    mc_volume_ratio,
    projection_volume_ratio,
    section_radius,
    section_volume_ratio,
)
from .systems import (
    BoundedSubsystem,
    OrthonormalSystem,
    QuadratureRule,
    bounded_subsystem,
    lp_norm,
    sphere_harmonics_system,
    trig_prefix_system,
    trig_system,
)
from .widths import (
    CalibrationConstant,
    WidthResult,
    brute_force_gelfand,
    brute_force_kolmogorov,
    calibrate_radius_constant,
    ellipsoid_kolmogorov_exact,
    fourier_tail_sup,
    l1_section_radius_bound,
    linear_cowidth,
    lq_section_radius_bound,
    radius_bound_violations,
    sobolev_width_order,
    width_duality_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
