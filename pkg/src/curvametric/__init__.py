"""Discrete curvature toolkit for weighted samples of m-sets in R^n.

Global Menger and tangent-point curvature fields, multiscale flatness
profiles, L^p curvature energies with their sharp shape bounds, graph-patch
Sobolev diagnostics, and the verification suites tying them together.
"""

from .grassmann import (
    AffinePlane,
    Plane,
    check_basis_class,
    const_c2,
    const_c3,
    const_c4,
    gram_schmidt_rho,
    grassmann_distance,
)
from .simplex import (
    Simplex,
    face_volume,
    gram_volumes,
    h_min,
    height,
    is_voluminous,
    menger_curvature,
    unit_ball_volume,
    volume,
)
from .sampled_set import (
    GENERATOR_KINDS,
    ShapeSpec,
    WeightedSample,
    ball_weight,
    ellipsoid_area,
    generate,
    load_points,
    neighbors_within,
    sample_diam,
)
from .multiscale import (
    DecayFit,
    FinenessReport,
    ScaleProfile,
    attach_pca_tangents,
    best_plane_through,
    beta,
    decay_fit,
    dyadic_radii,
    fineness,
    scale_profile,
    theta,
    write_profile_csv,
)
from .curvature import (
    CurvatureField,
    beta_curvature_constant,
    curvature_field,
    field_summary,
    high_energy_couple_check,
    menger_global_exact,
    menger_global_pruned,
    tangent_point_inv_radius,
    tp_global,
    write_field_csv,
    write_field_json,
)
from .energy import (
    EnergyReport,
    ahlfors_scan,
    curve_bound,
    energy_summary,
    lp_energy,
    sphere_bound,
    uniform_radius_scaling,
    write_ahlfors_csv,
    write_energy_json,
)
from .graphpatch import (
    GraphPatch,
    analytic_patch,
    beta_bound_check,
    hajlasz_check,
    hessian_norm,
    load_patch_csv,
    make_patch,
    maximal_function,
    oscillation_energy_fit,
    oscillation_profile,
    sample_graph,
    write_patch_csv,
)
from .verification import SUITES, CheckResult, run_check, run_suite

__version__ = "0.1.0"

__all__ = [
    "AffinePlane",
    "CheckResult",
    "CurvatureField",
    "DecayFit",
    "EnergyReport",
    "FinenessReport",
    "GENERATOR_KINDS",
    "GraphPatch",
    "Plane",
    "SUITES",
    "ScaleProfile",
    "ShapeSpec",
    "Simplex",
    "WeightedSample",
    "ahlfors_scan",
    "analytic_patch",
    "attach_pca_tangents",
    "ball_weight",
    "best_plane_through",
    "beta",
    "beta_bound_check",
    "beta_curvature_constant",
    "check_basis_class",
    "const_c2",
    "const_c3",
    "const_c4",
    "curvature_field",
    "curve_bound",
    "decay_fit",
    "dyadic_radii",
    "ellipsoid_area",
    "energy_summary",
    "face_volume",
    "field_summary",
    "fineness",
    "generate",
    "gram_schmidt_rho",
    "gram_volumes",
    "grassmann_distance",
    "h_min",
    "hajlasz_check",
    "height",
    "hessian_norm",
    "high_energy_couple_check",
    "is_voluminous",
    "load_patch_csv",
    "load_points",
    "lp_energy",
    "make_patch",
    "maximal_function",
    "menger_curvature",
    "menger_global_exact",
    "menger_global_pruned",
    "neighbors_within",
    "oscillation_energy_fit",
    "oscillation_profile",
    "run_check",
    "run_suite",
    "sample_diam",
    "sample_graph",
    "scale_profile",
    "sphere_bound",
    "tangent_point_inv_radius",
    "theta",
    "tp_global",
    "uniform_radius_scaling",
    "unit_ball_volume",
    "volume",
    "write_ahlfors_csv",
    "write_energy_json",
    "write_field_csv",
    "write_field_json",
    "write_patch_csv",
    "write_profile_csv",
]
