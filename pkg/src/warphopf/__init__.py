"""Numerical geometry of surfaces in rotationally symmetric conformally flat 3-manifolds."""

from .warp import (
    WarpingModel,
    SmoothnessReport,
    make_space_form,
    make_dss,
    make_rn,
    curvatures,
    check_origin_smoothness,
)
from .ambient import (
    RadialConformalFactor,
    radial_from_warp,
    warp_from_radial,
    profile_factor,
    christoffel,
    frame_connection,
    riemann,
    riemann_oracle,
    sectional,
    hess_radial,
)
from .immersion import (
    SurfaceSpec,
    ImmersionGrid,
    ShapeField,
    build_surface,
    conformality_defect,
    complex_derivative,
    shape_field,
    chart_consistency,
    real_sph_harm,
)
from .verify import (
    IDENTITY_IDS,
    CONFORMAL_ONLY,
    UnsupportedChartError,
    ResidualReport,
    ETReport,
    Verdict,
    ZeroIndexReport,
    evaluate_identity,
    et_test,
    classify,
    hopf_zero_indices,
)

__all__ = [
    "WarpingModel", "SmoothnessReport", "make_space_form", "make_dss", "make_rn",
    "curvatures", "check_origin_smoothness",
    "RadialConformalFactor", "radial_from_warp", "warp_from_radial", "profile_factor",
    "christoffel", "frame_connection", "riemann", "riemann_oracle", "sectional",
    "hess_radial",
    "SurfaceSpec", "ImmersionGrid", "ShapeField", "build_surface",
    "conformality_defect", "complex_derivative", "shape_field", "chart_consistency",
    "real_sph_harm",
    "IDENTITY_IDS", "CONFORMAL_ONLY", "UnsupportedChartError", "ResidualReport",
    "ETReport", "Verdict", "ZeroIndexReport", "evaluate_identity", "et_test",
    "classify", "hopf_zero_indices",
]
