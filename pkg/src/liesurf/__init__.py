"""Surfaces with spherical curvature lines.

Contact-element lifts in a rank-6 indefinite inner-product space,
constrained elastic curvature profiles, evolution of a Legendre curve
through a one-parameter family of sphere complexes, curvature-sphere
analysis and classification of the resulting surfaces, and channel-
complex (Ribaucour) transforms, with deterministic file formats and a
command-line pipeline.
"""

# Cap BLAS/OpenMP threads before numpy loads so repeated runs reduce in
# the same order and produce byte-identical artifacts.  LSF_THREADS
# overrides the cap; explicit *_NUM_THREADS settings always win.
import os as _os

_cap = _os.environ.get("LSF_THREADS", "1")
for _var in (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
    "NUMEXPR_NUM_THREADS",
):
    _os.environ.setdefault(_var, _cap)
del _os, _cap, _var

from .analysis import (
    ChannelSurfaceError,
    DiagnosticReport,
    FamilyReport,
    OsculatingData,
    PrincipalData,
    analyze_surface,
    classify_surface,
    curvature_sphere_fields,
    osculating_complexes,
    special_lifts,
    spherical_line_residual,
)
from .core import (
    DIM,
    METRIC,
    SIGNS,
    Bivector,
    Subspace,
    basis_vector,
    inner,
    norm2,
    span_subspace,
    subspace_signature,
    wedge_apply,
)
from .curves import (
    CurveGeometry,
    ElasticFit,
    LegendreCurve,
    contact_lift_curve,
    curve_geometry,
    curve_residuals,
    detect_constrained_elastic,
    elastic_complex_vector,
    geometry_residuals,
    verify_linear_conserved,
)
from .elastica import (
    ElasticaParams,
    ElasticaSolution,
    first_integral,
    initial_frame,
    integrate_frame,
    legendre_lift,
    solve_curvature,
)
from .evolution import (
    ComplexCurve,
    EnvelopeFit,
    EvolutionMap,
    SurfaceGrid,
    connection_form,
    evolve_surface,
    fit_constant_envelope,
    integrate_evolution,
    make_complex_curve,
    rotating_plane_complex,
    rotating_sphere_center_complex,
)
from .io import (
    atomic_write_text,
    emit_document,
    export_mesh,
    project_grid,
    read_curve,
    read_surface,
    write_curve,
    write_pair,
    write_report,
    write_surface,
)
from .ribaucour import (
    RibaucourPair,
    RibaucourReport,
    channel_partner_chart,
    ribaucour_evolve,
    verify_ribaucour,
)
from .spaceforms import (
    SpaceFormFrame,
    euclidean_frame,
    lift_plane,
    lift_point,
    lift_sphere,
    project_point,
)

__version__ = "0.1.0"

__all__ = [
    "DIM",
    "METRIC",
    "SIGNS",
    "Bivector",
    "ChannelSurfaceError",
    "ComplexCurve",
    "CurveGeometry",
    "DiagnosticReport",
    "ElasticFit",
    "ElasticaParams",
    "ElasticaSolution",
    "EnvelopeFit",
    "EvolutionMap",
    "FamilyReport",
    "LegendreCurve",
    "OsculatingData",
    "PrincipalData",
    "RibaucourPair",
    "RibaucourReport",
    "SpaceFormFrame",
    "Subspace",
    "SurfaceGrid",
    "analyze_surface",
    "atomic_write_text",
    "basis_vector",
    "channel_partner_chart",
    "classify_surface",
    "connection_form",
    "contact_lift_curve",
    "curvature_sphere_fields",
    "curve_geometry",
    "curve_residuals",
    "detect_constrained_elastic",
    "elastic_complex_vector",
    "emit_document",
    "euclidean_frame",
    "evolve_surface",
    "export_mesh",
    "first_integral",
    "fit_constant_envelope",
    "geometry_residuals",
    "initial_frame",
    "inner",
    "integrate_evolution",
    "integrate_frame",
    "legendre_lift",
    "lift_plane",
    "lift_point",
    "lift_sphere",
    "make_complex_curve",
    "norm2",
    "osculating_complexes",
    "project_grid",
    "project_point",
    "read_curve",
    "read_surface",
    "ribaucour_evolve",
    "rotating_plane_complex",
    "rotating_sphere_center_complex",
    "solve_curvature",
    "span_subspace",
    "special_lifts",
    "spherical_line_residual",
    "subspace_signature",
    "verify_linear_conserved",
    "verify_ribaucour",
    "wedge_apply",
    "write_curve",
    "write_pair",
    "write_report",
    "write_surface",
]
