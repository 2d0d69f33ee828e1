"""Differential and integral invariants under planar and spatial Moebius maps.

The package evaluates the invariant ratio (f_xx + f_yy) / (f_x^2 + f_y^2) and
its 3-D counterpart, transports second-order jets exactly through composed
elementary transformations, integrates the associated invariant densities,
and reproduces the descriptor-stability and vertex-matching experiments on
discrete height-field meshes.
"""

from .errors import (
    AllDimensionsDegenerate,
    DegenerateTriangle,
    DimensionMismatch,
    EmptyCorrespondence,
    MobinvError,
    NonManifoldVertex,
    NonTriangleFace,
    ParseError,
    PoleAtInput,
    SingularPoint,
    TooFewNeighbors,
)
from .invariant import (
    InvariantValue,
    WeightKind,
    diff_inv_2d,
    diff_inv_3d,
    f_A,
    f_B,
    grad_norm_sq,
    integrand_2d,
    integrand_3d,
    laplacian,
    map_weight,
    table1_weight,
)
from .jets import (
    AnalyticField,
    Jet,
    TransformJet,
    default_catalog,
    field_from_spec,
    jet_of_field,
    jet_of_transform,
    pullback,
    pullback_field,
    transported_jet,
)
from .mesh import (
    TriMesh,
    VertexEstimate,
    deform_domain,
    load_mesh,
    ls_jet_fit,
    mixed_voronoi_area,
    one_ring,
    save_mesh,
    synthetic_grid,
)
from .xform import (
    ComplexMobius,
    ElementaryTransform,
    Inversion,
    MobiusMap,
    Reflection,
    Rotation,
    Stretching,
    Translation,
    eval_complex,
    eval_general_form,
    rotation_2d,
)

__version__ = "0.1.0"

__all__ = [
    "AllDimensionsDegenerate", "AnalyticField", "ComplexMobius",
    "DegenerateTriangle", "DimensionMismatch", "ElementaryTransform",
    "EmptyCorrespondence", "InvariantValue", "Inversion", "Jet", "MobinvError",
    "MobiusMap", "NonManifoldVertex", "NonTriangleFace", "ParseError",
    "PoleAtInput", "Reflection", "Rotation", "SingularPoint", "Stretching",
    "TooFewNeighbors", "TransformJet", "TriMesh", "Translation",
    "VertexEstimate", "WeightKind", "default_catalog", "deform_domain",
    "diff_inv_2d", "diff_inv_3d", "eval_complex", "eval_general_form", "f_A",
    "f_B", "field_from_spec", "grad_norm_sq", "integrand_2d", "integrand_3d",
    "jet_of_field", "jet_of_transform", "laplacian", "load_mesh", "ls_jet_fit",
    "map_weight", "mixed_voronoi_area", "one_ring", "pullback",
    "pullback_field", "rotation_2d", "save_mesh", "synthetic_grid",
    "table1_weight", "transported_jet",
]
