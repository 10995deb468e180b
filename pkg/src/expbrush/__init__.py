"""Brush model of the exponential map e^z - 1 and curves through its escaping points."""

from .address import ExternalAddress, address, compare_height, cylinder_interval, embed_point, lex_cmp, shift
from .boxes import Box, BoxFamily, Rect, build_families, next_family, seed_family, validate_family
from .brush import (
    EscapeCertificate,
    EscapeState,
    ModelPoint,
    SubBrush,
    certify_escape,
    check_forward_stretch,
    classify_point,
    orbit_lower_bounds,
    tip,
    tip_by_bisection,
)
from .complex_plane import ExpParameter, OrbitClass, OrbitVerdict, Viewport, classify_orbit, find_fixed_point, render
from .curve import (
    JordanCurve,
    Polyline,
    assemble_jordan,
    build_curve,
    escape_witnesses,
    localized_curve,
    refine_curve,
)
from .paths import ModelPath, path_between
from .tower import TowerScalar, f_inv_iter, f_iter, partial_sum_inv_squares, tower_cmp, tower_fsub

__all__ = [
    "ExternalAddress",
    "address",
    "compare_height",
    "cylinder_interval",
    "embed_point",
    "lex_cmp",
    "shift",
    "Box",
    "BoxFamily",
    "Rect",
    "build_families",
    "next_family",
    "seed_family",
    "validate_family",
    "EscapeCertificate",
    "EscapeState",
    "ModelPoint",
    "SubBrush",
    "certify_escape",
    "check_forward_stretch",
    "classify_point",
    "orbit_lower_bounds",
    "tip",
    "tip_by_bisection",
    "ExpParameter",
    "OrbitClass",
    "OrbitVerdict",
    "Viewport",
    "classify_orbit",
    "find_fixed_point",
    "render",
    "JordanCurve",
    "Polyline",
    "assemble_jordan",
    "build_curve",
    "escape_witnesses",
    "localized_curve",
    "refine_curve",
    "ModelPath",
    "path_between",
    "TowerScalar",
    "f_inv_iter",
    "f_iter",
    "partial_sum_inv_squares",
    "tower_cmp",
    "tower_fsub",
]
