"""Exact discrete tomography of F-type icosahedral model sets."""
from .geometry import Direction, LineKey, ModulePoint, Point3, embed, membership
from .modelset import Ball, Box, Patch, PatchSpec, Slice, generate, slice_patch
from .qtau import QTau, ZTau, format_qtau, parse_qtau
from .reconstruction import ReconstructionInstance, enumerate_all, solve_fixed, solve_search_2d
from .tomography import XRayData, coset_classify, grid, xray
from .uniqueness import check_determination, find_u_polygon, witness_pair
from .window import Location, Window, classify, window_icosahedron

__version__ = "0.1.0"

__all__ = [
    "Direction", "LineKey", "ModulePoint", "Point3", "embed", "membership",
    "Ball", "Box", "Patch", "PatchSpec", "Slice", "generate", "slice_patch",
    "QTau", "ZTau", "format_qtau", "parse_qtau",
    "ReconstructionInstance", "enumerate_all", "solve_fixed", "solve_search_2d",
    "XRayData", "coset_classify", "grid", "xray",
    "check_determination", "find_u_polygon", "witness_pair",
    "Location", "Window", "classify", "window_icosahedron",
]
