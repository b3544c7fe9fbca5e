"""Metamorphic testing of spatial database engines via affine-equivalent twins."""
from __future__ import annotations

from .affine import MappingMatrix, apply, generate_mapping_matrix, invert
from .canonicalize import canonicalize
from .de9im import DE9IM, Predicate, matches, named_predicate, relate
from .geometry import GeometryType, dimension, for_each_point
from .topology import boundary, decompose
from .wkt import parse_wkt, to_wkt

__all__ = [
    "DE9IM", "GeometryType", "MappingMatrix", "Predicate", "apply", "boundary", "canonicalize",
    "decompose", "dimension", "for_each_point", "generate_mapping_matrix", "invert", "matches",
    "named_predicate", "parse_wkt", "relate", "to_wkt",
]
