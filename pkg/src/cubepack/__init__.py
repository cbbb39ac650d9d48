"""Periodic cube packings and tilings of the 4-torus: enumeration under
symmetry, flip-graph exploration, stochastic search, and exact window
statistics."""

from .core import (
    Packing,
    decode,
    encode,
    free_codes,
    free_labels,
    is_nonextendible,
    is_packing,
    is_tiling,
    lift,
    min_nonextendible_3d,
    overlaps,
    product_packing,
    regular_tiling,
)
from .enumeration import CountTable, complete_to_tiling, enumerate_all
from .errors import ResourceCapExceeded, ValidationError
from .flips import FlipMove, apply_flip, explore_component, flip_moves
from .stochastic import (
    OrbitCensus,
    SearchConfig,
    greedy_packing,
    metropolis_walk,
    random_packing,
)
from .symmetry import (
    CanonicalKey,
    Symmetry,
    apply,
    are_isomorphic,
    canonical_form,
    canonical_label_set,
    invariant_fingerprint,
)

__version__ = "0.1.0"

__all__ = [
    "CanonicalKey", "CountTable", "FlipMove", "OrbitCensus", "Packing",
    "ResourceCapExceeded", "SearchConfig", "Symmetry", "ValidationError",
    "apply", "apply_flip", "are_isomorphic", "canonical_form",
    "canonical_label_set", "complete_to_tiling", "decode", "encode",
    "enumerate_all", "explore_component", "flip_moves", "free_codes",
    "free_labels", "greedy_packing", "invariant_fingerprint",
    "is_nonextendible", "is_packing", "is_tiling", "lift",
    "metropolis_walk", "min_nonextendible_3d", "overlaps",
    "product_packing", "random_packing", "regular_tiling",
]
