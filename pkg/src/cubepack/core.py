"""Cubes on the 4-periodic torus: labels, overlap, packings, constructions.

A cube is named by its corner label, a vector in {0,1,2,3}^d; it occupies
label + [0,2)^d with all arithmetic mod 4.  Labels are encoded as integers
in [0, 4^d) in base 4, coordinate 0 most significant, so sorted code tuples
give a canonical on-disk and in-memory form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce
from operator import and_

import numpy as np

# Compatibility bitsets are precomputed for dimensions up to this bound
# (4^5 = 1024 labels); above it the overlap predicate is evaluated on demand.
ADJACENCY_PRECOMPUTE_LIMIT = 5

Label = tuple[int, ...]


def encode(coords) -> int:
    """Base-4 code of a label, coordinate 0 most significant."""
    code = 0
    for t in coords:
        if not 0 <= t <= 3:
            raise ValueError(f"label coordinate {t} not in 0..3")
        code = (code << 2) | t
    return code


def decode(code: int, dim: int) -> Label:
    if not 0 <= code < 4**dim:
        raise ValueError(f"code {code} out of range for dimension {dim}")
    return tuple((code >> (2 * (dim - 1 - i))) & 3 for i in range(dim))


def as_code(dim: int, label) -> int:
    """Accept a label as an int code or a coordinate tuple."""
    if isinstance(label, (int, np.integer)):
        if not 0 <= label < 4**dim:
            raise ValueError(f"code {label} out of range for dimension {dim}")
        return int(label)
    if len(label) != dim:
        raise ValueError(f"label {label} has {len(label)} coordinates, expected {dim}")
    return encode(label)


def all_codes(dim: int) -> range:
    return range(4**dim)


def overlaps(dim: int, x, y) -> bool:
    """True iff the two cubes intersect: no coordinate differs by exactly 2."""
    a = as_code(dim, x)
    b = as_code(dim, y)
    for _ in range(dim):
        if (a - b) & 3 == 2:
            return False
        a >>= 2
        b >>= 2
    return True


def _codes_compatible(dim: int, a: int, b: int) -> bool:
    # overlap test on raw codes, no validation (hot path)
    for _ in range(dim):
        if (a - b) & 3 == 2:
            return True
        a >>= 2
        b >>= 2
    return False


@lru_cache(maxsize=None)
def digit_table(dim: int) -> np.ndarray:
    """(4^d, d) uint8 array mapping code -> coordinate digits."""
    codes = np.arange(4**dim, dtype=np.int64)
    cols = [(codes >> (2 * (dim - 1 - i))) & 3 for i in range(dim)]
    return np.stack(cols, axis=1).astype(np.uint8)


@lru_cache(maxsize=None)
def compat_masks(dim: int) -> tuple[int, ...]:
    """Per-label bitsets: bit y of masks[x] is set iff cubes x and y are disjoint.

    A label is never compatible with itself, so AND-ing members' masks yields
    exactly the labels that extend a packing.
    """
    digits = digit_table(dim)
    n = 4**dim
    disjoint = np.zeros((n, n), dtype=bool)
    for i in range(dim):
        col = digits[:, i].astype(np.int16)
        disjoint |= ((col[:, None] - col[None, :]) % 4) == 2
    packed = np.packbits(disjoint, axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


def full_mask(dim: int) -> int:
    return (1 << 4**dim) - 1


def mask_to_codes(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class Packing:
    """A set of pairwise disjoint cubes, stored as sorted label codes."""

    dim: int
    codes: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    @classmethod
    def from_labels(cls, dim: int, labels, validate: bool = True) -> "Packing":
        codes = tuple(sorted(as_code(dim, x) for x in labels))
        p = cls(dim, codes)
        if validate:
            if len(set(codes)) != len(codes):
                raise ValueError("duplicate labels")
            if not is_packing(dim, codes):
                raise ValueError("labels are not pairwise disjoint")
        return p

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(decode(c, self.dim) for c in self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self):
        return iter(self.codes)

    def __contains__(self, label) -> bool:
        return as_code(self.dim, label) in set(self.codes)


def is_packing(dim: int, labels) -> bool:
    """True iff the labels are pairwise non-overlapping."""
    codes = [as_code(dim, x) for x in labels]
    for a, b in itertools.combinations(codes, 2):
        if a == b or not _codes_compatible(dim, a, b):
            return False
    return True


def is_tiling(p: Packing) -> bool:
    return len(p) == 2**p.dim and is_packing(p.dim, p.codes)


def free_mask(p: Packing) -> int:
    """Bitset of labels disjoint from every member (dimensions with tables only)."""
    masks = compat_masks(p.dim)
    return reduce(and_, (masks[c] for c in p.codes), full_mask(p.dim))


def free_codes(p: Packing) -> list[int]:
    """Codes of all labels that can be added to the packing, ascending."""
    if p.dim <= ADJACENCY_PRECOMPUTE_LIMIT:
        return mask_to_codes(free_mask(p))
    members = p.codes
    dim = p.dim
    out = []
    for y in all_codes(dim):
        for c in members:
            if not _codes_compatible(dim, y, c):
                break
        else:
            out.append(y)
    return out


def free_labels(p: Packing) -> tuple[Label, ...]:
    return tuple(decode(c, p.dim) for c in free_codes(p))


def is_nonextendible(p: Packing) -> bool:
    return not free_codes(p)


def regular_tiling(dim: int) -> Packing:
    """The tiling whose labels are all vectors with every coordinate in {0,2}."""
    labels = itertools.product((0, 2), repeat=dim)
    return Packing.from_labels(dim, labels, validate=False)


def min_nonextendible_3d() -> Packing:
    """The smallest non-extendible packing: 4 cubes in dimension 3, unique
    up to symmetry.  Seed for the product and lift constructions."""
    return Packing.from_labels(3, [(0, 0, 0), (3, 2, 3), (2, 1, 1), (1, 3, 2)])


def product_packing(p: Packing, q: Packing) -> Packing:
    """Concatenate every label of p with every label of q.

    The result packs dimension p.dim + q.dim with |p|*|q| cubes and is
    non-extendible whenever both factors are.
    """
    shift = 4**q.dim
    codes = tuple(
        sorted(a * shift + b for a in p.codes for b in q.codes)
    )
    return Packing(p.dim + q.dim, codes)


def lift(p: Packing, t: Packing) -> Packing:
    """Embed p in one higher dimension and close it off with a tiling layer.

    Members of p get last coordinate 0, members of t last coordinate 2.  Any
    further cube would need last coordinate 0 (blocked by p being
    non-extendible when it is) since coordinates 1,2,3 all meet the t layer.
    """
    if p.dim != t.dim:
        raise ValueError("dimension mismatch")
    if not is_tiling(t):
        raise ValueError("second argument must be a tiling")
    codes = [c * 4 for c in p.codes] + [c * 4 + 2 for c in t.codes]
    return Packing(p.dim + 1, tuple(sorted(codes)))
