"""Symmetries of the torus cube graph and canonical forms of label sets.

The automorphisms used for isomorphism reduction are generated by coordinate
permutations and, independently per coordinate, the 8 affine bijections
t -> a*t + b (mod 4) with a in {1,3}.  These are exactly the bijections of
Z_4 preserving "difference == 2", so they preserve cube disjointness; the
group has order d! * 8^d.

Canonical forms are computed by an ordered partition-refinement backtrack:
output digit positions are fixed one at a time (most significant first), and
only the choices producing the minimal refined digit signature survive.  The
resulting key is the minimal image of the label set under the whole group
with respect to the documented level-by-level order, so two sets get equal
keys exactly when some symmetry maps one onto the other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .core import Label, Packing, as_code, decode, encode

# The 8 affine bijections of Z_4 with a in {1,3}, as (a, b) pairs.
AFFINE_MAPS = tuple((a, b) for a in (1, 3) for b in range(4))

# 256-entry translation tables so digit columns stored as bytes can be
# remapped with bytes.translate (only indices 0..3 are ever used).
_TRANS = tuple(
    bytes((a * t + b) % 4 if t < 4 else 0 for t in range(256))
    for (a, b) in AFFINE_MAPS
)

# _MAPVAL[m][t] = image of digit t under affine map m; _MAPINV[m][v] = preimage
_MAPVAL = tuple(tuple((a * t + b) % 4 for t in range(4)) for (a, b) in AFFINE_MAPS)
_MAPINV = tuple(tuple((a * (v - b)) % 4 for v in range(4)) for (a, b) in AFFINE_MAPS)


@dataclass(frozen=True)
class Symmetry:
    """perm[i] is the output slot of input coordinate i; maps[i] = (a, b)."""

    perm: tuple[int, ...]
    maps: tuple[tuple[int, int], ...]

    @property
    def dim(self) -> int:
        return len(self.perm)

    def __call__(self, coords) -> Label:
        out = [0] * self.dim
        for i, t in enumerate(coords):
            a, b = self.maps[i]
            out[self.perm[i]] = (a * t + b) % 4
        return tuple(out)

    def apply_code(self, code: int) -> int:
        return encode(self(decode(code, self.dim)))


def identity(dim: int) -> Symmetry:
    return Symmetry(tuple(range(dim)), ((1, 0),) * dim)


def compose(g: Symmetry, h: Symmetry) -> Symmetry:
    """The symmetry acting as h first, then g."""
    if g.dim != h.dim:
        raise ValueError("dimension mismatch")
    perm = tuple(g.perm[h.perm[i]] for i in range(h.dim))
    maps = []
    for i in range(h.dim):
        a1, b1 = h.maps[i]
        a2, b2 = g.maps[h.perm[i]]
        maps.append(((a2 * a1) % 4, (a2 * b1 + b2) % 4))
    return Symmetry(perm, tuple(maps))


def inverse(g: Symmetry) -> Symmetry:
    perm = [0] * g.dim
    maps = [None] * g.dim
    for i in range(g.dim):
        j = g.perm[i]
        perm[j] = i
        a, b = g.maps[i]
        # a in {1,3} is its own inverse mod 4
        maps[j] = (a, (-a * b) % 4)
    return Symmetry(tuple(perm), tuple(maps))


def all_symmetries(dim: int):
    """Every group element; d! * 8^d of them, so small dimensions only."""
    for perm in itertools.permutations(range(dim)):
        for maps in itertools.product(AFFINE_MAPS, repeat=dim):
            yield Symmetry(perm, maps)


def random_symmetry(dim: int, rng) -> Symmetry:
    perm = tuple(int(i) for i in rng.permutation(dim))
    maps = tuple(AFFINE_MAPS[int(k)] for k in rng.integers(0, 8, size=dim))
    return Symmetry(perm, maps)


def apply(g: Symmetry, p: Packing) -> Packing:
    if g.dim != p.dim:
        raise ValueError("dimension mismatch")
    return Packing(p.dim, tuple(sorted(g.apply_code(c) for c in p.codes)))


@dataclass(frozen=True)
class CanonicalKey:
    """Group-minimal image of a label set; equal keys <=> isomorphic sets."""

    dim: int
    codes: tuple[int, ...]

    def serialize(self) -> str:
        return f"{self.dim}:{','.join(map(str, self.codes))}"

    @classmethod
    def parse(cls, text: str) -> "CanonicalKey":
        head, _, body = text.partition(":")
        codes = tuple(int(t) for t in body.split(",")) if body else ()
        return cls(int(head), codes)

    def as_packing(self) -> Packing:
        return Packing(self.dim, self.codes)


def canonical_codes(dim: int, codes) -> tuple[int, ...]:
    """Minimal image of a code set under the full symmetry group.

    Works for arbitrary label sets, packings or not.  The minimum is taken
    level-by-level on sorted digit columns (most significant output digit
    first); tied choices branch and merge, so the cost stays near-linear
    except for highly symmetric inputs.

    A live state is (slot order, unassigned coordinate mask); the ordered
    partition's block boundaries are shared by every state at a depth.  An
    affine map only permutes a block's digit-count vector, so all 8 maps of
    a coordinate are scored from one raw gather through table lookups with
    early abort; mapped columns are materialized for winners only.  Once
    every block is a singleton, scoring is one bytes.translate plus a bytes
    comparison.
    """
    codes = sorted(set(codes))
    n = len(codes)
    if n == 0:
        return ()
    cols = []
    for i in range(dim):
        shift = 2 * (dim - 1 - i)
        cols.append(bytes((c >> shift) & 3 for c in codes))

    all_coords = (1 << dim) - 1
    identity_order = tuple(range(n))
    states = {(identity_order, all_coords)}
    bounds = ((0, n),)
    digit_rows = []
    for depth in range(dim):
        flat = len(bounds) == n
        best = None  # flat: mapped gather bytes; else: per-block entry list
        winners = []  # (order, unused, coordinate bit, mapped gather)
        for order, unused in states:
            gather = depth > 0  # depth 0 always has identity order
            um = unused
            while um:
                bit = um & -um
                um ^= bit
                i = bit.bit_length() - 1
                rg = bytes(map(cols[i].__getitem__, order)) if gather else cols[i]
                if flat:
                    first = rg[0]
                    for m in range(8):
                        if best is not None and _MAPVAL[m][first] > best[0]:
                            continue
                        mg = rg.translate(_TRANS[m])
                        if best is None or mg < best:
                            best = mg
                            winners = [(order, unused, bit, mg)]
                        elif mg == best:
                            winners.append((order, unused, bit, mg))
                    continue
                binfo = []  # per block: raw digit (singleton) or digit counts
                for a, b in bounds:
                    if b - a == 1:
                        binfo.append(rg[a])
                    else:
                        binfo.append((
                            rg.count(0, a, b),
                            rg.count(1, a, b),
                            rg.count(2, a, b),
                            rg.count(3, a, b),
                        ))
                for m in range(8):
                    mv = _MAPVAL[m]
                    inv = _MAPINV[m]
                    if best is None:
                        verdict = -1
                    else:
                        # compare against the incumbent, cheapest first exit
                        verdict = 0
                        for bi, info in enumerate(binfo):
                            if type(info) is int:
                                e = mv[info]
                            else:
                                e = (-info[inv[0]], -info[inv[1]], -info[inv[2]])
                            r = best[bi]
                            if e > r:
                                verdict = 1
                                break
                            if e < r:
                                verdict = -1
                                break
                    if verdict == 1:
                        continue
                    mg = rg.translate(_TRANS[m])
                    if verdict == -1:
                        entries = []
                        for info in binfo:
                            if type(info) is int:
                                entries.append(mv[info])
                            else:
                                entries.append(
                                    (-info[inv[0]], -info[inv[1]], -info[inv[2]])
                                )
                        best = entries
                        winners = [(order, unused, bit, mg)]
                    else:
                        winners.append((order, unused, bit, mg))
        # digits of this output position, slot by slot in block order
        if flat:
            row = best
        else:
            parts = []
            for (a, b), e in zip(bounds, best):
                if type(e) is int:
                    parts.append(bytes((e,)))
                else:
                    c0, c1, c2 = -e[0], -e[1], -e[2]
                    c3 = (b - a) - c0 - c1 - c2
                    parts.append(bytes((0,) * c0 + (1,) * c1 + (2,) * c2 + (3,) * c3))
            row = b"".join(parts)
        digit_rows.append(row)
        # refine winners into the next frontier (slot order normalized inside
        # each new block so equivalent states merge)
        new_states = set()
        for order, unused, bit, mg in winners:
            if flat:
                new_states.add((order, unused ^ bit))
                continue
            new_order = []
            for a, b in bounds:
                if b - a == 1:
                    new_order.append(order[a])
                    continue
                buckets = ([], [], [], [])
                for pos in range(a, b):
                    buckets[mg[pos]].append(order[pos])
                for t in range(4):
                    blk = buckets[t]
                    blk.sort()
                    new_order.extend(blk)
            new_states.add((tuple(new_order), unused ^ bit))
        states = new_states
        if not flat:
            new_bounds = []
            for a, b in bounds:
                pos = a
                while pos < b:
                    end = pos + 1
                    while end < b and row[end] == row[pos]:
                        end += 1
                    new_bounds.append((pos, end))
                    pos = end
            bounds = tuple(new_bounds)

    out = [0] * n
    for row in digit_rows:
        for k in range(n):
            out[k] = (out[k] << 2) | row[k]
    return tuple(out)


def canonical_label_set(dim: int, labels) -> CanonicalKey:
    codes = [as_code(dim, x) for x in labels]
    return CanonicalKey(dim, canonical_codes(dim, codes))


def canonical_form(p: Packing) -> CanonicalKey:
    return CanonicalKey(p.dim, canonical_codes(p.dim, p.codes))


def are_isomorphic(p: Packing, q: Packing) -> bool:
    if p.dim != q.dim:
        raise ValueError("dimension mismatch")
    if len(p.codes) != len(q.codes):
        return False
    if invariant_fingerprint(p) != invariant_fingerprint(q):
        return False
    return canonical_form(p) == canonical_form(q)


def invariant_fingerprint(p: Packing):
    """Cheap group-invariant: histogram over label pairs of the number of
    equal coordinates.  Distinguishes many orbits but never proves equality.
    """
    dim = p.dim
    hist = [0] * (dim + 1)
    labels = [decode(c, dim) for c in p.codes]
    for a, b in itertools.combinations(labels, 2):
        mu = sum(1 for s, t in zip(a, b) if s == t)
        hist[mu] += 1
    return (dim, len(labels), tuple(hist))


def _graded_image_key(dim: int, codes) -> tuple:
    # comparison key implementing the level-by-level order used by
    # canonical_codes, for the brute-force oracle below
    return tuple(
        tuple(sorted(c >> (2 * k) for c in codes)) for k in range(dim - 1, -1, -1)
    )


def canonical_codes_bruteforce(dim: int, codes) -> tuple[int, ...]:
    """Full-group minimisation; test oracle for canonical_codes."""
    codes = sorted(set(codes))
    best = None
    best_key = None
    for g in all_symmetries(dim):
        image = sorted(g.apply_code(c) for c in codes)
        key = _graded_image_key(dim, image)
        if best_key is None or key < best_key:
            best_key = key
            best = tuple(image)
    return best if best is not None else ()


@lru_cache(maxsize=None)
def group_order(dim: int) -> int:
    order = 8**dim
    for k in range(2, dim + 1):
        order *= k
    return order


def stabilizer_order(p: Packing) -> int:
    """Order of the subgroup fixing the label set; brute force, small dims."""
    target = set(p.codes)
    count = 0
    for g in all_symmetries(p.dim):
        if {g.apply_code(c) for c in p.codes} == target:
            count += 1
    return count
