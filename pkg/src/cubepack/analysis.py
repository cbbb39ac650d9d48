"""Window statistics, exact moments, blocking sets, layers, and densities.

A window is the 4-cube at corner z; it contains the cube labelled x iff
x lies in z + {0,1,2}^d, equivalently no coordinate has z_i = x_i + 1
(mod 4).  Every cube is therefore counted by exactly 3^d windows.  All
derived statistics are exact: window counts are integers and moments are
fractions; no floating point is used anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import (
    ADJACENCY_PRECOMPUTE_LIMIT,
    Label,
    Packing,
    _codes_compatible,
    all_codes,
    as_code,
    compat_masks,
    decode,
    digit_table,
    encode,
    full_mask,
)
from .errors import ResourceCapExceeded
from .symmetry import CanonicalKey, canonical_codes


# Seven cubes meeting every cube of the 4-torus; no 6 cubes suffice, so 7 is
# the minimum blocking-set size in dimension 4.
BLOCKING_WITNESS_4D = (
    (0, 0, 0, 0), (1, 1, 1, 1), (2, 2, 2, 2), (3, 3, 3, 3),
    (0, 0, 1, 1), (1, 1, 2, 2), (2, 2, 0, 0),
)


def window_count(p: Packing, corner) -> int:
    """Number of cubes of the packing inside the window at this corner."""
    z = decode(as_code(p.dim, corner), p.dim)
    count = 0
    for code in p.codes:
        x = decode(code, p.dim)
        if all(z[i] != (x[i] + 1) % 4 for i in range(p.dim)):
            count += 1
    return count


def window_count_vector(p: Packing) -> np.ndarray:
    """Window counts for all 4^d corners at once (int64, exact)."""
    return _containment_matrix(p).sum(axis=1, dtype=np.int64)


def _containment_matrix(p: Packing) -> np.ndarray:
    """(4^d, N) boolean: window z contains cube x."""
    corners = digit_table(p.dim).astype(np.int16)
    labels = np.array([decode(c, p.dim) for c in p.codes], dtype=np.int16)
    if labels.size == 0:
        return np.zeros((4**p.dim, 0), dtype=bool)
    forbidden = (labels + 1) % 4
    return np.all(corners[:, None, :] != forbidden[None, :, :], axis=2)


@dataclass
class MomentReport:
    dim: int
    count: int
    m1: Fraction
    m2: Fraction
    m2_lower: Fraction
    deficit: int
    window_counts: tuple[int, ...] = field(repr=False, default=())

    def to_row(self) -> dict:
        return {
            "dim": self.dim, "count": self.count,
            "m1": str(self.m1), "m2": str(self.m2),
            "m2_lower_bound": str(self.m2_lower), "deficit": self.deficit,
        }

    def to_text(self) -> str:
        return (f"d={self.dim} n={self.count} deficit={self.deficit} "
                f"m1={self.m1} m2={self.m2} m2_lower={self.m2_lower}")


def moments(p: Packing) -> MomentReport:
    """First and second moment of the window counting function, exact."""
    counts = window_count_vector(p)
    total = 4**p.dim
    n = len(p)
    m1 = Fraction(int(counts.sum()), total)
    if m1 != Fraction(3**p.dim * n, total):
        raise RuntimeError("window count identity violated (internal bug)")
    m2 = Fraction(int(np.dot(counts, counts)), total)
    return MomentReport(
        dim=p.dim,
        count=n,
        m1=m1,
        m2=m2,
        m2_lower=second_moment_lower_bound(p.dim, n),
        deficit=2**p.dim - n,
        window_counts=tuple(int(c) for c in counts),
    )


def second_moment_lower_bound(dim: int, n: int) -> Fraction:
    """(3/4)^d n + n(n-1)/2^d + d(2q(q-1)+rq)/2^d with n = 4q + r."""
    if n < 0:
        raise ValueError("count must be nonnegative")
    q, r = divmod(n, 4)
    return (
        Fraction(3**dim * n, 4**dim)
        + Fraction(n * (n - 1), 2**dim)
        + Fraction(dim * (2 * q * (q - 1) + r * q), 2**dim)
    )


@dataclass
class PairStats:
    dim: int
    count: int
    shared_coords: tuple[tuple[int, int, int], ...]  # (i, j, mu_ij)
    pair_windows: tuple[tuple[int, int, int], ...]   # (i, j, t_ij)
    column_pair_counts: tuple[int, ...]              # R_l per coordinate
    column_bound: int                                # 2q(q-1) + rq


def window_pair_stats(p: Packing) -> PairStats:
    """Per-pair shared-coordinate counts and two-cube window counts.

    t_ij is computed both from the closed form (3/2)^mu * 2^d and by brute
    window counting; a mismatch raises.  Also checks that every column's
    equal-pair count meets the balanced lower bound 2q(q-1)+rq.
    """
    dim = p.dim
    n = len(p)
    labels = [decode(c, dim) for c in p.codes]
    contain = _containment_matrix(p).astype(np.int64)
    brute = contain.T @ contain  # (N, N): windows containing both cubes
    mus = []
    ts = []
    for i, j in itertools.combinations(range(n), 2):
        mu = sum(1 for s, t in zip(labels[i], labels[j]) if s == t)
        t_formula = 3**mu * 2 ** (dim - mu)
        if t_formula != int(brute[i, j]):
            raise RuntimeError(
                f"pair window count mismatch at ({i},{j}): "
                f"{t_formula} != {int(brute[i, j])}"
            )
        mus.append((i, j, mu))
        ts.append((i, j, t_formula))
    q, r = divmod(n, 4)
    bound = 2 * q * (q - 1) + r * q
    r_cols = []
    for l in range(dim):
        per_digit = [0, 0, 0, 0]
        for lab in labels:
            per_digit[lab[l]] += 1
        r_l = sum(du * (du - 1) // 2 for du in per_digit)
        if r_l < bound:
            raise RuntimeError(f"column {l} pair count {r_l} below bound {bound}")
        r_cols.append(r_l)
    return PairStats(dim, n, tuple(mus), tuple(ts), tuple(r_cols), bound)


def is_blocking(dim: int, labels) -> bool:
    """True iff every label of the torus overlaps some member of the set."""
    codes = [as_code(dim, x) for x in labels]
    if dim <= ADJACENCY_PRECOMPUTE_LIMIT:
        masks = compat_masks(dim)
        free = full_mask(dim)
        for c in codes:
            free &= masks[c]
            if free == 0:
                return True
        return free == 0
    for y in all_codes(dim):
        if all(_codes_compatible(dim, y, c) for c in codes):
            return False
    return True


def min_blocking_sets(dim: int, size: int, cap: int | None = None):
    """All orbits of blocking sets of exactly this size (canonical keys).

    Exhaustive backtrack over label codes with a coverage-potential prune
    (each member blocks at most 3^d labels); members may overlap, so this
    is plain subset search, not clique search.  Practical for dim <= 3;
    `cap` bounds visited nodes for larger experiments.
    """
    masks = compat_masks(dim)
    full = full_mask(dim)
    n_labels = 4**dim
    reach = 3**dim
    found: set[tuple[int, ...]] = set()
    nodes = 0

    # block_mask[c] = labels that cube c overlaps (including itself)
    block_mask = [full & ~masks[c] for c in range(n_labels)]

    def search(start, chosen, blocked):
        nonlocal nodes
        nodes += 1
        if cap is not None and nodes > cap:
            raise ResourceCapExceeded(
                f"blocking search exceeded {cap} nodes",
                partial=sorted(found),
            )
        remaining = size - len(chosen)
        if remaining == 0:
            if blocked == full:
                found.add(canonical_codes(dim, chosen))
            return
        uncovered = (full & ~blocked).bit_count()
        if uncovered > remaining * reach:
            return
        for y in range(start, n_labels - remaining + 1):
            chosen.append(y)
            search(y + 1, chosen, blocked | block_mask[y])
            chosen.pop()

    search(0, [], 0)
    return sorted(found)


def blocking_bound_sequence(start: int, steps: int) -> list[int]:
    """Iterate the lower-bound recurrence b -> floor((4b - 1)/3) + 1."""
    if start < 1:
        raise ValueError("start must be positive")
    out = []
    b = start
    for _ in range(steps):
        b = (4 * b - 1) // 3 + 1
        out.append(b)
    return out


def induced_layer(p: Packing, coord: int, layer: int) -> Packing:
    """Select cubes with x_coord in {layer, layer+1}, drop that coordinate."""
    if p.dim < 2:
        raise ValueError("induced layers need dimension >= 2")
    if not 0 <= coord < p.dim:
        raise ValueError(f"coordinate {coord} out of range")
    layer %= 4
    keep = (layer, (layer + 1) % 4)
    labels = []
    for code in p.codes:
        x = decode(code, p.dim)
        if x[coord] in keep:
            labels.append(x[:coord] + x[coord + 1:])
    return Packing.from_labels(p.dim - 1, labels)


def layer_deficits(p: Packing, coord: int) -> tuple[int, int, int, int]:
    """Per-layer deficits along a coordinate; checks the two exact laws
    (sum = 2*deficit and alternating sum = 0) before returning."""
    half = 2 ** (p.dim - 1)
    deficit = 2**p.dim - len(p)
    out = tuple(half - len(induced_layer(p, coord, j)) for j in range(4))
    if sum(out) != 2 * deficit or out[0] - out[1] + out[2] - out[3] != 0:
        raise RuntimeError("layer deficit identities violated (internal bug)")
    return out


def hole_cells(p: Packing) -> tuple[Label, ...]:
    """Unit cells of the torus not covered by any cube of the packing."""
    dim = p.dim
    covered = set()
    for code in p.codes:
        x = decode(code, dim)
        for delta in itertools.product((0, 1), repeat=dim):
            covered.add(tuple((x[i] + delta[i]) % 4 for i in range(dim)))
    return tuple(
        cell
        for cell in itertools.product(range(4), repeat=dim)
        if cell not in covered
    )


class DensityFunction:
    """Nonnegative rational density on {0,1,2,3}^d whose every 2-window
    (x + {0,1}^d) sums to exactly 1; tilings are the 0/1 points."""

    def __init__(self, dim: int, values):
        self.dim = dim
        vals = [Fraction(v) for v in values]
        if len(vals) != 4**dim:
            raise ValueError(f"need 4^{dim} values, got {len(vals)}")
        if any(v < 0 for v in vals):
            raise ValueError("density values must be nonnegative")
        self.values = tuple(vals)
        for x in range(4**dim):
            s = self.window2_sum(x)
            if s != 1:
                raise ValueError(
                    f"2-window at {decode(x, dim)} sums to {s}, not 1"
                )

    def __getitem__(self, label) -> Fraction:
        return self.values[as_code(self.dim, label)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DensityFunction)
            and self.dim == other.dim
            and self.values == other.values
        )

    def window2_sum(self, corner) -> Fraction:
        z = decode(as_code(self.dim, corner), self.dim)
        total = Fraction(0)
        for delta in itertools.product((0, 1), repeat=self.dim):
            cell = tuple((z[i] + delta[i]) % 4 for i in range(self.dim))
            total += self.values[encode(cell)]
        return total


def density_from_tiling(p: Packing) -> DensityFunction:
    """Indicator density of a tiling (packings that are not tilings violate
    the 2-window constraint, so they are rejected)."""
    if len(p) != 2**p.dim:
        raise ValueError("only tilings define indicator densities")
    members = set(p.codes)
    return DensityFunction(
        p.dim, [1 if c in members else 0 for c in all_codes(p.dim)]
    )


def uniform_density(dim: int) -> DensityFunction:
    return DensityFunction(dim, [Fraction(1, 2**dim)] * 4**dim)


def window_sum(f: DensityFunction, corner) -> Fraction:
    """Mass of the window at this corner: sum of f over corner + {0,1,2}^d."""
    z = decode(as_code(f.dim, corner), f.dim)
    total = Fraction(0)
    for delta in itertools.product((0, 1, 2), repeat=f.dim):
        cell = tuple((z[i] + delta[i]) % 4 for i in range(f.dim))
        total += f.values[encode(cell)]
    return total


def density_moments(f: DensityFunction) -> tuple[Fraction, Fraction]:
    """Exact first and second moment of the window mass of a density."""
    total1 = Fraction(0)
    total2 = Fraction(0)
    for z in all_codes(f.dim):
        s = window_sum(f, z)
        total1 += s
        total2 += s * s
    n = 4**f.dim
    return total1 / n, total2 / n


def merge_layers(f: DensityFunction, coord: int) -> DensityFunction:
    """Fold mass from odd layers of a coordinate onto the even layer below.

    The result is again a valid density and never has a smaller second
    moment; composing it over all coordinates yields the indicator of the
    all-even tiling.
    """
    if not 0 <= coord < f.dim:
        raise ValueError(f"coordinate {coord} out of range")
    dim = f.dim
    out = []
    for code in all_codes(dim):
        x = decode(code, dim)
        if x[coord] in (1, 3):
            out.append(Fraction(0))
        else:
            nxt = tuple(
                (t + 1) % 4 if i == coord else t for i, t in enumerate(x)
            )
            out.append(f.values[code] + f.values[encode(nxt)])
    return DensityFunction(dim, out)


def random_density(dim: int, rng, denominator: int = 64) -> DensityFunction:
    """Random element of the density polytope: a random tiling indicator
    mixed with the uniform density by a random rational weight."""
    from .flips import apply_flip, flip_moves  # local to avoid cycle at import
    from .core import regular_tiling
    from .symmetry import apply, random_symmetry

    tiling = regular_tiling(dim)
    for _ in range(int(rng.integers(0, 8))):
        moves = flip_moves(tiling)
        tiling = apply_flip(tiling, moves[int(rng.integers(len(moves)))])
    tiling = apply(random_symmetry(dim, rng), tiling)
    weight = Fraction(int(rng.integers(0, denominator + 1)), denominator)
    members = set(tiling.codes)
    base = Fraction(1, 2**dim)
    values = [
        weight * (1 if c in members else 0) + (1 - weight) * base
        for c in all_codes(dim)
    ]
    return DensityFunction(dim, values)


def key_inequality_check(x0, x1, x2, x3) -> bool:
    """Exact check of the four-term square inequality behind the merge
    operator's monotonicity; must hold for all nonnegative inputs."""
    vals = [Fraction(v) for v in (x0, x1, x2, x3)]
    if any(v < 0 for v in vals):
        raise ValueError("inputs must be nonnegative")
    a, b, c, d = vals
    lhs = (a + b + c) ** 2 + (b + c + d) ** 2 + (c + d + a) ** 2 + (d + a + b) ** 2
    rhs = 2 * (a + b + c + d) ** 2 + (a + b) ** 2 + (c + d) ** 2
    return lhs <= rhs
