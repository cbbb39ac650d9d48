"""Exhaustive orbit enumeration of packings by size, and tiling completion.

Levels are grown from the empty packing: every representative is extended by
each of its free labels, and the children are deduplicated by canonical key.
Every packing of size N+1 contains a packing of size N, so induction makes
each level complete.  Representatives are the canonical keys themselves.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field
from operator import and_
from functools import reduce

from .core import Packing, compat_masks, full_mask, mask_to_codes
from .errors import ResourceCapExceeded
from .symmetry import canonical_codes


@dataclass
class LevelCount:
    size: int
    orbits: int
    nonextendible: int


@dataclass
class CountTable:
    dim: int
    rows: list[LevelCount] = field(default_factory=list)
    complete: bool = True

    def nonextendible_by_size(self) -> dict[int, int]:
        return {r.size: r.nonextendible for r in self.rows}

    def orbits_by_size(self) -> dict[int, int]:
        return {r.size: r.orbits for r in self.rows}

    @property
    def tiling_orbits(self) -> int:
        full = 2**self.dim
        for r in self.rows:
            if r.size == full:
                return r.orbits
        return 0

    def to_text(self) -> str:
        lines = [f"dim {self.dim}  (complete: {'yes' if self.complete else 'NO'})"]
        lines.append(f"{'size':>4}  {'orbits':>10}  {'nonextendible':>13}")
        for r in self.rows:
            lines.append(f"{r.size:>4}  {r.orbits:>10}  {r.nonextendible:>13}")
        return "\n".join(lines)

    def to_rows(self) -> list[dict]:
        return [
            {"dim": self.dim, "size": r.size, "orbits": r.orbits,
             "nonextendible": r.nonextendible}
            for r in self.rows
        ]


def pack_codes(dim: int, codes) -> bytes:
    """Compact byte string for a sorted code tuple (level-set storage)."""
    if dim <= 4:
        return bytes(codes)
    out = bytearray()
    for c in codes:
        out += c.to_bytes(4, "little")
    return bytes(out)


def unpack_codes(dim: int, blob: bytes) -> tuple[int, ...]:
    if dim <= 4:
        return tuple(blob)
    return tuple(
        int.from_bytes(blob[k : k + 4], "little") for k in range(0, len(blob), 4)
    )


def _extend_chunk(args):
    dim, chunk, upward_only = args
    masks = compat_masks(dim)
    full = full_mask(dim)
    children = set()
    nonext = []
    for blob in chunk:
        codes = unpack_codes(dim, blob)
        free = full
        for c in codes:
            free &= masks[c]
        if free == 0:
            nonext.append(blob)
            continue
        if upward_only and codes:
            free >>= codes[-1] + 1
            free <<= codes[-1] + 1
        m = free
        while m:
            low = m & -m
            m ^= low
            y = low.bit_length() - 1
            child = tuple(sorted(codes + (y,)))
            children.add(pack_codes(dim, canonical_codes(dim, child)))
    return children, nonext


def extend_level(dim, level, workers=1, upward_only=False):
    """All orbit keys one size up, plus the non-extendible members of `level`.

    `level` is an iterable of packed key blobs.  With `upward_only` (an
    experimental shortcut) only free labels above the representative's top
    code are tried; see enumerate_all for the caveat.
    """
    level = list(level)
    if workers > 1 and len(level) > workers:
        step = (len(level) + workers - 1) // workers
        jobs = [
            (dim, level[k : k + step], upward_only)
            for k in range(0, len(level), step)
        ]
        children = set()
        nonext = []
        with multiprocessing.Pool(workers) as pool:
            for ch, ne in pool.imap_unordered(_extend_chunk, jobs):
                children |= ch
                nonext.extend(ne)
        nonext.sort()
        return children, nonext
    return _extend_chunk((dim, level, upward_only))


@dataclass
class EnumerationResult:
    table: CountTable
    levels: dict[int, list[tuple[int, ...]]] | None = None
    nonextendible: dict[int, list[tuple[int, ...]]] | None = None


def enumerate_all(
    dim,
    max_size=None,
    workers=1,
    orbit_cap=None,
    keep_levels=None,
    upward_only=False,
    on_level=None,
) -> EnumerationResult:
    """Level-wise symmetry-reduced enumeration of all packings.

    Exact for any dimension but practical only for dim <= 4.  `orbit_cap`
    bounds the number of stored representatives per level; exceeding it
    raises ResourceCapExceeded carrying the partial table.  `on_level` is
    called as on_level(size, sorted_keys, nonext_flags) after each level,
    letting callers stream levels to disk instead of keeping them.

    `upward_only` enables an extension shortcut that only adds labels above
    the representative's largest code.  It reproduces the default's counts
    on every dimension it has been checked on (<= 3) but carries no
    completeness proof, so it stays off unless explicitly requested.
    """
    if max_size is None:
        max_size = 2**dim
    if keep_levels is None:
        keep_levels = dim <= 3
    table = CountTable(dim)
    levels = {} if keep_levels else None
    nonext_store = {} if keep_levels else None
    current = {pack_codes(dim, ())}
    size = 0
    while size < max_size and current:
        children, nonext = extend_level(
            dim, current, workers=workers, upward_only=upward_only
        )
        size += 1
        nonext_set = set(nonext)
        if size - 1 > 0:
            # report the level we just finished classifying
            _record(table, dim, size - 1, current, nonext_set, levels,
                    nonext_store, on_level)
        if orbit_cap is not None and len(children) > orbit_cap:
            table.complete = False
            raise ResourceCapExceeded(
                f"level {size} exceeds orbit cap ({len(children)} > {orbit_cap})",
                partial=table,
            )
        current = children
    # the last level reached: classify extendibility directly
    if current:
        masks = compat_masks(dim)
        full = full_mask(dim)
        nonext_set = set()
        for blob in current:
            codes = unpack_codes(dim, blob)
            free = full
            for c in codes:
                free &= masks[c]
            if free == 0:
                nonext_set.add(blob)
        _record(table, dim, size, current, nonext_set, levels, nonext_store,
                on_level)
    return EnumerationResult(table, levels, nonext_store)


def _record(table, dim, size, blobs, nonext_set, levels, nonext_store, on_level):
    ordered = sorted(blobs)
    flags = [b in nonext_set for b in ordered]
    table.rows.append(LevelCount(size, len(ordered), sum(flags)))
    if levels is not None:
        levels[size] = [unpack_codes(dim, b) for b in ordered]
        nonext_store[size] = [
            unpack_codes(dim, b) for b, f in zip(ordered, flags) if f
        ]
    if on_level is not None:
        on_level(size, [unpack_codes(dim, b) for b in ordered], flags)


def complete_to_tiling(p: Packing) -> Packing | None:
    """Extend a packing to a full tiling, or certify that none contains it.

    Backtracking over free labels, branching on the label with the fewest
    compatible free labels (ties to the smallest code).  Deterministic.
    """
    dim = p.dim
    target = 2**dim
    if len(p) > target:
        return None
    masks = compat_masks(dim)
    free = reduce(and_, (masks[c] for c in p.codes), full_mask(dim))

    def search(count, free):
        need = target - count
        if need == 0:
            return ()
        if free.bit_count() < need:
            return None
        # fail-first branch label
        best_y = -1
        best_n = -1
        m = free
        while m:
            low = m & -m
            m ^= low
            y = low.bit_length() - 1
            n = (free & masks[y]).bit_count()
            if best_n < 0 or n < best_n:
                best_n = n
                best_y = y
        sub = search(count + 1, free & masks[best_y])
        if sub is not None:
            return (best_y,) + sub
        return search(count, free & ~(1 << best_y))

    found = search(len(p), free)
    if found is None:
        return None
    return Packing(dim, tuple(sorted(p.codes + found)))
