"""Randomized generators of non-extendible packings.

Three strategies: a two-stage uniform sampler, a greedy sampler scoring
candidates by how many free labels they knock out, and a Metropolis-style
random walk (remove a few cubes, recomplete at random, keep improvements or
anything within a configured bound).

All randomness comes from numpy's PCG64.  A run is fully determined by
(seed, stream): worker streams are split off the master seed with
SeedSequence spawn keys, so parallel campaigns are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    ADJACENCY_PRECOMPUTE_LIMIT,
    Packing,
    _codes_compatible,
    all_codes,
    compat_masks,
    full_mask,
    mask_to_codes,
)
from .symmetry import CanonicalKey, canonical_codes


@dataclass
class SearchConfig:
    seed: int
    rejection_threshold: int | None = None  # default 50 * dim
    greedy_samples: int = 20
    metropolis_remove: int = 3
    metropolis_bound: int | None = None
    objective: str = "min"  # cube count: "min" or "max"
    max_iterations: int = 1000

    def __post_init__(self):
        if self.objective not in ("min", "max"):
            raise ValueError("objective must be 'min' or 'max'")
        if self.rejection_threshold is not None and self.rejection_threshold < 1:
            raise ValueError("rejection_threshold must be positive")
        if self.greedy_samples < 1:
            raise ValueError("greedy_samples must be positive")
        if self.metropolis_remove < 0:
            raise ValueError("metropolis_remove must be nonnegative")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")


def worker_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 stream `stream` derived from the master seed."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,)))
    )


def _random_complete_masked(dim, codes, free, rng):
    # stage two: keep the explicit free list, sample until it empties
    masks = compat_masks(dim)
    pool = mask_to_codes(free)
    codes = list(codes)
    while pool:
        y = pool[int(rng.integers(len(pool)))]
        codes.append(y)
        mask = masks[y]
        pool = [c for c in pool if (mask >> c) & 1]
    return codes


def _free_list_scan(dim, codes):
    out = []
    for y in all_codes(dim):
        for c in codes:
            if not _codes_compatible(dim, y, c):
                break
        else:
            out.append(y)
    return out


def _random_complete_scan(dim, codes, pool, rng):
    codes = list(codes)
    while pool:
        y = pool[int(rng.integers(len(pool)))]
        codes.append(y)
        pool = [c for c in pool if _codes_compatible(dim, c, y)]
    return codes


def random_complete(dim, codes, rng) -> list[int]:
    """Uniformly grow a partial packing until no compatible label remains."""
    if dim <= ADJACENCY_PRECOMPUTE_LIMIT:
        masks = compat_masks(dim)
        free = full_mask(dim)
        for c in codes:
            free &= masks[c]
        return _random_complete_masked(dim, codes, free, rng)
    pool = [y for y in _free_list_scan(dim, codes) if y not in set(codes)]
    return _random_complete_scan(dim, codes, pool, rng)


def random_packing(dim: int, cfg: SearchConfig, stream: int = 0) -> Packing:
    """Two-stage uniform sampler; output is always non-extendible.

    Stage one samples labels uniformly over the whole torus and keeps the
    compatible ones.  After `rejection_threshold` consecutive misses it
    materializes the free set and finishes by sampling from it directly.
    """
    rng = worker_rng(cfg.seed, stream)
    threshold = cfg.rejection_threshold or 50 * dim
    n = 4**dim
    codes = []
    if dim <= ADJACENCY_PRECOMPUTE_LIMIT:
        masks = compat_masks(dim)
        free = full_mask(dim)
        rejects = 0
        while free and rejects < threshold:
            y = int(rng.integers(n))
            if (free >> y) & 1:
                codes.append(y)
                free &= masks[y]
                rejects = 0
            else:
                rejects += 1
        codes = _random_complete_masked(dim, codes, free, rng)
    else:
        rejects = 0
        alive = True
        while alive and rejects < threshold:
            y = int(rng.integers(n))
            if y not in codes and all(
                _codes_compatible(dim, y, c) for c in codes
            ):
                codes.append(y)
                rejects = 0
            else:
                rejects += 1
        pool = [y for y in _free_list_scan(dim, codes) if y not in set(codes)]
        codes = _random_complete_scan(dim, codes, pool, rng)
    return Packing(dim, tuple(sorted(codes)))


def greedy_packing(dim: int, cfg: SearchConfig, stream: int = 0) -> Packing:
    """At each step sample a few free labels and place the best-scoring one.

    The score of a candidate is the number of free labels left after placing
    it: minimized when hunting sparse (small) packings, maximized when
    hunting dense ones, per cfg.objective.
    """
    rng = worker_rng(cfg.seed, stream)
    if dim > ADJACENCY_PRECOMPUTE_LIMIT:
        raise ValueError(
            "greedy sampler needs precomputed adjacency; raise "
            "ADJACENCY_PRECOMPUTE_LIMIT for this dimension"
        )
    masks = compat_masks(dim)
    free = full_mask(dim)
    codes = []
    while free:
        pool = mask_to_codes(free)
        take = min(cfg.greedy_samples, len(pool))
        picks = rng.choice(len(pool), size=take, replace=False)
        cands = sorted({pool[int(i)] for i in picks})
        best = None
        best_score = None
        for y in cands:
            score = (free & masks[y]).bit_count()
            if (
                best is None
                or (cfg.objective == "min" and score < best_score)
                or (cfg.objective == "max" and score > best_score)
            ):
                best = y
                best_score = score
        codes.append(best)
        free &= masks[best]
    return Packing(dim, tuple(sorted(codes)))


@dataclass
class MetropolisResult:
    best: Packing
    trace: list[tuple[int, int]] = field(default_factory=list)
    accepted: int = 0
    iterations: int = 0
    sampled_sizes: dict[int, int] = field(default_factory=dict)


def metropolis_walk(
    start: Packing,
    cfg: SearchConfig,
    stream: int = 0,
    collect=None,
) -> MetropolisResult:
    """Random walk over non-extendible packings.

    Each step removes cfg.metropolis_remove random cubes and recompletes at
    random.  The candidate replaces the current state iff it is strictly
    better under the objective or within cfg.metropolis_bound.  `collect`,
    if given, is called with every candidate packing (census hook).
    """
    rng = worker_rng(cfg.seed, stream)
    dim = start.dim
    minimize = cfg.objective == "min"
    current = list(start.codes)
    best = tuple(start.codes)
    result = MetropolisResult(best=start, trace=[(0, len(best))])
    result.sampled_sizes[len(best)] = 1
    if collect is not None:
        collect(start)
    for it in range(1, cfg.max_iterations + 1):
        k = min(cfg.metropolis_remove, len(current))
        if k:
            drop = set(int(i) for i in rng.choice(len(current), size=k, replace=False))
            remaining = [c for j, c in enumerate(current) if j not in drop]
        else:
            remaining = list(current)
        cand = sorted(random_complete(dim, remaining, rng))
        size = len(cand)
        result.sampled_sizes[size] = result.sampled_sizes.get(size, 0) + 1
        if collect is not None:
            collect(Packing(dim, tuple(cand)))
        better = size < len(current) if minimize else size > len(current)
        within = cfg.metropolis_bound is not None and (
            size <= cfg.metropolis_bound if minimize else size >= cfg.metropolis_bound
        )
        if better or within:
            current = cand
            result.accepted += 1
        if (size < len(best)) if minimize else (size > len(best)):
            best = tuple(cand)
            result.trace.append((it, size))
    result.best = Packing(dim, tuple(best))
    result.iterations = cfg.max_iterations
    return result


class OrbitCensus:
    """Incremental count of distinct orbits in a stream of packings."""

    def __init__(self, dim: int):
        self.dim = dim
        self.counts: dict[tuple[int, ...], int] = {}
        self.total = 0

    def add(self, p: Packing) -> tuple[int, ...]:
        if p.dim != self.dim:
            raise ValueError("dimension mismatch")
        key = canonical_codes(self.dim, p.codes)
        self.counts[key] = self.counts.get(key, 0) + 1
        self.total += 1
        return key

    @property
    def n_orbits(self) -> int:
        return len(self.counts)

    def merge(self, other: "OrbitCensus") -> None:
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        for key, c in other.counts.items():
            self.counts[key] = self.counts.get(key, 0) + c
        self.total += other.total

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(self.counts):
                ser = CanonicalKey(self.dim, key).serialize()
                fh.write(f"{ser}\t{self.counts[key]}\n")

    @classmethod
    def load(cls, path) -> "OrbitCensus":
        census = None
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                ser, _, count = line.rstrip("\n").partition("\t")
                key = CanonicalKey.parse(ser)
                if census is None:
                    census = cls(key.dim)
                census.counts[key.codes] = int(count)
                census.total += int(count)
        if census is None:
            raise ValueError(f"empty census file: {path}")
        return census

    def report_text(self) -> str:
        by_size = {}
        for key, c in self.counts.items():
            by_size.setdefault(len(key), [0, 0])
            by_size[len(key)][0] += 1
            by_size[len(key)][1] += c
        lines = [f"dim {self.dim}: {self.total} packings, {self.n_orbits} orbits"]
        for size in sorted(by_size):
            orbits, total = by_size[size]
            lines.append(f"  size {size:>3}: {orbits} orbits from {total} packings")
        return "\n".join(lines)
