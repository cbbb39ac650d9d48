"""Reproduction battery: re-derives the documented reference counts and
identities and reports one pass/fail line per check.

Dimensions 1-3 run in seconds.  The dimension-4 battery needs the full
orbit enumeration; point it at a prebuilt orbit database to avoid the
multi-hour in-process run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analysis import (
    BLOCKING_WITNESS_4D,
    blocking_bound_sequence,
    density_from_tiling,
    density_moments,
    is_blocking,
    key_inequality_check,
    merge_layers,
    min_blocking_sets,
    moments,
    random_density,
    second_moment_lower_bound,
    window_pair_stats,
)
from .core import Packing, free_codes, is_tiling, lift, min_nonextendible_3d, product_packing, regular_tiling
from .enumeration import complete_to_tiling, enumerate_all
from .flips import explore_component
from .stochastic import SearchConfig, random_packing, worker_rng
from .storage import OrbitDatabase
from .symmetry import canonical_codes


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}" + (
            f": {self.detail}" if self.detail else ""
        )


def _check(name, passed, detail="") -> CheckResult:
    return CheckResult(name, bool(passed), detail)


def check_general() -> list[CheckResult]:
    out = []
    seq = blocking_bound_sequence(7, 2)
    out.append(_check("blocking bound sequence from 7", seq == [10, 14], f"{seq}"))
    ok = all(
        moments(regular_tiling(d)).m2 == Fraction(5, 2) ** d for d in range(1, 7)
    )
    out.append(_check("regular tiling m2 = (5/2)^d for d=1..6", ok))
    rng = worker_rng(20240, 0)
    ok = True
    for _ in range(10_000):
        vals = [Fraction(int(a), int(b)) for a, b in
                zip(rng.integers(0, 50, 4), rng.integers(1, 50, 4))]
        if not key_inequality_check(*vals):
            ok = False
            break
    out.append(_check("four-square inequality fuzz (10^4)", ok))
    rng = worker_rng(20241, 0)
    ok = True
    for d in (1, 2):
        for _ in range(20):
            f = random_density(d, rng)
            m2 = density_moments(f)[1]
            for i in range(d):
                g = merge_layers(f, i)
                if density_moments(g)[1] < m2:
                    ok = False
            comp = f
            for i in range(d):
                comp = merge_layers(comp, i)
            if comp != density_from_tiling(regular_tiling(d)):
                ok = False
    out.append(_check("merge operator monotone, composite regular (d<=2)", ok))
    return out


def check_dim2() -> list[CheckResult]:
    out = []
    res = enumerate_all(2)
    nonext = res.table.nonextendible_by_size()
    out.append(_check(
        "d=2: two tiling orbits, no smaller non-extendible packing",
        res.table.tiling_orbits == 2
        and all(nonext.get(n, 0) == 0 for n in (1, 2, 3))
        and nonext.get(4) == 2,
        res.table.to_text().replace("\n", "; "),
    ))
    comp = explore_component(regular_tiling(2))
    out.append(_check("d=2: flip component has 2 orbits", comp.order == 2))
    orbits3 = min_blocking_sets(2, 3)
    orbits2 = min_blocking_sets(2, 2)
    out.append(_check(
        "d=2: minimum blocking size 3, exactly 2 orbits",
        len(orbits3) == 2 and not orbits2,
    ))
    return out


def check_dim3() -> list[CheckResult]:
    out = []
    res = enumerate_all(3)
    nonext = res.table.nonextendible_by_size()
    fig = min_nonextendible_3d()
    key_match = False
    if res.nonextendible and res.nonextendible.get(4):
        key_match = res.nonextendible[4][0] == canonical_codes(3, fig.codes)
    out.append(_check(
        "d=3: unique non-extendible orbit at size 4 (reference packing)",
        nonext.get(4) == 1 and key_match,
    ))
    out.append(_check(
        "d=3: no non-extendible orbits at sizes 5-7",
        all(nonext.get(n, 0) == 0 for n in (5, 6, 7)),
    ))
    out.append(_check("d=3: nine tiling orbits", res.table.tiling_orbits == 9))
    comp = explore_component(regular_tiling(3))
    tiling_keys = {tuple(k) for k in res.levels[8]} if res.levels else set()
    out.append(_check(
        "d=3: flip component covers all 9 tiling orbits",
        comp.order == 9 and comp.keys == tiling_keys,
    ))
    out.append(_check(
        "d=3: blocking orbits (none of size 3, three of size 4)",
        not min_blocking_sets(3, 3) and len(min_blocking_sets(3, 4)) == 3,
    ))
    out.append(_check(
        "d=3: reference packing admits no tiling completion",
        complete_to_tiling(fig) is None,
    ))
    return out


def check_constructions() -> list[CheckResult]:
    out = []
    fig = min_nonextendible_3d()
    prod = product_packing(fig, fig)
    out.append(_check(
        "product of two minimal 3d packings: 16 cubes, non-extendible (d=6)",
        len(prod) == 16 and prod.dim == 6 and not free_codes(prod),
    ))
    lifted = lift(fig, regular_tiling(3))
    out.append(_check(
        "lift of minimal 3d packing: 12 cubes, non-extendible (d=4)",
        len(lifted) == 12 and lifted.dim == 4 and not free_codes(lifted),
    ))
    out.append(_check(
        "4d blocking witness of size 7",
        is_blocking(4, BLOCKING_WITNESS_4D),
    ))
    return out


D4_NONEXTENDIBLE = {8: 38, 9: 6, 10: 24, 11: 0, 12: 71,
                    13: 0, 14: 0, 15: 0, 16: 744}


def check_dim4(db: OrbitDatabase | None = None, workers: int = 1) -> list[CheckResult]:
    """Heavy tier: full d=4 reproduction.  Enumerates in-process when no
    database is supplied (hours)."""
    out = []
    if db is not None and db.level_sizes(4):
        counts = db.counts(4)
        get_level = lambda n: [codes for codes, _ in db.iter_level(4, n)]
        nonext_level = lambda n: [c for c, f in db.iter_level(4, n) if f]
    else:
        res = enumerate_all(4, workers=workers, keep_levels=True)
        counts = {r.size: (r.orbits, r.nonextendible) for r in res.table.rows}
        get_level = lambda n: res.levels[n]
        nonext_level = lambda n: res.nonextendible[n]
    observed = {n: counts.get(n, (0, 0))[1] for n in D4_NONEXTENDIBLE}
    out.append(_check(
        "d=4: non-extendible orbit counts by size",
        observed == D4_NONEXTENDIBLE,
        f"{observed}",
    ))
    comp = explore_component(regular_tiling(4))
    tiling_keys = {tuple(k) for k in get_level(16)}
    out.append(_check(
        "d=4: flip component covers all 744 tiling orbits",
        comp.order == 744 and comp.keys == tiling_keys,
    ))
    lifted = lift(min_nonextendible_3d(), regular_tiling(3))
    key = canonical_codes(4, lifted.codes)
    out.append(_check(
        "d=4: lifted 12-cube packing appears among the 71 size-12 orbits",
        tuple(key) in {tuple(c) for c in nonext_level(12)},
    ))
    ok = True
    for n in (13, 14, 15):
        for codes in get_level(n):
            if complete_to_tiling(Packing(4, tuple(codes))) is None:
                ok = False
                break
    out.append(_check("d=4: every packing of size 13-15 completes to a tiling", ok))
    ok = True
    for n in sorted(counts):
        for codes in get_level(n):
            p = Packing(4, tuple(codes))
            rep = moments(p)
            if rep.m2 < rep.m2_lower:
                ok = False
                break
    out.append(_check("d=4: second-moment bound holds across the database", ok))
    return out


def run_battery(dims=(1, 2, 3), db: OrbitDatabase | None = None,
                workers: int = 1) -> list[CheckResult]:
    out = check_general() + check_constructions()
    if 2 in dims:
        out += check_dim2()
    if 3 in dims:
        out += check_dim3()
    if 4 in dims:
        out += check_dim4(db, workers)
    return out
