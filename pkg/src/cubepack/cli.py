"""Command-line interface.

Exit codes: 0 success, 2 validation failure, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis, stochastic, verify
from .core import Packing, free_codes, regular_tiling
from .enumeration import enumerate_all
from .errors import ResourceCapExceeded, ValidationError
from .flips import explore_component
from .storage import (
    OrbitDatabase,
    PackingRecord,
    read_records,
    record_to_json_line,
    record_to_text,
)
from .symmetry import CanonicalKey, canonical_codes

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAP = 3


def _add_common(sub):
    sub.add_argument("--threads", type=int, default=1,
                     help="worker processes where supported")
    sub.add_argument("--seed", type=int, default=0, help="master RNG seed")
    sub.add_argument("--limit", type=int, default=None,
                     help="resource cap (orbits, nodes or states)")


def _read_first_packing(path, raw=False) -> Packing:
    form = "text" if str(path).endswith(".txt") else "jsonl"
    for rec in read_records(path, form):
        return rec.to_packing(raw=raw)
    raise ValidationError(f"no records in {path}")


def _iter_packings(path, raw=False):
    form = "text" if str(path).endswith(".txt") else "jsonl"
    for rec in read_records(path, form):
        yield rec.to_packing(raw=raw)


def cmd_enumerate(args) -> int:
    db = OrbitDatabase(args.out) if args.out else None

    def on_level(size, keys, flags):
        if db is not None:
            db.write_level(args.dim, size, keys, flags)

    result = enumerate_all(
        args.dim,
        max_size=args.max_size,
        workers=args.threads,
        orbit_cap=args.limit,
        keep_levels=False,
        on_level=on_level,
    )
    if args.format == "jsonl":
        for row in result.table.to_rows():
            print(json.dumps(row))
    else:
        print(result.table.to_text())
    return EXIT_OK


def cmd_flips(args) -> int:
    start = _read_first_packing(args.start) if args.start else regular_tiling(args.dim)
    comp = explore_component(start, cap=args.limit)
    print(f"component orbits: {comp.order}")
    print(f"component edges:  {len(comp.edges)}")
    sink = open(args.edges_out, "w") if args.edges_out else sys.stdout
    try:
        for a, b in sorted(comp.edges):
            ka = CanonicalKey(start.dim, a).serialize()
            kb = CanonicalKey(start.dim, b).serialize()
            sink.write(f"{ka}\t{kb}\n")
    finally:
        if args.edges_out:
            sink.close()
    return EXIT_OK


def _emit_packing(p: Packing, args, generator: str, extra=None) -> None:
    meta = {
        "seed": args.seed,
        "generator": generator,
        "size": len(p),
        "nonExtendible": not free_codes(p),
        "canonicalKey": CanonicalKey(p.dim, canonical_codes(p.dim, p.codes)).serialize(),
    }
    if extra:
        meta.update(extra)
    rec = PackingRecord.from_packing(p, **meta)
    print(record_to_json_line(rec))


def _search_config(args) -> stochastic.SearchConfig:
    return stochastic.SearchConfig(
        seed=args.seed,
        rejection_threshold=args.rejection_threshold,
        greedy_samples=args.greedy_samples,
        metropolis_remove=args.remove,
        metropolis_bound=args.bound,
        objective=args.objective,
        max_iterations=args.iterations,
    )


def cmd_random(args) -> int:
    cfg = _search_config(args)
    for k in range(args.count):
        _emit_packing(stochastic.random_packing(args.dim, cfg, stream=k),
                      args, "random", {"stream": k})
    return EXIT_OK


def cmd_greedy(args) -> int:
    cfg = _search_config(args)
    for k in range(args.count):
        _emit_packing(stochastic.greedy_packing(args.dim, cfg, stream=k),
                      args, "greedy", {"stream": k})
    return EXIT_OK


def cmd_metropolis(args) -> int:
    cfg = _search_config(args)
    for k in range(args.count):
        if args.start:
            start = _read_first_packing(args.start)
        else:
            start = stochastic.random_packing(args.dim, cfg, stream=1000 + k)
        result = stochastic.metropolis_walk(start, cfg, stream=k)
        _emit_packing(result.best, args, "metropolis", {
            "stream": k,
            "iterations": result.iterations,
            "accepted": result.accepted,
            "trace": [list(t) for t in result.trace],
        })
    return EXIT_OK


def cmd_analyze(args) -> int:
    for p in _iter_packings(args.file):
        rep = analysis.moments(p)
        if args.format == "jsonl":
            row = rep.to_row()
            if args.deficits:
                row["layerDeficits"] = [
                    list(analysis.layer_deficits(p, i)) for i in range(p.dim)
                ]
            if args.holes:
                row["holeCells"] = len(analysis.hole_cells(p))
            if args.pairs:
                analysis.window_pair_stats(p)  # raises on any mismatch
                row["pairStatsConsistent"] = True
            print(json.dumps(row))
        else:
            print(rep.to_text())
            if args.deficits:
                for i in range(p.dim):
                    print(f"  deficits coord {i}: {analysis.layer_deficits(p, i)}")
            if args.holes:
                print(f"  hole cells: {len(analysis.hole_cells(p))}")
            if args.pairs:
                analysis.window_pair_stats(p)
                print("  pair stats: formula matches window counts")
    return EXIT_OK


def cmd_blocking(args) -> int:
    if args.verify:
        ok = True
        for p in _iter_packings(args.verify, raw=True):
            verdict = analysis.is_blocking(args.dim, p.codes)
            ok &= verdict
            print(f"blocking={verdict} size={len(p)}")
        return EXIT_OK if ok else EXIT_INVALID
    orbits = analysis.min_blocking_sets(args.dim, args.size, cap=args.limit)
    print(f"blocking orbits of size {args.size} in dimension {args.dim}: "
          f"{len(orbits)}")
    for key in orbits:
        print(CanonicalKey(args.dim, key).serialize())
    return EXIT_OK


def cmd_canon(args) -> int:
    for p in _iter_packings(args.file, raw=True):
        print(CanonicalKey(p.dim, canonical_codes(p.dim, p.codes)).serialize())
    return EXIT_OK


def cmd_verify(args) -> int:
    dims = [args.dim] if args.dim else [1, 2, 3]
    db = OrbitDatabase(args.db) if args.db else None
    results = verify.run_battery(dims=dims, db=db, workers=args.threads)
    failed = 0
    for res in results:
        print(res.line())
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cubepack",
        description="Enumerate, search and analyze periodic cube packings "
                    "of the 4-torus.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="orbit enumeration by size")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--out", help="orbit database directory")
    p.add_argument("--format", choices=("text", "jsonl"), default="text")
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("flips", help="explore the flip graph component")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--start", help="start tiling record file")
    p.add_argument("--edges-out", help="write orbit edges here")
    _add_common(p)
    p.set_defaults(func=cmd_flips)

    for name, func, extra in (
        ("random", cmd_random, False),
        ("greedy", cmd_greedy, False),
        ("metropolis", cmd_metropolis, True),
    ):
        p = sub.add_parser(name, help=f"{name} packing generator")
        p.add_argument("--dim", type=int, required=True)
        p.add_argument("--count", type=int, default=1, help="packings to emit")
        p.add_argument("--rejection-threshold", type=int, default=None)
        p.add_argument("--greedy-samples", type=int, default=20)
        p.add_argument("--remove", type=int, default=3)
        p.add_argument("--bound", type=int, default=None)
        p.add_argument("--objective", choices=("min", "max"), default="min")
        p.add_argument("--iterations", type=int, default=1000)
        if extra:
            p.add_argument("--start", help="start packing record file")
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("analyze", help="moment reports for stored packings")
    p.add_argument("file")
    p.add_argument("--moments", action="store_true", help="always on")
    p.add_argument("--deficits", action="store_true")
    p.add_argument("--holes", action="store_true")
    p.add_argument("--pairs", action="store_true")
    p.add_argument("--format", choices=("text", "jsonl"), default="text")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("blocking", help="blocking-set search or verification")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--size", type=int)
    p.add_argument("--verify", help="record file of label sets to check")
    _add_common(p)
    p.set_defaults(func=cmd_blocking)

    p = sub.add_parser("canon", help="canonical keys of stored label sets")
    p.add_argument("file")
    _add_common(p)
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("verify", help="re-derive the documented reference "
                                      "counts and identities")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--db", help="orbit database for the dimension-4 tier")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceCapExceeded as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
