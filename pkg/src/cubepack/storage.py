"""Persistence: packing records (text and JSONL) and the orbit database.

Text form:
    d=<dim> n=<count>
    <digit> <digit> ... <digit>        one label per line

JSONL form: one object per line, fields "d", "labels" (array of arrays of
digits 0-3) and optional "meta".  Both round-trip bit-exactly.

The orbit database is a directory with one key file per enumerated level
("<dim>:<c0>,<c1>,...<TAB><0|1>" lines, flag = non-extendible) plus a
manifest recording per-level counts and completeness, so partial runs can
never be mistaken for full enumerations.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .core import Packing, decode, is_packing
from .errors import ValidationError
from .symmetry import CanonicalKey


@dataclass
class PackingRecord:
    dim: int
    labels: tuple[tuple[int, ...], ...]
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_packing(cls, p: Packing, **meta) -> "PackingRecord":
        return cls(p.dim, p.labels, dict(meta))

    def to_packing(self, raw: bool = False) -> Packing:
        """Validating constructor; raw=True skips the disjointness check
        (blocking sets and other plain label sets load through here)."""
        p = Packing.from_labels(self.dim, self.labels, validate=False)
        if not raw and not is_packing(self.dim, p.codes):
            raise ValidationError("record labels are not pairwise disjoint")
        return p


def record_to_text(rec: PackingRecord) -> str:
    lines = [f"d={rec.dim} n={len(rec.labels)}"]
    for lab in rec.labels:
        lines.append(" ".join(str(t) for t in lab))
    return "\n".join(lines) + "\n"


def record_from_text(text: str) -> PackingRecord:
    lines = [ln for ln in text.splitlines()]
    if not lines:
        raise ValidationError("empty record")
    head = lines[0].split()
    try:
        assert head[0].startswith("d=") and head[1].startswith("n=")
        dim = int(head[0][2:])
        count = int(head[1][2:])
    except (AssertionError, IndexError, ValueError):
        raise ValidationError(f"line 1: bad header {lines[0]!r}") from None
    labels = []
    for ln_no, ln in enumerate(lines[1 : count + 1], start=2):
        try:
            lab = tuple(int(t) for t in ln.split())
        except ValueError:
            raise ValidationError(f"line {ln_no}: bad label {ln!r}") from None
        if len(lab) != dim or any(not 0 <= t <= 3 for t in lab):
            raise ValidationError(f"line {ln_no}: label out of range {ln!r}")
        labels.append(lab)
    if len(labels) != count:
        raise ValidationError(f"expected {count} labels, found {len(labels)}")
    return PackingRecord(dim, tuple(labels))


def record_to_json_line(rec: PackingRecord) -> str:
    obj = {"d": rec.dim, "labels": [list(lab) for lab in rec.labels]}
    if rec.meta:
        obj["meta"] = rec.meta
    return json.dumps(obj, sort_keys=True)


def record_from_json_line(line: str, line_no: int = 1) -> PackingRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line {line_no}: {exc}") from None
    try:
        dim = int(obj["d"])
        labels = tuple(tuple(int(t) for t in lab) for lab in obj["labels"])
    except (KeyError, TypeError, ValueError):
        raise ValidationError(f"line {line_no}: missing or bad fields") from None
    for lab in labels:
        if len(lab) != dim or any(not 0 <= t <= 3 for t in lab):
            raise ValidationError(f"line {line_no}: label out of range {lab}")
    return PackingRecord(dim, labels, dict(obj.get("meta", {})))


def write_records(path, records, form: str = "jsonl") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            if form == "jsonl":
                fh.write(record_to_json_line(rec) + "\n")
            elif form == "text":
                fh.write(record_to_text(rec))
            else:
                raise ValueError(f"unknown form {form!r}")


def read_records(path, form: str = "jsonl"):
    with open(path, encoding="utf-8") as fh:
        if form == "jsonl":
            for no, line in enumerate(fh, start=1):
                if line.strip():
                    yield record_from_json_line(line, no)
        elif form == "text":
            block = []
            for line in fh:
                if line.startswith("d=") and block:
                    yield record_from_text("".join(block))
                    block = []
                block.append(line)
            if block:
                yield record_from_text("".join(block))
        else:
            raise ValueError(f"unknown form {form!r}")


class OrbitDatabase:
    """Directory-backed store of enumerated orbit levels."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.jsonl"

    def _level_path(self, dim: int, size: int) -> Path:
        return self.root / f"d{dim}" / f"n{size:02d}.keys"

    def manifest(self) -> list[dict]:
        if not self.manifest_path.exists():
            return []
        out = []
        with open(self.manifest_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    out.append(json.loads(line))
        return out

    def has_level(self, dim: int, size: int) -> bool:
        return any(
            m["dim"] == dim and m["size"] == size and m["complete"]
            for m in self.manifest()
        )

    def write_level(self, dim, size, keys, nonext_flags, complete=True) -> None:
        """keys: iterable of sorted code tuples (canonical); append-only."""
        if self.has_level(dim, size):
            raise ValidationError(f"level d={dim} n={size} already stored")
        path = self._level_path(dim, size)
        path.parent.mkdir(parents=True, exist_ok=True)
        count = 0
        nonext = 0
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for codes, flag in zip(keys, nonext_flags):
                ser = CanonicalKey(dim, tuple(codes)).serialize()
                fh.write(f"{ser}\t{1 if flag else 0}\n")
                count += 1
                nonext += bool(flag)
        os.replace(tmp, path)
        with open(self.manifest_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({
                "dim": dim, "size": size, "orbits": count,
                "nonextendible": nonext, "complete": bool(complete),
            }) + "\n")

    def iter_level(self, dim: int, size: int):
        """Yields (codes tuple, nonextendible flag) in stored (sorted) order."""
        path = self._level_path(dim, size)
        if not path.exists():
            raise ValidationError(f"level d={dim} n={size} not in database")
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                ser, _, flag = line.rstrip("\n").partition("\t")
                key = CanonicalKey.parse(ser)
                yield key.codes, flag == "1"

    def level_sizes(self, dim: int) -> list[int]:
        return sorted(m["size"] for m in self.manifest()
                      if m["dim"] == dim and m["complete"])

    def counts(self, dim: int) -> dict[int, tuple[int, int]]:
        """size -> (orbits, nonextendible) from the manifest."""
        return {
            m["size"]: (m["orbits"], m["nonextendible"])
            for m in self.manifest()
            if m["dim"] == dim and m["complete"]
        }
