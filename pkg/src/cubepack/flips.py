"""The flip move on tilings and breadth-first exploration of the flip graph.

A flip takes a face-to-face pair {x, x + 2e_i} in a tiling and shifts both
cubes by e_i; the pair tiles the same 2x..x4x..x2 slab, just rotated one
notch around the periodic direction, so the result is again a tiling.
States are deduplicated at the orbit level by canonical key, giving the
connected component of the start tiling in the orbit flip graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import Label, Packing, decode, encode, is_tiling
from .errors import ResourceCapExceeded
from .symmetry import canonical_codes


class ExplorationCapExceeded(ResourceCapExceeded):
    """BFS outgrew its cap; carries the partial component and frontier."""

    def __init__(self, message, visited, frontier, edges):
        super().__init__(message, partial=visited)
        self.visited = visited
        self.frontier = frontier
        self.edges = edges


@dataclass(frozen=True)
class FlipMove:
    label: Label
    coord: int


def _shift(code: int, dim: int, coord: int, amount: int) -> int:
    shift = 2 * (dim - 1 - coord)
    digit = (code >> shift) & 3
    return code - (digit << shift) + (((digit + amount) & 3) << shift)


def flip_moves(t: Packing) -> list[FlipMove]:
    """All face-to-face pairs, one move per pair (base label has x_i in {0,1})."""
    if not is_tiling(t):
        raise ValueError("flip moves are defined on tilings")
    members = set(t.codes)
    moves = []
    for code in t.codes:
        coords = decode(code, t.dim)
        for i in range(t.dim):
            if coords[i] in (0, 1) and _shift(code, t.dim, i, 2) in members:
                moves.append(FlipMove(coords, i))
    return moves


def apply_flip(t: Packing, move: FlipMove) -> Packing:
    dim = t.dim
    x = encode(move.label)
    x2 = _shift(x, dim, move.coord, 2)
    members = set(t.codes)
    if x not in members or x2 not in members:
        raise ValueError("move does not name a face-to-face pair of the tiling")
    members.discard(x)
    members.discard(x2)
    members.add(_shift(x, dim, move.coord, 1))
    members.add(_shift(x2, dim, move.coord, 1))
    return Packing(dim, tuple(sorted(members)))


@dataclass
class FlipComponent:
    dim: int
    keys: set[tuple[int, ...]]
    edges: set[tuple[tuple[int, ...], tuple[int, ...]]]

    @property
    def order(self) -> int:
        return len(self.keys)


def explore_component(t0: Packing, cap: int | None = None) -> FlipComponent:
    """BFS from t0 over flips, one state per tiling orbit.

    Orbit edges are recorded once per unordered key pair; flips landing in
    the same orbit are ignored (the orbit graph is kept simple).
    """
    dim = t0.dim
    start = canonical_codes(dim, t0.codes)
    visited = {start}
    edges = set()
    queue = deque([start])
    while queue:
        state = queue.popleft()
        tiling = Packing(dim, state)
        for move in flip_moves(tiling):
            neighbour = canonical_codes(dim, apply_flip(tiling, move).codes)
            if neighbour != state:
                edges.add((min(state, neighbour), max(state, neighbour)))
            if neighbour not in visited:
                if cap is not None and len(visited) >= cap:
                    raise ExplorationCapExceeded(
                        f"component exceeds cap {cap}",
                        visited, list(queue), edges,
                    )
                visited.add(neighbour)
                queue.append(neighbour)
    return FlipComponent(dim, visited, edges)


def explore_component_raw(t0: Packing, cap: int | None = None):
    """BFS over raw tilings (no orbit reduction); validation tool, tiny dims.

    Returns (set of raw sorted code tuples, set of orbit keys they project to).
    """
    dim = t0.dim
    start = tuple(t0.codes)
    visited = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        tiling = Packing(dim, state)
        for move in flip_moves(tiling):
            neighbour = tuple(apply_flip(tiling, move).codes)
            if neighbour not in visited:
                if cap is not None and len(visited) >= cap:
                    raise ExplorationCapExceeded(
                        f"raw component exceeds cap {cap}",
                        visited, list(queue), set(),
                    )
                visited.add(neighbour)
                queue.append(neighbour)
    orbit_keys = {canonical_codes(dim, s) for s in visited}
    return visited, orbit_keys
