"""Graphs, pin specifications and the Tutte linear systems built from them.

Two constructions are supported:

* ``SOFT_GROUND``: a dummy triangle occupies vertices 0, 1, 2 and is tied to
  the points (0, 0), (0, 1), (1, 0) by unit springs.  The system matrix is the
  full graph Laplacian plus ``diag(1, 1, 1, 0, ..., 0)`` and the right-hand
  sides are basis vectors (``e_2`` for x, ``e_1`` for y).
* ``HARD_PIN``: pinned vertices are removed from the unknowns, giving the
  classical ``deg(u) x_u - sum(x_v, v free neighbour) = sum(x*_v, v pinned
  neighbour)`` system over free vertices only.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

# (vertex, x*, y*) of the dummy triangle, clockwise from the bottom-left corner.
SOFT_GROUND_PINS = ((0, 0.0, 0.0), (1, 0.0, 1.0), (2, 1.0, 0.0))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0 .. n-1``.

    ``edges`` is normalised to ascending ``(u, v)`` pairs with ``u < v``,
    sorted lexicographically.  ``adjacency`` holds sorted neighbour tuples.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInputError(f"vertex count must be non-negative, got {self.n}")
        canon = set()
        for e in self.edges:
            u, v = (int(e[0]), int(e[1]))
            if u == v:
                raise InvalidInputError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidInputError(f"edge ({u}, {v}) out of range for n={self.n}")
            key = (u, v) if u < v else (v, u)
            if key in canon:
                raise InvalidInputError(f"duplicate edge {key}")
            canon.add(key)
        edges = tuple(sorted(canon))
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(x)) for x in nbrs))

    @classmethod
    def simple(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph dropping loops and repeated pairs instead of rejecting them."""
        seen = {(min(u, v), max(u, v)) for u, v in pairs if u != v}
        return cls(n, tuple(seen))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=int)

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    queue.append(v)
        return count == self.n

    def induced(self, keep: Sequence[int]) -> "Graph":
        """Subgraph on ``keep``, relabelled to ``0 .. len(keep)-1`` in the given order."""
        pos = {v: i for i, v in enumerate(keep)}
        return Graph(len(keep), tuple((pos[u], pos[v]) for u, v in self.edges
                                      if u in pos and v in pos))


class PinMode(enum.Enum):
    SOFT_GROUND = "soft_ground"
    HARD_PIN = "hard_pin"


@dataclass(frozen=True)
class PinSpec:
    pinned: tuple[tuple[int, float, float], ...]
    mode: PinMode

    @classmethod
    def soft_ground(cls) -> "PinSpec":
        return cls(SOFT_GROUND_PINS, PinMode.SOFT_GROUND)

    @classmethod
    def hard(cls, pins: Iterable[tuple[int, float, float]]) -> "PinSpec":
        return cls(tuple((int(v), float(x), float(y)) for v, x, y in pins), PinMode.HARD_PIN)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(p[0] for p in self.pinned)

    def validate(self, n: int) -> None:
        idx = self.indices
        if len(set(idx)) != len(idx):
            raise InvalidInputError("pinned vertex indices must be distinct")
        if any(not 0 <= v < n for v in idx):
            raise InvalidInputError(f"pinned vertex out of range for n={n}")
        if self.mode is PinMode.SOFT_GROUND:
            if tuple(self.pinned) != SOFT_GROUND_PINS:
                raise InvalidInputError(
                    "SOFT_GROUND expects the dummy triangle 0,1,2 at (0,0), (0,1), (1,0)")


@dataclass(frozen=True)
class TutteSystem:
    a: np.ndarray
    b_x: np.ndarray
    b_y: np.ndarray
    free_index_map: tuple[int, ...]
    mode: PinMode

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        object.__setattr__(self, "b_x", _frozen(self.b_x))
        object.__setattr__(self, "b_y", _frozen(self.b_y))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def rhs(self, axis: str) -> np.ndarray:
        if axis == "x":
            return self.b_x
        if axis == "y":
            return self.b_y
        raise InvalidInputError(f"axis must be 'x' or 'y', got {axis!r}")

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Sparse ``(rows, cols, values)`` view of the nonzero entries of ``a``."""
        rows, cols = np.nonzero(self.a)
        return rows, cols, self.a[rows, cols]

    def pattern_graph(self) -> Graph:
        """Graph whose edges are the off-diagonal nonzeros of ``a``."""
        rows, cols = np.nonzero(np.triu(self.a, k=1))
        return Graph(self.dim, tuple(zip(rows.tolist(), cols.tolist())))


@dataclass(frozen=True)
class Embedding:
    """Per-vertex drawing coordinates with provenance and optional quality metrics."""

    coords: np.ndarray
    source: str = "classical"
    metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        c = _frozen(self.coords)
        if c.ndim != 2 or c.shape[1] != 2:
            raise InvalidInputError("coords must have shape (n, 2)")
        object.__setattr__(self, "coords", c)
        if self.source not in ("classical", "quantum"):
            raise InvalidInputError(f"unknown embedding source {self.source!r}")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.coords[:, 1]


def laplacian(g: Graph) -> np.ndarray:
    """Dense graph Laplacian ``D - M``."""
    lap = np.zeros((g.n, g.n))
    for u, v in g.edges:
        lap[u, v] = lap[v, u] = -1.0
    lap[np.diag_indices(g.n)] = g.degrees()
    return lap


def add_dummy_outer_face(g: Graph, outer: Sequence[int]) -> tuple[Graph, tuple[int, ...]]:
    """Prepend a dummy triangle at vertices 0, 1, 2, joining dummy ``i`` to ``outer[i]``.

    Returns the augmented graph and the map ``old vertex -> new vertex``
    (every original vertex moves up by three).
    """
    outer = list(outer)
    if len(outer) != 3 or len(set(outer)) != 3:
        raise InvalidInputError(f"outer face must list 3 distinct vertices, got {outer}")
    if any(not 0 <= v < g.n for v in outer):
        raise InvalidInputError(f"outer vertex out of range for n={g.n}")
    shift = 3
    edges = [(0, 1), (1, 2), (0, 2)]
    edges += [(u + shift, v + shift) for u, v in g.edges]
    edges += [(i, outer[i] + shift) for i in range(3)]
    index_map = tuple(v + shift for v in range(g.n))
    return Graph(g.n + shift, tuple(edges)), index_map


def soft_ground_instance(g: Graph, outer: Sequence[int] = (0, 1, 2)) -> tuple[Graph, PinSpec]:
    """Augmented graph plus the matching SOFT_GROUND pin spec."""
    aug, _ = add_dummy_outer_face(g, outer)
    return aug, PinSpec.soft_ground()


def build_system(g: Graph, pins: PinSpec) -> TutteSystem:
    pins.validate(g.n)
    if not g.is_connected():
        raise InvalidInputError("graph must be connected")
    lap = laplacian(g)
    if pins.mode is PinMode.SOFT_GROUND:
        a = lap.copy()
        b_x = np.zeros(g.n)
        b_y = np.zeros(g.n)
        for v, px, py in pins.pinned:
            a[v, v] += 1.0
            b_x[v] = px
            b_y[v] = py
        return TutteSystem(a, b_x, b_y, tuple(range(g.n)), pins.mode)

    pinned = {v: (px, py) for v, px, py in pins.pinned}
    free = [v for v in range(g.n) if v not in pinned]
    if not free:
        raise InvalidInputError("HARD_PIN system has no free vertices")
    if not pinned:
        raise InvalidInputError("HARD_PIN system needs at least one pinned vertex")
    a = lap[np.ix_(free, free)]
    b_x = np.zeros(len(free))
    b_y = np.zeros(len(free))
    for row, u in enumerate(free):
        for v in g.adjacency[u]:
            if v in pinned:
                b_x[row] += pinned[v][0]
                b_y[row] += pinned[v][1]
    return TutteSystem(a, b_x, b_y, tuple(free), pins.mode)


def regular_polygon_pins(cycle: Sequence[int], center=(0.5, 0.5), radius=0.5) -> PinSpec:
    """HARD_PIN spec placing ``cycle`` on a regular polygon, clockwise from the bottom left."""
    k = len(cycle)
    if k < 3:
        raise InvalidInputError("a pinned outer cycle needs at least 3 vertices")
    pins = []
    for i, v in enumerate(cycle):
        ang = 1.25 * np.pi - 2.0 * np.pi * i / k
        pins.append((v, center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)))
    return PinSpec.hard(pins)


def solution_to_coords(g: Graph, pins: PinSpec, sys: TutteSystem,
                       x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Scatter solved system vectors back onto all ``g.n`` vertices."""
    coords = np.zeros((g.n, 2))
    if sys.mode is PinMode.HARD_PIN:
        for v, px, py in pins.pinned:
            coords[v] = (px, py)
    idx = list(sys.free_index_map)
    coords[idx, 0] = x
    coords[idx, 1] = y
    return coords


# -- text format -----------------------------------------------------------

def format_graph(g: Graph, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"{g.n} {g.m}")
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [r for r in rows if r and not r.startswith("#")]
    if not rows:
        raise InvalidInputError("empty graph file")
    try:
        n, m = (int(tok) for tok in rows[0].split())
        pairs = [tuple(int(tok) for tok in r.split()) for r in rows[1:]]
    except ValueError as exc:
        raise InvalidInputError(f"malformed graph file: {exc}") from None
    if len(pairs) != m or any(len(p) != 2 for p in pairs):
        raise InvalidInputError(f"header announces {m} edges, found {len(pairs)}")
    return Graph(n, tuple(pairs))


def write_graph(g: Graph, path: str | Path, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(format_graph(g, comments), encoding="ascii")


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text(encoding="ascii"))
