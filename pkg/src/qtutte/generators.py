"""Seeded graph families: Delaunay planar graphs, Erdos-Renyi, Margulis-Gabber-Galil, grids."""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError, NumericalFailure
from .graph import Graph
from .rng import Xorshift64Star

GRAPH_CLASSES = ("planar", "grid", "expander", "random")

_MIN_SEPARATION = 1e-9
_SUPER_SCALE = 1e7


def orient(ax, ay, bx, by, cx, cy) -> float:
    """Twice the signed area of triangle abc (positive when counter-clockwise)."""
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def incircle(pa, pb, pc, pd) -> float:
    """Positive when ``pd`` lies strictly inside the circumcircle of CCW triangle abc."""
    adx, ady = pa[0] - pd[0], pa[1] - pd[1]
    bdx, bdy = pb[0] - pd[0], pb[1] - pd[1]
    cdx, cdy = pc[0] - pd[0], pc[1] - pd[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    return (alift * (bdx * cdy - bdy * cdx)
            + blift * (cdx * ady - cdy * adx)
            + clift * (adx * bdy - ady * bdx))


def bowyer_watson(points: np.ndarray) -> list[tuple[int, int, int]]:
    """Delaunay triangles (CCW index triples) by incremental insertion.

    A large super-triangle seeds the triangulation and is stripped at the end.
    Ties (a point exactly on a circumcircle) keep the existing triangle, so
    cocircular configurations resolve by insertion order.
    """
    pts = [tuple(map(float, p)) for p in np.asarray(points, dtype=float)]
    n = len(pts)
    lo = np.min(points, axis=0)
    hi = np.max(points, axis=0)
    mid = (lo + hi) / 2.0
    span = max(float(np.max(hi - lo)), 1.0)
    r = _SUPER_SCALE * span
    pts += [(mid[0] - 2 * r, mid[1] - r), (mid[0] + 2 * r, mid[1] - r), (mid[0], mid[1] + 2 * r)]

    tris = {(n, n + 1, n + 2)}
    for i in range(n):
        p = pts[i]
        bad = [t for t in tris if incircle(pts[t[0]], pts[t[1]], pts[t[2]], p) > 0.0]
        directed = set()
        for a, b, c in bad:
            directed.update(((a, b), (b, c), (c, a)))
        for t in bad:
            tris.discard(t)
        for a, b in directed:
            if (b, a) not in directed:
                tris.add((a, b, i))
    return sorted(t for t in tris if max(t) < n)


def convex_hull(points: np.ndarray) -> list[int]:
    """Strict convex hull indices in counter-clockwise order (Andrew's monotone chain)."""
    pts = np.asarray(points, dtype=float)
    order = sorted(range(len(pts)), key=lambda i: (pts[i, 0], pts[i, 1]))
    if len(order) <= 2:
        return order

    def chain(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and orient(*pts[out[-2]], *pts[out[-1]], *pts[i]) <= 0.0:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    return lower[:-1] + upper[:-1]


def hull_clockwise_from_bottom_left(points: np.ndarray) -> list[int]:
    pts = np.asarray(points, dtype=float)
    hull = convex_hull(pts)[::-1]
    start = min(range(len(hull)), key=lambda k: (pts[hull[k]].sum(), pts[hull[k], 0]))
    return hull[start:] + hull[:start]


def _polygon_area(pts: np.ndarray, cycle: list[int]) -> float:
    xy = pts[cycle]
    return 0.5 * abs(float(np.dot(xy[:, 0], np.roll(xy[:, 1], -1))
                           - np.dot(xy[:, 1], np.roll(xy[:, 0], -1))))


def delaunay_edges(points: np.ndarray) -> tuple[tuple[int, int], ...]:
    pts = np.asarray(points, dtype=float)
    tris = bowyer_watson(pts)
    covered = sum(0.5 * abs(orient(*pts[a], *pts[b], *pts[c])) for a, b, c in tris)
    hull_area = _polygon_area(pts, convex_hull(pts))
    if abs(covered - hull_area) > 1e-9 * max(hull_area, 1.0):
        raise NumericalFailure("Delaunay triangulation does not cover the convex hull")
    edges = set()
    for a, b, c in tris:
        for u, v in ((a, b), (b, c), (c, a)):
            edges.add((min(u, v), max(u, v)))
    return tuple(sorted(edges))


def _relabel(points: np.ndarray, edges, order: list[int]):
    pos = {old: new for new, old in enumerate(order)}
    return points[order], tuple((pos[u], pos[v]) for u, v in edges)


def random_points(n: int, rng: Xorshift64Star) -> np.ndarray:
    """``n`` uniform points in the unit square, redrawing any within 1e-9 of an earlier one."""
    pts = np.empty((n, 2))
    for i in range(n):
        while True:
            p = (rng.random(), rng.random())
            if i == 0 or np.min(np.hypot(pts[:i, 0] - p[0], pts[:i, 1] - p[1])) >= _MIN_SEPARATION:
                break
        pts[i] = p
    return pts


def planar_from_points(points: np.ndarray) -> tuple[Graph, np.ndarray]:
    """Delaunay graph of ``points`` relabelled so the hull comes first.

    Hull vertices take indices ``0 .. h-1`` in clockwise order starting at the
    bottom-left hull vertex; interior vertices follow in input order.
    """
    pts = np.asarray(points, dtype=float)
    edges = delaunay_edges(pts)
    hull = hull_clockwise_from_bottom_left(pts)
    on_hull = set(hull)
    order = hull + [i for i in range(len(pts)) if i not in on_hull]
    pts, edges = _relabel(pts, edges, order)
    return Graph(len(pts), edges), pts


def random_planar_delaunay(n: int, seed: int) -> tuple[Graph, np.ndarray]:
    if n < 3:
        raise InvalidInputError(f"need at least 3 points, got {n}")
    return planar_from_points(random_points(n, Xorshift64Star(seed)))


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"edge probability must lie in [0, 1], got {p}")
    rng = Xorshift64Star(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, tuple(edges))


def margulis_gabber_galil(k: int) -> Graph:
    """Margulis-Gabber-Galil graph on Z_k x Z_k; vertex (x, y) has index ``x*k + y``."""
    if k < 2:
        raise InvalidInputError(f"side must be at least 2, got {k}")
    pairs = []
    for x in range(k):
        for y in range(k):
            u = x * k + y
            for s in (1, -1):
                pairs.append((u, ((x + s * 2 * y) % k) * k + y))
                pairs.append((u, ((x + s * (2 * y + 1)) % k) * k + y))
                pairs.append((u, x * k + (y + s * 2 * x) % k))
                pairs.append((u, x * k + (y + s * (2 * x + 1)) % k))
    return Graph.simple(k * k, pairs)


def grid(rows: int, cols: int) -> Graph:
    if rows < 2 or cols < 2:
        raise InvalidInputError("grid needs at least 2 rows and 2 columns")
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges.append((u, u + 1))
            if r + 1 < rows:
                edges.append((u, u + cols))
    return Graph(rows * cols, tuple(edges))


def grid_shape(n: int) -> tuple[int, int]:
    """Most square ``rows x cols`` factorisation of ``n`` with ``rows >= 2``."""
    rows = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    if rows < 2:
        raise InvalidInputError(f"{n} has no grid factorisation with both sides >= 2")
    return rows, n // rows


def er_probability(n: int) -> float:
    """Twice the connectivity threshold ``ln(n)/n``, capped at 1."""
    return min(1.0, 2.0 * math.log(n) / n)


def generate(cls: str, n: int, seed: int) -> Graph:
    """Graph of class ``cls`` with roughly ``n`` vertices.

    ``grid`` uses the most square factorisation of ``n``; ``expander`` uses
    side ``round(sqrt(n))`` so the vertex count is the nearest square.
    """
    if cls == "planar":
        return random_planar_delaunay(n, seed)[0]
    if cls == "grid":
        return grid(*grid_shape(n))
    if cls == "expander":
        return margulis_gabber_galil(max(2, round(math.sqrt(n))))
    if cls == "random":
        return erdos_renyi(n, er_probability(n), seed)
    raise InvalidInputError(f"unknown graph class {cls!r}; expected one of {GRAPH_CLASSES}")
