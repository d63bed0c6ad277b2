"""Force-directed energy with unit ideal edge length.

Edges contribute ``(d^2 - 1)^2`` and every unordered pair of distinct vertices
closer than 1 adds a flat penalty of 1.  A placement of zero energy draws every
edge with length exactly 1 and keeps all vertices at least 1 apart, which rules
out crossings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import crossing_count
from .errors import InvalidInputError
from .graph import Graph


@dataclass(frozen=True)
class Placement:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidInputError(f"placement must have shape (n, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("placement coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _as_points(g: Graph, pl) -> np.ndarray:
    pts = pl.points if isinstance(pl, Placement) else Placement(pl).points
    if pts.shape[0] != g.n:
        raise InvalidInputError(f"placement has {pts.shape[0]} points, graph has {g.n} vertices")
    return pts


def _pair_sq_distances(pts: np.ndarray) -> np.ndarray:
    i, j = np.triu_indices(len(pts), k=1)
    diff = pts[i] - pts[j]
    return np.einsum("ij,ij->i", diff, diff)


REPULSION_GUARD = 1e-12


def total_energy(g: Graph, pl, guard: float = REPULSION_GUARD) -> float:
    """Attractive plus repulsive energy.

    A pair counts as too close when ``d^2 < 1 - guard``; the guard absorbs
    rounding in coordinates such as ``sqrt(3)/2`` that are meant to sit at
    distance exactly 1.
    """
    pts = _as_points(g, pl)
    attract = 0.0
    if g.m:
        e = np.array(g.edges)
        diff = pts[e[:, 0]] - pts[e[:, 1]]
        d2 = np.einsum("ij,ij->i", diff, diff)
        attract = float(np.sum((d2 - 1.0) ** 2))
    repel = int(np.count_nonzero(_pair_sq_distances(pts) < 1.0 - guard))
    return attract + repel


def is_zero_energy(g: Graph, pl, tol: float = 1e-9) -> bool:
    """Zero energy up to ``tol`` on lengths; asserts the drawing is then crossing-free."""
    pts = _as_points(g, pl)
    if g.m:
        e = np.array(g.edges)
        lengths = np.hypot(*(pts[e[:, 0]] - pts[e[:, 1]]).T)
        if np.any(np.abs(lengths - 1.0) > tol):
            return False
    if np.any(np.sqrt(_pair_sq_distances(pts)) < 1.0 - tol):
        return False
    crossings = crossing_count(g, pts)
    assert crossings == 0, f"zero-energy placement has {crossings} crossings"
    return True
