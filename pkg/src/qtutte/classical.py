"""Classical reference solver and drawing checks.

Dense Cholesky stands in for near-linear Laplacian solvers: at the sizes we
simulate (a few hundred unknowns at most) an O(n^3) factorisation is instant
and exact enough to act as the oracle for the quantum path.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from .errors import InvalidInputError, NumericalFailure
from .graph import Embedding, Graph, PinMode, PinSpec, build_system

COLLINEAR_EPS = 1e-12


def solve_vector(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a x = b`` for symmetric positive definite ``a`` by Cholesky."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        factor = linalg.cho_factor(a, lower=True, check_finite=True)
    except linalg.LinAlgError as exc:
        raise NumericalFailure(f"matrix is not positive definite: {exc}") from None
    x = linalg.cho_solve(factor, b)
    scale = max(float(np.max(np.abs(b), initial=0.0)), np.finfo(float).tiny)
    if np.max(np.abs(a @ x - b), initial=0.0) > 1e-10 * scale:
        raise NumericalFailure("Cholesky solve left a residual above 1e-10 relative")
    return x


def solve(sys) -> tuple[np.ndarray, np.ndarray]:
    """Return the x- and y-coordinate vectors of a :class:`TutteSystem`."""
    return solve_vector(sys.a, sys.b_x), solve_vector(sys.a, sys.b_y)


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Rounds of disjoint index pairs covering every pair exactly once."""
    idx = list(range(n)) + ([-1] if n % 2 else [])
    size = len(idx)
    rounds = []
    for _ in range(size - 1):
        pairs = [(idx[i], idx[size - 1 - i]) for i in range(size // 2)]
        rounds.append([(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0])
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return rounds


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.

    Rotations are grouped into rounds of disjoint pivot pairs; the rotations in
    one round touch disjoint rows and columns so they are applied together.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidInputError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise InvalidInputError("matrix must be symmetric")
    if n <= 1:
        return np.diag(a).copy()
    rounds = [(np.array([p for p, _ in r]), np.array([q for _, q in r])) for r in _round_robin(n)]
    scale = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            diff = a[q, q] - a[p, p]
            t = np.zeros_like(apq)
            # tan of the rotation angle, smaller root; guarded when apq << diff
            big = np.abs(diff) > 1e150 * np.abs(apq)
            small = (apq != 0.0) & ~big
            t[big & (apq != 0.0)] = apq[big & (apq != 0.0)] / diff[big & (apq != 0.0)]
            tau = diff[small] / (2.0 * apq[small])
            t[small] = (np.sign(tau) + (tau == 0.0)) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            cols_p, cols_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * cols_p - s * cols_q
            a[:, q] = s * cols_p + c * cols_q
            rows_p, rows_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
    else:
        raise NumericalFailure("Jacobi iteration did not converge")
    return np.sort(np.diag(a))


def extreme_eigenvalues(a: np.ndarray, method: str = "jacobi") -> tuple[float, float]:
    if method == "jacobi":
        w = jacobi_eigenvalues(a)
    elif method == "lapack":
        w = np.linalg.eigvalsh(np.asarray(a, dtype=float))
    else:
        raise InvalidInputError(f"unknown eigenvalue method {method!r}")
    return float(w[0]), float(w[-1])


def condition_number(a: np.ndarray, method: str = "jacobi") -> float:
    """``lambda_max / lambda_min`` of a symmetric positive definite matrix."""
    lo, hi = extreme_eigenvalues(a, method)
    if lo <= 0.0:
        raise NumericalFailure(f"matrix is not positive definite (lambda_min = {lo:.3e})")
    return hi / lo


def barycenter_residual(g: Graph, pins: PinSpec, emb: Embedding) -> float:
    """Largest violation of the Tutte equations by ``emb``.

    HARD_PIN: ``max_u ||deg(u) p_u - sum_{v in N(u)} p_v||_inf`` over free
    vertices.  SOFT_GROUND: infinity-norm residual of the grounded system.
    """
    p = np.asarray(emb.coords, dtype=float)
    if p.shape[0] != g.n:
        raise InvalidInputError(f"embedding has {p.shape[0]} vertices, graph has {g.n}")
    if pins.mode is PinMode.SOFT_GROUND:
        sys = build_system(g, pins)
        rx = sys.a @ p[:, 0] - sys.b_x
        ry = sys.a @ p[:, 1] - sys.b_y
        return float(max(np.max(np.abs(rx)), np.max(np.abs(ry))))
    pinned = set(pins.indices)
    worst = 0.0
    for u in range(g.n):
        if u in pinned:
            continue
        nb = list(g.adjacency[u])
        r = len(nb) * p[u] - p[nb].sum(axis=0)
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def _sign(v: np.ndarray) -> np.ndarray:
    return np.where(np.abs(v) <= COLLINEAR_EPS, 0, np.sign(v)).astype(int)


def crossing_count(g: Graph, emb: Embedding | np.ndarray) -> int:
    """Pairs of vertex-disjoint edges whose closed segments intersect."""
    p = np.asarray(emb.coords if isinstance(emb, Embedding) else emb, dtype=float)
    if g.m < 2:
        return 0
    e = np.array(g.edges)
    i, j = np.triu_indices(len(e), k=1)
    a, b = e[i], e[j]
    disjoint = ((a[:, 0] != b[:, 0]) & (a[:, 0] != b[:, 1])
                & (a[:, 1] != b[:, 0]) & (a[:, 1] != b[:, 1]))
    a, b = a[disjoint], b[disjoint]
    if len(a) == 0:
        return 0
    p1, p2, p3, p4 = p[a[:, 0]], p[a[:, 1]], p[b[:, 0]], p[b[:, 1]]

    def cross(o, u, v):
        return (u[:, 0] - o[:, 0]) * (v[:, 1] - o[:, 1]) - (u[:, 1] - o[:, 1]) * (v[:, 0] - o[:, 0])

    def on_segment(o, u, v):
        # v collinear with o-u; is it within the bounding box?
        return ((np.minimum(o[:, 0], u[:, 0]) - COLLINEAR_EPS <= v[:, 0])
                & (v[:, 0] <= np.maximum(o[:, 0], u[:, 0]) + COLLINEAR_EPS)
                & (np.minimum(o[:, 1], u[:, 1]) - COLLINEAR_EPS <= v[:, 1])
                & (v[:, 1] <= np.maximum(o[:, 1], u[:, 1]) + COLLINEAR_EPS))

    d1 = _sign(cross(p3, p4, p1))
    d2 = _sign(cross(p3, p4, p2))
    d3 = _sign(cross(p1, p2, p3))
    d4 = _sign(cross(p1, p2, p4))
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    touch = (((d1 == 0) & on_segment(p3, p4, p1)) | ((d2 == 0) & on_segment(p3, p4, p2))
             | ((d3 == 0) & on_segment(p1, p2, p3)) | ((d4 == 0) & on_segment(p1, p2, p4)))
    return int(np.count_nonzero(proper | touch))
