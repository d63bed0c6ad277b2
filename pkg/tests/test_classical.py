import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtutte.classical import (barycenter_residual, condition_number, crossing_count,
                              extreme_eigenvalues, jacobi_eigenvalues, solve, solve_vector,
                              _round_robin)
from qtutte.errors import InvalidInputError, NumericalFailure
from qtutte.graph import Embedding, Graph, PinSpec, build_system, soft_ground_instance
from qtutte.generators import generate, random_planar_delaunay
from oracles import exact_solve, segments_cross

TRIANGLE = Graph(3, ((0, 1), (1, 2), (0, 2)))


def test_triangle_soft_ground_solution():
    x, y = solve(build_system(TRIANGLE, PinSpec.soft_ground()))
    np.testing.assert_allclose(x, [0.25, 0.25, 0.5], atol=1e-14)
    np.testing.assert_allclose(y, [0.25, 0.5, 0.25], atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**32))
def test_solve_matches_rational_elimination(n, seed):
    g, _ = random_planar_delaunay(n, seed)
    sys = build_system(*soft_ground_instance(g))
    x = solve_vector(sys.a, sys.b_x)
    ref = np.array([float(v) for v in exact_solve(sys.a.tolist(), sys.b_x.tolist())])
    np.testing.assert_allclose(x, ref, atol=1e-12)


def test_solve_rejects_indefinite():
    with pytest.raises(NumericalFailure):
        solve_vector(np.array([[1.0, 2.0], [2.0, 1.0]]), np.ones(2))


def test_round_robin_covers_pairs_once():
    for n in (2, 5, 8, 9):
        rounds = _round_robin(n)
        pairs = [p for r in rounds for p in r]
        assert len(pairs) == len(set(pairs)) == n * (n - 1) // 2
        for r in rounds:
            flat = [v for p in r for v in p]
            assert len(flat) == len(set(flat))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32))
def test_jacobi_matches_lapack(n, seed):
    m = np.random.default_rng(seed).normal(size=(n, n))
    a = m + m.T
    np.testing.assert_allclose(jacobi_eigenvalues(a), np.linalg.eigvalsh(a),
                               atol=1e-10 * max(1.0, np.abs(a).max()))


def test_jacobi_on_grounded_laplacians():
    for cls in ("planar", "grid", "expander", "random"):
        g = generate(cls, 64, 5)
        if not g.is_connected():
            continue
        a = build_system(*soft_ground_instance(g)).a
        w = np.linalg.eigvalsh(a)
        np.testing.assert_allclose(jacobi_eigenvalues(a), w, rtol=1e-9, atol=1e-12)


def test_condition_number_values():
    assert condition_number(np.diag([2.0, 10.0])) == pytest.approx(5.0)
    sys = build_system(TRIANGLE, PinSpec.soft_ground())
    assert condition_number(sys.a) == pytest.approx(4.0)
    assert extreme_eigenvalues(sys.a, "lapack") == pytest.approx((1.0, 4.0))
    with pytest.raises(NumericalFailure):
        condition_number(np.diag([-1.0, 1.0]))
    with pytest.raises(InvalidInputError):
        jacobi_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_barycenter_residual_zero_at_solution():
    g, pts = random_planar_delaunay(12, 4)
    from qtutte.generators import convex_hull
    from qtutte.graph import regular_polygon_pins, solution_to_coords
    pins = regular_polygon_pins(list(range(len(convex_hull(pts)))))
    sys = build_system(g, pins)
    x, y = solve(sys)
    coords = solution_to_coords(g, pins, sys, x, y)
    assert barycenter_residual(g, pins, Embedding(coords)) <= 1e-12
    coords[-1] += 0.1
    assert barycenter_residual(g, pins, Embedding(coords)) > 0.1


def test_crossing_count_basic():
    square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    both_diagonals = Graph(4, ((0, 2), (1, 3)))
    assert crossing_count(both_diagonals, square) == 1
    assert crossing_count(Graph(4, ((0, 1), (1, 2), (2, 3), (0, 3))), square) == 0
    # T-junction: endpoint of one edge on the interior of the other
    t = np.array([[0, 0], [2, 0], [1, 0], [1, 1]], dtype=float)
    assert crossing_count(Graph(4, ((0, 1), (2, 3))), t) == 1
    # collinear overlap
    c = np.array([[0, 0], [2, 0], [1, 0], [3, 0]], dtype=float)
    assert crossing_count(Graph(4, ((0, 1), (2, 3))), c) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 10), st.integers(0, 2**32))
def test_crossing_count_matches_parametric_oracle(n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    g = Graph(n, tuple(pairs))
    ref = 0
    for a in range(g.m):
        for b in range(a + 1, g.m):
            (u, v), (s, t) = g.edges[a], g.edges[b]
            if len({u, v, s, t}) == 4 and segments_cross(pts[u], pts[v], pts[s], pts[t]):
                ref += 1
    assert crossing_count(g, pts) == ref
