import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtutte.errors import InvalidInputError
from qtutte.graph import (Embedding, Graph, PinMode, PinSpec, add_dummy_outer_face,
                          build_system, format_graph, laplacian, parse_graph,
                          read_graph, regular_polygon_pins, soft_ground_instance,
                          solution_to_coords, write_graph)

TRIANGLE = Graph(3, ((0, 1), (1, 2), (0, 2)))


def test_edges_are_normalised():
    g = Graph(4, ((3, 1), (0, 2), (1, 0)))
    assert g.edges == ((0, 1), (0, 2), (1, 3))
    assert g.adjacency == ((1, 2), (0, 3), (0,), (1,))
    assert g.max_degree == 2 and g.m == 3


@pytest.mark.parametrize("edges", [((0, 0),), ((0, 1), (1, 0)), ((0, 5),)])
def test_bad_edges_rejected(edges):
    with pytest.raises(InvalidInputError):
        Graph(3, edges)


def test_simple_drops_loops_and_repeats():
    assert Graph.simple(3, [(0, 0), (0, 1), (1, 0), (2, 1)]).edges == ((0, 1), (1, 2))


def test_connectivity_and_induced():
    g = Graph(4, ((0, 1), (2, 3)))
    assert not g.is_connected()
    assert Graph(4, ((0, 1), (1, 2), (2, 3))).is_connected()
    h = Graph(4, ((0, 1), (1, 2), (2, 3))).induced([3, 2, 1])
    assert h.edges == ((0, 1), (1, 2))


@given(st.integers(2, 12), st.data())
def test_laplacian_rows_sum_to_zero(n, data):
    pairs = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=30))
    g = Graph.simple(n, pairs)
    lap = laplacian(g)
    np.testing.assert_array_equal(lap, lap.T)
    np.testing.assert_allclose(lap.sum(axis=1), 0.0)
    np.testing.assert_array_equal(np.diag(lap), g.degrees())


def test_soft_ground_triangle_system():
    sys = build_system(TRIANGLE, PinSpec.soft_ground())
    expected = np.array([[3, -1, -1], [-1, 3, -1], [-1, -1, 3]], dtype=float)
    np.testing.assert_array_equal(sys.a, expected)
    np.testing.assert_array_equal(sys.b_x, [0, 0, 1])
    np.testing.assert_array_equal(sys.b_y, [0, 1, 0])
    assert sys.mode is PinMode.SOFT_GROUND


def test_soft_ground_requires_fixed_pins():
    with pytest.raises(InvalidInputError):
        build_system(TRIANGLE, PinSpec(((0, 0.0, 0.0), (1, 1.0, 1.0), (2, 1.0, 0.0)),
                                       PinMode.SOFT_GROUND))


def test_dummy_outer_face_shifts_vertices():
    g = Graph(4, ((0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)))
    aug, index_map = add_dummy_outer_face(g, (2, 0, 1))
    assert aug.n == 7 and index_map == (3, 4, 5, 6)
    assert aug.has_edge(0, 5) and aug.has_edge(1, 3) and aug.has_edge(2, 4)
    assert aug.m == g.m + 6


def test_hard_pin_system_and_coords():
    # wheel: hub 4 in the middle of a pinned square
    g = Graph(5, ((0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4)))
    pins = PinSpec.hard([(0, 0, 0), (1, 0, 1), (2, 1, 1), (3, 1, 0)])
    sys = build_system(g, pins)
    assert sys.dim == 1 and sys.free_index_map == (4,)
    np.testing.assert_array_equal(sys.a, [[4.0]])
    np.testing.assert_array_equal(sys.b_x, [2.0])
    coords = solution_to_coords(g, pins, sys, sys.b_x / 4, sys.b_y / 4)
    np.testing.assert_allclose(coords[4], [0.5, 0.5])
    np.testing.assert_allclose(coords[2], [1, 1])


def test_build_system_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        build_system(Graph(4, ((0, 1), (1, 2), (0, 2))), PinSpec.soft_ground())
    with pytest.raises(InvalidInputError):
        build_system(TRIANGLE, PinSpec.hard([(0, 0, 0), (1, 0, 1), (2, 1, 0)]))
    with pytest.raises(InvalidInputError):
        build_system(TRIANGLE, PinSpec.hard([(0, 0, 0), (0, 1, 1)]))


def test_regular_polygon_pins_start_bottom_left_clockwise():
    spec = regular_polygon_pins([5, 6, 7, 8])
    pts = np.array([(x, y) for _, x, y in spec.pinned])
    assert spec.indices == (5, 6, 7, 8)
    np.testing.assert_allclose(np.hypot(*(pts - 0.5).T), 0.5)
    assert pts[0, 0] < 0.5 and pts[0, 1] < 0.5
    signed = np.sum(pts[:, 0] * np.roll(pts[:, 1], -1) - np.roll(pts[:, 0], -1) * pts[:, 1])
    assert signed < 0  # clockwise


def test_graph_text_round_trip(tmp_path):
    g, _ = soft_ground_instance(Graph(4, ((0, 1), (1, 2), (2, 3), (0, 3), (0, 2))))
    path = tmp_path / "g.txt"
    write_graph(g, path, ["note"])
    assert read_graph(path) == g
    assert parse_graph(format_graph(g)) == g


@pytest.mark.parametrize("text", ["", "3 2\n0 1\n", "2 1\n0 x\n", "3 1\n0 1 2\n"])
def test_parse_graph_errors(text):
    with pytest.raises(InvalidInputError):
        parse_graph(text)


def test_embedding_validation():
    e = Embedding(np.zeros((3, 2)))
    assert e.n == 3 and e.source == "classical"
    with pytest.raises(InvalidInputError):
        Embedding(np.zeros(3))
    with pytest.raises(InvalidInputError):
        Embedding(np.zeros((3, 2)), source="other")


def test_system_arrays_are_read_only():
    sys = build_system(TRIANGLE, PinSpec.soft_ground())
    with pytest.raises(ValueError):
        sys.a[0, 0] = 7.0
    rows, cols, vals = sys.triplets()
    assert len(vals) == 9
    assert sys.pattern_graph().edges == TRIANGLE.edges


def test_dummy_face_on_triangle():
    aug, _ = add_dummy_outer_face(TRIANGLE, (0, 1, 2))
    assert aug.n == 6 and aug.m == 9
    assert aug.has_edge(0, 1) and aug.has_edge(1, 2) and aug.has_edge(0, 2)
    with pytest.raises(InvalidInputError):
        add_dummy_outer_face(TRIANGLE, (0, 0, 1))


def test_laplacian_examples():
    np.testing.assert_array_equal(laplacian(Graph(2)), np.zeros((2, 2)))
    np.testing.assert_array_equal(laplacian(Graph(3, ((0, 1), (1, 2)))),
                                  [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])


def test_hard_pin_single_free_vertex():
    g = Graph(4, ((0, 3), (1, 3), (2, 3), (0, 1), (1, 2)))
    sys = build_system(g, PinSpec.hard([(0, 0, 0), (1, 1, 0), (2, 0, 1)]))
    np.testing.assert_array_equal(sys.a, [[3.0]])
    np.testing.assert_array_equal(sys.b_x, [1.0])
    np.testing.assert_array_equal(sys.b_y, [1.0])


def test_system_invariants_on_generated_graphs():
    from qtutte.generators import GRAPH_CLASSES, convex_hull, generate, random_planar_delaunay

    checked = 0
    for seed in range(30):
        for cls in GRAPH_CLASSES:
            g = generate(cls, 2 * (3 + seed) if cls == "grid" else 6 + seed, seed)
            if not g.is_connected():
                continue
            aug, pins = soft_ground_instance(g)
            sys = build_system(aug, pins)
            a = sys.a
            assert sys.dim == aug.n
            np.testing.assert_array_equal(a, a.T)
            off = np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))
            assert np.all(np.diag(a) >= off)
            assert np.linalg.eigvalsh(a)[0] > 0
            assert np.max(np.count_nonzero(a, axis=1)) <= aug.max_degree + 1
            checked += 1
        g, pts = random_planar_delaunay(8 + seed, seed)
        pins = regular_polygon_pins(list(range(len(convex_hull(pts)))))
        if len(pins.pinned) == g.n:
            continue
        sys = build_system(g, pins)
        pinned = set(pins.indices)
        for row, u in enumerate(sys.free_index_map):
            if not pinned.intersection(g.adjacency[u]):
                assert sys.b_x[row] == 0 and sys.b_y[row] == 0
        assert np.linalg.eigvalsh(sys.a)[0] > 0
        checked += 1
    assert checked >= 100
