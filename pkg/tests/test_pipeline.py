import xml.etree.ElementTree as ET

import numpy as np
import pytest

from qtutte.errors import InvalidInputError
from qtutte.generators import convex_hull, random_planar_delaunay
from qtutte.graph import Embedding, Graph, PinSpec, regular_polygon_pins, soft_ground_instance
from qtutte.hhl import HHLConfig
from qtutte.pipeline import (condition_number_study, default_pins, draw, emit_csv, emit_svg,
                             format_embedding_csv, format_study_csv, loglog_slope,
                             parse_embedding_csv, read_embedding_csv)


def hull_pins(n, seed):
    g, pts = random_planar_delaunay(n, seed)
    return g, regular_polygon_pins(list(range(len(convex_hull(pts)))))


def test_classical_draw_is_planar():
    g, pins = hull_pins(20, 2)
    emb, report = draw(g, pins)
    assert report["crossings"] == 0 and report["residual"] <= 1e-9
    assert emb.n == 20 and emb.source == "classical"


def test_soft_ground_draw_strips_dummies():
    g = Graph(4, ((0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3)))
    emb, report = draw(*soft_ground_instance(g))
    assert emb.n == 4 and report["n"] == 4 and report["dim"] == 7
    # one interior vertex strictly inside the outer triangle
    outer = emb.coords[:3]
    inner = emb.coords[3]
    def side(i):
        (ax, ay), (bx, by) = outer[(i + 1) % 3] - outer[i], inner - outer[i]
        return np.sign(ax * by - ay * bx)

    signs = [side(i) for i in range(3)]
    assert len(set(signs)) == 1 and signs[0] != 0
    assert report["crossings"] == 0


def test_quantum_draw_tracks_classical():
    g, _ = random_planar_delaunay(8, 1)
    emb, report = draw(*soft_ground_instance(g), backend="quantum", cfg=HHLConfig(r=8))
    assert emb.source == "quantum"
    assert report["max_deviation"] <= 0.05 and report["fidelity"] >= 0.99


def test_draw_rejects_unknown_backend():
    g, pins = hull_pins(6, 0)
    with pytest.raises(InvalidInputError):
        draw(g, pins, backend="analog")


def test_default_pins():
    g, _ = random_planar_delaunay(7, 0)
    gg, pins = default_pins(g)
    assert gg.n == 10 and pins == PinSpec.soft_ground()
    gg, pins = default_pins(g, 3)
    assert gg is g and pins.indices == (0, 1, 2)
    with pytest.raises(InvalidInputError):
        default_pins(g, 2)


def test_study_identity_hook_and_determinism():
    t = condition_number_study(["planar", "grid"], [8, 16], 2, 5,
                               matrix_hook=lambda a: np.eye(len(a)))
    assert all(r.kappa_mean == 1.0 for r in t.rows)
    a = condition_number_study(["planar"], [8], 1, 11)
    b = condition_number_study(["planar"], [8], 1, 11)
    assert format_study_csv(a) == format_study_csv(b)


def test_study_skips_disconnected():
    # at n = 16 about one random graph in ten is disconnected
    t = condition_number_study(["random"], [16], 20, 7)
    row = t.row("random", 16)
    assert row.samples + row.skipped == 20 and row.skipped >= 1
    assert len(t.skipped) == row.skipped
    assert all(why == "disconnected" for *_, why in t.skipped)


def test_loglog_slope():
    assert loglog_slope([1, 2, 4], [3, 6, 12]) == pytest.approx(1.0)
    assert np.isnan(loglog_slope([1], [1]))


def test_csv_format_and_round_trip(tmp_path):
    assert format_embedding_csv(Embedding(np.array([[0.5, 0.5]]))) == "vertex,x,y\n0,0.5,0.5\n"
    rng = np.random.default_rng(0)
    emb = Embedding(rng.random((7, 2)))
    path = tmp_path / "e.csv"
    emit_csv(emb, path)
    back = read_embedding_csv(path)
    np.testing.assert_allclose(back.coords, emb.coords, rtol=1e-11)
    assert format_embedding_csv(back) == path.read_text()
    with pytest.raises(InvalidInputError):
        parse_embedding_csv("a,b\n")


def test_svg_is_well_formed(tmp_path):
    g, pins = hull_pins(9, 4)
    emb, _ = draw(g, pins)
    path = tmp_path / "d.svg"
    emit_svg(g, emb, path)
    root = ET.parse(path).getroot()
    ns = "{http://www.w3.org/2000/svg}"
    assert root.get("viewBox") == "0 0 800 800"
    circles = root.findall(f".//{ns}circle")
    lines = root.findall(f".//{ns}line")
    assert len(circles) == 9 and len(lines) == g.m
    xs = [float(c.get("cx")) for c in circles]
    assert min(xs) >= 40 - 1e-9 and max(xs) <= 760 + 1e-9
    assert all(c.get("r") == "6" for c in circles)


def test_emit_to_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit_csv(Embedding(np.zeros((1, 2))), tmp_path / "missing" / "x.csv")
