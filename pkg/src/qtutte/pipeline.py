"""Drawing pipeline, condition-number study and file output."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import classical
from .errors import InvalidInputError
from .generators import GRAPH_CLASSES, generate
from .graph import (Embedding, Graph, PinMode, PinSpec, build_system, soft_ground_instance,
                    solution_to_coords)
from .hhl import HHLConfig, solve_hhl
from .rng import DEFAULT_SEED, derive_seed

BACKENDS = ("classical", "quantum")
N_DUMMY = 3


# -- drawing ----------------------------------------------------------------

def _solve_axes(sys, backend: str, cfg: HHLConfig):
    if backend == "classical":
        x, y = classical.solve(sys)
        return x, y, None
    with ThreadPoolExecutor(max_workers=2) as pool:
        fx = pool.submit(solve_hhl, sys, "x", cfg)
        fy = pool.submit(solve_hhl, sys, "y", cfg)
        rx, ry = fx.result(), fy.result()
    return rx.solution, ry.solution, (rx, ry)


def draw(g: Graph, pins: PinSpec, backend: str = "classical",
         cfg: HHLConfig | None = None) -> tuple[Embedding, dict]:
    """Tutte drawing of ``g`` with the given pins.

    For SOFT_GROUND pins ``g`` must already carry the dummy triangle at
    vertices 0-2 (see :func:`soft_ground_instance`); the dummies are dropped
    from the returned embedding.  The report compares against the classical
    solve whatever the backend.
    """
    if backend not in BACKENDS:
        raise InvalidInputError(f"backend must be one of {BACKENDS}, got {backend!r}")
    cfg = cfg or HHLConfig()
    start = time.perf_counter()
    sys = build_system(g, pins)
    x, y, results = _solve_axes(sys, backend, cfg)
    wall = time.perf_counter() - start

    coords = solution_to_coords(g, pins, sys, x, y)
    residual = classical.barycenter_residual(g, pins, Embedding(coords))
    if backend == "classical":
        reference = coords
    else:
        cx, cy = classical.solve(sys)
        reference = solution_to_coords(g, pins, sys, cx, cy)

    if pins.mode is PinMode.SOFT_GROUND:
        keep = list(range(N_DUMMY, g.n))
        drawn = g.induced(keep)
        coords, reference = coords[keep], reference[keep]
    else:
        drawn = g

    report = {
        "backend": backend,
        "mode": pins.mode.value,
        "n": drawn.n,
        "dim": sys.dim,
        "residual": residual,
        "crossings": classical.crossing_count(drawn, coords),
        "wall_time": wall,
        "max_deviation": float(np.max(np.abs(coords - reference), initial=0.0)),
    }
    if results is not None:
        rx, ry = results
        report.update({
            "hhl_mode": cfg.mode,
            "r": cfg.r,
            "fidelity": min(rx.fidelity_vs_classical, ry.fidelity_vs_classical),
            "fidelity_x": rx.fidelity_vs_classical,
            "fidelity_y": ry.fidelity_vs_classical,
            "success_probability_x": rx.success_probability,
            "success_probability_y": ry.success_probability,
            "qubits": rx.qubits,
        })
    source = "classical" if backend == "classical" else "quantum"
    return Embedding(coords, source, report), report


def default_pins(g: Graph, pin_cycle: int | None = None) -> tuple[Graph, PinSpec]:
    """Graph and pins used by the CLI.

    Without ``pin_cycle`` the soft-grounded construction is used on outer
    vertices 0, 1, 2.  With ``pin_cycle = k`` vertices ``0 .. k-1`` are pinned
    on a regular k-gon (generated planar graphs list their hull first).
    """
    if pin_cycle is None:
        return soft_ground_instance(g)
    from .graph import regular_polygon_pins

    if not 3 <= pin_cycle <= g.n:
        raise InvalidInputError(f"pin cycle length must lie in [3, {g.n}], got {pin_cycle}")
    return g, regular_polygon_pins(list(range(pin_cycle)))


# -- condition-number study -------------------------------------------------

@dataclass
class StudyRow:
    graph_class: str
    n: int
    vertices: float
    samples: int
    skipped: int
    kappa_mean: float
    kappa_std: float


@dataclass
class StudyTable:
    rows: list[StudyRow]
    slopes: dict[str, float]
    skipped: list[tuple[str, int, int, str]] = field(default_factory=list)

    def row(self, graph_class: str, n: int) -> StudyRow:
        for r in self.rows:
            if r.graph_class == graph_class and r.n == n:
                return r
        raise KeyError((graph_class, n))


MatrixHook = Callable[[np.ndarray], np.ndarray]


def _study_sample(cls: str, n: int, sample: int, seed: int, hook: MatrixHook | None):
    g = generate(cls, n, derive_seed(seed, GRAPH_CLASSES.index(cls), n, sample))
    if g.n < 3 or not g.is_connected():
        return None, g.n, "disconnected" if g.n >= 3 else "too small"
    sys = build_system(*soft_ground_instance(g))
    a = sys.a if hook is None else hook(np.array(sys.a))
    return classical.condition_number(a), g.n, ""


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    if len(x) < 2:
        return math.nan
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def condition_number_study(classes: Sequence[str], sizes: Sequence[int], samples: int,
                           seed: int = DEFAULT_SEED, *, matrix_hook: MatrixHook | None = None,
                           workers: int | None = None) -> StudyTable:
    """Mean and spread of the soft-grounded condition number per class and size.

    Disconnected samples are skipped and listed in ``skipped``.  The slope per
    class is fitted against the mean vertex count actually generated, which
    differs from ``n`` for grids and expanders.
    """
    for cls in classes:
        if cls not in GRAPH_CLASSES:
            raise InvalidInputError(f"unknown graph class {cls!r}")
    if samples < 1:
        raise InvalidInputError("need at least one sample per point")
    jobs = [(cls, n, s) for cls in classes for n in sizes for s in range(samples)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        out = list(pool.map(lambda j: _study_sample(*j, seed, matrix_hook), jobs))

    rows, skipped = [], []
    slopes = {}
    for cls in classes:
        xs, ys = [], []
        for n in sizes:
            kappas, verts = [], []
            for (c, nn, s), (kappa, nv, why) in zip(jobs, out):
                if c != cls or nn != n:
                    continue
                if kappa is None:
                    skipped.append((cls, n, s, why))
                else:
                    kappas.append(kappa)
                    verts.append(nv)
            if not kappas:
                rows.append(StudyRow(cls, n, math.nan, 0, samples, math.nan, math.nan))
                continue
            k = np.array(kappas)
            rows.append(StudyRow(cls, n, float(np.mean(verts)), len(k), samples - len(k),
                                 float(k.mean()), float(k.std(ddof=1)) if len(k) > 1 else 0.0))
            xs.append(float(np.mean(verts)))
            ys.append(float(k.mean()))
        slopes[cls] = loglog_slope(xs, ys)
    return StudyTable(rows, slopes, skipped)


# -- output -----------------------------------------------------------------

STUDY_HEADER = ("class", "n", "vertices", "samples", "skipped", "kappa_mean", "kappa_std")


def format_study_csv(table: StudyTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STUDY_HEADER)
    for r in table.rows:
        w.writerow((r.graph_class, r.n, f"{r.vertices:.12g}", r.samples, r.skipped,
                    f"{r.kappa_mean:.12g}", f"{r.kappa_std:.12g}"))
    return buf.getvalue()


def format_embedding_csv(emb: Embedding) -> str:
    lines = ["vertex,x,y"]
    lines += [f"{i},{x:.12g},{y:.12g}" for i, (x, y) in enumerate(emb.coords)]
    return "\n".join(lines) + "\n"


def emit_csv(obj: Embedding | StudyTable, path: str | Path) -> None:
    text = format_study_csv(obj) if isinstance(obj, StudyTable) else format_embedding_csv(obj)
    Path(path).write_text(text, encoding="ascii")


def parse_embedding_csv(text: str) -> Embedding:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["vertex", "x", "y"]:
        raise InvalidInputError("embedding CSV must start with the header vertex,x,y")
    body = [r for r in rows[1:] if r]
    try:
        idx = [int(r[0]) for r in body]
        coords = np.array([[float(r[1]), float(r[2])] for r in body]).reshape(-1, 2)
    except (ValueError, IndexError) as exc:
        raise InvalidInputError(f"malformed embedding CSV: {exc}") from None
    if idx != list(range(len(idx))):
        raise InvalidInputError("embedding CSV rows must list vertices 0..n-1 in order")
    return Embedding(coords)


def read_embedding_csv(path: str | Path) -> Embedding:
    return parse_embedding_csv(Path(path).read_text(encoding="ascii"))


SVG_SIZE = 800
SVG_MARGIN = 40


def format_svg(g: Graph, emb: Embedding) -> str:
    """Unit-square drawing on an 800x800 canvas; y grows upwards in the drawing."""
    if emb.n != g.n:
        raise InvalidInputError(f"embedding has {emb.n} vertices, graph has {g.n}")
    span = SVG_SIZE - 2 * SVG_MARGIN
    px = SVG_MARGIN + span * emb.x
    py = SVG_SIZE - SVG_MARGIN - span * emb.y
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}" '
           f'width="{SVG_SIZE}" height="{SVG_SIZE}">',
           f'<g stroke="black" stroke-width="2">']
    for u, v in g.edges:
        out.append(f'<line x1="{px[u]:.3f}" y1="{py[u]:.3f}" x2="{px[v]:.3f}" y2="{py[v]:.3f}"/>')
    out.append('</g>')
    out.append('<g fill="steelblue">')
    for i in range(g.n):
        out.append(f'<circle cx="{px[i]:.3f}" cy="{py[i]:.3f}" r="6">'
                   f'<title>{escape(str(i))}</title></circle>')
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def emit_svg(g: Graph, emb: Embedding, path: str | Path) -> None:
    Path(path).write_text(format_svg(g, emb), encoding="ascii")
