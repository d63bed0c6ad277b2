"""Command line entry point ``qtutte``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import warnings
from pathlib import Path

from .classical import crossing_count
from .energy import is_zero_energy, total_energy
from .errors import DegradedAccuracyWarning, InvalidInputError, NumericalFailure
from .generators import GRAPH_CLASSES, generate
from .graph import format_graph, read_graph
from .hhl import HHLConfig
from .pipeline import (condition_number_study, default_pins, draw, emit_csv, emit_svg,
                       read_embedding_csv)
from .rng import DEFAULT_SEED

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def default_seed() -> int:
    raw = os.environ.get("QTUTTE_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError:
        raise InvalidInputError(f"QTUTTE_SEED must be an integer, got {raw!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _class_list(text: str) -> list[str]:
    out = [tok for tok in text.replace(",", " ").split()]
    for tok in out:
        if tok not in GRAPH_CLASSES:
            raise argparse.ArgumentTypeError(f"unknown class {tok!r}; choose from {GRAPH_CLASSES}")
    return out


def _hhl_config(args) -> HHLConfig:
    base = HHLConfig.load(args.config).to_dict() if getattr(args, "config", None) else {}
    for key in ("mode", "r", "epsilon"):
        value = getattr(args, key, None)
        if value is not None:
            base[key] = value
    if getattr(args, "seed", None) is not None:
        base["seed"] = args.seed
    return HHLConfig.from_mapping(base)


def _write_json(data: dict, path: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True, default=float) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    g = generate(args.graph_class, args.n, seed)
    text = format_graph(g, [f"class={args.graph_class} n={args.n} seed={seed}"])
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_draw(args) -> int:
    g = read_graph(args.input)
    cfg = _hhl_config(args)
    gg, pins = default_pins(g, args.pin_cycle)
    emb, report = draw(gg, pins, args.backend, cfg)
    if args.csv:
        emit_csv(emb, args.csv)
    if args.svg:
        emit_svg(g, emb, args.svg)
    _write_json(report, None)
    return EXIT_OK


def cmd_study(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    table = condition_number_study(args.classes, args.sizes, args.samples, seed)
    if args.out:
        emit_csv(table, args.out)
    for row in table.rows:
        print(f"{row.graph_class:9s} n={row.n:<4d} kappa={row.kappa_mean:10.3f} "
              f"+- {row.kappa_std:8.3f} ({row.samples} samples, {row.skipped} skipped)")
    for cls, slope in table.slopes.items():
        print(f"slope {cls}: {slope:.3f}")
    return EXIT_OK


def cmd_validate(args) -> int:
    g = read_graph(args.input)
    emb = read_embedding_csv(args.csv)
    if emb.n != g.n:
        raise InvalidInputError(f"embedding has {emb.n} vertices, graph has {g.n}")
    report = {
        "n": g.n,
        "energy": total_energy(g, emb.coords),
        "zero_energy": is_zero_energy(g, emb.coords),
        "crossings": crossing_count(g, emb),
    }
    _write_json(report, None)
    return EXIT_OK


def cmd_compare(args) -> int:
    g = read_graph(args.input)
    cfg = _hhl_config(args)
    gg, pins = default_pins(g, args.pin_cycle)
    _, classical_report = draw(gg, pins, "classical", cfg)
    _, quantum_report = draw(gg, pins, "quantum", cfg)
    report = {"config": dataclasses.asdict(cfg), "classical": classical_report,
              "quantum": quantum_report}
    _write_json(report, args.report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtutte", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded graph")
    p.add_argument("--class", dest="graph_class", choices=GRAPH_CLASSES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    def solver_flags(p, backend: bool):
        p.add_argument("--in", dest="input", required=True)
        if backend:
            p.add_argument("--backend", choices=("classical", "quantum"), default="classical")
        p.add_argument("--mode", choices=("oracle", "strict"))
        p.add_argument("--r", type=int)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--config", help="JSON file with HHL settings")
        p.add_argument("--pin-cycle", type=int, metavar="K",
                       help="pin vertices 0..K-1 on a regular polygon instead of soft grounding")

    p = sub.add_parser("draw", help="compute a Tutte drawing")
    solver_flags(p, backend=True)
    p.add_argument("--svg")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_draw)

    p = sub.add_parser("study", help="condition-number scaling study")
    p.add_argument("--classes", type=_class_list, default=list(GRAPH_CLASSES))
    p.add_argument("--sizes", type=_int_list, default=[8, 16, 32, 64])
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("validate", help="energy and crossing checks of a drawing")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="classical versus quantum drawing report")
    solver_flags(p, backend=False)
    p.add_argument("--report")
    p.set_defaults(func=cmd_compare)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", DegradedAccuracyWarning)
            warnings.showwarning = _show_warning
            return args.func(args)
    except (InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
