"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 parse or config error, 3 numeric failure,
4 verification finished with violations.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .engine import CapacityError, Classifier, SemigroupError, enumerate_words
from .expr import ParseError, parse_function
from .grid import classify_grid, dump_lines, extract_boundary, render
from .maxmod import CircleSampling, ThresholdNotFound, find_threshold_R, mm_tower
from .verify import InvalidThreshold, run_all

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC, EXIT_VIOLATIONS = 0, 1, 2, 3, 4

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_POINT_FULL = re.compile(rf"([+-]?{_NUM})\s*([+-])\s*({_NUM})?i")
_POINT_REAL = re.compile(rf"[+-]?{_NUM}")
_POINT_IMAG = re.compile(rf"([+-]?)({_NUM})?i")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_point(text: str) -> complex:
    """``a+bi``, ``a-bi``, ``a`` or ``bi`` with decimal parts."""
    t = text.strip()
    if m := _POINT_FULL.fullmatch(t):
        im = float(m.group(3) or 1.0)
        return complex(float(m.group(1)), -im if m.group(2) == "-" else im)
    if _POINT_REAL.fullmatch(t):
        return complex(float(t), 0.0)
    if m := _POINT_IMAG.fullmatch(t):
        im = float(m.group(2) or 1.0)
        return complex(0.0, -im if m.group(1) == "-" else im)
    raise ValueError(f"bad point {text!r}; expected a+bi")


def _radius_arg(text: str) -> float | None:
    if text == "auto":
        return None
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise ValueError("radius must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fastescape", description="Escaping and fast escaping sets of transcendental semigroups.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("render", help="classify a grid and write PPM images")
    r.add_argument("config")
    r.add_argument("-o", "--output", required=True)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--dump", help="write per-cell classifications here")

    c = sub.add_parser("classify", help="classify one point")
    c.add_argument("config")
    c.add_argument("--point", required=True)

    v = sub.add_parser("verify", help="run the property checks on sampled points")
    v.add_argument("config")
    v.add_argument("--points", type=int, default=1000)
    v.add_argument("--report", required=True)

    m = sub.add_parser("mm", help="print a max-modulus tower")
    m.add_argument("--function", required=True)
    m.add_argument("--radius", default="auto")
    m.add_argument("--depth", type=int, required=True)
    m.add_argument("--samples", type=int, default=4096)

    w = sub.add_parser("words", help="list words over k generators")
    w.add_argument("--generators", type=int, required=True)
    w.add_argument("--depth", type=int, required=True)
    return p


def _render(args, rc: RunConfig, out) -> int:
    S, cfg = rc.semigroup(), rc.classifier_config()
    nx, ny = rc.grid
    grid = classify_grid(S, rc.window_obj(), nx, ny, cfg, workers=max(1, args.workers))
    path = Path(args.output)
    path.write_bytes(render(grid))
    edge = path.with_suffix(".edge.ppm")
    mask = extract_boundary(grid)
    edge.write_bytes(mask.render())
    if args.dump:
        Path(args.dump).write_text("".join(line + "\n" for line in dump_lines(grid)))
    fast = sum(c.is_fast for c in grid.cells)
    out.write(f"wrote {path} and {edge}: {nx}x{ny} cells, fast={fast}, boundary={mask.count()}\n")
    return EXIT_OK


def _classify(args, rc: RunConfig, out) -> int:
    z = parse_point(args.point)
    cfg = rc.classifier_config()
    c = Classifier(rc.semigroup(), cfg).classify(z)[0]
    out.write(c.line(cfg) + "\n")
    if c.diagnostic:
        sys.stderr.write(f"diagnostic: {c.diagnostic}\n")
    return EXIT_OK


def _verify(args, rc: RunConfig, out) -> int:
    if args.points < 0:
        raise UsageError("--points must be nonnegative")
    reports = run_all(rc.semigroup(), rc.classifier_config(), rc.window_obj(), args.points, rc.seed)
    text = "".join(r.line() + "\n" for r in reports)
    Path(args.report).write_text(text)
    out.write(text)
    return EXIT_VIOLATIONS if any(r.violations for r in reports) else EXIT_OK


def _mm(args, out) -> int:
    if args.depth < 1:
        raise UsageError("--depth must be at least 1")
    f = parse_function(args.function)
    sampling = CircleSampling(sample_count=args.samples)
    R = _radius_arg(args.radius)
    if R is None:
        R = find_threshold_R(f, 1.0, sampling)
    table = mm_tower(f, R, args.depth, sampling)
    for k in range(1, args.depth + 1):
        out.write(f"{k}\t{table.tower_log[k]:.9f}\n")
    return EXIT_OK


def _words(args, out) -> int:
    if args.generators < 1 or args.depth < 1:
        raise UsageError("--generators and --depth must be at least 1")
    words = enumerate_words(args.generators, args.depth)
    out.write(f"{len(words)}\n")
    for w in words:
        out.write(f"{w}\n")
    return EXIT_OK


def run_subcommand(argv: list[str], out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.command == "mm":
            return _mm(args, out)
        if args.command == "words":
            return _words(args, out)
        rc = load_config(args.config)
        handler = {"render": _render, "classify": _classify, "verify": _verify}[args.command]
        return handler(args, rc, out)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (ThresholdNotFound, InvalidThreshold, CapacityError, ArithmeticError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except (ConfigError, ParseError, SemigroupError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


def main() -> None:
    sys.exit(run_subcommand(sys.argv[1:]))
