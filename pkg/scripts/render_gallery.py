"""Render level pictures and boundary masks for a few semigroups.

    python scripts/render_gallery.py --out gallery --size 256
"""

import argparse
import time
from pathlib import Path

from fastescape.engine import ClassifierConfig, Semigroup
from fastescape.grid import Window, classify_grid, extract_boundary, render

GALLERY = {
    "qexp": (("0.25*exp(z)",), Window(-2, 8, -3, 3), 1),
    "exp": (("exp(z)",), Window(-2, 6, -4, 4), 2),
    "exp_qexp": (("exp(z)", "0.25*exp(z)"), Window(-2, 8, -3, 3), 2),
    "exp_expneg": (("exp(z)", "exp(-z)"), Window(-2, 2, -2, 2), 3),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="gallery")
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (gens, window, depth) in GALLERY.items():
        t0 = time.perf_counter()
        S = Semigroup.of(*gens)
        grid = classify_grid(S, window, args.size, args.size, ClassifierConfig(depth=depth), workers=args.workers)
        (out / f"{name}.ppm").write_bytes(render(grid))
        mask = extract_boundary(grid)
        (out / f"{name}.edge.ppm").write_bytes(mask.render())
        counts = {v: sum(c.verdict.value == v for c in grid.cells) for v in ("FAST", "ESC", "NON")}
        print(f"{name:<12} W={depth} {counts} boundary={mask.count()} {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
