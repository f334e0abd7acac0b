"""Level histogram of sampled points as the word depth grows.

Shows the truncated escaping set shrinking with W and how the levels
of A(S) spread across the clamp.

    python scripts/level_census.py --generator "exp(z)" --generator "0.25*exp(z)"
"""

import argparse
from collections import Counter

from fastescape.engine import Classifier, ClassifierConfig, Semigroup
from fastescape.grid import Window
from fastescape.verify import sample_points


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--generator", action="append", default=None)
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--max-depth", type=int, default=3)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--window", type=float, nargs=4, default=(-2, 8, -3, 3))
    args = ap.parse_args()
    S = Semigroup.of(*(args.generator or ["exp(z)", "0.25*exp(z)"]))
    pts = sample_points(Window(*args.window), args.points, args.seed)
    print(f"{len(pts)} points, generators: {', '.join(map(str, S.generators))}")
    for W in range(1, args.max_depth + 1):
        cls = Classifier(S, ClassifierConfig(depth=W)).classify(pts)
        verdicts = Counter(c.verdict.value for c in cls)
        levels = Counter(c.level for c in cls if c.is_fast)
        certified = sum(c.is_fast and c.margin_log >= ClassifierConfig().margin_log for c in cls)
        hist = " ".join(f"{L}:{levels[L]}" for L in sorted(levels))
        print(f"W={W} FAST={verdicts['FAST']} (certified {certified}) ESC={verdicts['ESC']} NON={verdicts['NON']}")
        print(f"     levels {hist}")


if __name__ == "__main__":
    main()
