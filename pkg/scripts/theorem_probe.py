"""Run the property harness on several semigroups and configurations.

Prints the report lines for each case, plus the level shift between the
default radius and a doubled one for points that are FastEscaping under both.

    python scripts/theorem_probe.py --points 500
"""

import argparse
from collections import Counter
from dataclasses import replace

from fastescape.engine import Classifier, ClassifierConfig, Semigroup
from fastescape.grid import Window
from fastescape.verify import default_R2, run_all, sample_points

CASES = [
    (("exp(z)",), Window(-2, 8, -3, 3)),
    (("0.25*exp(z)",), Window(-2, 8, -3, 3)),
    (("exp(z)", "0.25*exp(z)"), Window(-2, 8, -3, 3)),
    (("exp(z)", "exp(-z)"), Window(-2, 2, -2, 2)),
    (("exp(z)", "z^2"), Window(-2, 4, -2, 2)),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=500)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    cfg = ClassifierConfig(depth=args.depth)
    for gens, window in CASES:
        S = Semigroup.of(*gens)
        print(f"== <{', '.join(gens)}> on {window}")
        for r in run_all(S, cfg, window, args.points, args.seed):
            print("  " + r.line())
        clf = Classifier(S, cfg)
        pts = sample_points(window, args.points, args.seed)
        a = clf.classify(pts)
        b = Classifier(S, replace(cfg, radius=default_R2(clf))).classify(pts)
        shift = Counter(y.level - x.level for x, y in zip(a, b) if x.is_fast and y.is_fast)
        print(f"  level shift R -> R2: {dict(sorted(shift.items()))}")


if __name__ == "__main__":
    main()
