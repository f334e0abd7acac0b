"""Sampling checks of the structural properties of A(S).

Every check returns a :class:`PropertyReport`.  Points only count as
applicable when their verdicts are certified, i.e. ``margin_log`` is at
least ``cfg.margin_log``, except for nesting, which holds by construction
and is checked on every FastEscaping point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import scaled
from .engine import Classifier, ClassifierConfig, Semigroup, SemigroupError
from .grid import Window
from .maxmod import qualifies


class InvalidThreshold(ValueError):
    pass


@dataclass(frozen=True)
class PropertyReport:
    property_id: str
    samples: int
    applicable: int
    violations: int
    worst_margin: float  # smallest margin among applicable points; inf if none
    notes: str = ""

    def __post_init__(self):
        if not 0 <= self.violations <= self.applicable <= self.samples:
            raise ValueError("need 0 <= violations <= applicable <= samples")

    def line(self) -> str:
        notes = self.notes.replace("\n", " ")
        return (
            f"PROP {self.property_id} samples={self.samples} applicable={self.applicable} "
            f"violations={self.violations} worst_margin={self.worst_margin:.6f} notes={notes}"
        )


def sample_points(window: Window, n: int, seed: int = 42) -> np.ndarray:
    """``n`` points uniform over the window."""
    rng = np.random.default_rng(seed)
    re = rng.uniform(window.re_min, window.re_max, n)
    im = rng.uniform(window.im_min, window.im_max, n)
    return re + 1j * im


def _worst(margins) -> float:
    return float(min(margins, default=math.inf))


def _as_points(points) -> np.ndarray:
    return np.atleast_1d(np.asarray(points, dtype=complex)).ravel()


def check_nesting(S: Semigroup, points, cfg: ClassifierConfig, classifier: Classifier | None = None) -> PropertyReport:
    pts = _as_points(points)
    clf = classifier or Classifier(S, cfg)
    cls = clf.classify(pts) if pts.size else []
    idx = [k for k, c in enumerate(cls) if c.is_fast]
    if not idx:
        return PropertyReport("nesting", pts.size, 0, 0, math.inf, "no FastEscaping points")
    levels = np.array([cls[k].level for k in idx])
    at_L = clf.membership(pts[idx], levels)
    below = clf.membership(pts[idx], levels - 1)
    bad = int(np.count_nonzero(~below))
    mismatch = int(np.count_nonzero(~at_L))
    return PropertyReport(
        "nesting", pts.size, len(idx), bad, _worst(cls[k].margin_log for k in idx), f"recheck_mismatches={mismatch}"
    )


def check_forward_invariance(S: Semigroup, points, cfg: ClassifierConfig, classifier: Classifier | None = None) -> PropertyReport:
    """FAST(L) at depth W should map to level >= L+1 at depth W-1 under each generator.

    The expected level is capped at ``max_level`` since no higher level is
    ever reported.
    """
    if cfg.depth < 2:
        raise ValueError("forward invariance needs depth >= 2")
    pts = _as_points(points)
    clf = classifier or Classifier(S, cfg)
    cls = clf.classify(pts) if pts.size else []
    idx = [k for k, c in enumerate(cls) if c.is_fast and c.margin_log >= cfg.margin_log]
    if not idx:
        return PropertyReport("forward_invariance", pts.size, 0, 0, math.inf, "no certified FastEscaping points")
    shallow = Classifier(S, replace(cfg, depth=cfg.depth - 1))
    start = scaled.lift(pts[idx])
    bad = np.zeros(len(idx), dtype=bool)
    for f in S.generators:
        images = shallow.classify(f.apply(start))
        for t, (k, img) in enumerate(zip(idx, images)):
            want = min(cls[k].level + 1, cfg.max_level)
            if not img.is_fast or img.level < want:
                bad[t] = True
    return PropertyReport(
        "forward_invariance", pts.size, len(idx), int(bad.sum()), _worst(cls[k].margin_log for k in idx), f"generators={len(S)}"
    )


def check_subset_classical(S: Semigroup, points, cfg: ClassifierConfig, classifier: Classifier | None = None) -> PropertyReport:
    """Certified FAST points of S should escape for every generator's cyclic semigroup."""
    pts = _as_points(points)
    clf = classifier or Classifier(S, cfg)
    cls = clf.classify(pts) if pts.size else []
    idx = [k for k, c in enumerate(cls) if c.is_fast and c.margin_log >= cfg.margin_log]
    if not idx:
        return PropertyReport("subset_classical", pts.size, 0, 0, math.inf, "no certified FastEscaping points")
    bad = np.zeros(len(idx), dtype=bool)
    inversions = 0
    skipped = 0
    for f in S.generators:
        try:
            cyc = Classifier(Semigroup((f,)), cfg)
        except SemigroupError:
            skipped += 1
            continue
        for t, c in enumerate(cyc.classify(pts[idx])):
            if not c.is_escaping:
                bad[t] = True
            elif not c.is_fast or c.level < cls[idx[t]].level:
                inversions += 1
    return PropertyReport(
        "subset_classical",
        pts.size,
        len(idx),
        int(bad.sum()),
        _worst(cls[k].margin_log for k in idx),
        f"level_inversions={inversions} non_transcendental_skipped={skipped}",
    )


def check_R_independence(
    S: Semigroup, points, cfg: ClassifierConfig, R2: float, classifier: Classifier | None = None
) -> PropertyReport:
    """Compare A(S)-membership under the default radii and under ``R2`` for every word."""
    pts = _as_points(points)
    base = classifier or Classifier(S, cfg)
    for fn in base.functions:
        if not qualifies(fn, R2, cfg.sampling):
            raise InvalidThreshold(f"R2={R2} is not a threshold radius for {fn}")
    other = Classifier(S, replace(cfg, radius=R2))
    a = base.classify(pts) if pts.size else []
    b = other.classify(pts) if pts.size else []
    cert = [k for k in range(pts.size) if min(a[k].margin_log, b[k].margin_log) >= cfg.margin_log]
    bad = sum(a[k].is_fast != b[k].is_fast for k in cert)
    loose = sum(a[k].is_fast != b[k].is_fast for k in range(pts.size)) - bad
    return PropertyReport(
        "R_independence",
        pts.size,
        len(cert),
        bad,
        _worst(min(a[k].margin_log, b[k].margin_log) for k in cert),
        f"R2={R2:g} uncertified_disagreements={loose}",
    )


def check_unbounded_ray(
    S: Semigroup,
    cfg: ClassifierConfig,
    direction: float,
    t_max: float,
    t_min: float = 0.25,
    count: int = 33,
    classifier: Classifier | None = None,
) -> PropertyReport:
    """Probe membership along ``t e^{i direction}`` for geometric ``t`` up to ``t_max``.

    Applicable points are the sampled ``t`` from the first FastEscaping hit
    on; a violation is one of them that is not FastEscaping.
    """
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    clf = classifier or Classifier(S, cfg)
    ts = np.geomspace(t_min, t_max, count)
    cls = clf.classify(ts * complex(math.cos(direction), math.sin(direction)))
    hits = [k for k, c in enumerate(cls) if c.is_fast]
    if not hits:
        return PropertyReport("unbounded_ray", count, 0, 0, math.inf, f"theta={direction:g} no hits")
    first = hits[0]
    gaps = sum(not cls[k].is_fast for k in range(first, count))
    notes = f"theta={direction:g} first_hit={ts[first]:.6g} last_hit={ts[hits[-1]]:.6g} persistent={'yes' if gaps == 0 else 'no'}"
    return PropertyReport("unbounded_ray", count, count - first, gaps, _worst(cls[k].margin_log for k in hits), notes)


def default_R2(classifier: Classifier) -> float:
    """Twice the largest radius in use across the words."""
    return 2.0 * max(t.R for t in classifier.tables.values() if t is not None)


def run_all(S: Semigroup, cfg: ClassifierConfig, window: Window, n: int, seed: int = 42) -> list[PropertyReport]:
    pts = sample_points(window, n, seed)
    clf = Classifier(S, cfg)
    reports = [check_nesting(S, pts, cfg, clf)]
    if cfg.depth >= 2:
        reports.append(check_forward_invariance(S, pts, cfg, clf))
    reports.append(check_subset_classical(S, pts, cfg, clf))
    if any(t is not None for t in clf.tables.values()):
        reports.append(check_R_independence(S, pts, cfg, default_R2(clf), clf))
    reports.append(check_unbounded_ray(S, cfg, 0.0, max(abs(window.re_max), abs(window.re_min), 1.0) * 4, classifier=clf))
    return reports
