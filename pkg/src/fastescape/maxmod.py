"""Maximum modulus on circles, threshold radii and iterated max-modulus towers.

Everything works with log-magnitudes.  The radius of a circle is carried as
a :class:`~fastescape.scaled.LogComplex` magnitude so that a tower step feeds
the exact maximal value ``|f(z*)|`` back in as the next radius, and radii
beyond double range are handled in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from . import scaled
from .scaled import LogComplex

INV_PHI = (math.sqrt(5) - 1) / 2
# refinements must beat the best sample by more than rounding noise
_REFINE_REL = 1e-14


class Evaluable(Protocol):
    def apply(self, x: LogComplex) -> LogComplex: ...


class ThresholdNotFound(ArithmeticError):
    pass


@dataclass(frozen=True)
class CircleSampling:
    sample_count: int = 4096
    refinement_iters: int = 32

    def __post_init__(self):
        if self.sample_count < 64:
            raise ValueError("sample_count must be at least 64")
        if self.refinement_iters < 0:
            raise ValueError("refinement_iters must be nonnegative")


DEFAULT_SAMPLING = CircleSampling()


@dataclass(frozen=True)
class MaxModulusTable:
    """``tower_log[k] = log M^k(R)``; entries from ``saturated_at`` on are ``inf``."""

    function_id: str
    R: float
    tower_log: tuple[float, ...]
    saturated_at: int | None = None

    def is_increasing(self) -> bool:
        finite = [v for v in self.tower_log if math.isfinite(v)]
        return all(b > a for a, b in zip(finite, finite[1:]))


def _radius(r) -> LogComplex:
    if isinstance(r, LogComplex):
        return r
    return scaled.lift(float(r))


def _circle(radius: LogComplex, theta: np.ndarray) -> LogComplex:
    phase = np.exp(1j * theta)
    if radius.s[0] == 0:
        return scaled.lift(radius.c[0].real * phase)
    return LogComplex(radius.c[0].real * phase, np.full(theta.shape, radius.s[0]))


def _peak(f: Evaluable, radius: LogComplex, sampling: CircleSampling) -> LogComplex:
    """The value ``|f(z)|`` at the best circle point found, as a magnitude."""
    n = sampling.sample_count
    theta = 2 * np.pi * np.arange(n) / n
    vals = f.apply(_circle(radius, theta))
    logs = vals.log_abs
    logs = np.where(np.isnan(logs), -np.inf, logs)
    best = int(np.argmax(logs))
    best_log = logs[best]
    best_val = vals[best : best + 1]

    def g(t: float):
        v = f.apply(_circle(radius, np.array([t])))
        lv = v.log_abs[0]
        return (-np.inf if math.isnan(lv) else lv), v

    # golden-section maximisation in the bracket around the best sample
    h = 2 * np.pi / n
    a, b = theta[best] - h, theta[best] + h
    c, d = b - INV_PHI * (b - a), a + INV_PHI * (b - a)
    (gc, vc), (gd, vd) = g(c), g(d)
    sample_log = best_log
    floor = sample_log + _REFINE_REL * max(1.0, abs(sample_log)) if math.isfinite(sample_log) else sample_log

    def better(gv):
        return gv > best_log and gv > floor

    for _ in range(sampling.refinement_iters):
        if better(gc):
            best_log, best_val = gc, vc
        if better(gd):
            best_log, best_val = gd, vd
        if gc >= gd:
            b, d, gd, vd = d, c, gc, vc
            c = b - INV_PHI * (b - a)
            gc, vc = g(c)
        else:
            a, c, gc, vc = c, d, gd, vd
            d = a + INV_PHI * (b - a)
            gd, vd = g(d)
    for gv, vv in ((gc, vc), (gd, vd)):
        if better(gv):
            best_log, best_val = gv, vv
    mag = np.abs(best_val.c)
    return LogComplex(mag.astype(complex), best_val.s.copy())


def log_max_modulus(f: Evaluable, radius, sampling: CircleSampling = DEFAULT_SAMPLING) -> float:
    """``log M(r)``: a lower bound from sampling plus golden-section refinement."""
    return float(_peak(f, _radius(radius), sampling).log_abs[0])


def max_modulus(f: Evaluable, r: float, sampling: CircleSampling = DEFAULT_SAMPLING) -> float:
    """Log of the maximum of ``|f|`` on the circle ``|z| = r``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    return log_max_modulus(f, r, sampling)


def _convex(ys: list[float], tol_scale: float = 1e-9) -> bool:
    """Convexity of equally log-spaced samples, ignoring non-finite entries."""
    for y0, y1, y2 in zip(ys, ys[1:], ys[2:]):
        if not all(math.isfinite(v) for v in (y0, y1, y2)):
            continue
        if y1 > (y0 + y2) / 2 + tol_scale * max(1.0, abs(y2)):
            return False
    return True


def qualifies(
    f: Evaluable,
    r: float,
    sampling: CircleSampling = DEFAULT_SAMPLING,
    lookahead: int = 8,
    _cache: dict | None = None,
) -> bool:
    """M(r) > r at r and the next ``lookahead`` doublings, with log M convex in log r."""
    cache = {} if _cache is None else _cache
    ys = []
    for j in range(lookahead + 1):
        rj = r * 2.0**j
        if rj not in cache:
            cache[rj] = log_max_modulus(f, rj, sampling)
        ys.append(cache[rj])
        # M(r) > r must hold by more than rounding in |f| on the circle
        lr = math.log(rj)
        if not ys[-1] > lr + 1e-12 * max(1.0, abs(lr)):
            return False
    return _convex(ys)


def find_threshold_R(
    f: Evaluable,
    r_start: float = 1.0,
    sampling: CircleSampling = DEFAULT_SAMPLING,
    max_doublings: int = 60,
    lookahead: int = 8,
) -> float:
    """Smallest ``r_start * 2**k`` (k <= max_doublings) passing :func:`qualifies`."""
    if not r_start > 0:
        raise ValueError("r_start must be positive")
    ast = getattr(f, "ast", None)
    if ast is not None:
        from .expr import depends_on_z

        if not depends_on_z(ast):
            raise ThresholdNotFound(f"{f} is constant")
    cache: dict = {}
    for k in range(max_doublings + 1):
        r = r_start * 2.0**k
        if qualifies(f, r, sampling, lookahead, cache):
            return r
    raise ThresholdNotFound(f"no threshold radius for {f} within {max_doublings} doublings of {r_start}")


def mm_tower(
    f: Evaluable,
    R: float,
    n_max: int,
    sampling: CircleSampling = DEFAULT_SAMPLING,
    function_id: str | None = None,
) -> MaxModulusTable:
    """Log tower ``log M^k(R)`` for ``k = 0..n_max``.

    Each step evaluates the maximum at the previous step's exact peak value.
    Past double range the evaluation runs in log space; e.g. for an outer
    ``exp`` the next entry is exactly ``Re`` of the argument, so
    ``log M^{k+1} = M^k`` for ``exp(z)``.  Once a log itself overflows the
    remaining entries are ``inf`` and ``saturated_at`` records the index.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if not R > 0:
        raise ValueError("R must be positive")
    radius = _radius(R)
    logs = [math.log(R)]
    saturated = None
    for k in range(1, n_max + 1):
        if saturated is not None:
            logs.append(math.inf)
            continue
        radius = _peak(f, radius, sampling)
        v = float(radius.log_abs[0])
        if math.isnan(v):
            v = math.inf
        logs.append(v)
        if v == math.inf:
            saturated = k
    return MaxModulusTable(function_id or str(f), float(R), tuple(logs), saturated)
