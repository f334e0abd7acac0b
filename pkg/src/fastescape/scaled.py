"""Overflow-safe complex arithmetic on numpy arrays.

A value is stored as ``c * exp(s)``.  Inside the band ``[TINY, HUGE]`` the
scale ``s`` is exactly zero and ``c`` is the ordinary complex128 value, so
in-range arithmetic is plain floating-point arithmetic.  Values that leave the
band keep a unit-modulus ``c`` and carry their log-magnitude in ``s``.
``s == +inf`` marks a value whose logarithm itself overflowed (saturated);
zero is the plain value ``0``.  A nonzero value whose log-magnitude
underflows keeps its unit phase with ``s == -inf``, so it stays
distinguishable from an exact zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HUGE = 1e300
TINY = 1e-300
LOG_HUGE = math.log(HUGE)
LOG_TINY = math.log(TINY)


@dataclass(frozen=True, eq=False)
class LogComplex:
    c: np.ndarray
    s: np.ndarray

    def __len__(self) -> int:
        return self.c.shape[0]

    def __getitem__(self, idx) -> LogComplex:
        return LogComplex(self.c[idx], self.s[idx])

    @property
    def log_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return self.s + np.log(np.abs(self.c))

    def to_complex(self) -> np.ndarray:
        """Ordinary complex values; out-of-band entries under/overflow."""
        with np.errstate(all="ignore"):
            mag = np.exp(self.s)
            re = np.where(self.c.real == 0, 0.0, self.c.real * mag)
            im = np.where(self.c.imag == 0, 0.0, self.c.imag * mag)
        return re + 1j * im


def lift(z) -> LogComplex:
    c = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    return _from_plain(c)


def concat(parts) -> LogComplex:
    parts = list(parts)
    return LogComplex(np.concatenate([p.c for p in parts]), np.concatenate([p.s for p in parts]))


def _normalize(x: LogComplex):
    """Split into (unit phase, log magnitude); zero maps to (0, -inf)."""
    a = np.abs(x.c)
    # rescale subnormals before dividing so the phase survives
    k = np.where(a < TINY, 2.0**600, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = x.s + np.log(a)
        u = np.where(a > 0, (x.c * k) / np.where(a > 0, a * k, 1.0), 0.0)
    return u, t


def _canon(u: np.ndarray, t: np.ndarray) -> LogComplex:
    """Build from unit phase and log magnitude, returning in-band values to plain form."""
    t = np.where(np.isnan(t), -np.inf, t)
    plain = (t >= LOG_TINY) & (t <= LOG_HUGE)
    zero = (t == -np.inf) & (u == 0)
    with np.errstate(all="ignore"):
        c = np.where(plain, u * np.exp(np.where(plain, t, 0.0)), u)
    c = np.where(zero, 0.0, c)
    s = np.where(plain | zero, 0.0, t)
    # saturated values keep a well-defined phase
    c = np.where((s == np.inf) & ~np.isfinite(c), 1.0, c)
    return LogComplex(c.astype(complex), s)


def _from_plain(c: np.ndarray) -> LogComplex:
    s = np.zeros(c.shape)
    a = np.abs(c)
    out = ((a > HUGE) | ((a < TINY) & (a > 0))) & np.isfinite(a)
    if out.any():
        res = LogComplex(c.copy(), s)
        u, t = _normalize(LogComplex(c[out], s[out]))
        fixed = _canon(u, t)
        res.c[out] = fixed.c
        res.s[out] = fixed.s
        return res
    return LogComplex(c, s)


def _bcast(x: LogComplex, y: LogComplex):
    if len(x) == len(y):
        return x, y
    n = max(len(x), len(y))
    if len(x) == 1:
        x = LogComplex(np.repeat(x.c, n), np.repeat(x.s, n))
    if len(y) == 1:
        y = LogComplex(np.repeat(y.c, n), np.repeat(y.s, n))
    return x, y


def _patch(fast: np.ndarray, ok: np.ndarray, slow) -> LogComplex:
    """Combine plain results (where ok) with a slow-path callable over the rest."""
    res = _from_plain(np.where(ok, fast, 0.0))
    if ok.all():
        return res
    idx = ~ok
    fixed = slow(idx)
    c = res.c.copy()
    s = res.s.copy()
    c[idx] = fixed.c
    s[idx] = fixed.s
    return LogComplex(c, s)


def add(x: LogComplex, y: LogComplex) -> LogComplex:
    x, y = _bcast(x, y)
    with np.errstate(all="ignore"):
        r = x.c + y.c
    ok = (x.s == 0) & (y.s == 0) & np.isfinite(r)

    def slow(idx):
        u1, t1 = _normalize(x[idx])
        u2, t2 = _normalize(y[idx])
        t = np.maximum(t1, t2)
        fin = np.isfinite(t)
        tt = np.where(fin, t, 0.0)
        with np.errstate(all="ignore"):
            m = u1 * np.exp(t1 - tt) + u2 * np.exp(t2 - tt)
        m = np.where(fin, m, np.where(t1 == np.inf, u1, u2))
        um, dt = _normalize(LogComplex(m, np.zeros(m.shape)))
        t_new = np.where(fin, tt + dt, t)
        return _canon(um, t_new)

    return _patch(r, ok, slow)


def neg(x: LogComplex) -> LogComplex:
    return LogComplex(-x.c, x.s)


def sub(x: LogComplex, y: LogComplex) -> LogComplex:
    return add(x, neg(y))


def mul(x: LogComplex, y: LogComplex) -> LogComplex:
    x, y = _bcast(x, y)
    with np.errstate(all="ignore"):
        r = x.c * y.c
    underflow = (np.abs(r) < TINY) & (x.c != 0) & (y.c != 0)
    ok = (x.s == 0) & (y.s == 0) & np.isfinite(r) & ~underflow

    def slow(idx):
        u1, t1 = _normalize(x[idx])
        u2, t2 = _normalize(y[idx])
        # nan lanes (zero times saturated) are masked; overflow saturates
        with np.errstate(invalid="ignore", over="ignore"):
            t = t1 + t2
            zero = (t1 == -np.inf) | (t2 == -np.inf)
            u, dt = _normalize(LogComplex(u1 * u2, np.zeros(t.shape)))
            return _canon(u, np.where(zero, -np.inf, t + np.where(zero, 0.0, dt)))

    return _patch(r, ok, slow)


def div_const(x: LogComplex, k: complex) -> LogComplex:
    with np.errstate(all="ignore"):
        r = x.c / k
    underflow = (np.abs(r) < TINY) & (x.c != 0)
    ok = (x.s == 0) & np.isfinite(r) & ~underflow
    ak = abs(k)

    def slow(idx):
        u, t = _normalize(x[idx])
        v, dt = _normalize(LogComplex(u / (k / ak), np.zeros(t.shape)))
        return _canon(v, t - math.log(ak) + np.where(np.isfinite(dt), dt, 0.0))

    return _patch(r, ok, slow)


def power(x: LogComplex, n: int) -> LogComplex:
    result = lift(np.ones(len(x), dtype=complex))
    base = x
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def _arg_parts(x: LogComplex):
    """Real and imaginary parts of x as floats (possibly +-inf)."""
    with np.errstate(all="ignore"):
        mag = np.exp(x.s)
        re = np.where(x.c.real == 0, 0.0, x.c.real * mag)
        im = np.where(x.c.imag == 0, 0.0, x.c.imag * mag)
    return re, im


def exp(x: LogComplex) -> LogComplex:
    w = x.c
    ok = (x.s == 0) & (w.real <= LOG_HUGE) & (w.real >= LOG_TINY)
    with np.errstate(all="ignore"):
        r = np.exp(np.where(ok, w, 0.0))

    def slow(idx):
        # log|e^w| = Re w exactly
        re, im = _arg_parts(x[idx])
        with np.errstate(invalid="ignore"):
            u = np.where(np.isfinite(im), np.cos(im) + 1j * np.sin(im), 1.0)
        return _canon(u, re)

    return _patch(r, ok & np.isfinite(r), slow)


def _mul_i(x: LogComplex, sign: int) -> LogComplex:
    # multiplication by +-i is exact: swap parts
    c = x.c
    return LogComplex(sign * (-c.imag + 1j * c.real), x.s)


def _trig(x: LogComplex, plain_fn, kind: str) -> LogComplex:
    w = x.c
    bound = np.abs(w.imag) if kind in ("sin", "cos") else np.abs(w.real)
    ok = (x.s == 0) & (bound <= LOG_HUGE)
    with np.errstate(all="ignore"):
        r = plain_fn(np.where(ok, w, 0.0))

    def slow(idx):
        xi = x[idx]
        tiny = xi.s < 0
        if kind in ("sin", "cos"):
            a, b = exp(_mul_i(xi, 1)), exp(_mul_i(xi, -1))
        else:
            a, b = exp(xi), exp(neg(xi))
        if kind == "sin":
            v = div_const(sub(a, b), 2j)
        elif kind == "sinh":
            v = div_const(sub(a, b), 2.0)
        else:
            v = div_const(add(a, b), 2.0)
        if tiny.any():
            # below TINY: sin x = sinh x = x and cos x = cosh x = 1 to double precision
            near = xi if kind in ("sin", "sinh") else lift(np.ones(len(xi)))
            v = LogComplex(np.where(tiny, near.c, v.c), np.where(tiny, near.s, v.s))
        return v

    return _patch(r, ok & np.isfinite(r), slow)


def sin(x: LogComplex) -> LogComplex:
    return _trig(x, np.sin, "sin")


def cos(x: LogComplex) -> LogComplex:
    return _trig(x, np.cos, "cos")


def sinh(x: LogComplex) -> LogComplex:
    return _trig(x, np.sinh, "sinh")


def cosh(x: LogComplex) -> LogComplex:
    return _trig(x, np.cosh, "cosh")
