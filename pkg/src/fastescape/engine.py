"""Words, orbits and per-point classification for finitely generated semigroups.

A point is classified against every word of length at most ``depth``:

* NON if some word's orbit fails to escape within ``iters`` steps;
* FAST(L) if every word's orbit satisfies ``log|w^n(z)| >= log M_w^{n+L}(R_w)``
  for all recorded ``n >= max(0, -L)``, with L the largest such level in the
  clamp, minimised over words;
* ESC otherwise.

Each word ``w`` has its own maximum-modulus tower ``M_w``.  Orbit index ``n``
starts at 0 (the point itself).
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import scaled
from .expr import EntireFunction, Overflow, parse_function
from .maxmod import DEFAULT_SAMPLING, CircleSampling, MaxModulusTable, ThresholdNotFound, find_threshold_R, mm_tower
from .scaled import LogComplex

MAX_WORDS = 10**6


class SemigroupError(ValueError):
    pass


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    """Generator indices; ``(i1, ..., im)`` is ``f_i1 o ... o f_im`` (last acts first)."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if not self.indices:
            raise ValueError("a word needs at least one index")

    def __len__(self) -> int:
        return len(self.indices)

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.indices)) + "]"


@dataclass(frozen=True)
class Composite:
    parts: tuple[EntireFunction, ...]  # outermost first

    def apply(self, x: LogComplex) -> LogComplex:
        for f in reversed(self.parts):
            x = f.apply(x)
        return x

    def evaluate(self, z: complex) -> complex | Overflow:
        v: complex | Overflow = complex(z)
        for f in reversed(self.parts):
            if isinstance(v, Overflow):
                return v
            v = f.evaluate(v)
        return v

    def __str__(self) -> str:
        if len(self.parts) == 1:
            return str(self.parts[0])
        return " o ".join(f"[{p}]" for p in self.parts)


@dataclass(frozen=True)
class Semigroup:
    generators: tuple[EntireFunction, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise SemigroupError("a semigroup needs at least one generator")
        if not any(g.is_transcendental for g in gens):
            raise SemigroupError("at least one generator must be transcendental")

    @classmethod
    def of(cls, *exprs: str) -> Semigroup:
        return cls(tuple(parse_function(e) for e in exprs))

    def __len__(self) -> int:
        return len(self.generators)

    def composite(self, word: Word) -> Composite:
        if any(not 0 <= i < len(self.generators) for i in word.indices):
            raise IndexError(f"word {word} has an index outside 0..{len(self.generators) - 1}")
        return Composite(tuple(self.generators[i] for i in word.indices))


def word_count(k: int, W: int) -> int:
    return sum(k**m for m in range(1, W + 1))


def enumerate_words(S: Semigroup | int, W: int) -> list[Word]:
    """All words of length 1..W ordered by (length, indices)."""
    k = S if isinstance(S, int) else len(S)
    if W < 1 or k < 1:
        raise ValueError("need W >= 1 and at least one generator")
    if word_count(k, W) > MAX_WORDS:
        raise CapacityError(f"{word_count(k, W)} words exceed the limit of {MAX_WORDS}")
    return [Word(t) for m in range(1, W + 1) for t in itertools.product(range(k), repeat=m)]


@dataclass(frozen=True)
class ClassifierConfig:
    depth: int = 3
    iters: int = 64
    escape_log: float = math.log(1e50)
    max_level: int = 8
    margin_log: float = math.log(2.0)
    sampling: CircleSampling = DEFAULT_SAMPLING
    radius: float | None = None
    r_start: float = 1.0

    def __post_init__(self):
        if self.depth < 1 or self.iters < 1:
            raise ValueError("depth and iters must be at least 1")
        if not self.escape_log > 0:
            raise ValueError("escape bound must exceed 1")
        if self.max_level < 0 or self.margin_log < 0:
            raise ValueError("max_level and margin must be nonnegative")
        if self.radius is not None and not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def tower_length(self) -> int:
        return self.iters + self.max_level


class Verdict(str, enum.Enum):
    FAST = "FAST"
    ESC = "ESC"
    NON = "NON"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    level: int | None
    margin_log: float
    witness: str = ""
    diagnostic: str | None = None

    @property
    def is_fast(self) -> bool:
        return self.verdict is Verdict.FAST

    @property
    def is_escaping(self) -> bool:
        return self.verdict in (Verdict.FAST, Verdict.ESC)

    def line(self, cfg: ClassifierConfig) -> str:
        lvl = "-" if self.level is None else str(self.level)
        return f"verdict={self.verdict.value} level={lvl} margin={self.margin_log:.6f} W={cfg.depth} N={cfg.iters}"


@dataclass(frozen=True)
class OrbitRecord:
    word: Word
    log_start: float
    log_mags: tuple[float, ...]  # n = 1..n_stop
    escaped: bool
    n_stop: int
    hit_zero: bool = False


# --- orbits --------------------------------------------------------------------


@dataclass
class Orbits:
    lm: np.ndarray  # (P, N+1); column n is log|w^n(z)|, nan past n_stop
    n_stop: np.ndarray
    escaped: np.ndarray
    hit_zero: np.ndarray


def run_orbits(fn, start: LogComplex, cfg: ClassifierConfig) -> Orbits:
    """Iterate ``fn`` from each start point.

    An orbit escapes once its log-magnitude exceeds ``cfg.escape_log`` with
    the last three recorded values strictly increasing, or once the log
    itself saturates.  Orbits crossing the bound without that trend keep
    iterating.  An exact zero stops the orbit as non-escaping; a log-magnitude
    that merely underflows does not.
    """
    P = len(start)
    N = cfg.iters
    lm = np.full((P, N + 1), np.nan)
    lm[:, 0] = start.log_abs
    n_stop = np.zeros(P, dtype=int)
    escaped = np.zeros(P, dtype=bool)
    hit_zero = np.zeros(P, dtype=bool)
    active = np.arange(P)
    x = start
    for n in range(1, N + 1):
        if active.size == 0:
            break
        x = fn.apply(x)
        v = x.log_abs
        lm[active, n] = v
        n_stop[active] = n
        prev1 = lm[active, n - 1]
        prev2 = lm[active, n - 2] if n >= 2 else np.full(active.size, -np.inf)
        with np.errstate(invalid="ignore"):
            rising = (v > prev1) & ((prev1 > prev2) | (n < 2))
            esc = (v == np.inf) | ((v > cfg.escape_log) & rising)
        zero = x.c == 0
        done = esc | zero | np.isnan(v)
        escaped[active[esc]] = True
        hit_zero[active[zero]] = True
        keep = ~done
        active = active[keep]
        x = x[keep]
    return Orbits(lm, n_stop, escaped, hit_zero)


def level_slacks(lm: np.ndarray, n_stop: np.ndarray, tower: np.ndarray, max_level: int):
    """Min over tested n of ``lm[n] - tower[n + L]`` for each L in [-max_level, max_level].

    Returns ``(slack, argn)`` of shape ``(2*max_level + 1, P)``; a level with
    no tested index has slack ``+inf``.
    """
    P, N1 = lm.shape
    n = np.arange(N1)
    T = np.asarray(tower, dtype=float)
    in_orbit = n[None, :] <= n_stop[:, None]
    nL = 2 * max_level + 1
    slack = np.empty((nL, P))
    argn = np.empty((nL, P), dtype=int)
    for i, L in enumerate(range(-max_level, max_level + 1)):
        TL = T[np.clip(n + L, 0, len(T) - 1)]
        with np.errstate(invalid="ignore"):
            d = lm - TL[None, :]
        d = np.where(lm == np.inf, np.inf, d)
        d = np.where(in_orbit & (n >= max(0, -L))[None, :], d, np.inf)
        slack[i] = d.min(axis=1)
        argn[i] = d.argmin(axis=1)
    return slack, argn


# --- tables ----------------------------------------------------------------------


@functools.lru_cache(maxsize=4096)
def word_table(fn: Composite, radius: float | None, sampling: CircleSampling, r_start: float, n_max: int) -> MaxModulusTable:
    R = radius if radius is not None else find_threshold_R(fn, r_start, sampling)
    table = mm_tower(fn, R, n_max, sampling, function_id=str(fn))
    if not table.is_increasing():
        raise ThresholdNotFound(f"max-modulus tower of {fn} from R={R} is not increasing")
    return table


class Classifier:
    """Classifies batches of points for one semigroup and configuration.

    Tower tables for every word are built on construction and never mutated,
    so an instance can be shipped to worker processes as-is.
    """

    def __init__(self, semigroup: Semigroup, cfg: ClassifierConfig):
        self.semigroup = semigroup
        self.cfg = cfg
        self.words = enumerate_words(semigroup, cfg.depth)
        self.functions = [semigroup.composite(w) for w in self.words]
        self.tables: dict[Word, MaxModulusTable | None] = {}
        self.failures: dict[Word, str] = {}
        for w, fn in zip(self.words, self.functions):
            try:
                self.tables[w] = word_table(fn, cfg.radius, cfg.sampling, cfg.r_start, cfg.tower_length)
            except ThresholdNotFound as exc:
                self.tables[w] = None
                self.failures[w] = str(exc)

    def orbit(self, word: Word, z) -> OrbitRecord:
        return orbit(word, self.semigroup, z, self.cfg)

    def membership(self, points, levels) -> np.ndarray:
        """Direct test of each point against its level, one inequality at a time.

        This deliberately avoids the vectorised level search so it can serve
        as an independent re-check of classifications.
        """
        start = points if isinstance(points, LogComplex) else scaled.lift(points)
        P = len(start)
        levels = np.broadcast_to(np.asarray(levels, dtype=int), (P,))
        ok = np.ones(P, dtype=bool)
        for word, fn in zip(self.words, self.functions):
            table = self.tables[word]
            if table is None:
                ok[:] = False
                break
            orb = run_orbits(fn, start, self.cfg)
            T = table.tower_log
            for p in range(P):
                if not ok[p]:
                    continue
                if not orb.escaped[p]:
                    ok[p] = False
                    continue
                L = int(levels[p])
                row = orb.lm[p].tolist()
                for n in range(max(0, -L), int(orb.n_stop[p]) + 1):
                    if n + L >= len(T) or (row[n] != math.inf and not row[n] >= T[n + L]):
                        ok[p] = False
                        break
        return ok

    def classify(self, points) -> list[Classification]:
        start = points if isinstance(points, LogComplex) else scaled.lift(points)
        return self._classify(start)

    def _classify(self, start: LogComplex) -> list[Classification]:
        cfg = self.cfg
        P = len(start)
        Lmax = cfg.max_level
        nL = 2 * Lmax + 1
        levels = np.arange(-Lmax, Lmax + 1)

        alive = np.ones(P, dtype=bool)
        non_word = np.full(P, -1)
        non_margin = np.full(P, np.nan)
        level = np.full(P, Lmax)
        has_level = np.ones(P, dtype=bool)
        agg = np.full((nL, P), np.inf)
        agg_word = np.zeros((nL, P), dtype=int)
        agg_n = np.zeros((nL, P), dtype=int)
        esc_margin = np.full(P, np.inf)
        esc_word = np.full(P, -1)
        failed_word = np.full(P, -1)

        for wi, (word, fn) in enumerate(zip(self.words, self.functions)):
            idx = np.flatnonzero(alive)
            if idx.size == 0:
                break
            orb = run_orbits(fn, start[idx], cfg)

            stuck = ~orb.escaped
            j = idx[stuck]
            alive[j] = False
            non_word[j] = wi
            if j.size:
                sl = orb.lm[stuck]
                non_margin[j] = cfg.escape_log - np.where(np.isnan(sl), -np.inf, sl).max(axis=1)

            e = idx[orb.escaped]
            if e.size == 0:
                continue
            table = self.tables[word]
            if table is None:
                failed_word[e] = np.where(failed_word[e] < 0, wi, failed_word[e])
                continue
            lm = orb.lm[orb.escaped]
            ns = orb.n_stop[orb.escaped]
            slack, argn = level_slacks(lm, ns, np.asarray(table.tower_log), Lmax)
            lowest = np.maximum(-Lmax, -ns)
            admissible = levels[:, None] >= lowest[None, :]
            ok = (slack >= 0) & admissible
            has = ok.any(axis=0)
            top = nL - 1 - np.argmax(ok[::-1], axis=0)
            Lw = np.where(has, levels[top], -Lmax - 1)

            newly_failed = ~has & has_level[e]
            esc_word[e[newly_failed]] = wi
            has_level[e] &= has
            level[e] = np.minimum(level[e], Lw)
            cols = np.arange(e.size)
            low_slack = slack[lowest + Lmax, cols]
            esc_margin[e] = np.minimum(esc_margin[e], low_slack)
            better = slack < agg[:, e]
            agg[:, e] = np.where(better, slack, agg[:, e])
            agg_word[:, e] = np.where(better, wi, agg_word[:, e])
            agg_n[:, e] = np.where(better, argn, agg_n[:, e])

        out = []
        for p in range(P):
            if not alive[p]:
                w = self.words[non_word[p]]
                out.append(Classification(Verdict.NON, None, float(non_margin[p]), f"word={w}"))
            elif failed_word[p] >= 0:
                w = self.words[failed_word[p]]
                out.append(Classification(Verdict.NON, None, -math.inf, f"word={w}", "threshold-not-found"))
            elif has_level[p]:
                L = int(level[p])
                i = L + Lmax
                w = self.words[agg_word[i, p]]
                out.append(Classification(Verdict.FAST, L, float(agg[i, p]), f"word={w} n={agg_n[i, p]}"))
            else:
                w = self.words[esc_word[p]]
                out.append(Classification(Verdict.ESC, None, float(esc_margin[p]), f"word={w}"))
        return out


# --- point-wise API -------------------------------------------------------------


def orbit(w: Word, S: Semigroup, z, cfg: ClassifierConfig) -> OrbitRecord:
    start = z if isinstance(z, LogComplex) else scaled.lift(z)
    orb = run_orbits(S.composite(w), start[:1], cfg)
    k = int(orb.n_stop[0])
    lm = orb.lm[0]
    return OrbitRecord(w, float(lm[0]), tuple(map(float, lm[1 : k + 1])), bool(orb.escaped[0]), k, bool(orb.hit_zero[0]))


def classify_points(S: Semigroup, points, cfg: ClassifierConfig) -> list[Classification]:
    return Classifier(S, cfg).classify(points)


def classify_point(S: Semigroup, z, cfg: ClassifierConfig) -> Classification:
    return classify_points(S, z, cfg)[0]


def level_of(S: Semigroup, z, cfg: ClassifierConfig) -> int | None:
    c = classify_point(S, z, cfg)
    return c.level if c.is_fast else None


def classify_cyclic(f: EntireFunction, z, cfg: ClassifierConfig) -> Classification:
    """Classification for the cyclic semigroup generated by ``f`` alone."""
    return classify_point(Semigroup((f,)), z, cfg)


def member_at_level(S: Semigroup, z, L: int, cfg: ClassifierConfig, classifier: Classifier | None = None) -> bool:
    """Whether ``z`` lies in the truncated level-``L`` set."""
    return bool((classifier or Classifier(S, cfg)).membership(z, L)[0])
