import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastescape.engine import (
    CapacityError,
    Classifier,
    ClassifierConfig,
    Semigroup,
    SemigroupError,
    Verdict,
    Word,
    classify_cyclic,
    classify_point,
    classify_points,
    enumerate_words,
    level_of,
    member_at_level,
    orbit,
)
from fastescape.expr import Overflow, parse_function

EXP = Semigroup.of("exp(z)")
QEXP = Semigroup.of("0.25*exp(z)")
PAIR = Semigroup.of("exp(z)", "exp(-z)")
MIXED = Semigroup.of("exp(z)", "0.25*exp(z)")

points = st.builds(complex, st.floats(-2, 6), st.floats(-3, 3))


def oracle_level(z, R, N=64, L_max=8, B=math.log(1e50)):
    """Brute-force level of z for <exp> with radius R, using mpmath orbits.

    Mirrors the escape rule: stop once log|f^n| > B with three rising logs.
    """
    mpmath.mp.dps = 30
    w = mpmath.mpc(z)
    lm = [float(mpmath.log(abs(w)))]
    for n in range(1, N + 1):
        w = mpmath.exp(w)
        lm.append(float(mpmath.log(abs(w))))
        rising = lm[-1] > lm[-2] and (n < 2 or lm[-2] > lm[-3])
        if lm[-1] > B and rising:
            break
    else:
        return None
    T = [math.log(R)]
    for _ in range(len(lm) + L_max):
        T.append(math.exp(T[-1]) if T[-1] < 709 else math.inf)
    n_stop = len(lm) - 1
    for L in range(L_max, -L_max - 1, -1):
        if L < -n_stop:
            break
        if all(lm[n] >= T[n + L] for n in range(max(0, -L), n_stop + 1)):
            return L
    return "ESC"


class TestWords:
    def test_small(self):
        assert [str(w) for w in enumerate_words(2, 1)] == ["[0]", "[1]"]
        assert [str(w) for w in enumerate_words(2, 2)] == ["[0]", "[1]", "[0,0]", "[0,1]", "[1,0]", "[1,1]"]
        assert len(enumerate_words(3, 3)) == 39

    def test_from_semigroup(self):
        assert len(enumerate_words(PAIR, 3)) == 14

    def test_capacity(self):
        with pytest.raises(CapacityError):
            enumerate_words(10, 6)

    def test_empty_word(self):
        with pytest.raises(ValueError):
            Word(())

    def test_bad_index(self):
        with pytest.raises(IndexError):
            PAIR.composite(Word((0, 2)))


class TestSemigroup:
    def test_needs_transcendental(self):
        with pytest.raises(SemigroupError):
            Semigroup.of("z^2", "z+1")
        with pytest.raises(SemigroupError):
            Semigroup(())

    def test_composite_order(self):
        # [1,0] is exp(-z) o exp: exp acts first
        h = PAIR.composite(Word((1, 0)))
        assert h.evaluate(1.0) == pytest.approx(math.exp(-math.e))


class TestOrbit:
    def test_exp_tower(self):
        r = orbit(Word((0,)), EXP, 1, ClassifierConfig(iters=3))
        assert r.log_mags == pytest.approx([1, math.e, math.e**math.e], rel=1e-15)
        assert r.n_stop == 3 and not r.escaped

    def test_composite_stays_bounded(self):
        r = orbit(Word((1, 0)), PAIR, 1, ClassifierConfig(iters=50))
        mags = np.exp(r.log_mags)
        h1 = math.exp(-math.exp(1))
        h2 = math.exp(-math.exp(h1))
        assert h1 == pytest.approx(0.06599, abs=1e-5)
        assert mags[:2] == pytest.approx([h1, h2], rel=1e-14)
        assert np.all((0 < mags) & (mags < 1))
        assert not r.escaped

    def test_fixed_point(self):
        z = 0.5
        for _ in range(200):
            z = 0.25 * math.exp(z)
        r = orbit(Word((0,)), QEXP, z, ClassifierConfig(iters=20))
        assert np.allclose(r.log_mags, math.log(z), atol=1e-12)
        assert not r.escaped

    def test_escape_implies_last_above_bound(self):
        cfg = ClassifierConfig()
        r = orbit(Word((0,)), EXP, 2.0, cfg)
        assert r.escaped and r.log_mags[-1] > cfg.escape_log

    def test_exact_zero_stops(self):
        S = Semigroup.of("exp(z)", "z^2")
        r = orbit(Word((1,)), S, 0, ClassifierConfig())
        assert r.hit_zero and not r.escaped and r.n_stop == 1


class TestClassify:
    def test_level_zero_exact(self):
        c = classify_point(QEXP, 5, ClassifierConfig(radius=5.0))
        assert c.verdict is Verdict.FAST and c.level == 0 and c.margin_log >= 0

    def test_attracting_basin(self):
        assert classify_point(QEXP, 0, ClassifierConfig()).verdict is Verdict.NON

    def test_exp_pair_empty(self):
        cfg = ClassifierConfig(depth=2)
        c = classify_point(PAIR, 1, cfg)
        assert c.verdict is Verdict.NON
        assert not orbit(Word((1, 0)), PAIR, 1, cfg).escaped

    def test_exp_levels(self):
        cfg = ClassifierConfig(radius=1.0)
        assert level_of(EXP, 1, cfg) == 0
        assert level_of(EXP, 0.5, cfg) <= -1
        assert level_of(QEXP, 0, cfg) is None

    @pytest.mark.parametrize("z", [0.1, 0.5, 0.9, 1.0, 1.3, 2.0, 2.9, math.pi * 1j, -1.0, 0.3 + 0.2j])
    def test_exp_levels_against_oracle(self, z):
        cfg = ClassifierConfig(depth=1, radius=1.0)
        want = oracle_level(z, 1.0)
        c = classify_point(EXP, z, cfg)
        if want is None:
            assert c.verdict is Verdict.NON
        elif want == "ESC":
            assert c.verdict is Verdict.ESC
        else:
            assert c.verdict is Verdict.FAST and c.level == want

    def test_cyclic(self):
        assert classify_cyclic(parse_function("exp(z)"), 1, ClassifierConfig()).level == 0
        assert classify_cyclic(parse_function("0.25*exp(z)"), 0, ClassifierConfig()).verdict is Verdict.NON
        with pytest.raises(SemigroupError):
            classify_cyclic(parse_function("z^2"), 1, ClassifierConfig())

    def test_threshold_failure_is_flagged(self):
        # from R = 1 the tower of 0.25 e^z decreases, so no table is usable
        c = classify_point(QEXP, 10, ClassifierConfig(radius=1.0))
        assert c.verdict is Verdict.NON and c.diagnostic == "threshold-not-found"

    def test_line_format(self):
        cfg = ClassifierConfig(radius=5.0)
        c = classify_point(QEXP, 5, cfg)
        assert c.line(cfg) == "verdict=FAST level=0 margin=0.000000 W=3 N=64"
        c = classify_point(QEXP, 0, cfg)
        assert c.line(cfg).startswith("verdict=NON level=- margin=")

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ClassifierConfig(depth=0)
        with pytest.raises(ValueError):
            ClassifierConfig(radius=-1.0)


@given(st.lists(points, min_size=1, max_size=12))
def test_batch_equals_pointwise(zs):
    cfg = ClassifierConfig(depth=2)
    batch = classify_points(MIXED, zs, cfg)
    assert batch == [classify_point(MIXED, z, cfg) for z in zs]


@given(points)
def test_depth_monotone(z):
    deep = classify_point(MIXED, z, ClassifierConfig(depth=3))
    shallow = classify_point(MIXED, z, ClassifierConfig(depth=2))
    if deep.is_escaping:
        assert shallow.is_escaping


@given(points)
def test_level_nesting(z):
    cfg = ClassifierConfig(depth=2)
    c = classify_point(MIXED, z, cfg)
    if c.is_fast:
        assert member_at_level(MIXED, z, c.level, cfg)
        assert member_at_level(MIXED, z, c.level - 1, cfg)
        if c.level < cfg.max_level:
            assert not member_at_level(MIXED, z, c.level + 1, cfg)


@given(points)
def test_fast_implies_escaping(z):
    c = classify_point(MIXED, z, ClassifierConfig(depth=2))
    if c.is_fast:
        clf = Classifier(MIXED, ClassifierConfig(depth=2))
        assert all(clf.orbit(w, z).escaped for w in clf.words)


@given(points)
def test_cyclic_level_dominates(z):
    cfg = ClassifierConfig(depth=2)
    c = classify_point(MIXED, z, cfg)
    if c.is_fast:
        for f in MIXED.generators:
            cyc = classify_cyclic(f, z, cfg)
            assert cyc.is_fast and cyc.level >= c.level


@given(st.sampled_from([(0,), (1,), (0, 1), (1, 0, 1)]), st.builds(complex, st.floats(-1, 1), st.floats(-1, 1)), st.integers(1, 3))
def test_composition_coherence(idx, z, n):
    """The orbit of a word agrees with repeated generator evaluation."""
    w = Word(idx)
    r = orbit(w, MIXED, z, ClassifierConfig(iters=n, escape_log=1e9))
    v = complex(z)
    for step in range(n):
        for i in reversed(idx):
            v = MIXED.generators[i].evaluate(v)
            if isinstance(v, Overflow):
                return
        if abs(v) == 0:
            return
        assert r.log_mags[step] == pytest.approx(math.log(abs(v)), rel=1e-9, abs=1e-12)
