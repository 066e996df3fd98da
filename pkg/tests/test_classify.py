import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelcycles import AbelEquation, classify, combination_range, d1_witness, d2_sign
from abelcycles.classify import wronskian_pair

from conftest import QUAD, SHIFT_HALF, TRIG, signed_trig_pair, monotone_trig_pair, quadratic_pair, trig_star


def test_quadratic_pair():
    r = classify(quadratic_pair())
    assert r.verdict == "Both" and r.in_L1 and not r.in_LH
    assert r.d1.certified_min >= 0.5 / math.hypot(1, 0.5) - 1e-9
    # the certified combination t/4 + 1/2 from the example
    lo, hi = combination_range(quadratic_pair(), 1.0, -0.5)
    assert lo == pytest.approx(0.5, abs=1e-12) and hi == pytest.approx(0.75, abs=1e-12)
    assert r.d2.sign == 1
    assert r.d2.min_abs == pytest.approx(0.25, abs=1e-9)


def test_quadratic_pair_wronskian_identity():
    t = np.linspace(0, 1, 101)
    assert np.allclose(t ** 2 + 4 * t + 1, 4 * wronskian_pair(quadratic_pair(), t), atol=1e-13)


def test_signed_trig_pair():
    r = classify(signed_trig_pair())
    assert r.verdict == "D1Only" and r.d1.sign == "<=0"
    lo, hi = combination_range(signed_trig_pair(), 0.55, -1.0)
    amp = math.hypot(0.125, 0.225)
    assert lo == pytest.approx(-0.45 - amp, abs=1e-9)
    assert hi == pytest.approx(-0.45 + amp, abs=1e-9)


def test_monotone_trig_pair():
    r = d2_sign(monotone_trig_pair())
    assert r.sign == 1
    assert r.min_abs == pytest.approx(6.2 - math.hypot(2.1, 1.0), abs=1e-9)


def test_trig_star_in_LH():
    r = classify(trig_star())
    assert r.verdict == "D2Only" and r.in_LH and r.d2.sign == -1 and not r.flipped
    assert r.d2.min_abs == pytest.approx(4 * math.pi ** 2, rel=1e-9)
    assert r.oriented == trig_star()


def test_flip_orientation():
    r = classify(quadratic_pair())
    assert r.flipped and r.oriented == quadratic_pair().flipped()
    assert d2_sign(r.oriented).sign == -1


def test_other_examples():
    assert classify(AbelEquation(QUAD, (1, 0, 0), (0, 0, 0))).verdict == "D1Only"
    w = d1_witness(AbelEquation(QUAD, (1, 0, 0), (0, 0, 0)))
    assert w.direction == pytest.approx((1, 0))
    assert classify(AbelEquation(TRIG, (0, 1, 0), (0, 0, 1))).verdict == "D2Only"


@pytest.mark.parametrize("basis", [TRIG, QUAD, SHIFT_HALF], ids=lambda b: b.label())
def test_random_never_neither(basis):
    rng = np.random.default_rng(3)
    n = 500 if basis is not SHIFT_HALF else 200
    for _ in range(n):
        eq = AbelEquation.from_eta(basis, rng.uniform(-3, 3, 6))
        try:
            r = classify(eq, grid=2048)
        except Exception as exc:  # band hits are legitimate, violations are not
            assert type(exc).__name__ == "Indeterminate"
            continue
        assert r.verdict != "Neither"
        assert r.in_L1 == (r.d1 is not None)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6), st.floats(0.1, 10))
def test_scale_invariance(eta, s):
    eq = AbelEquation.from_eta(TRIG, eta)
    try:
        a, b = classify(eq, 1024), classify(eq.scaled(s), 1024)
    except Exception:
        return
    assert a.verdict == b.verdict
    if a.d1 and b.d1:
        assert b.d1.certified_min == pytest.approx(s * a.d1.certified_min, rel=1e-6, abs=1e-9)


def test_ratio_monotone_on_components():
    eq = monotone_trig_pair()
    t = np.linspace(0, eq.T, 20001)
    A, B = eq.AB(t)
    comps = np.split(np.arange(len(t)), np.nonzero(np.diff(np.sign(A)))[0] + 1)
    for c in comps:
        c = c[np.abs(A[c]) > 1e-6]
        if len(c) > 2:
            q = np.diff(B[c] / A[c])
            assert np.all(q > 0) or np.all(q < 0)


def test_segment_from_star_reaches_L1():
    # moving lam0 off the star eventually makes (D.1) hold
    star, far = trig_star(), trig_star().replace(lam0=20.0)
    verdicts = []
    for s in np.linspace(0, 1, 11):
        eta = (1 - s) * np.array(star.eta) + s * np.array(far.eta)
        verdicts.append(classify(AbelEquation.from_eta(TRIG, eta), 1024).in_L1)
    assert not verdicts[0] and verdicts[-1]
    k = verdicts.index(True)
    assert all(verdicts[k:])


@pytest.mark.parametrize("s", [1.0, 3.0])
def test_nearly_proportional_pair_has_witness(s):
    # A = 2 sin t + 2e-16 cos t, B = sin t: A B' - A' B is a constant 2e-16
    eq = AbelEquation.from_eta(TRIG, [0.0, 2.0, 2.220446049250313e-16, 0.0, 1.0, 0.0]).scaled(s)
    r = classify(eq, 1024)
    assert r.verdict == "D1Only"
    assert r.d1.direction == pytest.approx((1 / math.sqrt(5), -2 / math.sqrt(5)))
