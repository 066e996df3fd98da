import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelcycles import (AbelEquation, BasisFamily, UnresolvedZero, ect_certificate,
                        et_accuracy_falsifier, shifted_power_wronskian, wronskian, zero_count)
from abelcycles.chebyshev import count_zeros

from conftest import QUAD, SHIFT12, SHIFT_HALF, TRIG


def test_wronskian_examples():
    t = np.linspace(0, 0.99, 50)
    assert np.all(wronskian(QUAD, t, 2) == 2.0)
    assert wronskian(QUAD, 0.5, 2) == 2.0
    assert np.allclose(wronskian(TRIG, np.linspace(0, 6.2, 50), 2), -1.0, rtol=0, atol=1e-12)
    assert wronskian(SHIFT12, 0.3, 2) == pytest.approx(-2.0)


def test_shifted_wronskian_symbolic_oracle():
    sp = pytest.importorskip("sympy")
    t = sp.Symbol("t")
    for a, b in ((1, 2), (0.5, 1.5), (0.7, 3.1)):
        fs = [sp.Integer(1), (1 - t) ** sp.nsimplify(a), (1 - t) ** sp.nsimplify(b)]
        W = sp.lambdify(t, sp.simplify(sp.Matrix(3, 3, lambda i, j: sp.diff(fs[j], t, i)).det()))
        ts = np.linspace(0, 0.95, 100)
        want = np.array([float(W(v)) for v in ts])
        got = wronskian(BasisFamily.shifted_power(a, b), ts, 2)
        assert np.allclose(got, want, rtol=1e-10, atol=0)
        assert np.allclose(shifted_power_wronskian(a, b, ts), want, rtol=1e-10, atol=0)


@pytest.mark.parametrize("basis", [TRIG, QUAD, SHIFT12, SHIFT_HALF], ids=lambda b: b.label())
def test_wronskian_finite_difference(basis):
    # W_{f0, f1} = f0 f1' - f0' f1 against differenced f1 / f0
    t = np.linspace(0.01, 0.9 * basis.T, 200)
    f = basis.eval(t, 0)
    h = 1e-6
    q = lambda s: basis.eval(s, 0)[1] / basis.eval(s, 0)[0]
    fd = (q(t + h) - q(t - h)) / (2 * h) * f[0] ** 2
    assert np.allclose(wronskian(basis, t, 1), fd, rtol=1e-4, atol=1e-6)


def test_certificates():
    c = ect_certificate(QUAD)
    assert c.ok and c.failure_point is None
    assert np.allclose(c.min_abs_wronskian, (1, 1, 2))
    assert ect_certificate(TRIG).ok
    assert ect_certificate(TRIG).strategy == "analytic-amplitude"
    assert ect_certificate(SHIFT12).ok
    assert ect_certificate(SHIFT_HALF).ok
    tri = ect_certificate(BasisFamily.trinomial(1, 3, 5))
    assert tri.ok and tri.strategy.startswith("normalized:")
    d = c.as_dict()
    assert d["ok"] is True and len(d["min_abs_wronskian"]) == 3


def test_zero_count_examples():
    assert zero_count(TRIG, (0, 1, 0)) == 2
    assert zero_count(TRIG, (1, 1, 0)) == 2
    assert zero_count(QUAD, (-0.25, 0, 1)) == 1
    assert zero_count(QUAD, (0.12, -0.7, 1)) == 2
    assert zero_count(QUAD, (0.25, -1, 1)) == 2  # double root at 1/2
    assert zero_count(QUAD, (1, 0, 1)) == 0
    assert zero_count(TRIG, (0, 1, 0), window=(0.5, 6.0)) == 1
    assert zero_count(QUAD, (0, 0, 1)) == 2  # t^2 at t = 0


def test_zero_count_unresolved():
    with pytest.raises(UnresolvedZero):
        count_zeros(lambda t, k: np.zeros_like(np.asarray(t, float)), 0, 1, grid=256)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda c: max(map(abs, c)) > 1e-3),
       st.floats(0.01, 100))
def test_zero_count_scale_invariant(c, s):
    for basis in (QUAD, TRIG):
        assert zero_count(basis, c, grid=1024) == zero_count(basis, np.multiply(s, c), grid=1024)


@pytest.mark.parametrize("basis", [TRIG, QUAD, SHIFT12, SHIFT_HALF], ids=lambda b: b.label())
def test_random_combinations_at_most_two(basis):
    rng = np.random.default_rng(11)
    for _ in range(200):
        assert zero_count(basis, rng.uniform(-1, 1, 3), grid=2048) <= 2


def test_falsifier():
    assert et_accuracy_falsifier(AbelEquation(TRIG, (1, 2, 3), (0, -1, 2)), 64, 1024) is None
    assert et_accuracy_falsifier(AbelEquation(QUAD, (1, -1, 0.5), (0, 2, -1)), 64, 1024) is None
    tri = BasisFamily.trinomial(2, 3, 4)
    ce = et_accuracy_falsifier(AbelEquation(tri, (1, 0, 0), (0, 1, 0)), 64, 2048)
    assert ce is not None and ce.zeros >= 3
    assert math.hypot(*ce.direction) == pytest.approx(1.0)
