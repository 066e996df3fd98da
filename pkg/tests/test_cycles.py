import dataclasses
import math

import numpy as np
import pytest

from abelcycles import (AbelEquation, PreconditionViolated, Stability,
                        basis_integrals, check_bound, classify, find_cycles,
                        isocline_diagnostics, lyapunov_constants, lyapunov_direct, verify_bound)
from abelcycles.basis import DEFAULT_NUMERICS
from abelcycles.cycles import LimitCycle

from conftest import QUAD, SHIFT12, SHIFT_HALF, TRIG, bernoulli, separable, trig_star


def test_trig_star_constants():
    r = lyapunov_constants(trig_star())
    assert abs(r.raw[0]) < 1e-10 and abs(r.raw[1]) < 1e-10
    assert r.V4 == pytest.approx(4 * math.pi ** 3, rel=1e-8)
    assert r.origin_multiplicity == 4


def test_quadratic_closed_forms():
    I, Imat = basis_integrals(QUAD)
    assert np.allclose(I, (1, 1 / 2, 1 / 3))
    assert Imat[0, 0] == pytest.approx(0.5)
    assert Imat[2, 1] == pytest.approx(1 / 10)


def test_shifted_integrals_oracle():
    for basis in (SHIFT12, SHIFT_HALF):
        a, b = basis.params
        ex = (0.0, a, b)
        I, Imat = basis_integrals(basis)
        assert np.allclose(I, [1 / (e + 1) for e in ex], rtol=1e-12)
        want = np.array([[(1 / (p + 1) - 1 / (p + q + 2)) / (q + 1) for q in ex] for p in ex])
        assert np.allclose(Imat, want, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("basis", [TRIG, QUAD, SHIFT12], ids=lambda b: b.label())
def test_assembly_matches_direct_quadrature(basis):
    rng = np.random.default_rng(2)
    n = 100 if basis is not SHIFT12 else 20
    for _ in range(n):
        eq = AbelEquation.from_eta(basis, rng.uniform(-3, 3, 6))
        r = lyapunov_constants(eq)
        direct = lyapunov_direct(eq)
        for v, w in zip(r.raw, direct):
            assert v == pytest.approx(w, abs=1e-10 * max(1.0, abs(w)))


def test_lyapunov_dominates_small_displacement():
    eq = AbelEquation(TRIG, (0.3, 1, 0), (0.02, 0, 1))
    r = lyapunov_constants(eq)
    assert r.origin_multiplicity == 2
    cfg = DEFAULT_NUMERICS.replace(ode_rel_tol=1e-12, ode_abs_tol=1e-16)
    from abelcycles import displacement
    x = 1e-4
    assert displacement(eq, x, cfg) / x ** 2 == pytest.approx(r.V2, rel=1e-2)


def test_V4_positive_in_LH():
    # on (H), i.e. D2 oriented and D1 failing, V2 = V3 = 0 forces V4 > 0
    rng = np.random.default_rng(9)
    I, _ = basis_integrals(TRIG)
    checked = 0
    for _ in range(400):
        eta = rng.uniform(-3, 3, 6)
        eta[0] = -(eta[1] * I[1] + eta[2] * I[2]) / I[0]
        eta[3] = -(eta[4] * I[1] + eta[5] * I[2]) / I[0]
        eq = AbelEquation.from_eta(TRIG, eta)
        try:
            cl = classify(eq, 1024)
        except Exception:
            continue
        if cl.in_LH:
            checked += 1
            assert lyapunov_constants(cl.oriented).V4 > 0
    assert checked > 20


def test_bernoulli_has_no_cycles():
    c = find_cycles(bernoulli())
    assert c.total_with_multiplicity == 0 and c.gaps
    assert all(abs(g[0]) >= 0.7 or abs(g[1]) >= 0.7 for g in c.gaps)


def test_center_detected():
    c = find_cycles(separable(), window=(-0.1, 0.1))
    assert c.center_suspect and c.total_with_multiplicity == 0
    assert lyapunov_constants(separable()).origin_multiplicity == "center-suspect"


def test_census_flip_symmetry():
    rng = np.random.default_rng(4)
    for _ in range(20):
        eq = AbelEquation.from_eta(TRIG, rng.uniform(-3, 3, 6))
        a, b = find_cycles(eq), find_cycles(eq.flipped())
        assert sorted(-c.x0 for c in a.cycles) == pytest.approx(sorted(c.x0 for c in b.cycles),
                                                                rel=1e-8)


def test_cycle_stability_matches_derivative(trig_sharpness):
    for c in trig_sharpness.census.cycles:
        assert c.multiplicity == 1
        assert (c.stability is Stability.STABLE) == (c.dP < 1)


def test_isocline_diagnostics(trig_sharpness):
    eq = trig_sharpness.perturbed
    cl = classify(eq)
    for c in trig_sharpness.census.cycles:
        r = isocline_diagnostics(eq, c, classification=cl)
        assert r.crossings in (1, 2) and max(r.per_component) <= 1
        assert r.extrema == r.crossings
    with pytest.raises(PreconditionViolated):
        isocline_diagnostics(AbelEquation(QUAD, (1, 0, 0), (0, 0, 0)),
                             LimitCycle(0.1, 0, 1, Stability.STABLE, 1))


def test_verify_bound_examples():
    v = verify_bound(AbelEquation(TRIG, (1, 0.2, 0), (0.3, 1, -1)))
    assert v.consistent and v.case == "L1"
    v = verify_bound(trig_star())
    assert v.consistent and v.case == "V2=V3=0,V4>0"
    assert v.census.total_with_multiplicity == 0


def test_check_bound_flags_excess():
    v = verify_bound(trig_star())
    fake = [LimitCycle(x, 0.0, 0.5, Stability.STABLE, 1) for x in (0.1, 0.2, 0.3)]
    census = dataclasses.replace(v.census, positive=fake, total_with_multiplicity=3,
                                 bound_satisfied=False)
    case, checks = check_bound(census, v.classification)
    assert not all(ok for _, ok in checks)


def test_random_census_bounded():
    rng = np.random.default_rng(1)
    for basis in (TRIG, QUAD):
        for _ in range(60):
            v = verify_bound(AbelEquation.from_eta(basis, rng.uniform(-3, 3, 6)))
            assert v.consistent, (v.case, v.checks)
            assert v.census.total_with_multiplicity <= 2
