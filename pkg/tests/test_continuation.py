
import pytest

from abelcycles import (BasisFamily, PreconditionViolated, Stability, branch_monotone,
                        fold_checks, locate_fold, lyapunov_constants, persistence_step,
                        sharpness_demo, sweep, verify_bound)
from abelcycles.continuation import rotation_sign, sharpness_star, with_param

from conftest import QUAD, TRIG, trig_star


def _two_cycles(r):
    assert r.consistent
    assert r.census.total_with_multiplicity == 2
    assert all(c.multiplicity == 1 for c in r.census.cycles)
    assert r.as_dict()["total_limit_cycles"] == 3
    assert verify_bound(r.perturbed).consistent


def test_sharpness_trig(trig_sharpness):
    _two_cycles(trig_sharpness)
    st = {c.stability for c in trig_sharpness.census.cycles}
    assert st == {Stability.STABLE, Stability.UNSTABLE}
    # both cycles near the model roots r and r / 4
    xs = sorted(abs(c.x0) for c in trig_sharpness.census.cycles)
    r1, r2 = sorted(trig_sharpness.roots)
    assert xs[0] == pytest.approx(r1, rel=0.2) and xs[1] == pytest.approx(r2, rel=0.2)


def test_sharpness_quadratic():
    _two_cycles(sharpness_demo(QUAD))


def test_sharpness_trinomial_via_normalization():
    r = sharpness_demo(BasisFamily.trinomial(0, 1, 2))
    _two_cycles(r)
    assert r.normalized is not None
    inner = sorted(c.x0 for c in r.normalized.census.cycles)
    assert sorted(c.x0 for c in r.census.cycles) == pytest.approx(inner, rel=1e-6)


def test_star_has_order_four_origin():
    for basis in (TRIG, QUAD):
        rep = lyapunov_constants(sharpness_star(basis))
        assert rep.origin_multiplicity == 4


def test_rotation_signs():
    assert rotation_sign("lam0", 1) == 1 and rotation_sign("lam0", -1) == -1
    assert rotation_sign("mu0", -1) == 1
    with pytest.raises(ValueError):
        with_param(trig_star(), "lam1", 0)


def test_sweep_events(trig_sweep):
    folds = [e for e in trig_sweep.events if e.kind == "Fold"]
    assert len(folds) == 1 and len(folds[0].branches) == 2
    step = abs(trig_sweep.values[1] - trig_sweep.values[0])
    origin = [e for e in trig_sweep.events if e.kind == "HopfLikeAtOrigin"]
    # V3 = 2 pi lam0 changes sign at lam0 = 0 only
    assert len(origin) == 1
    lo, hi = origin[0].bracket
    assert lo < 0 < hi and hi - lo <= 2 * step + 1e-15
    assert all(trig_sweep.monotone.values())


def test_fold_location(trig_sharpness, trig_sweep):
    fold = next(e for e in trig_sweep.events if e.kind == "Fold")
    fp = locate_fold(trig_sharpness.perturbed, "lam0", fold, trig_sweep)
    lo, hi = fold.bracket
    assert min(lo, hi) <= fp.param <= max(lo, hi)
    assert fp.dP == pytest.approx(1.0, abs=1e-6)
    chk = fold_checks(fp)
    assert abs(chk.h_T) < 1e-6
    assert chk.d2p_closed == pytest.approx(chk.d2p_lloyd, rel=1e-4)
    # the fold sits where V3 = -2 sqrt(V2 V4), i.e. lam0 = 0.8 * eps_lam
    assert fp.param == pytest.approx(0.8 * trig_sharpness.perturbation[0], rel=1e-2)


def test_branch_monotone_detects_wrong_direction():
    from abelcycles import Branch
    br = Branch(0, 1, Stability.STABLE, [(0.0, 1.0), (0.1, 0.9)])
    assert not branch_monotone(br, "lam0", [])
    br = Branch(0, 1, Stability.STABLE, [(0.0, 1.0), (0.1, 1.1)])
    assert branch_monotone(br, "lam0", [])


def test_persistence(trig_sharpness):
    eq = trig_sharpness.perturbed
    c = min(trig_sharpness.census.cycles, key=lambda c: abs(c.x0))
    out = persistence_step(eq, "lam0", eq.lam[0], c.x0, 1e-3)
    assert out is not None
    step, nxt = out
    assert 0 < step <= 1e-3 and nxt.stability == c.stability


def test_sweep_rejects_trinomial():
    from abelcycles import AbelEquation
    eq = AbelEquation(BasisFamily.trinomial(1, 2, 3), (1, 0, 0), (0, 0, 1))
    with pytest.raises(PreconditionViolated):
        sweep(eq, "lam0", (0, 1), 8)
