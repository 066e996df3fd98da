"""Cycles under rotation in lam0: monotone motion, a fold and an origin event."""

from abelcycles import BasisFamily, fold_checks, locate_fold, sharpness_demo, sweep

demo = sharpness_demo(BasisFamily.trigonometric())
e = demo.perturbation[0]
res = sweep(demo.perturbed, "lam0", (2 * e, -0.5 * e), 64)
for b in res.branches:
    (p0, x0), (p1, x1) = b.points[0], b.points[-1]
    print(f"branch {b.branch_id} {b.stability.value:8s} lam0 {p0:+.5f} -> {p1:+.5f}, "
          f"x0 {x0:.5f} -> {x1:.5f}, monotone {res.monotone[b.branch_id]}")
for ev in res.events:
    print(f"{ev.kind:17s} in lam0 [{ev.bracket[0]:+.5f}, {ev.bracket[1]:+.5f}] "
          f"branches {ev.branches}")
fold = next(ev for ev in res.events if ev.kind == "Fold")
fp = locate_fold(demo.perturbed, "lam0", fold, res)
chk = fold_checks(fp)
print(f"double cycle at lam0={fp.param:.8f}, x0={fp.x0:.8f}, P'={fp.dP:.10f}")
print(f"h(T)={chk.h_T:.2e}; P'' two ways: {chk.d2p_closed:.6e}, {chk.d2p_lloyd:.6e}")
