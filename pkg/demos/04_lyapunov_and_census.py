"""Lyapunov constants at x = 0 and the census of non-zero limit cycles."""

import numpy as np

from abelcycles import AbelEquation, BasisFamily, lyapunov_constants, verify_bound

trig = BasisFamily.trigonometric()
star = AbelEquation(trig, (0, -2 * np.pi, 0), (0, 0, -2 * np.pi))
r = lyapunov_constants(star)
print(f"V2={r.raw[0]:.3g} V3={r.raw[1]:.3g} V4={r.raw[2]:.6f} (4 pi^3 = {4 * np.pi ** 3:.6f})")
print(f"origin multiplicity {r.origin_multiplicity}, {r.origin_stability.value}")

rng = np.random.default_rng(1)
print("\nRandom trigonometric equations:")
for _ in range(8):
    eq = AbelEquation.from_eta(trig, rng.uniform(-3, 3, 6))
    v = verify_bound(eq)
    cyc = ", ".join(f"{c.x0:+.4f} {c.stability.value}" for c in v.census.cycles) or "none"
    print(f"  case {v.case:6s} consistent={v.consistent}  cycles: {cyc}")
