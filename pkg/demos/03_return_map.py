"""Return map, its derivatives and finite-time escape."""

import math

import numpy as np

from abelcycles import AbelEquation, BasisFamily, Escape, closed_cycle_checks, integrate, poincare

quad = BasisFamily.quadratic()
bern = AbelEquation(quad, (1, 0, 0), (0, 0, 0))  # x' = x^3 on [0, 1]
print("x' = x^3: P(x0) = x0 / sqrt(1 - 2 x0^2)")
for x0 in (0.1, 0.5, 0.7):
    r = poincare(bern, x0)
    print(f"  x0={x0}: P={r.P:.12f} exact={x0 / math.sqrt(1 - 2 * x0 * x0):.12f} "
          f"P'={r.dP:.6f} P''={r.d2P:.6f}")
esc = poincare(bern, 1.0)
assert isinstance(esc, Escape)
print(f"  x0=1 escapes at t={esc.t_blow:.12f} (exact 0.5)")

sep = AbelEquation(BasisFamily.trigonometric(), (0, 0, 0), (0, 0, -2 * math.pi))
tr = integrate(sep, 0.1)
s = np.linspace(0, 2 * math.pi, 5)
print("\nx' = -2 pi cos(t) x^2 is a center; dense output vs exact solution:")
print("  ", np.round(tr(s), 10))
print("  ", np.round(1 / (10 + 2 * math.pi * np.sin(s)), 10))
c = closed_cycle_checks(sep, 0.1)
print(f"  on a closed orbit h(T) = {c.h_T:.2e}; P'' = {c.d2p_closed:.3e} vs {c.d2p_lloyd:.3e}")
