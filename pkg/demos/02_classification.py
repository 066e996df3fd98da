"""Which of the two sign conditions holds for a coefficient pair {A, B}."""

import math

from abelcycles import AbelEquation, BasisFamily, classify, combination_range

trig, quad = BasisFamily.trigonometric(), BasisFamily.quadratic()
cases = {
    "A = t^2/2 + t/4, B = t^2 - 1": AbelEquation(quad, (0, 0.25, 0.5), (-1, 0, 1)),
    "trig pair with a signed combination": AbelEquation(trig, (1, -0.5, -2.5), (1, -0.5, -1.5)),
    "trig pair with monotone B/A": AbelEquation(trig, (1, 0.1, -3), (1, -2, -2)),
    "A = -2 pi sin t, B = -2 pi cos t": AbelEquation(trig, (0, -2 * math.pi, 0),
                                                      (0, 0, -2 * math.pi)),
}
for name, eq in cases.items():
    r = classify(eq)
    print(f"{name}\n  verdict {r.verdict}, in L1 {r.in_L1}, in LH {r.in_LH}")
    if r.d1:
        print(f"  one-signed combination {tuple(round(v, 4) for v in r.d1.direction)} "
              f"{r.d1.sign} with margin {r.d1.certified_min:.6f}")
    if r.d2:
        print(f"  A B' - A' B has sign {'+' if r.d2.sign > 0 else '-'}, "
              f"min |.| = {r.d2.min_abs:.6f}; flipped to (H): {r.flipped}")

lo, hi = combination_range(cases["trig pair with a signed combination"], 0.55, -1)
print(f"\n0.55 A - B ranges over [{lo:.6f}, {hi:.6f}], "
      f"i.e. -0.45 +- {math.hypot(0.125, 0.225):.6f}")
