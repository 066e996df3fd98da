"""Certify the three-function families and count zeros of their combinations."""

import numpy as np

from abelcycles import BasisFamily, ect_certificate, wronskian, zero_count

families = [BasisFamily.trigonometric(), BasisFamily.quadratic(),
            BasisFamily.shifted_power(1, 2), BasisFamily.shifted_power(0.5, 1.5),
            BasisFamily.trinomial(1, 3, 5)]

print("Certificates (ok, strategy, minimum |W| of each prefix):")
for b in families:
    c = ect_certificate(b)
    mins = ", ".join(f"{m:.3g}" for m in c.min_abs_wronskian)
    print(f"  {b.label():20s} ok={c.ok}  {c.strategy:32s} [{mins}]")

print("\nFull Wronskians at t = 0.3:")
for b in families[:3]:
    print(f"  {b.label():20s} W = {wronskian(b, 0.3, 2):+.6f}")

rng = np.random.default_rng(0)
print("\nLargest zero count over 200 random combinations (never above 2):")
for b in families[:4]:
    worst = max(zero_count(b, rng.uniform(-1, 1, 3)) for _ in range(200))
    print(f"  {b.label():20s} {worst}")

print("\n1 + sin t has a double zero at 3 pi / 2:", zero_count(families[0], (1, 1, 0)))
