"""Two small limit cycles bifurcating from a multiplicity-four origin."""

from abelcycles import BasisFamily, sharpness_demo

for basis in (BasisFamily.trigonometric(), BasisFamily.quadratic(),
              BasisFamily.trinomial(0, 1, 2)):
    r = sharpness_demo(basis)
    print(f"{basis.label()}: V4*={r.V4_star:.6g}, perturbation {r.perturbation}")
    for c in r.census.cycles:
        print(f"    x0={c.x0:.6g}  P'={c.dP:.6f}  {c.stability.value}")
    print(f"    {r.census.total_with_multiplicity} non-zero cycles + origin, "
          f"consistent={r.consistent}")
