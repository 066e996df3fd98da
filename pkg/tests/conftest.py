import math

import pytest

from abelcycles import AbelEquation, BasisFamily

TWO_PI = 2 * math.pi

TRIG = BasisFamily.trigonometric()
QUAD = BasisFamily.quadratic()
SHIFT12 = BasisFamily.shifted_power(1, 2)
SHIFT_HALF = BasisFamily.shifted_power(0.5, 1.5)
FAMILIES = [TRIG, QUAD, SHIFT12, SHIFT_HALF, BasisFamily.trinomial(1, 3, 5)]


def quadratic_pair():
    """A = t^2/2 + t/4, B = t^2 - 1 on the quadratic basis."""
    return AbelEquation(QUAD, (0, 0.25, 0.5), (-1, 0, 1))


def signed_trig_pair():
    return AbelEquation(TRIG, (1, -0.5, -2.5), (1, -0.5, -1.5))


def monotone_trig_pair():
    return AbelEquation(TRIG, (1, 0.1, -3), (1, -2, -2))


def trig_star():
    return AbelEquation(TRIG, (0, -TWO_PI, 0), (0, 0, -TWO_PI))


def separable(mu2=-TWO_PI):
    """A = 0, B = mu2 cos t: 1/x = 1/x0 - mu2 sin t."""
    return AbelEquation(TRIG, (0, 0, 0), (0, 0, mu2))


def bernoulli():
    """A = 1, B = 0 on [0, 1]: x = x0 / sqrt(1 - 2 t x0^2)."""
    return AbelEquation(QUAD, (1, 0, 0), (0, 0, 0))


@pytest.fixture(scope="session")
def trig_sharpness():
    from abelcycles import sharpness_demo
    return sharpness_demo(TRIG)


@pytest.fixture(scope="session")
def trig_sweep(trig_sharpness):
    from abelcycles import sweep
    e_lam = trig_sharpness.perturbation[0]
    return sweep(trig_sharpness.perturbed, "lam0", (2 * e_lam, -0.5 * e_lam), 64)
