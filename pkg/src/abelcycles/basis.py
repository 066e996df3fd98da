"""Coefficient spaces and the Abel equation value object.

Four three-function families are supported:

* ``trig``       (1, sin t, cos t) on [0, 2*pi]
* ``quadratic``  (1, t, t^2) on [0, 1]
* ``trinomial``  (t^m0, t^m1, t^m2) on [0, 1], integers 0 <= m0 < m1 < m2
* ``shifted``    (1, (1-t)^alpha, (1-t)^beta) on [0, 1], 0 < alpha < beta

An equation ``dx/dt = A(t) x^3 + B(t) x^2`` is given by a family and two
coefficient triples, ``A = sum lam_i f_i`` and ``B = sum mu_i f_i``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, SingularityError


class Kind(str, Enum):
    TRIG = "trig"
    QUADRATIC = "quadratic"
    TRINOMIAL = "trinomial"
    SHIFTED = "shifted"


_KIND_CODE = {Kind.TRIG: 0, Kind.QUADRATIC: 1, Kind.TRINOMIAL: 2, Kind.SHIFTED: 3}


def _falling(e, k):
    """e (e-1) ... (e-k+1)"""
    out = 1.0
    for j in range(k):
        out *= e - j
    return out


@dataclass(frozen=True)
class BasisFamily:
    """An ordered triple (f0, f1, f2) of C^2 functions on [0, T]."""

    kind: Kind
    params: tuple = ()

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (Kind.TRIG, Kind.QUADRATIC):
            if self.params:
                raise ValueError(f"{kind.value} basis takes no parameters")
        elif kind is Kind.TRINOMIAL:
            if len(self.params) != 3:
                raise ValueError("trinomial basis needs (m0, m1, m2)")
            m = tuple(int(v) for v in self.params)
            if any(v != float(w) for v, w in zip(m, self.params)):
                raise ValueError("trinomial exponents must be integers")
            if not 0 <= m[0] < m[1] < m[2]:
                raise ValueError("trinomial exponents must satisfy 0 <= m0 < m1 < m2")
            object.__setattr__(self, "params", m)
        else:
            if len(self.params) != 2:
                raise ValueError("shifted power basis needs (alpha, beta)")
            a, b = (float(v) for v in self.params)
            if not 0 < a < b:
                raise ValueError("shifted power basis needs 0 < alpha < beta")
            object.__setattr__(self, "params", (a, b))

    @classmethod
    def trigonometric(cls):
        return cls(Kind.TRIG)

    @classmethod
    def quadratic(cls):
        return cls(Kind.QUADRATIC)

    @classmethod
    def trinomial(cls, m0, m1, m2):
        return cls(Kind.TRINOMIAL, (m0, m1, m2))

    @classmethod
    def shifted_power(cls, alpha, beta):
        return cls(Kind.SHIFTED, (alpha, beta))

    @property
    def T(self):
        return 2.0 * math.pi if self.kind is Kind.TRIG else 1.0

    @property
    def code(self):
        return _KIND_CODE[self.kind]

    @property
    def exponents(self):
        """Parameter array in the layout the compiled kernels expect."""
        p = np.zeros(3)
        p[: len(self.params)] = self.params
        return p

    @property
    def f0_positive(self):
        """True when f0 > 0 on all of [0, T]."""
        return self.kind is not Kind.TRINOMIAL or self.params[0] == 0

    def label(self):
        if self.params:
            return f"{self.kind.value}({', '.join(f'{v:g}' for v in self.params)})"
        return self.kind.value

    def singular_order(self):
        """Smallest derivative order that is unbounded at the right end, or None."""
        if self.kind is not Kind.SHIFTED:
            return None
        for k in (1, 2):
            for e in self.params:
                if _falling(e, k) != 0.0 and e - k < 0:
                    return k
        return None

    def eval(self, t, order=0):
        """Values of (f0, f1, f2) or their ``order``-th derivatives.

        ``t`` may be a scalar or an array; the result has shape ``(3,) + t.shape``.
        """
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        t = np.asarray(t, dtype=float)
        T = self.T
        slack = 1e-12 * T
        if np.any(t < -slack) or np.any(t > T + slack):
            raise DomainError(f"t outside [0, {T:g}] for {self.label()} basis")
        t = np.clip(t, 0.0, T)
        k = self.kind
        if k is Kind.TRIG:
            one = np.ones_like(t)
            s, c = np.sin(t), np.cos(t)
            if order == 0:
                return np.stack([one, s, c])
            if order == 1:
                return np.stack([0 * one, c, -s])
            return np.stack([0 * one, -s, -c])
        if k is Kind.QUADRATIC:
            one = np.ones_like(t)
            if order == 0:
                return np.stack([one, t, t * t])
            if order == 1:
                return np.stack([0 * one, one, 2 * t])
            return np.stack([0 * one, 0 * one, 2 * one])
        if k is Kind.TRINOMIAL:
            rows = []
            for m in self.params:
                c = _falling(m, order)
                if c == 0.0:
                    rows.append(np.zeros_like(t))
                else:
                    rows.append(c * t ** (m - order))
            return np.stack(rows)
        # shifted power
        s = 1.0 - t
        sing = self.singular_order()
        if order >= 1 and sing is not None and order >= sing and np.any(s <= 0.0):
            raise SingularityError(
                f"order-{order} derivative of {self.label()} basis is unbounded at t = 1")
        rows = [np.ones_like(t) if order == 0 else np.zeros_like(t)]
        for e in self.params:
            c = _falling(e, order) * (-1.0) ** order
            if c == 0.0:
                rows.append(np.zeros_like(t))
            else:
                with np.errstate(divide="ignore"):
                    rows.append(c * s ** (e - order))
        return np.stack(rows)


def eval_basis(basis, t, order=0):
    """(f0, f1, f2) derivatives of the given order at ``t``."""
    return basis.eval(t, order)


def _triple(v, name):
    v = tuple(float(x) for x in v)
    if len(v) != 3:
        raise ValueError(f"{name} must have three components")
    return v


@dataclass(frozen=True)
class AbelEquation:
    """``dx/dt = A(t) x^3 + B(t) x^2`` with A, B in the span of ``basis``."""

    basis: BasisFamily
    lam: tuple
    mu: tuple

    def __post_init__(self):
        object.__setattr__(self, "lam", _triple(self.lam, "lam"))
        object.__setattr__(self, "mu", _triple(self.mu, "mu"))

    @property
    def T(self):
        return self.basis.T

    @property
    def eta(self):
        return self.lam + self.mu

    @classmethod
    def from_eta(cls, basis, eta):
        eta = tuple(eta)
        return cls(basis, eta[:3], eta[3:])

    def replace(self, lam0=None, mu0=None, lam=None, mu=None):
        lam = list(self.lam if lam is None else lam)
        mu = list(self.mu if mu is None else mu)
        if lam0 is not None:
            lam[0] = lam0
        if mu0 is not None:
            mu[0] = mu0
        return dataclasses.replace(self, lam=tuple(lam), mu=tuple(mu))

    def flipped(self):
        """The equation seen in the variable y = -x, i.e. (A, B) -> (A, -B)."""
        return AbelEquation(self.basis, self.lam, tuple(-v for v in self.mu))

    def scaled(self, s):
        return AbelEquation(self.basis, tuple(s * v for v in self.lam),
                            tuple(s * v for v in self.mu))

    def coeffs(self, t):
        """(A, B, A', B') at ``t``."""
        return eval_coeffs(self, t)

    def AB(self, t):
        f = self.basis.eval(t, 0)
        lam, mu = np.array(self.lam), np.array(self.mu)
        return np.tensordot(lam, f, 1), np.tensordot(mu, f, 1)

    def kernel_args(self):
        return (self.basis.code, self.basis.exponents,
                np.array(self.lam), np.array(self.mu))


def eval_coeffs(eq, t):
    """A, B and their first derivatives at ``t`` (scalar or array)."""
    f = eq.basis.eval(t, 0)
    df = eq.basis.eval(t, 1)
    lam, mu = np.array(eq.lam), np.array(eq.mu)
    return (np.tensordot(lam, f, 1), np.tensordot(mu, f, 1),
            np.tensordot(lam, df, 1), np.tensordot(mu, df, 1))


def normalize_trinomial(eq):
    """Map a trinomial equation to an equivalent shifted-power equation.

    The time change s = t^(m0+1) turns (t^m0, t^m1, t^m2) into
    (1, s^alpha, s^beta) / (m0+1) with alpha = (m1-m0)/(m0+1) and
    beta = (m2-m0)/(m0+1); reversing time u = 1 - s then gives the basis
    (1, (1-u)^alpha, (1-u)^beta) with negated coefficients.  Both maps send
    closed solutions to closed solutions with the same initial value; the
    reversal swaps stable and unstable.
    """
    if eq.basis.kind is not Kind.TRINOMIAL:
        raise ValueError("normalize_trinomial needs a trinomial equation")
    m0, m1, m2 = eq.basis.params
    scale = -1.0 / (m0 + 1)
    basis = BasisFamily.shifted_power((m1 - m0) / (m0 + 1), (m2 - m0) / (m0 + 1))
    return AbelEquation(basis, [scale * v for v in eq.lam], [scale * v for v in eq.mu])


def denormalize_trinomial(eq, m):
    """Inverse of :func:`normalize_trinomial` for exponents ``m``."""
    m0, m1, m2 = m
    basis = BasisFamily.trinomial(m0, m1, m2)
    expected = ((m1 - m0) / (m0 + 1), (m2 - m0) / (m0 + 1))
    if eq.basis.kind is not Kind.SHIFTED or not np.allclose(eq.basis.params, expected):
        raise ValueError("equation basis does not match the trinomial exponents")
    scale = -(m0 + 1.0)
    return AbelEquation(basis, [scale * v for v in eq.lam], [scale * v for v in eq.mu])


@dataclass(frozen=True)
class NumericsConfig:
    ode_rel_tol: float = 1e-10
    ode_abs_tol: float = 1e-12
    blowup_threshold: float = 1e6
    quad_tol: float = 1e-12
    grid_points: int = 80
    newton_tol: float = 1e-12
    newton_max_iter: int = 60
    double_cycle_tol: float = 1e-6
    boundary_margin: float = 1e-9
    origin_exclusion: float = 1e-4
    x_max: float = 20.0
    scan_grid: int = 4096

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not v > 0:
                raise ValueError(f"{f.name} must be positive, got {v!r}")
        if self.origin_exclusion >= self.x_max:
            raise ValueError("origin_exclusion must be below x_max")

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    def as_dict(self):
        return dataclasses.asdict(self)


DEFAULT_NUMERICS = NumericsConfig()
