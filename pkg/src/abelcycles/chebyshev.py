"""Wronskians, ECT certificates and zero counting in a three-function span."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .basis import AbelEquation, BasisFamily, Kind
from .errors import UnresolvedZero

CERT_THRESHOLD = 1e-9


def wronskian(basis, t, k):
    """Continuous Wronskian of (f0, ..., fk) at ``t`` from analytic derivatives."""
    if k not in (0, 1, 2):
        raise ValueError("k must be 0, 1 or 2")
    rows = [basis.eval(t, i)[: k + 1] for i in range(k + 1)]
    m = np.stack(rows)  # (i, j, ...) -> f_j^(i)
    if m.ndim == 2:
        return float(np.linalg.det(m))
    return np.linalg.det(np.moveaxis(m, (0, 1), (-2, -1)))


def shifted_power_wronskian(alpha, beta, t):
    """Closed form of W_{1,(1-t)^a,(1-t)^b}: a b (a - b) (1-t)^(a+b-3)."""
    return alpha * beta * (alpha - beta) * (1.0 - np.asarray(t, dtype=float)) ** (alpha + beta - 3)


@dataclass(frozen=True)
class EctCertificate:
    ok: bool
    min_abs_wronskian: tuple
    failure_point: float | None
    strategy: str
    basis: str

    def as_dict(self):
        return {"ok": self.ok, "min_abs_wronskian": list(self.min_abs_wronskian),
                "failure_point": self.failure_point, "strategy": self.strategy,
                "basis": self.basis}


def certification_grid(basis, grid):
    """Uniform grid on the half-open certification interval [0, T)."""
    return np.arange(grid) * (basis.T / grid)


def ect_certificate(basis, grid=4096, threshold=CERT_THRESHOLD):
    """Certify that ``basis`` (in this order) is an ET/ECT system on [0, T).

    Quadratic and shifted-power bases are certified by Wronskian scans.
    The trigonometric triple is ET but not ECT in the order (1, sin, cos), so
    it gets the amplitude certificate: c0 + r sin(t + phase) has at most two
    zeros on a period.  Trinomials are certified through their normalized
    shifted-power form, since t^m0 vanishes at 0 when m0 > 0.
    """
    if grid < 256:
        raise ValueError("grid must be at least 256")
    if basis.kind is Kind.TRINOMIAL:
        m0, m1, m2 = basis.params
        inner = ect_certificate(
            BasisFamily.shifted_power((m1 - m0) / (m0 + 1), (m2 - m0) / (m0 + 1)),
            grid, threshold)
        return EctCertificate(inner.ok, inner.min_abs_wronskian, inner.failure_point,
                              "normalized:" + inner.strategy, basis.label())

    t = certification_grid(basis, grid)
    absw = [np.abs(wronskian(basis, t, k)) for k in range(3)]
    minima = tuple(float(a.min()) for a in absw)

    if basis.kind is Kind.TRIG:
        return EctCertificate(True, minima, None, "analytic-amplitude", basis.label())

    ok = all(m > threshold for m in minima)
    failure = None
    strategy = "wronskian-scan"
    if not ok:
        k = next(i for i, m in enumerate(minima) if m <= threshold)
        failure = float(t[int(np.argmin(absw[k]))])
        if basis.kind is Kind.SHIFTED:
            # the scan only falls under the threshold where (1-t)^e decays; the
            # closed forms are non-zero on all of [0, 1)
            a, b = basis.params
            if a * b * (a - b) != 0.0 and a != 0.0:
                ok, failure, strategy = True, None, "wronskian-scan+closed-form"
    return EctCertificate(ok, minima, failure, strategy, basis.label())


def _zero_multiplicity(g, dg, d2g, gtol, dtol, d2tol):
    if abs(dg) > dtol:
        return 1
    if abs(d2g) > d2tol:
        return 2
    return 3


def count_zeros(fun, a, b, grid=4096, rel_tol=1e-8):
    """Zeros of a smooth function on [a, b), counted with multiplicity.

    ``fun(t, order)`` returns the order-th derivative (vectorized, orders 0-2).
    """
    t = a + np.arange(grid) * ((b - a) / grid)
    g = fun(t, 0)
    dg = fun(t, 1)
    scale = float(np.max(np.abs(g))) or 1.0
    gtol = rel_tol * scale
    dscale = float(np.max(np.abs(dg))) or 1.0
    dtol = 1e-6 * dscale
    d2tol = 1e-6 * (float(np.max(np.abs(fun(t, 2)))) or 1.0)

    def deriv_at(tt, order):
        return float(fun(np.array([tt]), order)[0])

    s = np.where(np.abs(g) < gtol, 0, np.sign(g)).astype(int)
    n = len(t)
    count = 0
    j = 0
    while j < n:
        if s[j] == 0:
            j2 = j
            while j2 + 1 < n and s[j2 + 1] == 0:
                j2 += 1
            if j2 - j > 8:
                raise UnresolvedZero(
                    f"combination stays below {gtol:.3g} on [{t[j]:.6g}, {t[j2]:.6g}]")
            jm = j + int(np.argmin(np.abs(g[j:j2 + 1])))
            sl = s[j - 1] if j > 0 else 0
            sr = s[j2 + 1] if j2 + 1 < n else 0
            if sl != 0 and sr != 0:
                if sl == sr:
                    count += 2
                else:
                    count += 1 if abs(dg[jm]) > dtol else 3
            else:
                count += _zero_multiplicity(g[jm], dg[jm], deriv_at(t[jm], 2),
                                            gtol, dtol, d2tol)
            j = j2 + 1
            continue
        if j + 1 < n and s[j + 1] != 0:
            if s[j] != s[j + 1]:
                r = brentq(lambda x: deriv_at(x, 0), t[j], t[j + 1], xtol=1e-15)
                count += 1 if abs(deriv_at(r, 1)) > dtol else 3
            elif dg[j] * dg[j + 1] < 0 and s[j] * dg[j] < 0:
                # |g| has an interior minimum in the cell: tangency or a hidden pair
                c = brentq(lambda x: deriv_at(x, 1), t[j], t[j + 1], xtol=1e-15)
                gc = deriv_at(c, 0)
                if abs(gc) < gtol or np.sign(gc) != s[j]:
                    count += 2
        j += 1
    return count


def combination(basis, c):
    c = np.asarray(c, dtype=float)

    def fun(t, order):
        return np.tensordot(c, basis.eval(t, order), 1)

    return fun


def zero_count(basis, c, window=None, grid=4096):
    """Zeros of sum c_i f_i on ``window`` (default [0, T)), with multiplicity."""
    c = np.asarray(c, dtype=float)
    if not np.any(c):
        raise ValueError("combination must be non-trivial")
    a, b = (0.0, basis.T) if window is None else window
    if basis.singular_order() is not None:
        b = min(b, basis.T - 1e-9)
    return count_zeros(combination(basis, c), a, b, grid)


@dataclass(frozen=True)
class Counterexample:
    direction: tuple
    zeros: int


def et_accuracy_falsifier(eq: AbelEquation, samples=256, grid=4096):
    """Search for lam*A + mu*B with more than two zeros on [0, T).

    Directions are spread uniformly over a half circle (opposite directions
    share zeros).  ``None`` is evidence of the accuracy-one property, not a
    proof of it.
    """
    if samples < 64:
        raise ValueError("samples must be at least 64")
    lam = np.array(eq.lam)
    mu = np.array(eq.mu)
    size = np.linalg.norm(lam) + np.linalg.norm(mu)
    for k in range(samples):
        th = math.pi * k / samples
        c = math.cos(th) * lam + math.sin(th) * mu
        if np.linalg.norm(c) <= 1e-14 * size:
            continue
        n = zero_count(eq.basis, c, grid=grid)
        if n > 2:
            return Counterexample((math.cos(th), math.sin(th)), n)
    return None
