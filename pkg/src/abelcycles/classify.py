"""Quasi-dichotomy classification of a coefficient pair {A, B}.

(D.1) some non-trivial combination lam A + mu B keeps one sign on [0, T).
(D.2) the Wronskian-like quantity A B' - A' B keeps one sign on [0, T).

Every pair from an ET-system with accuracy one satisfies at least one of
them.  The substitution x -> -x maps (A, B) to (A, -B), which flips the
sign of A B' - A' B, so (D.2) can always be oriented so that
A' B - A B' > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .basis import AbelEquation
from .errors import Indeterminate

BAND = 1e-7
WITNESS_TOL = 1e-9
THETA_SCAN = 720


@dataclass(frozen=True)
class D1Witness:
    """Unit direction (lam, mu) with sign * (lam A + mu B) >= certified_min."""

    direction: tuple
    sign: str  # ">=0" or "<=0"
    certified_min: float


@dataclass(frozen=True)
class D2Sign:
    sign: int  # +1 or -1, sign of A B' - A' B
    min_abs: float


@dataclass(frozen=True)
class ClassificationResult:
    d1: D1Witness | None
    d2: D2Sign | None
    verdict: str
    in_L1: bool
    in_LH: bool
    flipped: bool
    oriented: AbelEquation | None

    @property
    def violation(self):
        """True for the verdict the ET-accuracy-one premise rules out."""
        return self.verdict == "Neither"

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "in_L1": self.in_L1,
            "in_LH": self.in_LH,
            "flipped": self.flipped,
            "d1": None if self.d1 is None else {
                "direction": list(self.d1.direction), "sign": self.d1.sign,
                "certified_min": self.d1.certified_min},
            "d2": None if self.d2 is None else {
                "sign": "+" if self.d2.sign > 0 else "-", "min_abs": self.d2.min_abs},
        }


def _right_end(eq, margin):
    return eq.T - (margin if eq.basis.singular_order() is not None else 0.0)


def wronskian_pair(eq, t):
    """A B' - A' B at ``t``."""
    A, B, dA, dB = eq.coeffs(t)
    return A * dB - dA * B


def _refine_min(fun, t, k, lo, hi):
    """Refine a grid minimum of ``fun`` at index ``k`` by a bounded search."""
    a = t[max(k - 1, 0)]
    b = t[min(k + 1, len(t) - 1)]
    best_t, best = t[k], float(fun(np.array([t[k]]))[0])
    if b > a:
        r = minimize_scalar(lambda s: float(fun(np.array([s]))[0]), bounds=(a, b),
                            method="bounded", options={"xatol": 1e-13 * max(hi - lo, 1.0)})
        if r.fun < best:
            best_t, best = float(r.x), float(r.fun)
    return best_t, best


def d2_sign(eq: AbelEquation, grid=4096, margin=1e-9):
    """Sign of A B' - A' B on [0, T - margin], or ``None``.

    Raises
    ------
    Indeterminate
        If the values are one-signed but dip into the tolerance band.
    """
    if grid < 1024:
        raise ValueError("grid must be at least 1024")
    b = _right_end(eq, margin)
    t = np.linspace(0.0, b, grid + 1)
    A, B, dA, dB = eq.coeffs(t)
    w = A * dB - dA * B
    scale = float(np.max(np.abs(A * dB) + np.abs(dA * B)))
    if scale == 0.0 or np.max(np.abs(w)) <= 1e-12 * scale:
        return None
    band = BAND * scale
    if np.any(w > band) and np.any(w < -band):
        return None
    sign = 1 if np.max(w) > band else -1
    k = int(np.argmin(sign * w))
    _, m = _refine_min(lambda s: sign * wronskian_pair(eq, s), t, k, 0.0, b)
    if m <= band:
        raise Indeterminate(
            f"A B' - A' B keeps one sign but reaches {sign * m:.3g} inside the band {band:.3g}")
    return D2Sign(sign, m)


def combination_range(eq: AbelEquation, lam, mu, grid=4096):
    """Refined (min, max) of lam A + mu B over [0, T]."""
    t = np.linspace(0.0, eq.T, grid + 1)

    def g(s):
        A, B = eq.AB(s)
        return lam * A + mu * B

    v = g(t)
    _, lo = _refine_min(g, t, int(np.argmin(v)), 0.0, eq.T)
    _, hi = _refine_min(lambda s: -g(s), t, int(np.argmax(v)), 0.0, eq.T)
    return lo, -hi


def d1_witness(eq: AbelEquation, grid=4096, candidates=None):
    """Best one-signed combination of A and B, or ``None``.

    Candidates are the constructive directions (B, -A)(t0) and (B', -A')(t0)
    at grid zeros t0 of A B' - A' B, the coordinate axes, any ``candidates``
    supplied by the caller, (B, -A) where |A| + |B| peaks, and the maximizer
    of min_t(cos th A + sin th B) over th (coarse scan plus two bounded
    refinements).  The direction with the
    largest certified margin is returned, normalized and oriented so that
    its first component is non-negative.
    """
    t = np.linspace(0.0, eq.T, grid + 1)
    A, B = eq.AB(t)
    scale = max(float(np.max(np.abs(A))), float(np.max(np.abs(B))))
    if scale == 0.0:
        return None

    def margin(th):
        return float(np.min(math.cos(th) * A + math.sin(th) * B))

    dirs = [(1.0, 0.0), (0.0, 1.0)]
    if candidates is not None:
        dirs.extend(tuple(map(float, c)) for c in candidates)
    tw = np.linspace(0.0, _right_end(eq, 1e-9), grid + 1)
    a_, b_, da, db = eq.coeffs(tw)
    w = a_ * db - da * b_
    for k in np.nonzero(np.sign(w[:-1]) * np.sign(w[1:]) <= 0)[0]:
        j = k if abs(w[k]) <= abs(w[k + 1]) else k + 1
        dirs.append((float(b_[j]), float(-a_[j])))
        dirs.append((float(db[j]), float(-da[j])))
    # annihilates a proportional pair exactly
    j = int(np.argmax(np.abs(a_) + np.abs(b_)))
    dirs.append((float(b_[j]), float(-a_[j])))

    thetas = [math.atan2(m, l) for l, m in dirs if l or m]
    thetas += [th + math.pi for th in thetas]
    coarse = np.linspace(0.0, 2 * math.pi, THETA_SCAN, endpoint=False)
    sub = max(1, grid // 512)  # the coarse scan only has to find the right cell
    vals = np.min(np.outer(np.cos(coarse), A[::sub]) + np.outer(np.sin(coarse), B[::sub]),
                  axis=1)
    k = int(np.argmax(vals))
    step = 2 * math.pi / THETA_SCAN
    r = minimize_scalar(lambda th: -margin(th), bounds=(coarse[k] - step, coarse[k] + step),
                        method="bounded", options={"xatol": 1e-12})
    # the bounded search resolves th only to ~sqrt(eps) |th|; refine the offset
    th0 = float(r.x)
    h = 1e-6 * max(1.0, abs(th0))
    r2 = minimize_scalar(lambda d: -margin(th0 + d), bounds=(-h, h), method="bounded",
                         options={"xatol": 1e-15})
    thetas += [coarse[k], th0, th0 + float(r2.x)]

    best_th = max(thetas, key=margin)
    c, s = math.cos(best_th), math.sin(best_th)
    # continuous minimum of the chosen combination
    lo, _ = combination_range(eq, c, s, grid)
    certified = min(lo, margin(best_th))
    if certified < -WITNESS_TOL * scale:
        return None
    sign = ">=0"
    if c < 0 or (c == 0 and s < 0):
        c, s, sign = -c, -s, "<=0"
    return D1Witness((c + 0.0, s + 0.0), sign, certified)


def classify(eq: AbelEquation, grid=4096):
    """Combine (D.1) and (D.2) and decide membership in L1 and L_H.

    ``oriented`` is the equation in the orientation A' B - A B' > 0 whenever
    (D.2) holds; ``flipped`` records whether x -> -x was applied.
    """
    d1 = d1_witness(eq, grid)
    d2 = d2_sign(eq, grid)
    if d1 and d2:
        verdict = "Both"
    elif d1:
        verdict = "D1Only"
    elif d2:
        verdict = "D2Only"
    else:
        verdict = "Neither"
    flipped = d2 is not None and d2.sign > 0
    oriented = None
    if d2 is not None:
        oriented = eq.flipped() if flipped else eq
    return ClassificationResult(d1, d2, verdict, d1 is not None,
                                d2 is not None and d1 is None, flipped, oriented)
