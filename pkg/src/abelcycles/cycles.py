"""Limit-cycle census: Lyapunov constants, root isolation and bound checks."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import _kernels
from .basis import DEFAULT_NUMERICS, AbelEquation, BasisFamily, Kind, NumericsConfig
from .classify import ClassificationResult, classify
from .errors import DiagnosticFailure, Indeterminate, PreconditionViolated, UnresolvedRoot
from .flow import integrate, return_map

VALID_TOL = 1e-10
DOUBLE_RESIDUAL = 1e-10
NEAR_MISS = 1e-9
CENTER_POINTS = 16


class Stability(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    SEMI_LOWER_STABLE = "SemistableLowerStable"
    SEMI_LOWER_UNSTABLE = "SemistableLowerUnstable"
    CENTER = "Center"


# ---------------------------------------------------------------- integrals

def _quad(f, a, b, tol):
    return quad(f, a, b, epsabs=tol, epsrel=tol, limit=200)[0]


@functools.lru_cache(maxsize=64)
def basis_integrals(basis: BasisFamily, quad_tol=1e-12):
    """``I_i = int_0^T f_i`` and ``I_ij = int_0^T f_i(t) int_0^t f_j``.

    Closed forms for the trigonometric and quadratic bases, nested adaptive
    quadrature otherwise.  Results are cached per basis.
    """
    if basis.kind is Kind.TRIG:
        p = math.pi
        I = np.array([2 * p, 0.0, 0.0])
        # F0 = t, F1 = 1 - cos t, F2 = sin t
        Imat = np.array([[2 * p * p, 2 * p, 0.0],
                         [-2 * p, 0.0, p],
                         [0.0, -p, 0.0]])
        return I, Imat
    if basis.kind is Kind.QUADRATIC:
        I = np.array([1.0, 1 / 2, 1 / 3])
        Imat = np.array([[1.0 / ((j + 1) * (i + j + 2)) for j in range(3)] for i in range(3)])
        return I, Imat
    T = basis.T

    def f(i):
        return lambda t: float(basis.eval(t, 0)[i])

    I = np.array([_quad(f(i), 0.0, T, quad_tol) for i in range(3)])
    Imat = np.empty((3, 3))
    for j in range(3):
        fj = f(j)

        def running(t, fj=fj):
            return _quad(fj, 0.0, t, quad_tol) if t > 0 else 0.0

        for i in range(3):
            fi = f(i)
            Imat[i, j] = _quad(lambda t: fi(t) * running(t), 0.0, T, quad_tol)
    return I, Imat


@dataclass(frozen=True)
class LyapunovReport:
    """Leading coefficients of the displacement function at x = 0.

    ``V3`` is only defined when ``V2`` vanishes and ``V4`` only when ``V2``
    and ``V3`` both vanish; undefined values are ``None``.
    """

    I: np.ndarray
    Imat: np.ndarray
    V2: float
    V3: float | None
    V4: float | None
    origin_multiplicity: object  # 2, 3, 4 or "center-suspect"
    origin_stability: Stability
    raw: tuple = field(default=(), repr=False)  # (V2, V3, V4) before gating

    def as_dict(self):
        return {"I": self.I.tolist(), "Imat": self.Imat.tolist(), "V2": self.V2,
                "V3": self.V3, "V4": self.V4,
                "origin_multiplicity": self.origin_multiplicity,
                "origin_stability": self.origin_stability.value}


def _even_stability(v):
    # d ~ v x^k with k even: points below 0 rise toward it when v > 0
    return Stability.SEMI_LOWER_STABLE if v > 0 else Stability.SEMI_LOWER_UNSTABLE


def lyapunov_constants(eq: AbelEquation, config: NumericsConfig = DEFAULT_NUMERICS):
    """V2 = sum mu_i I_i, V3 = sum lam_i I_i, V4 = sum lam_i mu_j I_ij."""
    I, Imat = basis_integrals(eq.basis, config.quad_tol)
    lam, mu = np.array(eq.lam), np.array(eq.mu)
    v2 = float(mu @ I)
    v3 = float(lam @ I)
    v4 = float(lam @ Imat @ mu)
    s2 = float(np.abs(mu) @ np.abs(I))
    s3 = float(np.abs(lam) @ np.abs(I))
    s4 = float(np.abs(lam) @ np.abs(Imat) @ np.abs(mu))
    z2 = abs(v2) <= VALID_TOL * s2
    z3 = abs(v3) <= VALID_TOL * s3
    z4 = abs(v4) <= VALID_TOL * s4
    V3 = v3 if z2 else None
    V4 = v4 if (z2 and z3) else None
    if not z2:
        mult, stab = 2, _even_stability(v2)
    elif not z3:
        mult = 3
        stab = Stability.UNSTABLE if v3 > 0 else Stability.STABLE
    elif not z4:
        mult, stab = 4, _even_stability(v4)
    else:
        mult, stab = "center-suspect", Stability.CENTER
    return LyapunovReport(I, Imat, v2, V3, V4, mult, stab, (v2, v3, v4))


def lyapunov_direct(eq: AbelEquation, quad_tol=1e-12):
    """(int B, int A, int A(t) int_0^t B) by direct adaptive quadrature."""
    T = eq.T

    def A(t):
        return float(eq.AB(t)[0])

    def B(t):
        return float(eq.AB(t)[1])

    v2 = _quad(B, 0.0, T, quad_tol)
    v3 = _quad(A, 0.0, T, quad_tol)
    v4 = _quad(lambda t: A(t) * (_quad(B, 0.0, t, quad_tol) if t > 0 else 0.0),
               0.0, T, quad_tol)
    return v2, v3, v4


# ---------------------------------------------------------------- census

@dataclass(frozen=True)
class LimitCycle:
    x0: float
    residual: float
    dP: float
    stability: Stability
    multiplicity: int
    d2P: float | None = None

    def as_dict(self):
        return {"x0": self.x0, "residual": self.residual, "dP": self.dP,
                "stability": self.stability.value, "multiplicity": self.multiplicity,
                "d2P": self.d2P}


@dataclass(frozen=True)
class CycleCensus:
    positive: list
    negative: list
    origin: LyapunovReport
    total_with_multiplicity: int
    bound_satisfied: bool
    center_suspect: bool = False
    gaps: list = field(default_factory=list)
    near_misses: list = field(default_factory=list)
    window: tuple = ()

    @property
    def cycles(self):
        return sorted(self.negative + self.positive, key=lambda c: c.x0)

    def count(self, region):
        cs = self.positive if region > 0 else self.negative
        return sum(c.multiplicity for c in cs)

    def as_dict(self):
        return {
            "positive": [c.as_dict() for c in self.positive],
            "negative": [c.as_dict() for c in self.negative],
            "origin": self.origin.as_dict(),
            "total_with_multiplicity": self.total_with_multiplicity,
            "bound_satisfied": self.bound_satisfied,
            "center_suspect": self.center_suspect,
            "gaps": [list(g) for g in self.gaps],
            "near_misses": list(self.near_misses),
            "window": list(self.window),
        }


class _Evaluator:
    """Return-map evaluations with the status code checked."""

    def __init__(self, eq, config):
        self.eq = eq
        self.config = config
        self.calls = 0

    def rows(self, xs):
        self.calls += len(xs)
        return return_map(self.eq, np.asarray(xs, dtype=float), self.config)

    def at(self, x):
        r = self.rows([x])[0]
        if r[0] != _kernels.COMPLETED:
            raise UnresolvedRoot(f"return map undefined at x0 = {x:.6g} inside a bracket")
        return r[1] - x, r[2], r[3]


def _region_grid(lo, hi, n, seeds):
    """Geometric grid on lo <= |x| <= hi (same sign), merged with seeds."""
    sgn = 1.0 if hi > 0 else -1.0
    a, b = sorted((abs(lo), abs(hi)))
    g = np.geomspace(a, b, n)
    extra = [abs(s) for s in seeds if a < abs(s) < b and math.copysign(1, s) == sgn]
    for s in extra:
        g = np.concatenate([g, [s * (1 - 1e-4), s * (1 + 1e-4)]])
    g = np.unique(np.clip(g, a, b))
    return sgn * g


def _refine_root(ev, a, b, da, db, config):
    """Safeguarded Newton on d inside a sign-change bracket [a, b]."""
    if a > b:
        a, b, da, db = b, a, db, da
    x = a - da * (b - a) / (db - da)
    if not a < x < b:
        x = 0.5 * (a + b)
    for _ in range(config.newton_max_iter):
        d, dp, d2 = ev.at(x)
        if d == 0.0:
            return x, d, dp, d2
        if (d > 0) == (da > 0):
            a, da = x, d
        else:
            b, db = x, d
        slope = dp - 1.0
        xn = x - d / slope if slope != 0.0 else math.nan
        if not (a < xn < b) or abs(xn - x) > 0.5 * (b - a):
            xn = 0.5 * (a + b)
        tol = config.newton_tol * max(1.0, abs(x))
        if abs(xn - x) < tol or b - a < tol:
            d, dp, d2 = ev.at(xn)
            return xn, d, dp, d2
        x = xn
    raise UnresolvedRoot(f"root refinement stalled in [{a:.12g}, {b:.12g}]")


def _simple_cycle(x, d, dp, d2, left_positive):
    stab = Stability.STABLE if left_positive else Stability.UNSTABLE
    return LimitCycle(float(x), abs(float(d)), float(dp), stab, 1, float(d2))


def _escape_brackets(ev, xs, rows, max_bisect=60):
    """Completing points near escape boundaries where d has changed sign.

    The grid can straddle a cycle that sits between the last completing
    initial value and the first escaping one.  Bisection towards the
    boundary stops at the first completing point whose displacement has the
    opposite sign; cycles closer to the boundary than ``1e-15 |x|`` are not
    resolved.
    """
    ok = rows[:, 0] == _kernels.COMPLETED
    extra = []
    for k in range(len(xs) - 1):
        if ok[k] == ok[k + 1]:
            continue
        g, b = (xs[k], xs[k + 1]) if ok[k] else (xs[k + 1], xs[k])
        dg = rows[k if ok[k] else k + 1, 1] - g
        for _ in range(max_bisect):
            m = 0.5 * (g + b)
            if abs(b - g) <= 1e-15 * abs(m):
                break
            r = ev.rows([m])[0]
            if r[0] != _kernels.COMPLETED:
                b = m
                continue
            if (r[1] - m) * dg < 0:
                extra.append(m)
                break
            g = m
    return extra


def _scan_region(ev, xs, config, near_misses):
    """Isolate cycles on one sorted grid of initial values."""
    xs = np.sort(xs)
    rows = ev.rows(xs)
    extra = _escape_brackets(ev, xs, rows)
    if extra:
        xs = np.concatenate([xs, extra])
        rows = np.concatenate([rows, ev.rows(extra)])
    ok = rows[:, 0] == _kernels.COMPLETED
    d = rows[:, 1] - xs
    s = rows[:, 2] - 1.0
    found = []
    order = np.argsort(xs)
    xs, rows, ok, d, s = xs[order], rows[order], ok[order], d[order], s[order]
    for k in range(len(xs) - 1):
        if not (ok[k] and ok[k + 1]):
            continue
        a, b = xs[k], xs[k + 1]
        if d[k] == 0.0:
            found.append(_simple_cycle(a, 0.0, rows[k, 2], rows[k, 3],
                                       d[k - 1] > 0 if k > 0 else s[k] < 0))
            continue
        if d[k] * d[k + 1] < 0:
            x, dd, dp, d2 = _refine_root(ev, a, b, d[k], d[k + 1], config)
            found.append(_simple_cycle(x, dd, dp, d2, d[k] > 0))
        elif s[k] * s[k + 1] < 0 and d[k + 1] != 0.0:
            # d has an interior extremum; it may touch or cross zero there
            c = brentq(lambda x: ev.at(x)[1] - 1.0, a, b, xtol=1e-15, rtol=1e-15)
            dc, dpc, d2c = ev.at(c)
            scale = abs(c)
            if abs(dc) <= DOUBLE_RESIDUAL * scale and abs(dpc - 1.0) < config.double_cycle_tol:
                stab = Stability.SEMI_LOWER_STABLE if d2c > 0 else Stability.SEMI_LOWER_UNSTABLE
                found.append(LimitCycle(float(c), abs(dc), float(dpc), stab, 2, float(d2c)))
            elif dc * d[k] < 0:
                x1, d1, dp1, d21 = _refine_root(ev, a, c, d[k], dc, config)
                x2, d2_, dp2, d22 = _refine_root(ev, c, b, dc, d[k + 1], config)
                found.append(_simple_cycle(x1, d1, dp1, d21, d[k] > 0))
                found.append(_simple_cycle(x2, d2_, dp2, d22, dc > 0))
            elif abs(dc) <= NEAR_MISS * scale:
                near_misses.append(float(c))
    return found, xs, ok, d


def _gaps(xs, ok):
    out = []
    k = 0
    while k < len(xs):
        if not ok[k]:
            j = k
            while j + 1 < len(xs) and not ok[j + 1]:
                j += 1
            lo, hi = sorted((float(xs[k]), float(xs[j])))
            out.append((lo, hi))
            k = j + 1
        else:
            k += 1
    return out


def find_cycles(eq: AbelEquation, window=None, config: NumericsConfig = DEFAULT_NUMERICS,
                seeds=()):
    """Locate non-zero limit cycles in ``window`` (default ``[-x_max, x_max]``).

    The band ``|x| < origin_exclusion`` is left to :func:`lyapunov_constants`.
    Initial values whose solutions escape are reported as ``gaps``.
    ``seeds`` are extra grid points, typically roots from a nearby parameter.

    Raises
    ------
    UnresolvedRoot
        If a root bracket cannot be refined.
    """
    lo, hi = (-config.x_max, config.x_max) if window is None else map(float, window)
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    excl = config.origin_exclusion
    ev = _Evaluator(eq, config)
    origin = lyapunov_constants(eq, config)
    near = []
    regions = {}
    gaps = []
    spread = []
    for sgn in (1, -1):
        a, b = (max(lo, excl), hi) if sgn > 0 else (lo, min(hi, -excl))
        if not a < b:
            regions[sgn] = []
            continue
        a_, b_ = (a, b) if sgn > 0 else (b, a)
        xs = _region_grid(a_, b_, config.grid_points, seeds)
        found, xs, ok, d = _scan_region(ev, xs, config, near)
        regions[sgn] = sorted(found, key=lambda c: c.x0)
        gaps.extend(_gaps(xs, ok))
        spread.extend(zip(xs[ok], d[ok]))

    center = False
    if len(spread) >= CENTER_POINTS:
        spread.sort()
        idx = np.linspace(0, len(spread) - 1, CENTER_POINTS).round().astype(int)
        tol = 100 * config.ode_rel_tol
        center = all(abs(spread[i][1]) <= tol * abs(spread[i][0]) for i in idx)
    gaps.sort()
    if center:
        pos, neg = [], []
    else:
        pos, neg = regions[1], regions[-1]
    total = sum(c.multiplicity for c in pos + neg)
    return CycleCensus(pos, neg, origin, total, total <= 2, center, gaps,
                       sorted(near), (lo, hi))


# ---------------------------------------------------------------- diagnostics

@dataclass(frozen=True)
class IsoclineReport:
    crossings: int
    A_zeros: list
    per_component: list
    extrema: int


def _sign_change_roots(fun, t, vals):
    roots = []
    for k in np.nonzero(vals[:-1] * vals[1:] < 0)[0]:
        roots.append(brentq(fun, t[k], t[k + 1], xtol=1e-14))
    return roots


def isocline_diagnostics(eq: AbelEquation, cycle: LimitCycle,
                         config: NumericsConfig = DEFAULT_NUMERICS,
                         classification: ClassificationResult | None = None,
                         samples=8192):
    """Crossings of a cycle with the isocline x = -B/A.

    Transversal crossings are the sign changes of ``A x(t) + B`` on (0, T);
    the components are the intervals between the simple zeros of A.

    Raises
    ------
    PreconditionViolated
        If (D.2) does not hold for ``eq``.
    DiagnosticFailure
        If the crossing structure contradicts the (D.2) geometry.
    """
    cl = classify(eq) if classification is None else classification
    if cl.d2 is None:
        raise PreconditionViolated("isocline diagnostics need (D.2)")
    tr = integrate(eq, cycle.x0, config=config)
    if not tr.completed:
        raise PreconditionViolated(f"cycle at {cycle.x0:.6g} does not complete")
    spline = tr.interpolant()
    T = eq.T
    t = np.linspace(0.0, T, samples + 1)[1:-1]

    def A_of(s):
        return eq.AB(s)[0]

    def g(s):
        A, B = eq.AB(s)
        return A * spline(s) + B

    a_vals = A_of(t)
    a_zeros = _sign_change_roots(lambda s: float(A_of(s)), t, a_vals)
    crossings = _sign_change_roots(lambda s: float(g(s)), t, g(t))
    bounds = [0.0] + a_zeros + [T]
    per = [sum(1 for c in crossings if bounds[i] < c < bounds[i + 1])
           for i in range(len(bounds) - 1)]
    dspl = spline.derivative()
    dv = dspl(t)
    extrema = int(np.count_nonzero(dv[:-1] * dv[1:] < 0))
    report = IsoclineReport(len(crossings), a_zeros, per, extrema)
    if len(crossings) not in (1, 2):
        raise DiagnosticFailure(f"{len(crossings)} isocline crossings for cycle at {cycle.x0:.6g}")
    if max(per) > 1:
        raise DiagnosticFailure(f"two crossings in one component for cycle at {cycle.x0:.6g}")
    if extrema != len(crossings):
        raise DiagnosticFailure(
            f"{extrema} extrema but {len(crossings)} crossings for cycle at {cycle.x0:.6g}")
    return report


# ---------------------------------------------------------------- bound checks

@dataclass(frozen=True)
class BoundVerification:
    census: CycleCensus
    classification: ClassificationResult | None
    consistent: bool
    case: str
    checks: list

    def as_dict(self):
        return {
            "census": self.census.as_dict(),
            "classification": None if self.classification is None
            else self.classification.as_dict(),
            "consistent": self.consistent,
            "case": self.case,
            "checks": [{"name": n, "ok": ok} for n, ok in self.checks],
        }


def oriented_counts(census: CycleCensus, flipped: bool):
    """Per-region multiplicity totals (x > 0, x < 0) after an optional x -> -x."""
    p, n = census.count(1), census.count(-1)
    return (n, p) if flipped else (p, n)


def bound_case(origin: LyapunovReport, flipped: bool):
    """Case label from the signs of the Lyapunov constants in (H) orientation."""
    sgn = -1.0 if flipped else 1.0
    if origin.V3 is None:
        return "V2>0" if sgn * origin.V2 > 0 else "V2<0"
    if origin.V4 is None:
        return "V2=0,V3!=0"
    if origin.origin_multiplicity == 4:
        return "V2=V3=0,V4>0" if sgn * origin.V4 > 0 else "V2=V3=0,V4<0"
    return "V2=V3=V4=0"


def check_bound(census: CycleCensus, cl: ClassificationResult | None):
    """Compare a census with the case table; returns (case, checks)."""
    checks = [("total<=2", census.total_with_multiplicity <= 2)]
    if cl is None:
        return "unclassified", checks
    origin = census.origin
    if cl.in_LH:
        case = bound_case(origin, cl.flipped)
        up, down = oriented_counts(census, cl.flipped)
        checks.append(("no center in L_H", not census.center_suspect))
        if case == "V2>0":
            checks.append(("<=2 per region", up <= 2 and down <= 2))
            checks.append(("one region empty", up == 0 or down == 0))
        elif case in ("V2<0", "V2=0,V3!=0"):
            checks.append(("<=1 per region", up <= 1 and down <= 1))
        else:
            checks.append(("V4>0 under (H)", case == "V2=V3=0,V4>0"))
            checks.append(("no non-zero cycles", up + down == 0))
        sgn = -1.0 if cl.flipped else 1.0
        doubles = [c for c in census.cycles if c.multiplicity == 2]
        checks.append(("double cycles have P''>0 under (H)",
                       all(sgn * c.d2P > 0 for c in doubles)))
        return case, checks
    if cl.in_L1:
        checks.append(("<=1 non-zero cycle", census.total_with_multiplicity <= 1))
        checks.append(("hyperbolic", all(c.multiplicity == 1 for c in census.cycles)))
        return "L1", checks
    return cl.verdict, checks


def verify_bound(eq: AbelEquation, config: NumericsConfig = DEFAULT_NUMERICS, window=None):
    """Classify, take the census and test it against the case table.

    An ``Indeterminate`` classification leaves only the total bound to check.
    """
    try:
        cl = classify(eq, max(config.scan_grid, 1024))
    except Indeterminate:
        cl = None
    census = find_cycles(eq, window, config)
    case, checks = check_bound(census, cl)
    return BoundVerification(census, cl, all(ok for _, ok in checks), case, checks)
