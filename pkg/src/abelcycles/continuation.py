"""Rotated-equation sweeps in lam0 / mu0 and the sharpness construction.

With f0 > 0, raising lam0 adds f0 x^3 to the right-hand side (positive for
x > 0, negative for x < 0) and raising mu0 adds f0 x^2 > 0, so both
parameters rotate the vector field on each half-line.  Stable cycles then
move in the direction of the rotation and unstable ones against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .basis import (DEFAULT_NUMERICS, AbelEquation, BasisFamily, Kind, NumericsConfig,
                    denormalize_trinomial, normalize_trinomial)
from .cycles import (CycleCensus, Stability, basis_integrals, find_cycles, lyapunov_constants,
                     verify_bound)
from .errors import PreconditionViolated, SearchFailure
from .flow import closed_cycle_checks, return_map

PARAMS = ("lam0", "mu0")


def with_param(eq: AbelEquation, which, value):
    if which == "lam0":
        return eq.replace(lam0=value)
    if which == "mu0":
        return eq.replace(mu0=value)
    raise ValueError(f"unknown sweep parameter {which!r}; use 'lam0' or 'mu0'")


def rotation_sign(which, region):
    """Sign of dS/d(param) on the half-line x > 0 (region 1) or x < 0 (-1)."""
    return region if which == "lam0" else 1


@dataclass
class Branch:
    branch_id: int
    region: int
    stability: Stability
    points: list = field(default_factory=list)  # (param, x0)
    slope: float = 0.0  # dx0/dparam at the last point

    def as_dict(self):
        return {"branch_id": self.branch_id, "region": self.region,
                "stability": self.stability.value,
                "points": [list(p) for p in self.points]}


@dataclass(frozen=True)
class BifurcationEvent:
    """An event somewhere inside the parameter ``bracket``."""

    kind: str  # "Fold", "HopfLikeAtOrigin", "EscapeBoundary"
    param: float
    bracket: tuple
    x0: float
    branches: tuple = ()

    def as_dict(self):
        return {"kind": self.kind, "param": self.param, "bracket": list(self.bracket),
                "x0": self.x0, "branches": list(self.branches)}


@dataclass
class SweepResult:
    parameter: str
    values: np.ndarray
    samples: list  # (value, CycleCensus)
    branches: list
    events: list
    monotone: dict

    def as_dict(self):
        return {
            "parameter": self.parameter,
            "values": [float(v) for v in self.values],
            "samples": [{"param": float(p), "census": c.as_dict()} for p, c in self.samples],
            "branches": [b.as_dict() for b in self.branches],
            "events": [e.as_dict() for e in self.events],
            "monotone": {str(k): v for k, v in self.monotone.items()},
        }


def _param_slope(eq, which, p, x0, dP, config, h=1e-7):
    """dx0/dparam along a cycle branch from the implicit function theorem."""
    hp = h * max(1.0, abs(p))
    rows = np.vstack([return_map(with_param(eq, which, p + s), np.array([x0]), config)
                      for s in (hp, -hp)])
    if np.any(rows[:, 0] != 0):
        return math.inf
    dd = (rows[0, 1] - rows[1, 1]) / (2 * hp)
    slope = dP - 1.0
    return math.inf if slope == 0.0 else -dd / slope


def _link(samples, eq, which, config):
    branches = []
    active = []
    for i, (p, census) in enumerate(samples):
        cycles = [(1, c) for c in census.positive] + [(-1, c) for c in census.negative]
        used = set()
        still = []
        if i > 0:
            dp = p - samples[i - 1][0]
            for br in active:
                p_last, x_last = br.points[-1]
                slope = br.slope
                pred = x_last + (slope * dp if math.isfinite(slope) else 0.0)
                tol = 5 * abs(dp) * max(1.0, abs(slope) if math.isfinite(slope) else 1.0)
                best, best_err = None, math.inf
                for j, (reg, c) in enumerate(cycles):
                    if j in used or reg != br.region or c.stability != br.stability:
                        continue
                    err = abs(c.x0 - pred)
                    if err <= tol and err < best_err:
                        best, best_err = j, err
                if best is not None:
                    used.add(best)
                    c = cycles[best][1]
                    br.points.append((p, c.x0))
                    br.slope = _param_slope(eq, which, p, c.x0, c.dP, config)
                    still.append(br)
        for j, (reg, c) in enumerate(cycles):
            if j in used:
                continue
            br = Branch(len(branches), reg, c.stability, [(p, c.x0)],
                        _param_slope(eq, which, p, c.x0, c.dP, config))
            branches.append(br)
            still.append(br)
        active = still
    return branches


def _events(samples, branches, which):
    events = []
    values = [p for p, _ in samples]
    first = values[0]
    last = values[-1]
    ends = {}
    starts = {}
    for br in branches:
        p0, x0 = br.points[0]
        p1, x1 = br.points[-1]
        if p0 != first:
            starts.setdefault(values.index(p0), []).append((br, x0))
        if p1 != last:
            ends.setdefault(values.index(p1), []).append((br, x1))

    def pair(items, idx, lo, hi):
        paired = set()
        census = samples[idx][1]
        xs = sorted(c.x0 for c in census.cycles)
        items = sorted(items, key=lambda it: it[1])
        for a in range(len(items)):
            for b in range(a + 1, len(items)):
                if a in paired or b in paired:
                    continue
                (ba, xa), (bb, xb) = items[a], items[b]
                if ba.region != bb.region or {ba.stability, bb.stability} != {
                        Stability.STABLE, Stability.UNSTABLE}:
                    continue
                between = [x for x in xs if min(xa, xb) < x < max(xa, xb)]
                if between:
                    continue
                paired.update((a, b))
                events.append(BifurcationEvent("Fold", 0.5 * (lo + hi), (lo, hi),
                                               0.5 * (xa + xb), (ba.branch_id, bb.branch_id)))
        for k, (br, x) in enumerate(items):
            if k not in paired:
                events.append(BifurcationEvent("EscapeBoundary", 0.5 * (lo + hi), (lo, hi), x,
                                               (br.branch_id,)))

    for idx, items in sorted(ends.items()):
        pair(items, idx, values[idx], values[idx + 1])
    for idx, items in sorted(starts.items()):
        pair(items, idx, values[idx - 1], values[idx])

    key = 0 if which == "mu0" else 1  # V2 for mu0 sweeps, V3 for lam0 sweeps
    raw = [c.origin.raw[key] for _, c in samples]
    for i in range(len(raw) - 1):
        if raw[i] == 0.0 or raw[i] * raw[i + 1] < 0:
            lo, hi = values[i], values[i + 1]
            a, b = raw[i], raw[i + 1]
            p = lo if a == b else lo + (hi - lo) * a / (a - b)
            events.append(BifurcationEvent("HopfLikeAtOrigin", p, (lo, hi), 0.0))
    events.sort(key=lambda e: (e.param, e.kind, e.x0))
    return events


def branch_monotone(br: Branch, which, events, tol=1e-12):
    """Whether x0 moves along ``br`` in the direction the rotation predicts."""
    if br.stability not in (Stability.STABLE, Stability.UNSTABLE):
        return True
    want = rotation_sign(which, br.region) * (1 if br.stability is Stability.STABLE else -1)
    pts = br.points
    for (p0, x0), (p1, x1) in zip(pts, pts[1:]):
        step = (x1 - x0) * np.sign(p1 - p0)
        if abs(x1 - x0) <= tol * max(1.0, abs(x0)):
            continue
        if np.sign(step) != want:
            return False
    return True


def sweep(eq: AbelEquation, which, range_, steps=64, config: NumericsConfig = DEFAULT_NUMERICS,
          window=None):
    """Census at ``steps`` evenly spaced values of lam0 or mu0, linked into branches.

    Roots from each sample seed the grid of the next one.
    """
    if steps < 8:
        raise ValueError("steps must be at least 8")
    if which not in PARAMS:
        raise ValueError(f"unknown sweep parameter {which!r}; use 'lam0' or 'mu0'")
    if not eq.basis.f0_positive:
        raise PreconditionViolated("rotation in lam0/mu0 needs f0 > 0; normalize trinomials first")
    values = np.linspace(float(range_[0]), float(range_[1]), steps)
    samples = []
    seeds = ()
    for p in values:
        census = find_cycles(with_param(eq, which, float(p)), window, config, seeds)
        samples.append((float(p), census))
        seeds = tuple(c.x0 for c in census.cycles)
    branches = _link(samples, eq, which, config)
    events = _events(samples, branches, which)
    mono = {b.branch_id: branch_monotone(b, which, events) for b in branches}
    return SweepResult(which, values, samples, branches, events, mono)


def persistence_step(eq: AbelEquation, which, p0, x0, step, config=DEFAULT_NUMERICS,
                     max_halvings=8):
    """Find the continuation of the cycle at (p0, x0) at p0 + step.

    The step is halved until a cycle of the same stability is found within
    the branch-matching tolerance; returns ``(step, cycle)`` or ``None``.
    """
    base = find_cycles(with_param(eq, which, p0), None, config, (x0,))
    ref = min(base.cycles, key=lambda c: abs(c.x0 - x0))
    slope = _param_slope(eq, which, p0, ref.x0, ref.dP, config)
    for _ in range(max_halvings + 1):
        census = find_cycles(with_param(eq, which, p0 + step), None, config, (ref.x0,))
        pred = ref.x0 + (slope * step if math.isfinite(slope) else 0.0)
        tol = 5 * abs(step) * max(1.0, abs(slope) if math.isfinite(slope) else 1.0)
        for c in census.cycles:
            if c.stability == ref.stability and abs(c.x0 - pred) <= tol:
                return step, c
        step *= 0.5
    return None


# ---------------------------------------------------------------- folds

@dataclass(frozen=True)
class FoldPoint:
    param: float
    x0: float
    dP: float
    residual: float
    equation: AbelEquation


def _critical_point(eq, lo, hi, s, mid, config, n=17):
    """Root of P'(x) - 1 in [lo, hi] where s * d has a local minimum, nearest ``mid``."""
    xs = np.linspace(lo, hi, n)
    g = return_map(eq, xs, config)[:, 2] - 1.0
    ks = [k for k in range(n - 1) if s * g[k] < 0 <= s * g[k + 1]]
    if not ks:
        raise SearchFailure(f"no critical point of d in [{lo:.6g}, {hi:.6g}]")
    k = min(ks, key=lambda k: abs(0.5 * (xs[k] + xs[k + 1]) - mid))

    def f(x):
        return return_map(eq, np.array([x]), config)[0, 2] - 1.0

    return brentq(f, xs[k], xs[k + 1], xtol=1e-15, rtol=1e-15)


def locate_fold(eq: AbelEquation, which, event: BifurcationEvent, sweep_result: SweepResult,
                config: NumericsConfig = DEFAULT_NUMERICS):
    """Parameter and position of the double cycle inside a Fold bracket.

    The local extremum x_c(p) of the displacement function between the two
    merging cycles is tracked across the bracket and d(x_c(p), p) is driven
    to zero.
    """
    if event.kind != "Fold":
        raise ValueError("locate_fold needs a Fold event")
    lo, hi = event.bracket
    ids = set(event.branches)
    pts = [x for b in sweep_result.branches if b.branch_id in ids
           for p, x in b.points if p in (lo, hi)]
    if len(pts) < 2:
        raise SearchFailure("fold bracket holds fewer than two cycles")
    a, b = min(pts), max(pts)
    w = b - a
    xlo, xhi = a - 0.5 * w, b + 0.5 * w
    if a > 0:
        xlo = max(xlo, 0.5 * a)
    else:
        xhi = min(xhi, 0.5 * b)
    mid = 0.5 * (a + b)
    p_with = lo if any(p == lo for p, _ in sweep_result.branches[min(ids)].points) else hi
    e_with = with_param(eq, which, p_with)
    # d keeps the sign of the outside flank at the extremum once the pair is gone
    flank = return_map(e_with, np.array([xhi if a > 0 else xlo]), config)[0]
    s = 1.0 if flank[1] - (xhi if a > 0 else xlo) > 0 else -1.0

    def m(p):
        e = with_param(eq, which, p)
        c = _critical_point(e, xlo, xhi, s, mid, config)
        r = return_map(e, np.array([c]), config)[0]
        return r[1] - c

    p_star = brentq(m, lo, hi, xtol=1e-15, rtol=1e-15)
    e = with_param(eq, which, p_star)
    c = _critical_point(e, xlo, xhi, s, mid, config)
    r = return_map(e, np.array([c]), config)[0]
    return FoldPoint(p_star, c, float(r[2]), abs(float(r[1] - c)), e)


def fold_checks(fold: FoldPoint, config=DEFAULT_NUMERICS):
    return closed_cycle_checks(fold.equation, fold.x0, config)


# ---------------------------------------------------------------- sharpness

@dataclass(frozen=True)
class SharpnessResult:
    basis: BasisFamily
    eta_star: tuple
    V4_star: float
    perturbation: tuple  # (eps_lam, eps_mu)
    roots: tuple  # model roots of V2 + V3 x + V4 x^2
    perturbed: AbelEquation
    census: CycleCensus
    consistent: bool
    attempts: list
    normalized: "SharpnessResult | None" = None

    def as_dict(self):
        out = {
            "basis": self.basis.label(),
            "eta_star": list(self.eta_star),
            "V4_star": self.V4_star,
            "perturbation": list(self.perturbation),
            "model_roots": list(self.roots),
            "perturbed_eta": list(self.perturbed.eta),
            "census": self.census.as_dict(),
            "nonzero_cycles": self.census.total_with_multiplicity,
            "total_limit_cycles": self.census.total_with_multiplicity + 1,
            "consistent": self.consistent,
            "attempts": [list(a) for a in self.attempts],
        }
        if self.normalized is not None:
            out["normalized"] = self.normalized.as_dict()
        return out


def sharpness_star(basis: BasisFamily, config=DEFAULT_NUMERICS):
    """eta* = (I1, -I0, 0, I2, 0, -I0): x = 0 becomes a cycle of multiplicity four."""
    I, _ = basis_integrals(basis, config.quad_tol)
    if not I[0] > 0:
        raise PreconditionViolated("sharpness construction needs I0 > 0")
    eta = (float(I[1]), float(-I[0]), 0.0, float(I[2]), 0.0, float(-I[0]))
    return AbelEquation.from_eta(basis, eta)


def sharpness_demo(family, config: NumericsConfig = DEFAULT_NUMERICS, ratio=0.25,
                   eps_range=(1e-1, 1e-8), factor=math.sqrt(10.0)):
    """Perturb eta* so that two small non-zero cycles bifurcate from x = 0.

    Near the origin d(x) ~ x^2 (V2 + V3 x + V4 x^2).  The perturbation
    lam0 += e_lam, mu0 += e_mu sets V3 = e_lam I0 and V2 = e_mu I0, chosen so
    that the quadratic has the positive roots r and ratio * r; this makes the
    signs of V4, V3, V2 alternate.  The size |e_lam| is scanned geometrically
    from ``eps_range[0]`` down to ``eps_range[1]`` until the census reports
    exactly two simple non-zero cycles.

    Trinomial families are handled on their normalized shifted-power form and
    the result mapped back.

    Raises
    ------
    SearchFailure
        If no perturbation size in the range yields two cycles.
    """
    basis = family if isinstance(family, BasisFamily) else BasisFamily(family)
    if basis.kind is Kind.TRINOMIAL:
        m = basis.params
        star = normalize_trinomial(AbelEquation(basis, (1, 0, 0), (0, 0, 0)))
        inner = sharpness_demo(star.basis, config, ratio, eps_range, factor)
        perturbed = denormalize_trinomial(inner.perturbed, m)
        eta_star = denormalize_trinomial(sharpness_star(star.basis, config), m).eta
        census = find_cycles(perturbed, None, config)
        v = verify_bound(perturbed, config)
        ok = census.total_with_multiplicity == 2 and v.consistent
        return SharpnessResult(basis, eta_star, -(m[0] + 1.0) * inner.V4_star,
                               tuple(-(m[0] + 1.0) * e for e in inner.perturbation),
                               inner.roots, perturbed, census, ok, inner.attempts, inner)

    star = sharpness_star(basis, config)
    rep = lyapunov_constants(star, config)
    if rep.origin_multiplicity != 4:
        raise SearchFailure(f"eta* gives origin multiplicity {rep.origin_multiplicity}, not 4")
    V4 = rep.V4
    I0 = float(rep.I[0])
    attempts = []
    eps = eps_range[0]
    while eps >= eps_range[1] * (1 - 1e-12):
        r1 = eps * I0 / (abs(V4) * (1.0 + ratio))
        r2 = ratio * r1
        e_lam = -V4 * (r1 + r2) / I0
        e_mu = V4 * r1 * r2 / I0
        eq = star.replace(lam0=star.lam[0] + e_lam, mu0=star.mu[0] + e_mu)
        if r2 > config.origin_exclusion:
            census = find_cycles(eq, None, config)
            n = census.total_with_multiplicity
            attempts.append((eps, e_lam, e_mu, n))
            if n == 2 and all(c.multiplicity == 1 for c in census.cycles):
                v = verify_bound(eq, config)
                return SharpnessResult(basis, star.eta, V4, (e_lam, e_mu), (r1, r2), eq,
                                       census, v.consistent, attempts)
        else:
            attempts.append((eps, e_lam, e_mu, -1))
        eps /= factor
    raise SearchFailure(f"no perturbation in {eps_range} gave two cycles; attempts: {attempts}")
