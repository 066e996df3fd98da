"""Compiled Dormand-Prince 5(4) integrator for the augmented Abel flow.

The state carried along a trajectory is

    y = [x, q, h, r, u]

with ``q = int 3 A x^2 + 2 B x`` (log of the first variational factor),
``h = int A x^2``, ``r = int (6 A x + 2 B) exp(q)`` and
``u = int exp(h) (A x^3 + B x^2)``.  Far from the origin (``|x|`` above a
switching level) the first component is replaced by ``w = 1/x^2`` so that
finite-time escape shows up as ``w`` reaching ``1/threshold^2`` linearly in
time instead of as a step-size collapse.

Basis kinds are integer-coded: 0 trigonometric, 1 quadratic, 2 monomial
trinomial (exponents in ``p``), 3 shifted power (``p[0] = alpha``,
``p[1] = beta``).
"""

import math

import numpy as np
from numba import njit

COMPLETED = 0
BLOWUP = 1
STEP_FAILURE = 2

NSTATE = 5

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0


@njit(cache=True)
def coeffs(kind, p, lam, mu, t):
    """A(t), B(t) from order-0 basis values."""
    if kind == 0:
        f0 = 1.0
        f1 = math.sin(t)
        f2 = math.cos(t)
    elif kind == 1:
        f0 = 1.0
        f1 = t
        f2 = t * t
    elif kind == 2:
        tt = max(t, 0.0)
        f0 = tt ** p[0]
        f1 = tt ** p[1]
        f2 = tt ** p[2]
    else:
        s = max(1.0 - t, 0.0)
        f0 = 1.0
        f1 = s ** p[0]
        f2 = s ** p[1]
    a = lam[0] * f0 + lam[1] * f1 + lam[2] * f2
    b = mu[0] * f0 + mu[1] * f1 + mu[2] * f2
    return a, b


@njit(cache=True)
def _rhs(kind, p, lam, mu, t, y, phase, sgn, out):
    a, b = coeffs(kind, p, lam, mu, t)
    if phase == 0:
        x = y[0]
        x2 = x * x
        out[0] = (a * x + b) * x2
        out[1] = 3.0 * a * x2 + 2.0 * b * x
        out[2] = a * x2
        out[3] = (6.0 * a * x + 2.0 * b) * math.exp(y[1])
        out[4] = math.exp(y[2]) * out[0]
    else:
        w = max(y[0], 1e-300)
        rw = math.sqrt(w)
        out[0] = -2.0 * a - 2.0 * b * sgn * rw
        x = sgn / rw
        x2 = 1.0 / w
        out[1] = 3.0 * a * x2 + 2.0 * b * x
        out[2] = a * x2
        out[3] = (6.0 * a * x + 2.0 * b) * math.exp(y[1])
        out[4] = math.exp(y[2]) * (a * x + b) * x2


@njit(cache=True)
def _step(kind, p, lam, mu, t, y, h, phase, sgn, k1, k2, k3, k4, k5, k6, k7, ytmp, ynew):
    n = y.shape[0]
    for i in range(n):
        ytmp[i] = y[i] + h * _A21 * k1[i]
    _rhs(kind, p, lam, mu, t + _C2 * h, ytmp, phase, sgn, k2)
    for i in range(n):
        ytmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
    _rhs(kind, p, lam, mu, t + _C3 * h, ytmp, phase, sgn, k3)
    for i in range(n):
        ytmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
    _rhs(kind, p, lam, mu, t + _C4 * h, ytmp, phase, sgn, k4)
    for i in range(n):
        ytmp[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
    _rhs(kind, p, lam, mu, t + _C5 * h, ytmp, phase, sgn, k5)
    for i in range(n):
        ytmp[i] = y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                              + _A64 * k4[i] + _A65 * k5[i])
    _rhs(kind, p, lam, mu, t + h, ytmp, phase, sgn, k6)
    for i in range(n):
        ynew[i] = y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                              + _B5 * k5[i] + _B6 * k6[i])
    _rhs(kind, p, lam, mu, t + h, ynew, phase, sgn, k7)


@njit(cache=True)
def _error_norm(y, ynew, h, k1, k3, k4, k5, k6, k7, rtol, atol, ncomp, atol0):
    acc = 0.0
    for i in range(ncomp):
        e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                 + _E6 * k6[i] + _E7 * k7[i])
        tol = (atol0 if i == 0 else atol) + rtol * max(abs(y[i]), abs(ynew[i]))
        acc += (e / tol) ** 2
    return math.sqrt(acc / ncomp)


@njit(cache=True)
def flow(kind, p, lam, mu, x0, t_end, rtol, atol, threshold, record):
    """Integrate the augmented state from t = 0 to ``t_end``.

    Returns ``(status, t_final, y, ts, xs, dxs, hs)``; ``y`` always holds
    ``x`` (not ``w``) in slot 0.  The sample arrays are empty unless
    ``record`` is true.
    """
    y = np.zeros(NSTATE)
    y[0] = x0
    cap = 256 if record else 1
    ts = np.empty(cap)
    xs = np.empty(cap)
    dxs = np.empty(cap)
    hs = np.empty(cap)
    n_rec = 0
    k1 = np.empty(NSTATE)
    k2 = np.empty(NSTATE)
    k3 = np.empty(NSTATE)
    k4 = np.empty(NSTATE)
    k5 = np.empty(NSTATE)
    k6 = np.empty(NSTATE)
    k7 = np.empty(NSTATE)
    ytmp = np.empty(NSTATE)
    ynew = np.empty(NSTATE)

    x_switch = min(1e3, 0.5 * threshold)
    w_event = 1.0 / (threshold * threshold)
    hmin = 1e-14 * t_end
    phase = 0
    sgn = 1.0 if x0 > 0 else -1.0
    t = 0.0
    h = 1e-2 * t_end
    status = COMPLETED
    max_steps = 2_000_000
    nsteps = 0

    _rhs(kind, p, lam, mu, t, y, phase, sgn, k1)
    if record:
        ts[0] = t
        xs[0] = y[0]
        dxs[0] = k1[0]
        hs[0] = y[2]
        n_rec = 1

    while t < t_end:
        if t + h > t_end:
            h = t_end - t
        if h < hmin and t + h < t_end:
            status = STEP_FAILURE
            break
        nsteps += 1
        if nsteps > max_steps:
            status = STEP_FAILURE
            break
        _step(kind, p, lam, mu, t, y, h, phase, sgn, k1, k2, k3, k4, k5, k6, k7, ytmp, ynew)
        finite = True
        for i in range(NSTATE):
            if not math.isfinite(ynew[i]):
                finite = False
        if phase == 0:
            if (not math.isfinite(ynew[0])) or abs(ynew[0]) > threshold:
                h *= 0.25
                continue
            if finite:
                err = _error_norm(y, ynew, h, k1, k3, k4, k5, k6, k7, rtol, atol, NSTATE, atol)
            else:
                err = 1e10
        else:
            if (not math.isfinite(ynew[0])) or ynew[0] < w_event:
                # escape inside this step: bisect the step length onto w = w_event
                lo = 0.0
                hi = h
                while hi - lo > 1e-10 * t_end:
                    mid = 0.5 * (lo + hi)
                    _step(kind, p, lam, mu, t, y, mid, phase, sgn,
                          k1, k2, k3, k4, k5, k6, k7, ytmp, ynew)
                    if math.isfinite(ynew[0]) and ynew[0] >= w_event:
                        lo = mid
                    else:
                        hi = mid
                t = t + 0.5 * (lo + hi)
                status = BLOWUP
                break
            err = _error_norm(y, ynew, h, k1, k3, k4, k5, k6, k7, rtol, atol, 1, rtol * w_event)
        if err <= 1.0:
            t = t + h if t + h < t_end else t_end
            for i in range(NSTATE):
                y[i] = ynew[i]
                k1[i] = k7[i]
            if phase == 0 and abs(y[0]) > x_switch:
                sgn = 1.0 if y[0] > 0 else -1.0
                y[0] = 1.0 / (y[0] * y[0])
                phase = 1
                _rhs(kind, p, lam, mu, t, y, phase, sgn, k1)
            elif phase == 1 and 1.0 / math.sqrt(y[0]) < 0.25 * x_switch:
                y[0] = sgn / math.sqrt(y[0])
                phase = 0
                _rhs(kind, p, lam, mu, t, y, phase, sgn, k1)
            if record:
                if n_rec == ts.shape[0]:
                    ncap = 2 * n_rec
                    t2 = np.empty(ncap)
                    x2 = np.empty(ncap)
                    d2 = np.empty(ncap)
                    h2 = np.empty(ncap)
                    t2[:n_rec] = ts[:n_rec]
                    x2[:n_rec] = xs[:n_rec]
                    d2[:n_rec] = dxs[:n_rec]
                    h2[:n_rec] = hs[:n_rec]
                    ts = t2
                    xs = x2
                    dxs = d2
                    hs = h2
                ts[n_rec] = t
                if phase == 0:
                    xs[n_rec] = y[0]
                    dxs[n_rec] = k1[0]
                else:
                    xv = sgn / math.sqrt(y[0])
                    aa, bb = coeffs(kind, p, lam, mu, t)
                    xs[n_rec] = xv
                    dxs[n_rec] = (aa * xv + bb) * xv * xv
                hs[n_rec] = y[2]
                n_rec += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= fac
        else:
            h *= max(0.2, 0.9 * err ** -0.2)

    if phase == 1:
        y[0] = sgn / math.sqrt(max(y[0], 1e-300))
    return status, t, y, ts[:n_rec], xs[:n_rec], dxs[:n_rec], hs[:n_rec]


@njit(cache=True)
def return_batch(kind, p, lam, mu, x0s, t_end, rtol, atol, threshold):
    """Poincare data for many initial values.

    Output columns: status, P, dP, d2P (Lloyd), h(T), int exp(h) dx.
    """
    n = x0s.shape[0]
    out = np.empty((n, 6))
    for j in range(n):
        status, tf, y, ts, xs, dxs, hs = flow(kind, p, lam, mu, x0s[j], t_end,
                                              rtol, atol, threshold, False)
        out[j, 0] = status
        if status == COMPLETED:
            dp = math.exp(y[1])
            out[j, 1] = y[0]
            out[j, 2] = dp
            out[j, 3] = dp * y[3]
            out[j, 4] = y[2]
            out[j, 5] = y[4]
        else:
            out[j, 1] = tf
            out[j, 2] = math.nan
            out[j, 3] = math.nan
            out[j, 4] = math.nan
            out[j, 5] = math.nan
    return out
