"""Trajectories, the return map and its derivatives.

All integrations run through the compiled Dormand-Prince kernel, which
carries the quadratures for P', P'' and h(t) along with the solution so one
adaptive pass controls every error at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import _kernels
from .basis import DEFAULT_NUMERICS, AbelEquation, NumericsConfig
from .errors import PreconditionViolated, StepFailure


@dataclass(frozen=True)
class Escape:
    """The solution through ``x0`` leaves ``|x| <= threshold`` at ``t_blow``."""

    x0: float
    t_blow: float


@dataclass(frozen=True)
class Trajectory:
    """Accepted integrator steps with a cubic Hermite interpolant.

    Attributes
    ----------
    t, x, dx : ndarray
        Step times, solution values and slopes.
    h : ndarray
        Running value of ``int_0^t A x^2``.
    outcome : str
        ``"Completed"`` or ``"BlowUp"``.
    t_blow : float or None
        Escape time for ``"BlowUp"``.
    """

    x0: float
    t: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    h: np.ndarray
    outcome: str
    t_blow: float | None = None

    @property
    def completed(self):
        return self.outcome == "Completed"

    def interpolant(self):
        return CubicHermiteSpline(self.t, self.x, self.dx)

    def __call__(self, t):
        return self.interpolant()(t)


@dataclass(frozen=True)
class ReturnData:
    x0: float
    P: float
    dP: float
    d2P: float | None
    h_final: float

    @property
    def displacement(self):
        return self.P - self.x0


@dataclass(frozen=True)
class ClosedCycleChecks:
    """Identities that hold on a closed solution with P'(x0) = 1."""

    x0: float
    h_T: float
    d2p_closed: float
    d2p_lloyd: float


def _run(eq, x0, t_end, config, record):
    code, p, lam, mu = eq.kernel_args()
    return _kernels.flow(code, p, lam, mu, float(x0), float(t_end),
                         config.ode_rel_tol, config.ode_abs_tol,
                         config.blowup_threshold, record)


def integrate(eq: AbelEquation, x0, t_end=None, config: NumericsConfig = DEFAULT_NUMERICS):
    """Solve ``dx/dt = A x^3 + B x^2``, ``x(0) = x0`` on ``[0, t_end]``.

    Raises
    ------
    StepFailure
        If the step size underflows before ``t_end``.
    """
    T = eq.T
    t_end = T if t_end is None else float(t_end)
    if not 0.0 < t_end <= T * (1 + 1e-12):
        raise ValueError(f"t_end must lie in (0, {T:g}]")
    status, tf, y, ts, xs, dxs, hs = _run(eq, x0, min(t_end, T), config, True)
    if status == _kernels.STEP_FAILURE:
        raise StepFailure(f"step size underflow at t = {tf:.6g} from x0 = {x0:.6g}")
    if status == _kernels.BLOWUP:
        return Trajectory(float(x0), ts, xs, dxs, hs, "BlowUp", float(tf))
    return Trajectory(float(x0), ts, xs, dxs, hs, "Completed")


def poincare(eq: AbelEquation, x0, config: NumericsConfig = DEFAULT_NUMERICS, second=True):
    """Return map data at ``x0``, or :class:`Escape` if the solution blows up.

    ``dP`` is ``exp(int 3 A x^2 + 2 B x)`` and ``d2P`` the second variational
    formula, both integrated alongside the solution.
    """
    out = return_map(eq, np.array([x0], dtype=float), config)[0]
    return _as_return(float(x0), out, second)


def _as_return(x0, row, second=True):
    status = int(row[0])
    if status == _kernels.BLOWUP:
        return Escape(x0, float(row[1]))
    if status == _kernels.STEP_FAILURE:
        raise StepFailure(f"step size underflow from x0 = {x0:.6g}")
    return ReturnData(x0, float(row[1]), float(row[2]),
                      float(row[3]) if second else None, float(row[4]))


def return_map(eq: AbelEquation, x0s, config: NumericsConfig = DEFAULT_NUMERICS):
    """Raw return data for an array of initial values.

    Columns: status, P (or escape time), dP, d2P, h(T), ``int exp(h) dx``.
    """
    code, p, lam, mu = eq.kernel_args()
    x0s = np.ascontiguousarray(x0s, dtype=float)
    return _kernels.return_batch(code, p, lam, mu, x0s, eq.T, config.ode_rel_tol,
                                 config.ode_abs_tol, config.blowup_threshold)


def displacement(eq: AbelEquation, x0, config: NumericsConfig = DEFAULT_NUMERICS):
    """``P(x0) - x0``, or :class:`Escape`."""
    r = poincare(eq, x0, config, second=False)
    if isinstance(r, Escape):
        return r
    return r.P - r.x0


def closed_cycle_checks(eq: AbelEquation, x0, config: NumericsConfig = DEFAULT_NUMERICS):
    """h(T) and the closed-cycle form of P'' at a non-hyperbolic cycle.

    On a closed solution with ``P'(x0) = 1``,
    ``P''(x0) = -(2 / x0^2) int_0^T exp(h) dx``, and ``dx`` is replaced by
    ``(A x^3 + B x^2) dt``.

    Raises
    ------
    PreconditionViolated
        If ``x0 = 0``, the orbit escapes, or ``|P'(x0) - 1|`` is not below
        ``double_cycle_tol``.
    """
    x0 = float(x0)
    if x0 == 0.0:
        raise PreconditionViolated("the closed-cycle formulas need x0 != 0")
    row = return_map(eq, np.array([x0]), config)[0]
    r = _as_return(x0, row)
    if isinstance(r, Escape):
        raise PreconditionViolated(f"solution from x0 = {x0:.6g} escapes at t = {r.t_blow:.6g}")
    return closed_cycle_checks_from(x0, r.dP, r.h_final, float(row[5]), r.d2P, config)


def closed_cycle_checks_from(x0, dP, h_T, u_T, d2p_lloyd, config=DEFAULT_NUMERICS):
    """Guard and closed-cycle P'' for precomputed return data."""
    if x0 == 0.0:
        raise PreconditionViolated("the closed-cycle formulas need x0 != 0")
    if not abs(dP - 1.0) < config.double_cycle_tol:
        raise PreconditionViolated(
            f"|P'(x0) - 1| = {abs(dP - 1.0):.3g} is not below {config.double_cycle_tol:g}")
    return ClosedCycleChecks(x0, h_T, -2.0 / (x0 * x0) * u_T, d2p_lloyd)
