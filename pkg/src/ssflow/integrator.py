"""Adaptive embedded Runge-Kutta integrator for 2d autonomous systems.

One Dormand-Prince 5(4) pair with the standard step-size controller drives
every trajectory computation in the package.  The systems here are polynomial
and non-stiff away from blow-up, so no implicit machinery is needed; a
divergence guard stops orbits that reach the quadratic blow-up instead.

Stopping events are threshold crossings of one state component, located by
bisection on the cubic Hermite interpolant of the accepted step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ComparisonError, DomainError, IntegrationFailure
from .phase_plane import Trajectory

# Orbits whose norm exceeds this are declared divergent (finite-r1 blow-up).
OVERFLOW_GUARD = 1e12

# Dormand-Prince 5(4) tableau; the propagated solution is 5th order and the
# last row is the FSAL stage.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_A_NP = tuple(np.asarray(row) for row in _A)
_B_NP = np.asarray(_A[6] + (0.0,))
_E_NP = np.asarray(_E)


@dataclass(frozen=True)
class StopEvent:
    """Stop when ``state[component]`` crosses ``bound``.

    direction +1 triggers on upward crossings, -1 on downward, 0 on either.
    """

    component: int
    bound: float
    direction: int = 0

    def __post_init__(self):
        if self.component not in (0, 1):
            raise DomainError("component must be 0 or 1")
        if self.direction not in (-1, 0, 1):
            raise DomainError("direction must be -1, 0 or +1")


@dataclass(frozen=True)
class IntegrationSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 100_000
    stop_events: tuple[StopEvent, ...] = ()

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise DomainError("tolerances must be positive")
        if self.max_step <= 0.0:
            raise DomainError("max_step must be positive")
        if self.max_steps <= 0:
            raise DomainError("max_steps must be positive")


def _hermite(theta, h, y0, f0, y1, f1):
    """Cubic Hermite value on one step, theta in [0, 1]."""
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + theta
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def _locate_event(ev, h, y0, f0, y1, f1):
    """Bisect the Hermite interpolant; returns theta of the crossing or None."""
    g0 = y0[ev.component] - ev.bound
    g1 = y1[ev.component] - ev.bound
    if g0 == 0.0 or g0 * g1 > 0.0:
        return None
    rising = g1 > g0
    if ev.direction == 1 and not rising:
        return None
    if ev.direction == -1 and rising:
        return None
    lo, hi = 0.0, 1.0
    glo = g0
    # Bisection to 1e-12 in the independent variable.
    while (hi - lo) * abs(h) > 1e-12:
        mid = 0.5 * (lo + hi)
        gm = _hermite(mid, h, y0, f0, y1, f1)[ev.component] - ev.bound
        if gm == 0.0:
            return mid
        if (gm > 0.0) == (glo > 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def integrate(rhs, y0, span, settings: IntegrationSettings | None = None, meta: dict | None = None) -> Trajectory:
    """Integrate ``dy/dr = rhs(y)`` over ``span`` with adaptive step control.

    The trajectory records every accepted step together with the right-hand
    side there.  Termination: the end of the span (status "completed"), a stop
    event ("event"), the step budget ("truncated"), or the divergence guard
    ("diverged").  Non-finite values from ``rhs`` that persist as the step
    shrinks raise IntegrationFailure carrying the partial trajectory.
    """
    settings = settings or IntegrationSettings()
    r0, r_end = float(span[0]), float(span[1])
    if r0 == r_end:
        raise DomainError("span must be non-degenerate")
    direction = 1.0 if r_end > r0 else -1.0

    y = np.asarray(y0, dtype=float).reshape(2)
    f = np.asarray(rhs(y), dtype=float).reshape(2)
    if not np.all(np.isfinite(f)):
        raise DomainError(f"rhs is not finite at the initial state {y}")

    rs = [r0]
    ys = [y.copy()]
    fs = [f.copy()]
    meta = dict(meta or {})

    def _result(status):
        meta.setdefault("settings", settings)
        return Trajectory(np.array(rs), np.array(ys), np.array(fs), status=status, meta=meta)

    span_len = abs(r_end - r0)
    h = direction * min(settings.max_step, span_len / 100.0, 0.1)
    r = r0
    accepted = 0
    k = np.empty((7, 2))

    while True:
        if accepted >= settings.max_steps:
            return _result("truncated")
        remaining = r_end - r
        if direction * remaining <= 0.0:
            return _result("completed")
        if abs(h) > abs(remaining):
            h = remaining
        if abs(h) > settings.max_step:
            h = direction * settings.max_step

        k[0] = f
        failed = False
        y_new = y
        for i in range(1, 7):
            yi = y + h * (k[:i].T @ _A_NP[i])
            ki = np.asarray(rhs(yi), dtype=float)
            if not np.all(np.isfinite(ki)):
                failed = True
                break
            k[i] = ki
            if i == 6:
                y_new = yi  # the quadrature row equals the last stage point
        if failed or not np.all(np.isfinite(y_new)):
            h *= 0.5
            if abs(h) < 1e-14 * max(1.0, abs(r)):
                raise IntegrationFailure(
                    f"rhs produced non-finite values near r = {r}", partial=_result("truncated")
                )
            continue

        f_new = k[6]  # FSAL: the last stage sits at (r + h, y_new)
        err = h * (k.T @ _E_NP)
        scale = settings.abs_tol + settings.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = math.sqrt(float(np.mean((err / scale) ** 2)))

        if err_norm > 1.0:
            h *= max(0.2, 0.9 * err_norm ** -0.2)
            if abs(h) < 1e-14 * max(1.0, abs(r)):
                raise IntegrationFailure(
                    f"step size underflow near r = {r}", partial=_result("truncated")
                )
            continue

        # Accepted.  Events first: an interior crossing replaces the endpoint.
        hit = None
        for ev in settings.stop_events:
            theta = _locate_event(ev, h, y, f, y_new, f_new)
            if theta is not None and (hit is None or theta < hit[0]):
                hit = (theta, ev)
        if hit is not None:
            theta, ev = hit
            y_ev = _hermite(theta, h, y, f, y_new, f_new)
            rs.append(r + theta * h)
            ys.append(y_ev)
            fs.append(np.asarray(rhs(y_ev), dtype=float))
            meta["event"] = ev
            return _result("event")

        r += h
        y = y_new
        f = f_new
        rs.append(r)
        ys.append(y.copy())
        fs.append(f.copy())
        accepted += 1

        if float(np.linalg.norm(y)) > OVERFLOW_GUARD:
            return _result("diverged")

        factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        h *= factor


def _interp_state(traj: Trajectory, r: float, order: np.ndarray) -> np.ndarray:
    """Cubic Hermite interpolation of a trajectory at one point."""
    r1 = traj.r1[order]
    idx = int(np.searchsorted(r1, r, side="right")) - 1
    idx = min(max(idx, 0), len(r1) - 2)
    i0, i1 = order[idx], order[idx + 1]
    h = traj.r1[i1] - traj.r1[i0]
    if h == 0.0:
        return traj.states[i0]
    theta = (r - traj.r1[i0]) / h
    return _hermite(theta, h, traj.states[i0], traj.derivs[i0], traj.states[i1], traj.derivs[i1])


def compare_trajectories(a: Trajectory, b: Trajectory) -> float:
    """Maximum Euclidean deviation between two orbits on their common range.

    Both trajectories are interpolated (cubic Hermite from the stored
    derivatives) onto the union of their grids restricted to the overlap.
    """
    if len(a) == 0 or len(b) == 0:
        raise ComparisonError("cannot compare an empty trajectory")
    order_a = np.argsort(a.r1)
    order_b = np.argsort(b.r1)
    lo = max(a.r1.min(), b.r1.min())
    hi = min(a.r1.max(), b.r1.max())
    if lo > hi:
        raise ComparisonError(f"trajectory ranges do not overlap: [{lo}, {hi}] is empty")
    grid = np.union1d(a.r1, b.r1)
    grid = grid[(grid >= lo) & (grid <= hi)]
    max_dev = 0.0
    for r in grid:
        dev = float(np.linalg.norm(_interp_state(a, r, order_a) - _interp_state(b, r, order_b)))
        max_dev = max(max_dev, dev)
    return max_dev
