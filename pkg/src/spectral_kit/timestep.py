"""Explicit and implicit one-step/multistep ODE integrators.

Families: forward/backward Euler, Adams-Bashforth 2/3, Adams-Moulton 1
(trapezoid) and 2, the one-parameter two-stage Runge-Kutta family rk2(alpha)
(alpha = 1/2 midpoint, 1 Heun, 2/3 Ralston), and classical RK4.

Multistep methods are bootstrapped with RK4 steps at the same dt.  Implicit
updates are solved by damped Newton iteration with a forward-difference
Jacobian.  ``integrate`` aborts with :class:`BlowUpError` once the state
leaves a configurable bound (default 1e12) or turns non-finite, which turns
finite-time blow-up into a diagnosable event instead of silent overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "SchemeSpec",
    "IvpProblem",
    "BlowUpError",
    "NewtonError",
    "forward_euler",
    "backward_euler",
    "ab2",
    "ab3",
    "am1_trapezoid",
    "am2",
    "rk2",
    "midpoint",
    "heun",
    "ralston",
    "rk4",
    "step",
    "integrate",
    "convergence_study",
    "fit_order",
]

BLOWUP_THRESHOLD = 1e12

_ORDERS = {
    "forward_euler": 1,
    "backward_euler": 1,
    "ab2": 2,
    "ab3": 3,
    "am1_trapezoid": 2,
    "am2": 3,
    "rk2": 2,
    "rk4": 4,
}

#: number of previous rhs evaluations each family consumes
_HISTORY_NEEDED = {"ab2": 1, "ab3": 2, "am2": 1}

_IMPLICIT = {"backward_euler", "am1_trapezoid", "am2"}


class BlowUpError(RuntimeError):
    """Raised when the state exceeds the blow-up threshold or turns non-finite."""

    def __init__(self, step_index: int, t: float, norm: float):
        self.step_index = step_index
        self.t = t
        self.norm = norm
        super().__init__(
            f"blow-up detected at step {step_index} (t = {t:.6g}): |u| = {norm:.3e}"
        )


class NewtonError(RuntimeError):
    """Raised when the implicit inner solve fails to converge."""


@dataclass(frozen=True)
class SchemeSpec:
    """A time-marching scheme: family name plus the rk2 parameter if any."""

    family: str
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in _ORDERS:
            raise ValueError(f"unknown scheme family {self.family!r}")
        if self.family == "rk2":
            if self.alpha is None or self.alpha == 0.0:
                raise ValueError("rk2 requires a nonzero alpha")
        elif self.alpha is not None:
            raise ValueError(f"{self.family} takes no alpha parameter")

    @property
    def order(self) -> int:
        return _ORDERS[self.family]

    @property
    def history_needed(self) -> int:
        return _HISTORY_NEEDED.get(self.family, 0)

    @property
    def implicit(self) -> bool:
        return self.family in _IMPLICIT


def forward_euler() -> SchemeSpec:
    return SchemeSpec("forward_euler")


def backward_euler() -> SchemeSpec:
    return SchemeSpec("backward_euler")


def ab2() -> SchemeSpec:
    return SchemeSpec("ab2")


def ab3() -> SchemeSpec:
    return SchemeSpec("ab3")


def am1_trapezoid() -> SchemeSpec:
    return SchemeSpec("am1_trapezoid")


def am2() -> SchemeSpec:
    return SchemeSpec("am2")


def rk2(alpha: float) -> SchemeSpec:
    return SchemeSpec("rk2", alpha=alpha)


def midpoint() -> SchemeSpec:
    return rk2(0.5)


def heun() -> SchemeSpec:
    return rk2(1.0)


def ralston() -> SchemeSpec:
    return rk2(2.0 / 3.0)


def rk4() -> SchemeSpec:
    return SchemeSpec("rk4")


@dataclass
class IvpProblem:
    """Initial value problem du/dt = rhs(t, u), u(t0) = u0."""

    rhs: Callable
    u0: object
    t0: float = 0.0
    T: float = 1.0

    def initial_state(self) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.u0, dtype=complex if np.iscomplexobj(self.u0) else float))


def _newton_solve(g, u_guess, tol=1e-12, max_iter=50, fd_rel=1e-7):
    """Damped Newton for g(u) = 0 with a forward-difference Jacobian."""
    u = np.array(u_guess, dtype=float)
    r = g(u)
    rnorm = np.max(np.abs(r))
    for _ in range(max_iter):
        if rnorm <= tol:
            return u
        n = u.size
        J = np.empty((n, n))
        for j in range(n):
            h = fd_rel * max(abs(u[j]), 1.0)
            up = u.copy()
            up[j] += h
            J[:, j] = (g(up) - r) / h
        try:
            delta = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NewtonError(f"singular Jacobian in implicit solve: {exc}") from exc
        lam = 1.0
        for _ in range(25):
            u_trial = u + lam * delta
            r_trial = g(u_trial)
            t_norm = np.max(np.abs(r_trial))
            if np.isfinite(t_norm) and t_norm < rnorm:
                u, r, rnorm = u_trial, r_trial, t_norm
                break
            lam *= 0.5
        else:
            raise NewtonError(f"Newton damping stalled (residual {rnorm:.3e})")
    if rnorm <= tol:
        return u
    raise NewtonError(f"implicit solve did not reach {tol:.1e} (residual {rnorm:.3e})")


def step(scheme: SchemeSpec, rhs, t: float, u: np.ndarray, dt: float,
         history: Sequence[np.ndarray] = ()) -> np.ndarray:
    """One step of the scheme from (t, u); ``history`` holds earlier rhs values.

    ``history`` is ordered oldest first and must contain
    ``scheme.history_needed`` entries: f(u_{n-1}) as the last element,
    f(u_{n-2}) before it.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if len(history) < scheme.history_needed:
        raise ValueError(
            f"{scheme.family} needs {scheme.history_needed} history entries, got {len(history)}"
        )
    fam = scheme.family
    if fam == "forward_euler":
        return u + dt * rhs(t, u)
    if fam == "rk2":
        a = scheme.alpha
        k1 = dt * rhs(t, u)
        k2 = dt * rhs(t + a * dt, u + a * k1)
        return u + (1.0 - 0.5 / a) * k1 + (0.5 / a) * k2
    if fam == "rk4":
        k1 = dt * rhs(t, u)
        k2 = dt * rhs(t + 0.5 * dt, u + 0.5 * k1)
        k3 = dt * rhs(t + 0.5 * dt, u + 0.5 * k2)
        k4 = dt * rhs(t + dt, u + k3)
        return u + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    if fam == "ab2":
        fn = rhs(t, u)
        return u + dt * (1.5 * fn - 0.5 * history[-1])
    if fam == "ab3":
        fn = rhs(t, u)
        return u + dt * ((23.0 / 12.0) * fn - (4.0 / 3.0) * history[-1] + (5.0 / 12.0) * history[-2])
    if fam == "backward_euler":
        g = lambda v: v - u - dt * rhs(t + dt, v)
        return _newton_solve(g, u + dt * rhs(t, u))
    if fam == "am1_trapezoid":
        fn = rhs(t, u)
        g = lambda v: v - u - 0.5 * dt * (rhs(t + dt, v) + fn)
        return _newton_solve(g, u + dt * fn)
    if fam == "am2":
        fn = rhs(t, u)
        fm1 = history[-1]
        g = lambda v: v - u - dt * ((5.0 / 12.0) * rhs(t + dt, v) + (2.0 / 3.0) * fn - (1.0 / 12.0) * fm1)
        return _newton_solve(g, u + dt * fn)
    raise AssertionError(fam)


def _check_state(u, i, t, threshold):
    norm = float(np.max(np.abs(u)))
    if not np.isfinite(norm) or norm > threshold:
        raise BlowUpError(i, t, norm)


def integrate(scheme: SchemeSpec, problem: IvpProblem, n_steps: int,
              record: bool = False, blowup_threshold: float = BLOWUP_THRESHOLD):
    """March the problem to its final time in ``n_steps`` uniform steps.

    Returns the final state, or (times, states) with the full trajectory
    when ``record`` is set.  Multistep schemes take their first steps with
    RK4 at the same dt while the rhs history fills up.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    dt = (problem.T - problem.t0) / n_steps
    u = problem.initial_state()
    t = problem.t0
    rhs = lambda tt, vv: np.atleast_1d(np.asarray(problem.rhs(tt, vv)))
    history: list[np.ndarray] = []
    needed = scheme.history_needed
    traj_t = [t]
    traj_u = [u.copy()]
    for i in range(n_steps):
        if needed and len(history) < needed:
            history.append(rhs(t, u))
            u = step(rk4(), rhs, t, u, dt)
        elif needed:
            history.append(rhs(t, u))
            u = step(scheme, rhs, t, u, dt, history=history[:-1])
            history = history[-needed:]
        else:
            u = step(scheme, rhs, t, u, dt)
        t = problem.t0 + (i + 1) * dt
        _check_state(u, i + 1, t, blowup_threshold)
        if record:
            traj_t.append(t)
            traj_u.append(u.copy())
    if record:
        return np.array(traj_t), np.array(traj_u)
    return u


def convergence_study(scheme: SchemeSpec, problem: IvpProblem, exact_final,
                      step_list: Sequence[int]) -> list[tuple[float, float]]:
    """Final-time errors over a list of step counts, as (dt, error) pairs."""
    exact = np.atleast_1d(np.asarray(exact_final, dtype=float))
    out = []
    for n in step_list:
        u = integrate(scheme, problem, n)
        dt = (problem.T - problem.t0) / n
        out.append((dt, float(np.max(np.abs(u - exact)))))
    return out


def fit_order(pairs: Sequence[tuple[float, float]], floor: float = 0.0) -> float:
    """Least-squares slope of log(error) vs log(dt), ignoring errors <= floor.

    The floor masks the rounding plateau that breaks the power law once the
    error reaches the arithmetic noise level.
    """
    dts = np.array([p[0] for p in pairs])
    errs = np.array([p[1] for p in pairs])
    mask = errs > floor
    if mask.sum() < 2:
        raise ValueError("need at least two points above the floor to fit a slope")
    return float(np.polyfit(np.log(dts[mask]), np.log(errs[mask]), 1)[0])
