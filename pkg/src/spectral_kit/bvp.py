"""Weighted-residual solution of a linear second-order two-point BVP.

The model problem is

    u'' + u' - 2u + 2 = 0 on [-1, 1],  u(-1) = u(1) = 0,

whose exact solution is a combination of e^x and e^{-2x} (see
``exact_solution``).  The trial space is a degree-N Chebyshev expansion and
the N+1 coefficients are fixed three classical ways:

* tau: 2 boundary rows plus residual orthogonality to T_0..T_{N-2} in the
  Chebyshev-weighted inner product;
* galerkin: the basis is recombined into phi_k = T_{k+2} - T_{k mod 2},
  which vanishes at both endpoints, and the residual is made orthogonal to
  every phi_k;
* collocation: 2 boundary rows plus a vanishing residual at the interior
  Chebyshev extrema cos(pi k / N), k = 1..N-1.

Inner products are computed by Gauss-Chebyshev quadrature with N+8 points,
exact for the polynomial integrands that occur here.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .orthopoly import ChebSeries, cheb_diff, cheb_series_eval

__all__ = ["BvpSolution", "solve_bvp", "exact_bvp_solution", "METHODS"]

METHODS = ("tau", "galerkin", "collocation")

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BvpSolution:
    method: str
    coeffs: ChebSeries
    residual_norm: float
    bc_residual: tuple[float, float]
    condition_number: float

    def __call__(self, x):
        return self.coeffs(x)


def exact_bvp_solution(x):
    """Closed-form solution 1 - (sinh 2 / sinh 3) e^x - (sinh 1 / sinh 3) e^{-2x}."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0 + 1e-12):
        raise ValueError("exact solution defined on [-1, 1]")
    s3 = math.sinh(3.0)
    out = 1.0 - math.sinh(2.0) / s3 * np.exp(xa) - math.sinh(1.0) / s3 * np.exp(-2.0 * xa)
    return out if np.ndim(x) else float(out)


def _basis_series(N: int) -> list[np.ndarray]:
    """Coefficient vectors (length N+1) of T_0..T_N."""
    return [np.eye(N + 1)[j] for j in range(N + 1)]


def _residual_coeffs(c: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients of L[u] = u'' + u' - 2u for series coeffs c."""
    s = ChebSeries(tuple(c))
    d1 = np.asarray(cheb_diff(s).v)
    d2 = np.asarray(cheb_diff(ChebSeries(tuple(d1))).v)
    return d2 + d1 - 2.0 * c


def _gauss_cheb_nodes(Q: int) -> tuple[np.ndarray, float]:
    xq = np.cos((2.0 * np.arange(1, Q + 1) - 1.0) * np.pi / (2.0 * Q))
    return xq, np.pi / Q


def solve_bvp(method: str, N: int) -> BvpSolution:
    """Solve the model BVP with a degree-N Chebyshev trial space.

    Requires N >= 2 (two boundary rows plus at least one residual condition).
    Raises ``numpy.linalg.LinAlgError`` with a condition estimate if the
    assembled system is singular.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if N < 2:
        raise ValueError("N must be >= 2")

    basis = _basis_series(N)
    L_cols = [_residual_coeffs(e) for e in basis]  # L[T_j] as Chebyshev coeffs
    xq, wq = _gauss_cheb_nodes(N + 8)
    # values of L[T_j] and T_k at the quadrature nodes
    Lvals = np.array([cheb_series_eval(col, xq) for col in L_cols])  # (N+1, Q)
    Tvals = np.array([cheb_series_eval(e, xq) for e in basis])       # (N+1, Q)

    if method == "galerkin":
        nb = N - 1
        # phi_k = T_{k+2} - T_{k mod 2}: vanishes at x = +-1 identically
        P = np.zeros((nb, N + 1))
        for k in range(nb):
            P[k, k + 2] = 1.0
            P[k, k % 2] -= 1.0
        phi_vals = P @ Tvals
        Lphi_vals = np.array([cheb_series_eval(_residual_coeffs(P[k]), xq) for k in range(nb)])
        A = wq * (phi_vals @ Lphi_vals.T)          # <L phi_j, phi_k>
        b = wq * (phi_vals @ np.full(xq.size, -2.0))
        cond = np.linalg.cond(A)
        _check_cond(cond, method)
        cg = np.linalg.solve(A, b)
        a = cg @ P
    else:
        A = np.zeros((N + 1, N + 1))
        b = np.zeros(N + 1)
        A[0] = np.ones(N + 1)                      # u(1) = sum a_k = 0
        A[1] = (-1.0) ** np.arange(N + 1)          # u(-1) = sum (-1)^k a_k = 0
        if method == "tau":
            for k in range(N - 1):
                A[2 + k] = wq * (Lvals @ Tvals[k])
                b[2 + k] = wq * np.sum(-2.0 * Tvals[k])
        else:  # collocation
            xc = np.cos(np.pi * np.arange(1, N) / N)
            for i, xi in enumerate(xc):
                A[2 + i] = [cheb_series_eval(col, xi) for col in L_cols]
                b[2 + i] = -2.0
        cond = np.linalg.cond(A)
        _check_cond(cond, method)
        a = np.linalg.solve(A, b)

    series = ChebSeries(tuple(a))
    r = _residual_coeffs(np.asarray(a)) + 2.0 * np.eye(N + 1)[0]
    xs = np.linspace(-1.0, 1.0, 64 * (N + 1))
    residual_norm = float(np.max(np.abs(cheb_series_eval(r, xs))))
    bc = (abs(float(np.sum(a))), abs(float(np.sum(a * (-1.0) ** np.arange(N + 1)))))
    log.debug("bvp %s N=%d: cond=%.3e residual=%.3e bc=%s", method, N, cond, residual_norm, bc)
    return BvpSolution(method, series, residual_norm, bc, float(cond))


def _check_cond(cond: float, method: str):
    if not np.isfinite(cond) or cond > 1e15:
        raise np.linalg.LinAlgError(
            f"{method} system is numerically singular (condition estimate {cond:.3e})"
        )