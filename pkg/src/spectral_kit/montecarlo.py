"""Stochastic solution of parabolic problems via path sampling.

The probabilistic representation evaluated here expresses the solution of

    u_t = alpha(x) u_x + 1/2 sigma(x)^2 u_xx - V(x) u,   u(x, 0) = u0(x)

as the expectation E[ exp(-int_0^t V(X_s) ds) u0(X_t) ] over diffusion paths
dX = alpha dt + sigma dW started at x.  Paths are discretized with the
Euler-Maruyama method (Higham, SIAM Review 2001) and the potential integral
accumulated with the matching left-endpoint rule.

Reproducibility
---------------
Brownian increments come from the counter-based Philox generator keyed by
the user seed, with normals produced by the inverse-CDF map (one uniform per
normal).  Each path owns a fixed, contiguous slice of the counter stream:
path m covers draws [m * stride, m * stride + N) with stride = N rounded up
to a multiple of 4 (the Philox block size).  Consequently path m is
bit-reproducible regardless of how many paths are requested or how the
batch is chunked, and a single path can be regenerated in isolation
(:func:`brownian_path`).  Reductions accumulate in a fixed block order, so
estimates are bit-stable for a given (seed, M, N, T).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

__all__ = [
    "PathBatch",
    "SdeProblem",
    "HypothesisViolationError",
    "brownian_batch",
    "brownian_path",
    "euler_maruyama",
    "feynman_kac",
    "feynman_kac_nd",
    "einstein_diffusivity",
    "GAS_CONSTANT",
    "AVOGADRO",
]

#: molar gas constant, J / (K mol)
GAS_CONSTANT = 8.3144598
#: Avogadro constant, 1 / mol (CODATA 2014 mantissa, 6.022140857e23)
AVOGADRO = 6.022140857e23

#: paths leaving |X| > this bound abort the run (bounded-datum hypothesis guard)
DEFAULT_STATE_BOUND = 1e6

_PHILOX_BLOCK = 4


class HypothesisViolationError(ValueError):
    """A Feynman-Kac hypothesis (V >= 0, bounded paths) failed on some path."""


def _stride(n_draws: int) -> int:
    return -(-n_draws // _PHILOX_BLOCK) * _PHILOX_BLOCK


def _normals(seed: int, first_path: int, n_paths: int, draws_per_path: int) -> np.ndarray:
    """Standard normals for paths [first_path, first_path + n_paths), shape (M, draws)."""
    stride = _stride(draws_per_path)
    bg = Philox(key=np.uint64(seed))
    if first_path:
        bg.advance(first_path * stride // _PHILOX_BLOCK)
    u = Generator(bg).random((n_paths, stride))[:, :draws_per_path]
    np.maximum(u, np.finfo(float).tiny, out=u)  # ndtri(0) would be -inf
    return ndtri(u)


@dataclass(frozen=True)
class PathBatch:
    """A seeded batch of discrete Brownian paths.

    ``dW`` holds the M x N increments (each Normal(0, dt)); ``W`` the running
    cumulative sums, so W[:, j] samples the motion at time (j+1) dt.
    """

    M: int
    N: int
    T: float
    seed: int
    dW: np.ndarray

    @property
    def dt(self) -> float:
        return self.T / self.N

    @property
    def W(self) -> np.ndarray:
        return np.cumsum(self.dW, axis=1)

    @property
    def terminal(self) -> np.ndarray:
        return self.dW.sum(axis=1)


def brownian_batch(M: int, N: int, T: float, seed: int) -> PathBatch:
    """M discrete Brownian paths of N steps on [0, T], increments ~ Normal(0, dt)."""
    if M < 1 or N < 1:
        raise ValueError("M and N must be >= 1")
    if T <= 0:
        raise ValueError("T must be positive")
    dt = T / N
    dW = np.sqrt(dt) * _normals(seed, 0, M, N)
    return PathBatch(M=M, N=N, T=T, seed=seed, dW=dW)


def brownian_path(m: int, N: int, T: float, seed: int) -> np.ndarray:
    """Increments of path m alone; bit-identical to row m of any larger batch."""
    if m < 0:
        raise ValueError("path index must be >= 0")
    return np.sqrt(T / N) * _normals(seed, m, 1, N)[0]


@dataclass(frozen=True)
class SdeProblem:
    """Drift/volatility/potential data for the path-sampling solver.

    ``alpha``, ``sigma`` and ``V`` map state arrays to arrays; ``u0`` is the
    initial datum; ``x0`` the evaluation point.  ``V`` must be nonnegative
    wherever paths travel.  ``state_bound`` guards the bounded-datum
    hypothesis: any path leaving |X| > state_bound aborts the run.
    """

    alpha: Callable
    sigma: Callable
    V: Callable
    u0: Callable
    x0: float = 0.0
    state_bound: float = DEFAULT_STATE_BOUND

    @classmethod
    def pure_brownian(cls, u0: Callable, x0: float = 0.0, sigma: float = 1.0) -> "SdeProblem":
        """Zero drift, constant volatility, zero potential."""
        return cls(
            alpha=lambda x: np.zeros_like(x),
            sigma=lambda x: np.full_like(x, sigma),
            V=lambda x: np.zeros_like(x),
            u0=u0,
            x0=x0,
        )


def euler_maruyama(problem: SdeProblem, batch: PathBatch,
                   potential_rule: str = "left") -> tuple[np.ndarray, np.ndarray]:
    """Terminal states X_T and accumulated potential integrals int V(X_s) ds.

    One Euler-Maruyama update per increment:
    X_{n+1} = X_n + alpha(X_n) dt + sigma(X_n) dW_n.  The potential integral
    uses the left-endpoint rule by default (consistent with the weak order
    of the scheme); ``potential_rule="trapezoid"`` averages endpoint values.
    """
    if potential_rule not in ("left", "trapezoid"):
        raise ValueError("potential_rule must be 'left' or 'trapezoid'")
    dt = batch.dt
    X = np.full(batch.M, float(problem.x0))
    V_int = np.zeros(batch.M)
    v_prev = _checked_potential(problem, X)
    for n in range(batch.N):
        X = X + problem.alpha(X) * dt + problem.sigma(X) * batch.dW[:, n]
        _check_paths(X, n, problem.state_bound)
        if potential_rule == "left":
            V_int += v_prev * dt
            v_prev = _checked_potential(problem, X)
        else:
            v_next = _checked_potential(problem, X)
            V_int += 0.5 * (v_prev + v_next) * dt
            v_prev = v_next
    return X, V_int


def _checked_potential(problem, X):
    v = np.asarray(problem.V(X), dtype=float)
    if np.any(v < 0):
        raise HypothesisViolationError("potential V took a negative value on a path")
    return v


def _check_paths(X, n, bound):
    bad = ~np.isfinite(X)
    if bad.any():
        m = int(np.nonzero(bad)[0][0])
        raise FloatingPointError(f"path {m} became non-finite at step {n}")
    out = np.abs(X) > bound
    if out.any():
        m = int(np.nonzero(out)[0][0])
        raise HypothesisViolationError(
            f"path {m} left the bounding box |X| <= {bound:.1e} at step {n}"
        )


def _block_size(n_draws: int) -> int:
    # ~32 MB of increments per block; fixed by N alone so results are
    # independent of machine and schedule
    return max(1, (1 << 22) // max(n_draws, 1))


def feynman_kac(problem: SdeProblem, t: float, M: int, N: int, seed: int,
                potential_rule: str = "left") -> dict:
    """Path-sampling estimate of u(x0, t) with its standard error.

    Averages exp(-int V) u0(X_t) over M paths of N Euler-Maruyama steps.
    With alpha = 0, sigma = 1, V = 0 and N = 1 this reduces to averaging
    u0 over exact Gaussian endpoints Normal(x0, sqrt(t)) - the cheapest
    correct configuration for the pure heat kernel.  Paths are processed in
    fixed-size blocks; the reduction order depends only on (M, N), so the
    returned estimate is bit-stable for a given seed.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    block = _block_size(N)
    sum_g = 0.0
    sum_g2 = 0.0
    for lo in range(0, M, block):
        hi = min(lo + block, M)
        dW = np.sqrt(t / N) * _normals(seed, lo, hi - lo, N)
        chunk = PathBatch(M=hi - lo, N=N, T=t, seed=seed, dW=dW)
        X, V_int = euler_maruyama(problem, chunk, potential_rule)
        g = np.exp(-V_int) * problem.u0(X)
        sum_g += float(np.sum(g))
        sum_g2 += float(np.sum(g * g))
    mean = sum_g / M
    var = max(sum_g2 - M * mean * mean, 0.0) / max(M - 1, 1)
    return {"estimate": mean, "std_error": float(np.sqrt(var / M)), "M": M, "N": N}


def feynman_kac_nd(problem: SdeProblem, t: float, M: int, N: int, seed: int, d: int,
                   potential_rule: str = "left") -> dict:
    """d-dimensional variant with componentwise-independent Brownian coordinates.

    ``alpha``, ``sigma`` act componentwise on (M, d) state arrays; ``V`` and
    ``u0`` map (M, d) arrays to length-M arrays.  ``x0`` may be a scalar or
    a length-d point.  For d = 1 the draws coincide with the scalar solver's
    given the same seed, so both return identical estimates.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if t <= 0:
        raise ValueError("t must be positive")
    draws = N * d
    block = _block_size(draws)
    x0 = np.broadcast_to(np.asarray(problem.x0, dtype=float), (d,))
    dt = t / N
    sum_g = 0.0
    sum_g2 = 0.0
    for lo in range(0, M, block):
        hi = min(lo + block, M)
        dW = np.sqrt(dt) * _normals(seed, lo, hi - lo, draws).reshape(hi - lo, N, d)
        X = np.tile(x0, (hi - lo, 1))
        V_int = np.zeros(hi - lo)
        v_prev = _checked_potential(problem, X)
        for n in range(N):
            X = X + problem.alpha(X) * dt + problem.sigma(X) * dW[:, n, :]
            _check_paths(X.ravel(), n, problem.state_bound)
            if potential_rule == "left":
                V_int += v_prev * dt
                v_prev = _checked_potential(problem, X)
            else:
                v_next = _checked_potential(problem, X)
                V_int += 0.5 * (v_prev + v_next) * dt
                v_prev = v_next
        g = np.exp(-V_int) * problem.u0(X)
        sum_g += float(np.sum(g))
        sum_g2 += float(np.sum(g * g))
    mean = sum_g / M
    var = max(sum_g2 - M * mean * mean, 0.0) / max(M - 1, 1)
    return {"estimate": mean, "std_error": float(np.sqrt(var / M)), "M": M, "N": N, "d": d}


def einstein_diffusivity(R: float = GAS_CONSTANT, T_abs: float = 293.15,
                         f: float = 1.0, Na: float = AVOGADRO) -> float:
    """Diffusion coefficient R T / (f Na) from gas constant, temperature,
    friction coefficient and Avogadro's number."""
    if R <= 0 or T_abs < 0 or f <= 0 or Na <= 0:
        raise ValueError("R, f, Na must be positive and T_abs >= 0")
    return R * T_abs / (f * Na)
