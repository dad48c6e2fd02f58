"""Chebyshev polynomials and Hermite functions in coefficient space.

Construction is by the classical three-term recurrences; series calculus
(differentiation, products, quadrature inner products) operates directly on
coefficient vectors so that downstream solvers never need to expand to
monomials unless they ask for it.

Conventions
-----------
* ``DensePoly`` stores monomial coefficients highest degree first, the
  ordering expected by Horner-type evaluators such as ``numpy.polyval``.
* ``ChebSeries`` stores coefficients lowest degree first, v[k] multiplying
  the degree-k basis polynomial on [-1, 1].
Conversions between the two are explicit (``to_dense``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DensePoly",
    "ChebSeries",
    "NodeFamily",
    "cheb_polys",
    "cheb_eval",
    "cheb_series_eval",
    "cheb_nodes",
    "cheb_inner",
    "cheb_diff",
    "cheb_diff2",
    "cheb_product",
    "cheb_compose_check",
    "hermite_eval",
    "hermite_funcs",
]

_EVAL_DOMAIN_SLACK = 1e-14


@dataclass(frozen=True)
class DensePoly:
    """Polynomial in monomial form, coefficients highest degree first."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Horner evaluation at scalar or array ``x``."""
        return np.polyval(np.asarray(self.coeffs), x)

    def derivative(self) -> "DensePoly":
        if self.degree == 0:
            return DensePoly((0.0,))
        return DensePoly(tuple(np.polyder(np.asarray(self.coeffs))))


@dataclass(frozen=True)
class ChebSeries:
    """Truncated Chebyshev expansion sum_k v[k] T_k(x) on [-1, 1]."""

    v: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))

    @property
    def degree(self) -> int:
        return len(self.v) - 1

    def __call__(self, x):
        return cheb_series_eval(np.asarray(self.v), x)

    def to_dense(self) -> DensePoly:
        """Expand to monomial coefficients (highest degree first)."""
        basis = cheb_polys(self.degree)
        out = np.zeros(self.degree + 1)
        for k, c in enumerate(self.v):
            coeffs = np.asarray(basis[k].coeffs)
            out[-len(coeffs):] += c * coeffs
        return DensePoly(tuple(out))


_NODE_KINDS = ("chebyshev_extrema", "chebyshev_zeros", "uniform", "legendre_like_custom")


@dataclass(frozen=True)
class NodeFamily:
    """A named interpolation node family on [-1, 1].

    ``chebyshev_extrema`` and ``uniform`` produce N+1 nodes including both
    endpoints; ``chebyshev_zeros`` produces N interior nodes.  The
    ``legendre_like_custom`` kind carries user-supplied nodes (no canonical
    closed form is adopted here).
    """

    kind: str
    N: int
    custom_nodes: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in _NODE_KINDS:
            raise ValueError(f"unknown node family {self.kind!r}; expected one of {_NODE_KINDS}")
        if self.N < 1:
            raise ValueError("node count parameter N must be >= 1")
        if self.kind == "legendre_like_custom":
            nodes = np.asarray(self.custom_nodes, dtype=float)
            if nodes.size < 1:
                raise ValueError("legendre_like_custom requires explicit nodes")
            if np.any(np.diff(nodes) <= 0):
                raise ValueError("custom nodes must be strictly increasing")
            if nodes.min() < -1.0 or nodes.max() > 1.0:
                raise ValueError("custom nodes must lie in [-1, 1]")
            object.__setattr__(self, "custom_nodes", tuple(float(x) for x in nodes))


def cheb_polys(n: int) -> list[DensePoly]:
    """Chebyshev polynomials T_0..T_n in monomial form.

    Built by the three-term recursion T_{k+1} = 2x T_k - T_{k-1}; all
    coefficients are integers, exact in float64 through degree ~50.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    polys = [np.array([1.0])]
    if n >= 1:
        polys.append(np.array([1.0, 0.0]))
    for _ in range(2, n + 1):
        shifted = np.concatenate([2.0 * polys[-1], [0.0]])
        shifted[2:] -= polys[-2]
        polys.append(shifted)
    return [DensePoly(tuple(p)) for p in polys[: n + 1]]


def cheb_eval(k: int, x):
    """Value of the degree-k Chebyshev polynomial at points in [-1, 1].

    Uses the value recurrence, which is exact at the endpoints (integer
    arithmetic) and agrees with cos(k arccos x) to ~1e-13 for k <= 64.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0 + _EVAL_DOMAIN_SLACK):
        raise ValueError("cheb_eval requires |x| <= 1")
    if k == 0:
        return np.ones_like(xa) if xa.ndim else 1.0
    prev = np.ones_like(xa)
    cur = xa.copy()
    for _ in range(k - 1):
        prev, cur = cur, 2.0 * xa * cur - prev
    return cur if xa.ndim else float(cur)


def cheb_series_eval(v, x):
    """Clenshaw evaluation of a Chebyshev series (coefficients lowest first)."""
    v = np.asarray(v, dtype=float)
    xa = np.asarray(x, dtype=float)
    b1 = np.zeros_like(xa)
    b2 = np.zeros_like(xa)
    for c in v[:0:-1]:
        b1, b2 = 2.0 * xa * b1 - b2 + c, b1
    out = xa * b1 - b2 + v[0]
    return out if xa.ndim else float(out)


def cheb_nodes(family: NodeFamily) -> np.ndarray:
    """Nodes of the requested family, strictly increasing in [-1, 1]."""
    N = family.N
    if family.kind == "chebyshev_extrema":
        return -np.cos(np.pi * np.arange(N + 1) / N)
    if family.kind == "chebyshev_zeros":
        return np.sort(np.cos((2.0 * np.arange(1, N + 1) - 1.0) * np.pi / (2.0 * N)))
    if family.kind == "uniform":
        return np.linspace(-1.0, 1.0, N + 1)
    return np.asarray(family.custom_nodes, dtype=float)


def cheb_inner(m: int, n: int, quad_points: int | None = None) -> float:
    """Weighted inner product of T_m and T_n by Gauss-Chebyshev quadrature.

    The integral of T_m T_n / sqrt(1 - x^2) over [-1, 1] equals 0 for
    m != n, pi for m = n = 0 and pi/2 for m = n > 0.  The quadrature with Q
    points is exact for polynomial integrands of degree <= 2Q - 1, so the
    default Q = m + n + 1 more than suffices.
    """
    if m < 0 or n < 0:
        raise ValueError("indices must be >= 0")
    Q = quad_points if quad_points is not None else m + n + 1
    if Q < m + n + 1:
        raise ValueError("quad_points must be >= m + n + 1 for exactness")
    xq = np.cos((2.0 * np.arange(1, Q + 1) - 1.0) * np.pi / (2.0 * Q))
    return float(np.pi / Q * np.sum(cheb_eval(m, xq) * cheb_eval(n, xq)))


def gauss_chebyshev_inner(f, g, quad_points: int) -> float:
    """Quadrature of f(x) g(x) / sqrt(1 - x^2) over [-1, 1] for callables."""
    xq = np.cos((2.0 * np.arange(1, quad_points + 1) - 1.0) * np.pi / (2.0 * quad_points))
    return float(np.pi / quad_points * np.sum(f(xq) * g(xq)))


def cheb_diff(series: ChebSeries) -> ChebSeries:
    """Coefficients of the derivative of a Chebyshev series.

    Implements the explicit sum v'_k = (2/delta_k) * sum_{j>k, j+k odd} j v_j
    with delta_0 = 2 and delta_k = 1 otherwise.  The output keeps the input
    length; the top coefficient is zero.  Equivalently the coefficients obey
    the backward recurrence delta_{k-1} v'_{k-1} = v'_{k+1} + 2k v_k with the
    tail conditions v'_N = 0 and v'_{N-1} = 2 N v_N.
    """
    v = np.asarray(series.v, dtype=float)
    N = len(v) - 1
    out = np.zeros_like(v)
    for k in range(N):
        j = np.arange(k + 1, N + 1)
        j = j[(j + k) % 2 == 1]
        s = float(np.sum(j * v[j]))
        out[k] = (2.0 if k > 0 else 1.0) * s
    return ChebSeries(tuple(out))


def cheb_diff2(series: ChebSeries) -> ChebSeries:
    """Second-derivative coefficients via the explicit j (j^2 - k^2) sum."""
    v = np.asarray(series.v, dtype=float)
    N = len(v) - 1
    out = np.zeros_like(v)
    for k in range(max(N - 1, 0)):
        j = np.arange(k + 2, N + 1)
        j = j[(j + k) % 2 == 0]
        s = float(np.sum(j * (j.astype(float) ** 2 - k**2) * v[j]))
        out[k] = s if k > 0 else 0.5 * s
    return ChebSeries(tuple(out))


def cheb_product(m: int, n: int) -> tuple[tuple[int, float], tuple[int, float]]:
    """Linearization T_m T_n = 1/2 (T_{n+m} + T_{n-m}) as (index, weight) pairs."""
    if m > n:
        raise ValueError("cheb_product requires n >= m >= 0")
    if m < 0:
        raise ValueError("cheb_product requires n >= m >= 0")
    return ((n + m, 0.5), (n - m, 0.5))


def cheb_compose_check(m: int, n: int, samples: int = 201) -> float:
    """Max deviation of T_m(T_n(x)) from T_{mn}(x) over sample points."""
    if m < 0 or n < 0:
        raise ValueError("indices must be >= 0")
    xs = np.linspace(-1.0, 1.0, samples)
    inner = cheb_eval(n, xs)
    # the inner values are Chebyshev values, |T_n| <= 1 up to rounding
    inner = np.clip(inner, -1.0, 1.0)
    return float(np.max(np.abs(cheb_eval(m, inner) - cheb_eval(m * n, xs))))


def hermite_eval(k: int, x):
    """Raw Hermite polynomial H_k by the recurrence H_{k+1} = 2x H_k - 2k H_{k-1}.

    Unnormalized; overflows for large k at large |x| (use ``hermite_funcs``
    for anything beyond modest degrees).
    """
    xa = np.asarray(x, dtype=float)
    prev = np.ones_like(xa)
    if k == 0:
        return prev if xa.ndim else 1.0
    cur = 2.0 * xa
    for j in range(1, k):
        prev, cur = cur, 2.0 * xa * cur - 2.0 * j * prev
    return cur if xa.ndim else float(cur)


def hermite_funcs(n: int, x) -> np.ndarray:
    """Orthonormal Hermite functions H_k(x) e^{-x^2/2} / sqrt(2^k k! sqrt(pi)).

    Returns a matrix of shape (n+1, len(x)).  The functions are generated by
    the normalized recurrence

        h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1},

    which keeps every intermediate bounded (the raw H_k recurrence overflows
    long before degree 128).  The pi^{-1/4} factor makes the family
    orthonormal in L2(R); their derivatives satisfy
    h'_k = -sqrt((k+1)/2) h_{k+1} + sqrt(k/2) h_{k-1}.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > 128:
        raise ValueError("degree capped at 128")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((n + 1, xa.size))
    out[0] = math.pi ** (-0.25) * np.exp(-0.5 * xa**2)
    if n >= 1:
        out[1] = math.sqrt(2.0) * xa * out[0]
    for k in range(1, n):
        out[k + 1] = xa * math.sqrt(2.0 / (k + 1)) * out[k] - math.sqrt(k / (k + 1.0)) * out[k - 1]
    return out
