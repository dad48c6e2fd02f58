"""Boundary-collocation solvers for the 2D Laplace equation.

The trial space consists of functions that satisfy the Laplace equation
exactly, so only the boundary conditions remain to be enforced (the indirect
boundary-type approach; see Kita & Kamiya, Adv. Eng. Software 24, 1995).
Two bases are provided:

* harmonic polynomials {1, r^k cos k0, r^k sin k0} up to degree n_max,
  realized as real/imaginary parts of z^k;
* free-space Green functions G(x; Q) = ln|x - Q| / (2 pi) with source points
  Q placed strictly outside the domain (the method of fundamental
  solutions).  The 1/(2 pi) normalization only rescales coefficients.

Boundary conditions may be Dirichlet, Neumann or Robin per boundary sample.
Coefficients are fixed by square collocation, SVD least squares, or a
boundary Galerkin projection (trapezoid quadrature along the boundary,
solved through orthogonalization rather than normal equations - the
fundamental-solution systems are far too ill-conditioned for the latter).
Condition numbers are logged and reported on the solution object.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.linalg

__all__ = [
    "DIRICHLET",
    "NEUMANN",
    "ROBIN",
    "BoundaryProblem",
    "parametric_problem",
    "TCompleteBasis",
    "FundamentalBasis",
    "fundamental_basis",
    "TrefftzSolution",
    "solve_trefftz",
    "dilated_sources",
    "disk_problem",
    "rectangle_problem",
    "polygon_problem",
    "load_boundary_csv",
    "RankDeficientError",
]

log = logging.getLogger(__name__)

DIRICHLET, NEUMANN, ROBIN = 0, 1, 2

_METHODS = ("collocation", "least_squares", "galerkin_boundary")


class RankDeficientError(np.linalg.LinAlgError):
    """The boundary system lost rank and regularization was not requested."""


@dataclass(frozen=True)
class BoundaryProblem:
    """Sampled boundary of a bounded 2D domain with per-sample conditions.

    ``points`` are ordered along the closed boundary; ``normals`` are the
    outward unit normals; ``arc_weights`` are trapezoid quadrature weights
    of the boundary parametrization.  ``bc_kind`` holds DIRICHLET / NEUMANN
    / ROBIN per sample with Robin parameters (alpha, beta) and boundary data
    in ``data``.  ``densify`` (optional) rebuilds the same problem with a
    finer sampling, used by the Galerkin solver.
    """

    points: np.ndarray
    normals: np.ndarray
    arc_weights: np.ndarray
    bc_kind: np.ndarray
    data: np.ndarray
    robin_alpha: np.ndarray
    robin_beta: np.ndarray
    densify: Callable | None = None

    def __post_init__(self):
        P = self.points.shape[0]
        for name in ("normals",):
            if getattr(self, name).shape != (P, 2):
                raise ValueError(f"{name} must have shape (P, 2)")
        for name in ("arc_weights", "bc_kind", "data", "robin_alpha", "robin_beta"):
            if getattr(self, name).shape != (P,):
                raise ValueError(f"{name} must have shape (P,)")
        robin = self.bc_kind == ROBIN
        if np.any(robin & (self.robin_alpha == 0) & (self.robin_beta == 0)):
            raise ValueError("Robin condition requires (alpha, beta) != (0, 0)")

    @property
    def n_samples(self) -> int:
        return self.points.shape[0]

    def contains(self, pts: np.ndarray) -> np.ndarray:
        """Even-odd point-in-polygon test against the sampled boundary."""
        pts = np.atleast_2d(pts)
        poly = self.points
        x, y = pts[:, 0], pts[:, 1]
        inside = np.zeros(len(pts), dtype=bool)
        px, py = poly[:, 0], poly[:, 1]
        qx, qy = np.roll(px, -1), np.roll(py, -1)
        for i in range(len(poly)):
            cross = (py[i] > y) != (qy[i] > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = (qx[i] - px[i]) * (y - py[i]) / (qy[i] - py[i]) + px[i]
            inside ^= cross & (x < xint)
        return inside

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        """Distance from each point to the nearest boundary sample."""
        pts = np.atleast_2d(pts)
        d = np.linalg.norm(pts[:, None, :] - self.points[None, :, :], axis=2)
        return d.min(axis=1)


def parametric_problem(curve, normal, bc_at, P: int) -> BoundaryProblem:
    """Build a problem from parametrizations on [0, 1) so it can be densified."""
    ts = np.arange(P) / P
    pts = curve(ts)
    nrm = normal(ts)
    kind, alpha, beta, data = bc_at(pts, ts)
    seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    w = 0.5 * (seg + np.roll(seg, 1))
    return BoundaryProblem(
        points=pts, normals=nrm, arc_weights=w,
        bc_kind=kind, data=data, robin_alpha=alpha, robin_beta=beta,
        densify=lambda factor: parametric_problem(curve, normal, bc_at, factor * P),
    )


def _uniform_bc(kind: int, data_fn, alpha: float = 0.0, beta: float = 0.0):
    def bc_at(pts, ts):
        P = len(pts)
        return (np.full(P, kind), np.full(P, alpha), np.full(P, beta),
                np.asarray(data_fn(pts), dtype=float))
    return bc_at


def disk_problem(P: int, data_fn, kind: int = DIRICHLET, radius: float = 1.0,
                 alpha: float = 0.0, beta: float = 0.0) -> BoundaryProblem:
    """Circle of given radius about the origin with a uniform condition type."""
    curve = lambda ts: radius * np.stack([np.cos(2 * np.pi * ts), np.sin(2 * np.pi * ts)], axis=1)
    normal = lambda ts: np.stack([np.cos(2 * np.pi * ts), np.sin(2 * np.pi * ts)], axis=1)
    return parametric_problem(curve, normal, _uniform_bc(kind, data_fn, alpha, beta), P)


def rectangle_problem(P_per_side: int, data_fn, kind: int = DIRICHLET,
                      half_width: float = 1.0, half_height: float = 1.0) -> BoundaryProblem:
    """Axis-aligned rectangle [-w, w] x [-h, h], counterclockwise."""
    w, h = half_width, half_height

    def curve(ts):
        s = (ts % 1.0) * 4.0
        pts = np.empty((len(ts), 2))
        for i, si in enumerate(s):
            edge, f = int(si), si - int(si)
            if edge == 0:
                pts[i] = (-w + 2 * w * f, -h)
            elif edge == 1:
                pts[i] = (w, -h + 2 * h * f)
            elif edge == 2:
                pts[i] = (w - 2 * w * f, h)
            else:
                pts[i] = (-w, h - 2 * h * f)
        return pts

    def normal(ts):
        s = (ts % 1.0) * 4.0
        nrm = np.empty((len(ts), 2))
        table = [(0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)]
        for i, si in enumerate(s):
            nrm[i] = table[int(si)]
        return nrm

    return parametric_problem(curve, normal, _uniform_bc(kind, data_fn), 4 * P_per_side)


def polygon_problem(vertices, kinds, values, samples_per_edge: int = 8,
                    alphas=None, betas=None) -> BoundaryProblem:
    """Closed polygon with per-vertex condition tags.

    Each edge inherits the condition kind (and Robin parameters) of its
    starting vertex; the boundary data is interpolated linearly between the
    endpoint values.  Vertices must be ordered counterclockwise for the
    outward normals to point outward.
    """
    verts = np.asarray(vertices, dtype=float)
    kinds = np.asarray(kinds, dtype=int)
    values = np.asarray(values, dtype=float)
    nv = len(verts)
    alphas = np.zeros(nv) if alphas is None else np.asarray(alphas, dtype=float)
    betas = np.zeros(nv) if betas is None else np.asarray(betas, dtype=float)

    def build(spe: int) -> BoundaryProblem:
        pts, nrm, kind, alph, bet, data = [], [], [], [], [], []
        for i in range(nv):
            a, b = verts[i], verts[(i + 1) % nv]
            edge = b - a
            length = np.linalg.norm(edge)
            n_out = np.array([edge[1], -edge[0]]) / length  # right of a CCW edge
            for j in range(spe):
                f = j / spe
                pts.append(a + f * edge)
                nrm.append(n_out)
                kind.append(kinds[i])
                alph.append(alphas[i])
                bet.append(betas[i])
                data.append((1 - f) * values[i] + f * values[(i + 1) % nv])
        pts = np.asarray(pts)
        seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        w = 0.5 * (seg + np.roll(seg, 1))
        return BoundaryProblem(
            points=pts, normals=np.asarray(nrm), arc_weights=w,
            bc_kind=np.asarray(kind), data=np.asarray(data),
            robin_alpha=np.asarray(alph), robin_beta=np.asarray(bet),
            densify=lambda factor: build(factor * spe),
        )

    return build(samples_per_edge)


_KIND_NAMES = {"dirichlet": DIRICHLET, "neumann": NEUMANN, "robin": ROBIN}


def load_boundary_csv(path, samples_per_edge: int = 8) -> BoundaryProblem:
    """Polygon domain file: rows ``x,y,kind,value[,alpha,beta]``.

    ``kind`` is one of dirichlet/neumann/robin; a header row is permitted.
    """
    verts, kinds, values, alphas, betas = [], [], [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = [p.strip() for p in line.strip().split(",")]
            if not parts or parts[0] == "" or parts[0].lower() in ("x", "# x", "#x"):
                continue
            verts.append((float(parts[0]), float(parts[1])))
            kinds.append(_KIND_NAMES[parts[2].lower()])
            values.append(float(parts[3]))
            alphas.append(float(parts[4]) if len(parts) > 4 else 0.0)
            betas.append(float(parts[5]) if len(parts) > 5 else 0.0)
    return polygon_problem(verts, kinds, values, samples_per_edge, alphas, betas)


class TCompleteBasis:
    """Harmonic polynomials {1, r^k cos k0, r^k sin k0}, k = 1..n_max."""

    def __init__(self, n_max: int):
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        self.n_max = n_max

    @property
    def size(self) -> int:
        return 2 * self.n_max + 1

    def eval(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        z = pts[:, 0] + 1j * pts[:, 1]
        cols = [np.ones(len(z))]
        zk = np.ones_like(z)
        for _ in range(self.n_max):
            zk = zk * z
            cols.extend([zk.real, zk.imag])
        return np.stack(cols, axis=1)

    def normal_deriv(self, pts: np.ndarray, normals: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        z = pts[:, 0] + 1j * pts[:, 1]
        nx, ny = normals[:, 0], normals[:, 1]
        cols = [np.zeros(len(z))]
        zk1 = np.ones_like(z)  # z^{k-1}
        for k in range(1, self.n_max + 1):
            d = k * zk1
            # f = Re z^k: grad = (Re d, -Im d); g = Im z^k: grad = (Im d, Re d)
            cols.append(nx * d.real - ny * d.imag)
            cols.append(nx * d.imag + ny * d.real)
            zk1 = zk1 * z
        return np.stack(cols, axis=1)


class FundamentalBasis:
    """Green-function columns G(x; Q) = ln|x - Q| / (2 pi), sources outside."""

    def __init__(self, sources: np.ndarray):
        self.sources = np.atleast_2d(np.asarray(sources, dtype=float))

    @property
    def size(self) -> int:
        return len(self.sources)

    def validate(self, problem: BoundaryProblem, min_distance: float = 1e-9):
        inside = problem.contains(self.sources)
        dist = problem.boundary_distance(self.sources)
        if np.any(inside) or np.any(dist <= min_distance):
            bad = int(np.nonzero(inside | (dist <= min_distance))[0][0])
            raise ValueError(
                f"source {bad} at {tuple(self.sources[bad])} lies inside or on the boundary"
            )

    def eval(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        d = pts[:, None, :] - self.sources[None, :, :]
        r = np.linalg.norm(d, axis=2)
        if np.any(r == 0):
            raise ValueError("evaluation point coincides with a source")
        return np.log(r) / (2.0 * np.pi)

    def normal_deriv(self, pts: np.ndarray, normals: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        d = pts[:, None, :] - self.sources[None, :, :]
        r2 = np.sum(d * d, axis=2)
        return (d[:, :, 0] * normals[:, None, 0] + d[:, :, 1] * normals[:, None, 1]) / (
            2.0 * np.pi * r2
        )


def fundamental_basis(sources, eval_points) -> np.ndarray:
    """Matrix of Green-function values G(x_i; Q_j) (no validation)."""
    return FundamentalBasis(sources).eval(np.atleast_2d(eval_points))


def dilated_sources(problem: BoundaryProblem, n_sources: int, factor: float = 1.8) -> np.ndarray:
    """Sources on a dilation of the boundary about its centroid.

    The placement of fundamental-solution sources has no known optimum, so
    the dilation factor is a knob; 1.8 is a serviceable default for convex
    domains.
    """
    if factor <= 1.0:
        raise ValueError("dilation factor must exceed 1")
    centroid = problem.points.mean(axis=0)
    idx = (np.arange(n_sources) * problem.n_samples) // n_sources
    return centroid + factor * (problem.points[idx] - centroid)


@dataclass(frozen=True)
class TrefftzSolution:
    """Solution coefficients with boundary diagnostics and interior evaluator."""

    coefficients: np.ndarray
    basis: object
    method: str
    boundary_residual_sup: float
    condition_number: float

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return self.basis.eval(np.atleast_2d(pts)) @ self.coefficients


def _boundary_rows(problem: BoundaryProblem, basis) -> np.ndarray:
    """Apply the per-sample boundary operator to every basis function."""
    vals = basis.eval(problem.points)
    derivs = basis.normal_deriv(problem.points, problem.normals)
    rows = np.where(problem.bc_kind[:, None] == DIRICHLET, vals, derivs)
    robin = problem.bc_kind == ROBIN
    if robin.any():
        rows[robin] = (problem.robin_alpha[robin, None] * vals[robin]
                       + problem.robin_beta[robin, None] * derivs[robin])
    return rows


def solve_trefftz(problem: BoundaryProblem, method: str = "collocation",
                  basis=None, n_max: int = 8,
                  allow_regularize: bool = False) -> TrefftzSolution:
    """Fit the harmonic trial space to the boundary data.

    ``collocation`` picks as many evenly spaced boundary samples as there
    are coefficients and zeroes the residual there exactly (requires at
    least that many samples); ``least_squares`` minimizes the residual over
    all samples via SVD; ``galerkin_boundary`` projects onto the basis
    traces with trapezoid quadrature at 8x sample density (when the problem
    can be densified).  A rank-deficient system raises
    :class:`RankDeficientError` unless ``allow_regularize`` is set, in which
    case the SVD pseudo-inverse answer is returned.
    """
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}")
    if basis is None:
        basis = TCompleteBasis(n_max)
    if isinstance(basis, FundamentalBasis):
        basis.validate(problem)
    n = basis.size
    if problem.n_samples < n:
        raise ValueError(f"{problem.n_samples} boundary samples cannot fix {n} coefficients")

    if method == "collocation":
        idx = (np.arange(n) * problem.n_samples) // n
        sub = replace(problem,
                      points=problem.points[idx], normals=problem.normals[idx],
                      arc_weights=problem.arc_weights[idx], bc_kind=problem.bc_kind[idx],
                      data=problem.data[idx], robin_alpha=problem.robin_alpha[idx],
                      robin_beta=problem.robin_beta[idx], densify=None)
        A = _boundary_rows(sub, basis)
        cond = np.linalg.cond(A)
        if cond > 1e14 and not allow_regularize:
            raise RankDeficientError(f"collocation system effectively singular (cond {cond:.3e})")
        coeff = (np.linalg.solve(A, sub.data) if cond <= 1e14
                 else np.linalg.lstsq(A, sub.data, rcond=None)[0])
    else:
        quad = problem
        if method == "galerkin_boundary" and problem.densify is not None:
            quad = problem.densify(8)
        A = _boundary_rows(quad, basis)
        rhs = quad.data
        if method == "galerkin_boundary":
            sw = np.sqrt(quad.arc_weights)
            A = A * sw[:, None]
            rhs = rhs * sw
        coeff, _, rank, sv = scipy.linalg.lstsq(A, rhs)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        if rank < n and not allow_regularize:
            raise RankDeficientError(
                f"boundary system rank {rank} < {n} coefficients (cond {cond:.3e})"
            )

    if cond > 1e10:
        log.warning("trefftz %s system badly conditioned: cond = %.3e", method, cond)
    else:
        log.info("trefftz %s system condition number %.3e", method, cond)
    resid = _boundary_rows(problem, basis) @ coeff - problem.data
    return TrefftzSolution(
        coefficients=np.asarray(coeff), basis=basis, method=method,
        boundary_residual_sup=float(np.max(np.abs(resid))),
        condition_number=float(cond),
    )
