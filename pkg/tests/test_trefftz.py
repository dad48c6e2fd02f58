"""Boundary collocation for the Laplace equation: bases, methods, diagnostics."""

import logging

import numpy as np
import pytest

from spectral_kit.trefftz import (
    DIRICHLET,
    NEUMANN,
    ROBIN,
    BoundaryProblem,
    FundamentalBasis,
    TCompleteBasis,
    dilated_sources,
    disk_problem,
    fundamental_basis,
    load_boundary_csv,
    parametric_problem,
    polygon_problem,
    rectangle_problem,
    solve_trefftz,
)


def interior_disk_points(n, radius=0.9, seed=0):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random(n))
    th = 2 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def test_disk_reproduces_basis_member():
    # boundary data cos(theta) is exactly the r cos(theta) basis function
    problem = disk_problem(64, lambda p: p[:, 0])
    sol = solve_trefftz(problem, "collocation", n_max=6)
    c = sol.coefficients
    assert c[1] == pytest.approx(1.0, abs=1e-10)
    others = np.delete(c, 1)
    assert np.max(np.abs(others)) < 1e-10


def test_disk_constant_data():
    problem = disk_problem(32, lambda p: np.ones(len(p)))
    sol = solve_trefftz(problem, "collocation", n_max=4)
    pts = interior_disk_points(50)
    assert np.max(np.abs(sol(pts) - 1.0)) < 1e-10


def test_square_manufactured_harmonic():
    # Dirichlet data from u = x^2 - y^2 on a square, 36 collocation points
    harmonic = lambda p: p[:, 0] ** 2 - p[:, 1] ** 2
    problem = rectangle_problem(9, harmonic)  # 36 boundary samples
    sol = solve_trefftz(problem, "collocation", n_max=8)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-0.95, 0.95, size=(100, 2))
    exact = pts[:, 0] ** 2 - pts[:, 1] ** 2
    assert np.max(np.abs(sol(pts) - exact)) < 1e-8
    assert sol.boundary_residual_sup < 1e-8


def test_all_methods_agree_on_smooth_data():
    harmonic = lambda p: p[:, 0] ** 2 - p[:, 1] ** 2 + 0.5 * p[:, 0]
    problem = disk_problem(96, harmonic)
    pts = interior_disk_points(64, seed=3)
    exact = pts[:, 0] ** 2 - pts[:, 1] ** 2 + 0.5 * pts[:, 0]
    for method in ("collocation", "least_squares", "galerkin_boundary"):
        sol = solve_trefftz(problem, method, n_max=8)
        assert np.max(np.abs(sol(pts) - exact)) < 1e-8, method


def test_collocation_zeroes_residual_at_chosen_points():
    # sample count equal to coefficient count: residual vanishes everywhere sampled
    basis_size = 2 * 5 + 1
    problem = disk_problem(basis_size, lambda p: np.exp(p[:, 0]) * np.cos(p[:, 1]))
    sol = solve_trefftz(problem, "collocation", n_max=5)
    assert sol.boundary_residual_sup < 1e-9


def test_harmonicity_of_solution_by_five_point_probe():
    problem = disk_problem(64, lambda p: np.exp(p[:, 0]) * np.cos(p[:, 1]))
    sol = solve_trefftz(problem, "least_squares", n_max=10)
    h = 1e-3
    scale = np.max(np.abs(sol(interior_disk_points(80, seed=5))))
    for p in interior_disk_points(20, radius=0.7, seed=6):
        x, y = p
        lap = (sol(np.array([[x + h, y], [x - h, y], [x, y + h], [x, y - h]])).sum()
               - 4 * sol(np.array([[x, y]]))[0]) / h**2
        assert abs(lap) < 1e-6 * max(scale, 1.0)


def test_maximum_principle_probe():
    data = lambda p: np.sin(2 * np.arctan2(p[:, 1], p[:, 0]))
    problem = disk_problem(128, data)
    sol = solve_trefftz(problem, "least_squares", n_max=10)
    lo, hi = problem.data.min(), problem.data.max()
    vals = sol(interior_disk_points(200, seed=7))
    assert np.all(vals >= lo - 1e-6)
    assert np.all(vals <= hi + 1e-6)


def test_mixed_dirichlet_neumann_segments():
    """Half-Dirichlet / half-Neumann disk against a manufactured harmonic."""
    exact = lambda p: p[:, 0] ** 2 - p[:, 1] ** 2
    # normal on the unit circle is the position vector; grad u = (2x, -2y)
    normal_data = lambda p: 2 * p[:, 0] ** 2 - 2 * p[:, 1] ** 2

    def bc_at(pts, ts):
        P = len(pts)
        kind = np.where(ts < 0.5, DIRICHLET, NEUMANN)
        data = np.where(ts < 0.5, exact(pts), normal_data(pts))
        return kind, np.zeros(P), np.zeros(P), data

    curve = lambda ts: np.stack([np.cos(2 * np.pi * ts), np.sin(2 * np.pi * ts)], axis=1)
    problem = parametric_problem(curve, curve, bc_at, 128)
    sol = solve_trefftz(problem, "least_squares", n_max=8)
    pts = interior_disk_points(100, seed=9)
    assert np.max(np.abs(sol(pts) - exact(pts))) < 1e-6


def test_robin_condition_roundtrip():
    # u = x on the disk: alpha u + beta du/dn = alpha x + beta x on the circle
    alpha, beta = 2.0, 0.5

    def bc_at(pts, ts):
        P = len(pts)
        data = (alpha + beta) * pts[:, 0]
        return np.full(P, ROBIN), np.full(P, alpha), np.full(P, beta), data

    curve = lambda ts: np.stack([np.cos(2 * np.pi * ts), np.sin(2 * np.pi * ts)], axis=1)
    problem = parametric_problem(curve, curve, bc_at, 64)
    sol = solve_trefftz(problem, "least_squares", n_max=6)
    pts = interior_disk_points(50, seed=11)
    assert np.max(np.abs(sol(pts) - pts[:, 0])) < 1e-8


def test_robin_zero_parameters_rejected():
    def bc_at(pts, ts):
        P = len(pts)
        return np.full(P, ROBIN), np.zeros(P), np.zeros(P), np.zeros(P)

    curve = lambda ts: np.stack([np.cos(2 * np.pi * ts), np.sin(2 * np.pi * ts)], axis=1)
    with pytest.raises(ValueError, match="Robin"):
        parametric_problem(curve, curve, bc_at, 16)


def test_fundamental_solutions_on_disk():
    problem = disk_problem(32, lambda p: p[:, 0])
    sources = dilated_sources(problem, 16, factor=2.0)
    sol = solve_trefftz(problem, "least_squares", basis=FundamentalBasis(sources))
    assert sol.boundary_residual_sup < 1e-6
    # compare against the harmonic-polynomial answer in the interior
    ref = solve_trefftz(problem, "collocation", n_max=6)
    pts = interior_disk_points(50, seed=13)
    assert np.max(np.abs(sol(pts) - ref(pts))) < 1e-5


def test_far_source_column_nearly_constant(caplog):
    problem = disk_problem(24, lambda p: p[:, 0])
    col = fundamental_basis(np.array([[1000.0, 0.0]]), problem.points)
    assert (col.max() - col.min()) / abs(col.mean()) < 1e-2
    far = np.column_stack([np.full(8, 1000.0) + np.arange(8), np.zeros(8)])
    with caplog.at_level(logging.WARNING):
        sol = solve_trefftz(problem, "least_squares", basis=FundamentalBasis(far),
                            allow_regularize=True)
    assert sol.condition_number > 1e10
    assert any("conditioned" in r.message for r in caplog.records)


def test_source_inside_or_on_boundary_rejected():
    problem = disk_problem(32, lambda p: p[:, 0])
    with pytest.raises(ValueError, match="inside or on"):
        solve_trefftz(problem, "least_squares",
                      basis=FundamentalBasis(np.array([[0.2, 0.1]])))
    with pytest.raises(ValueError, match="inside or on"):
        solve_trefftz(problem, "least_squares",
                      basis=FundamentalBasis(problem.points[:4]))


def test_insufficient_samples_rejected():
    problem = disk_problem(8, lambda p: p[:, 0])
    with pytest.raises(ValueError, match="cannot fix"):
        solve_trefftz(problem, "collocation", n_max=8)


def test_rank_deficiency_reported_not_hidden():
    # duplicated sources make exactly collinear columns
    problem = disk_problem(32, lambda p: p[:, 0])
    dup = np.array([[2.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
    from spectral_kit.trefftz import RankDeficientError

    with pytest.raises(RankDeficientError):
        solve_trefftz(problem, "least_squares", basis=FundamentalBasis(dup))
    sol = solve_trefftz(problem, "least_squares", basis=FundamentalBasis(dup),
                        allow_regularize=True)
    assert np.isfinite(sol.coefficients).all()


def test_polygon_problem_geometry():
    square = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
    problem = polygon_problem(square, [DIRICHLET] * 4, [0.0] * 4, samples_per_edge=4)
    assert problem.n_samples == 16
    # outward normals: every sample's normal points away from the centroid
    assert np.all(np.einsum("ij,ij->i", problem.points, problem.normals) > 0)
    assert problem.contains(np.array([[0.0, 0.0]]))[0]
    assert not problem.contains(np.array([[1.5, 0.0]]))[0]


def test_boundary_csv_loader(tmp_path):
    path = tmp_path / "domain.csv"
    path.write_text(
        "x,y,kind,value\n"
        "-1,-1,dirichlet,0.0\n"
        "1,-1,dirichlet,0.5\n"
        "1,1,neumann,0.0\n"
        "-1,1,robin,1.0,1.0,0.5\n"
    )
    problem = load_boundary_csv(path, samples_per_edge=6)
    assert problem.n_samples == 24
    assert set(np.unique(problem.bc_kind)) == {DIRICHLET, NEUMANN, ROBIN}


def test_t_complete_basis_shapes():
    basis = TCompleteBasis(3)
    assert basis.size == 7
    pts = np.array([[0.5, 0.2], [-0.1, 0.9]])
    assert basis.eval(pts).shape == (2, 7)
    normals = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert basis.normal_deriv(pts, normals).shape == (2, 7)
    # column 1 is x (= r cos theta), column 2 is y
    assert basis.eval(pts)[:, 1] == pytest.approx(pts[:, 0])
    assert basis.eval(pts)[:, 2] == pytest.approx(pts[:, 1])
