"""Method-of-lines drivers, the coupled transport RHS, and the exact solution."""

import numpy as np
import pytest

from spectral_kit.fourier import PeriodicGrid, SpectralField, heat_propagate
from spectral_kit.pde import (
    ExactHeatSolution,
    HeatMoistureParams,
    MolSystem,
    exact_nonperiodic_heat,
    heat_moisture_rhs,
    heat_moisture_system,
    mol_integrate,
)
from spectral_kit.timestep import BlowUpError, rk4


def test_zero_rhs_keeps_state():
    grid = PeriodicGrid(32, 1.0)
    u0 = SpectralField.from_function(grid, lambda x: np.sin(np.pi * x))
    sys_ = MolSystem(grid, u0.coeffs, lambda t, c: np.zeros_like(c))
    cT = mol_integrate(sys_, rk4(), 5.0, 10)
    assert np.max(np.abs(cT - u0.coeffs)) < 1e-14


def test_linear_heat_matches_exact_propagator():
    """RK4 time marching of the diagonal heat system against the semigroup.

    10000 steps keep the stiffest mode inside the RK4 stability interval
    (nu k_max^2 dt ~ 0.8 < 2.79); fewer steps would violate the stable-dt
    precondition and diverge.
    """
    grid = PeriodicGrid(256, 1.0)
    nu, T = 0.01, 5.0
    u0 = SpectralField.from_function(grid, lambda x: 1.0 / np.cosh(10.0 * x) ** 2)
    sys_ = MolSystem(grid, u0.coeffs, lambda t, c: -nu * grid.k**2 * c)
    cT = mol_integrate(sys_, rk4(), T, 10000)
    ref = heat_propagate(u0, nu, T)
    assert np.max(np.abs(np.fft.ifft(cT).real - ref.values)) < 1e-8


def test_commuting_diagram_spectral_vs_physical_marching():
    """Advancing coefficients then synthesizing equals marching the samples."""
    grid = PeriodicGrid(64, 1.0)
    nu, T, steps = 0.02, 1.0, 2000
    u0 = SpectralField.from_function(grid, lambda x: np.exp(np.sin(np.pi * x)))
    sys_ = MolSystem(grid, u0.coeffs, lambda t, c: -nu * grid.k**2 * c)
    spectral_vals = np.fft.ifft(mol_integrate(sys_, rk4(), T, steps)).real

    from spectral_kit.timestep import IvpProblem, integrate

    def physical_rhs(t, v):
        return nu * np.fft.ifft(-grid.k**2 * np.fft.fft(v)).real

    phys = integrate(rk4(), IvpProblem(rhs=physical_rhs, u0=u0.values, T=T), steps)
    assert np.max(np.abs(spectral_vals - phys)) < 1e-10


def test_mol_divergence_reports_step_index():
    grid = PeriodicGrid(256, 1.0)
    u0 = SpectralField.from_function(grid, lambda x: 1.0 / np.cosh(10.0 * x) ** 2)
    sys_ = MolSystem(grid, u0.coeffs, lambda t, c: -0.01 * grid.k**2 * c)
    with pytest.raises(BlowUpError) as info:
        mol_integrate(sys_, rk4(), 5.0, 2000)  # unstable dt on purpose
    assert info.value.step_index >= 1


def test_reality_preserved_under_nonlinear_marching():
    grid = PeriodicGrid(64, 1.0)
    rng = np.random.default_rng(5)
    prof = np.zeros(grid.N)
    for k in range(1, 6):
        prof += rng.standard_normal() * np.cos(np.pi * k * grid.x / grid.l)
    theta0 = SpectralField.from_values(grid, 2.0 + 0.1 * prof / np.max(np.abs(prof)))
    T0 = SpectralField.from_values(grid, 1.0 + 0.05 * np.cos(np.pi * grid.x))
    params = HeatMoistureParams(
        D_theta=lambda th, T: 0.1 * (1.0 + th**2),
        lam=lambda th, T: 0.2 + 0.0 * th,
        V_theta=lambda th, T: 0.05 + 0.0 * th,
        latent=lambda T: 0.1 * T,
    )
    sys_ = heat_moisture_system(grid, theta0, T0, params)
    cT = mol_integrate(sys_, rk4(), 0.01, 20)
    vals = np.fft.ifft(cT, axis=1)
    assert np.max(np.abs(vals.imag)) < 1e-10


def test_constant_coefficient_reduction_is_diagonal():
    """With constant coefficients and zero latent heat the coupled system is
    two decoupled heat equations: the rhs acts as -D k^2 per mode."""
    grid = PeriodicGrid(64, 1.0)
    d_theta, lam, rho = 0.3, 0.7, 2.0
    params = HeatMoistureParams(
        D_theta=lambda th, T: d_theta + 0.0 * th,
        lam=lambda th, T: lam + 0.0 * th,
        rho_cm=rho,
        dealias=False,
    )
    theta0 = SpectralField.from_function(grid, lambda x: np.cos(3 * np.pi * x) + 0.5)
    T0 = SpectralField.from_function(grid, lambda x: np.sin(2 * np.pi * x))
    state = np.stack([theta0.coeffs, T0.coeffs])
    d = heat_moisture_rhs(state, params, grid)
    expected_theta = -d_theta * grid.k**2 * theta0.coeffs
    expected_T = -(lam / rho) * grid.k**2 * T0.coeffs
    assert np.max(np.abs(d[0] - expected_theta)) / np.max(np.abs(expected_theta)) < 1e-12
    assert np.max(np.abs(d[1] - expected_T)) / np.max(np.abs(expected_T)) < 1e-12


def test_single_mode_constant_coefficients_per_mode():
    grid = PeriodicGrid(32, 1.0)
    params = HeatMoistureParams(D_theta=lambda th, T: 0.25 + 0.0 * th, dealias=False)
    theta0 = SpectralField.from_function(grid, lambda x: np.cos(np.pi * x))
    T0 = SpectralField.from_values(grid, np.zeros(32))
    d = heat_moisture_rhs(np.stack([theta0.coeffs, T0.coeffs]), params, grid)
    expected = -0.25 * np.pi**2 * theta0.coeffs
    assert np.max(np.abs(d[0] - expected)) / np.max(np.abs(expected)) < 1e-12


def test_nonlinear_rhs_against_fine_finite_difference_oracle():
    """D_theta = theta makes the moisture flux theta theta_x; a 4096-point
    fourth-order finite-difference evaluation is the independent reference."""
    grid = PeriodicGrid(256, 1.0)
    theta_fn = lambda x: 2.0 + 0.3 * np.sin(np.pi * x) + 0.1 * np.cos(2 * np.pi * x)
    T_fn = lambda x: 1.0 + 0.2 * np.cos(np.pi * x)
    params = HeatMoistureParams(
        D_theta=lambda th, T: th,
        D_T=lambda th, T: 0.1 + 0.0 * th,
        lam=lambda th, T: 0.5 + 0.1 * th,
        V_theta=lambda th, T: 0.2 + 0.0 * th,
        V_T=lambda th, T: 0.3 + 0.0 * th,
        latent=lambda T: 0.4 * T,
        rho_cm=1.7,
    )
    theta0 = SpectralField.from_function(grid, theta_fn)
    T0 = SpectralField.from_function(grid, T_fn)
    d = heat_moisture_rhs(np.stack([theta0.coeffs, T0.coeffs]), params, grid)
    d_theta_vals = np.fft.ifft(d[0]).real
    d_T_vals = np.fft.ifft(d[1]).real

    M = 4096
    fine = PeriodicGrid(M, 1.0)
    xf = fine.x
    h = fine.dx

    def ddx(f):
        return (8 * (np.roll(f, -1) - np.roll(f, 1)) - (np.roll(f, -2) - np.roll(f, 2))) / (12 * h)

    th, Tv = theta_fn(xf), T_fn(xf)
    flux_m = th * ddx(th) + 0.1 * ddx(Tv)
    ref_theta = ddx(flux_m)
    q_like = (0.5 + 0.1 * th) * ddx(Tv)
    jv = -0.2 * ddx(th) - 0.3 * ddx(Tv)
    ref_T = (ddx(q_like) - 0.4 * Tv * ddx(jv)) / 1.7

    stride = M // grid.N
    scale_t = np.max(np.abs(ref_theta))
    scale_T = np.max(np.abs(ref_T))
    assert np.max(np.abs(d_theta_vals - ref_theta[::stride])) / scale_t < 1e-6
    assert np.max(np.abs(d_T_vals - ref_T[::stride])) / scale_T < 1e-6


def test_moisture_mass_is_conserved_exactly():
    grid = PeriodicGrid(64, 1.0)
    params = HeatMoistureParams(D_theta=lambda th, T: 1.0 + th**2)
    theta0 = SpectralField.from_function(grid, lambda x: 1.0 + 0.3 * np.sin(np.pi * x))
    T0 = SpectralField.from_function(grid, lambda x: 0.5 + 0.1 * np.cos(np.pi * x))
    d = heat_moisture_rhs(np.stack([theta0.coeffs, T0.coeffs]), params, grid)
    assert d[0][0] == 0.0  # ik vanishes identically at k = 0


def test_dealias_toggle_is_inert_for_bandlimited_states():
    grid = PeriodicGrid(64, 1.0)
    theta0 = SpectralField.from_function(
        grid, lambda x: 1.5 + 0.2 * np.cos(np.pi * x) + 0.1 * np.sin(3 * np.pi * x))
    T0 = SpectralField.from_function(grid, lambda x: 1.0 + 0.1 * np.cos(2 * np.pi * x))
    state = np.stack([theta0.coeffs, T0.coeffs])
    base = dict(D_theta=lambda th, T: 0.4 + 0.0 * th, lam=lambda th, T: 0.3 + 0.0 * th,
                V_T=lambda th, T: 0.2 + 0.0 * th, latent=lambda T: 0.0 * T)
    d_on = heat_moisture_rhs(state, HeatMoistureParams(**base, dealias=True), grid)
    d_off = heat_moisture_rhs(state, HeatMoistureParams(**base, dealias=False), grid)
    assert np.max(np.abs(d_on - d_off)) / np.max(np.abs(d_on)) < 1e-10


def test_nonfinite_coefficient_evaluation_reported():
    grid = PeriodicGrid(32, 1.0)
    params = HeatMoistureParams(D_theta=lambda th, T: np.sqrt(th - 10.0))  # NaN territory
    theta0 = SpectralField.from_values(grid, np.ones(32))
    T0 = SpectralField.from_values(grid, np.ones(32))
    with pytest.raises(FloatingPointError):
        heat_moisture_rhs(np.stack([theta0.coeffs, T0.coeffs]), params, grid)


# ------------------------------------------------ exact non-periodic solution


def test_surface_trace_is_sine():
    sol = ExactHeatSolution()
    for t in (0.1, 0.7, 1.3, 4.0, 11.0):
        assert abs(sol(0.0, t) - np.sin(t)) < 1e-10


def test_insulated_bottom_by_finite_differences():
    sol = ExactHeatSolution()
    h = 1e-6
    for t in (0.5, 2.0, 7.0):
        # second-order one-sided stencil at x = 1
        ux = (3 * sol(1.0, t) - 4 * sol(1.0 - h, t) + sol(1.0 - 2 * h, t)) / (2 * h)
        assert abs(ux) < 1e-8


def test_initial_condition_vanishes_within_term_budget():
    sol = ExactHeatSolution()
    xs = np.linspace(0.0, 1.0, 801)
    assert np.max(np.abs(sol(xs, 0.0))) < 1e-6


def test_pde_residual_by_finite_differences():
    """u_t = D u_xx with the solution's own diffusivity D = 2/(9 pi^2)."""
    sol = ExactHeatSolution()
    D = ExactHeatSolution.diffusivity
    ht = hx = 1e-4
    for (x0, t0) in ((0.3, 0.5), (0.5, 1.0), (0.7, 2.0), (0.25, 0.1), (0.9, 6.0)):
        ut = (sol(x0, t0 + ht) - sol(x0, t0 - ht)) / (2 * ht)
        uxx = (sol(x0 + hx, t0) - 2 * sol(x0, t0) + sol(x0 - hx, t0)) / hx**2
        assert abs(ut - D * uxx) < 1e-6


def test_transient_series_decays_uniformly_in_time():
    sol = ExactHeatSolution()
    xs = np.linspace(0.0, 1.0, 257)
    norms = [np.max(np.abs(sol.series_part(xs, t))) for t in (1.0, 5.0, 10.0, 20.0)]
    assert all(a > b for a, b in zip(norms, norms[1:]))
    assert norms[-1] < 1e-9


def test_phase_shift_at_depth():
    """The oscillation at depth 3/4 peaks later than the surface signal."""
    sol = ExactHeatSolution()
    ts = np.linspace(6 * np.pi, 8 * np.pi, 4001)
    surface = np.array([sol(0.0, t) for t in ts])
    depth = np.array([sol(0.75, t) for t in ts])
    t_surf = ts[np.argmax(surface)]
    t_deep = ts[np.argmax(depth)]
    assert t_deep > t_surf
    assert t_deep - t_surf < 2 * np.pi  # within one period


def test_series_terms_decay_geometrically_for_positive_time():
    t = 0.5
    n = np.arange(1, 40)
    u = 2 * n - 1
    terms = u * np.exp(-u**2 * t / 18.0) / (u**4 + 324.0)
    ratios = terms[10:] / terms[9:-1]
    assert np.all(ratios < 1.0)


def test_tolerance_unreachable_raises():
    sol = ExactHeatSolution(tol=1e-30, max_terms=1000)
    with pytest.raises(ValueError, match="unreachable"):
        sol(0.5, 1e-8)


def test_domain_guard_and_wrapper():
    sol = ExactHeatSolution()
    with pytest.raises(ValueError):
        sol(1.5, 1.0)
    xs = np.array([0.0, 0.5, 1.0])
    assert exact_nonperiodic_heat(xs, 2.0) == pytest.approx(sol(xs, 2.0))
