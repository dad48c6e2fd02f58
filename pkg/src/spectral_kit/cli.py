"""Experiment runner producing deterministic CSV artifacts.

Every experiment is a named entry in a registry; running one writes CSV
files (17 significant digits, '.' decimal separator), a gnuplot-style plot
companion where a figure is the natural product, and a ``manifest.json``
listing the produced files with their SHA-256 content hashes.  Outputs are
byte-reproducible for a fixed (experiment, params, seed) triple.

Usage:
    spectral-kit list [--json]
    spectral-kit <experiment> [--key value]... --out DIR --seed S

Exit codes: 0 success, 2 bad arguments, 3 numerical failure.  The
``SPECTRAL_KIT_THREADS`` environment variable caps internal parallelism
(used by the parameter sweeps; results do not depend on the thread count).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import bvp, fourier, interp, montecarlo, orthopoly, pde, timestep, trefftz

__all__ = ["Experiment", "register", "registry", "run", "list_experiments", "main"]


# ---------------------------------------------------------------- plumbing


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_gnuplot(path: Path, csv_name: str, title: str, plots: list[str]) -> Path:
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        "set key outside",
        "plot " + ", \\\n     ".join(f"'{csv_name}' {p}" for p in plots),
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_config(path: Path, entries: dict) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, v in entries.items():
            fh.write(f"{k}={_fmt(v)}\n")
    return path


def thread_cap() -> int:
    env = os.environ.get("SPECTRAL_KIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    defaults: dict
    runner: Callable  # (params: dict, out: Path, seed: int) -> list[Path]


_REGISTRY: dict[str, Experiment] = {}


def register(exp: Experiment):
    if exp.name in _REGISTRY:
        raise ValueError(f"experiment {exp.name!r} already registered")
    _REGISTRY[exp.name] = exp
    return exp


def registry() -> dict[str, Experiment]:
    return dict(_REGISTRY)


def _experiment(name, description, **defaults):
    def deco(fn):
        register(Experiment(name, description, defaults, fn))
        return fn
    return deco


def _parse_int_list(s) -> list[int]:
    return [int(tok) for tok in str(s).split(",") if tok.strip()]


def _parse_float_list(s) -> list[float]:
    return [float(tok) for tok in str(s).split(",") if tok.strip()]


# ------------------------------------------------------------- experiments


@_experiment("runge-interp",
             "Runge-function interpolation on uniform vs Chebyshev nodes",
             N=16, Ns="4,8,12,16,20", grid=1001)
def _run_runge(params, out, seed):
    f = lambda x: 1.0 / (1.0 + 25.0 * x * x)
    xs = np.linspace(-1.0, 1.0, int(params["grid"]))
    N = int(params["N"])
    files = []
    uni = orthopoly.cheb_nodes(orthopoly.NodeFamily("uniform", N))
    che = orthopoly.cheb_nodes(orthopoly.NodeFamily("chebyshev_extrema", N))
    p_uni = interp.interpolate(uni, f(uni))
    p_che = interp.interpolate(che, f(che))
    rows = zip(xs, f(xs), p_uni(xs), p_che(xs),
               interp.lebesgue_function(uni, xs), interp.lebesgue_function(che, xs))
    files.append(write_csv(out / "runge-sweep.csv",
                           ["x", "f", "p_uniform", "p_chebyshev",
                            "lebesgue_uniform", "lebesgue_chebyshev"], rows))
    table = []
    for n in _parse_int_list(params["Ns"]):
        for fam in ("uniform", "chebyshev_extrema"):
            nodes = orthopoly.cheb_nodes(orthopoly.NodeFamily(fam, n))
            p = interp.interpolate(nodes, f(nodes))
            table.append((fam, n, float(np.max(np.abs(p(xs) - f(xs))))))
    files.append(write_csv(out / "runge-errors.csv", ["family", "N", "sup_error"], table))
    files.append(write_gnuplot(out / "runge-interp.gp", "runge-sweep.csv",
                               "Runge function interpolation",
                               ["using 1:2 with lines title 'f'",
                                "using 1:3 with lines title 'uniform nodes'",
                                "using 1:4 with lines title 'Chebyshev nodes'"]))
    return files


@_experiment("aliasing",
             "Mode indistinguishability on a closed grid and the aliasing split",
             N=11, modes=24)
def _run_aliasing(params, out, seed):
    N = int(params["N"])
    xg = np.linspace(-np.pi, np.pi, N)
    files = [write_csv(out / "aliasing-grid.csv", ["x", "cos_x", "cos_9x"],
                       zip(xg, np.cos(xg), np.cos(9 * xg)))]
    rng = np.random.default_rng(seed)
    spectrum = {int(k): complex(rng.standard_normal(), rng.standard_normal())
                for k in range(-int(params["modes"]), int(params["modes"]) + 1)}
    split = fourier.aliasing_error(spectrum, 16)
    gap = split.interp_error_norm**2 - split.trunc_error_norm**2 - split.alias_norm**2
    files.append(write_csv(out / "aliasing-split.csv",
                           ["interp_error", "trunc_error", "alias_norm", "pythagoras_gap"],
                           [(split.interp_error_norm, split.trunc_error_norm,
                             split.alias_norm, gap)]))
    return files


@_experiment("bvp-compare",
             "Tau vs Galerkin vs collocation on the linear test BVP",
             N=4, grid=401)
def _run_bvp(params, out, seed):
    N = int(params["N"])
    xs = np.linspace(-1.0, 1.0, int(params["grid"]))
    sols = {m: bvp.solve_bvp(m, N) for m in bvp.METHODS}
    rows = zip(xs, bvp.exact_bvp_solution(xs),
               sols["tau"](xs), sols["galerkin"](xs), sols["collocation"](xs))
    files = [write_csv(out / "bvp-solutions.csv",
                       ["x", "u_exact", "u_tau", "u_galerkin", "u_collocation"], rows)]
    files.append(write_gnuplot(out / "bvp-compare.gp", "bvp-solutions.csv",
                               f"BVP solutions, N={N}",
                               ["using 1:2 with lines title 'exact'",
                                "using 1:3 with points title 'tau'",
                                "using 1:4 with points title 'galerkin'",
                                "using 1:5 with points title 'collocation'"]))
    return files


@_experiment("cheb-polys", "Chebyshev polynomials T_0..T_n sampled on [-1, 1]",
             n=5, grid=501)
def _run_chebpolys(params, out, seed):
    n = int(params["n"])
    xs = np.linspace(-1.0, 1.0, int(params["grid"]))
    polys = orthopoly.cheb_polys(n)
    header = ["x"] + [f"T{k}" for k in range(n + 1)]
    rows = ([x] + [p(x) for p in polys] for x in xs)
    files = [write_csv(out / "cheb-polys.csv", header, rows)]
    files.append(write_gnuplot(out / "cheb-polys.gp", "cheb-polys.csv",
                               "Chebyshev polynomials",
                               [f"using 1:{k + 2} with lines title 'T{k}'"
                                for k in range(n + 1)]))
    return files


@_experiment("heat-demo", "Periodic heat propagation of a sech^2 pulse",
             N=256, l=1.0, nu=0.01, T=5.0)
def _run_heat(params, out, seed):
    grid = fourier.PeriodicGrid(int(params["N"]), float(params["l"]))
    u0 = fourier.SpectralField.from_function(grid, lambda x: 1.0 / np.cosh(10.0 * x) ** 2)
    uT = fourier.heat_propagate(u0, float(params["nu"]), float(params["T"]))
    files = [write_csv(out / "heat-demo.csv", ["x", "u0", "uT"],
                       zip(grid.x, u0.values, uT.values))]
    files.append(write_config(out / "config.txt",
                              {"N": int(params["N"]), "l": float(params["l"]),
                               "nu": float(params["nu"]), "T": float(params["T"]),
                               "scheme": "exact-semigroup", "steps": 0,
                               "dealias": False, "preset": "sech2-pulse"}))
    files.append(write_gnuplot(out / "heat-demo.gp", "heat-demo.csv",
                               "Heat propagation",
                               ["using 1:2 with lines title 'u(x,0)'",
                                "using 1:3 with lines title 'u(x,T)'"]))
    return files


@_experiment("deriv-benchmark",
             "Spectral differentiation accuracy on a smooth periodic function",
             N=32)
def _run_deriv(params, out, seed):
    N = int(params["N"])
    grid = fourier.PeriodicGrid(N, 1.0)
    x = grid.x
    arg = np.pi * (x + 1.0)
    sar, car = np.sin(arg), np.cos(arg)
    esa = np.exp(sar)
    u = fourier.SpectralField.from_values(grid, sar * esa)
    exact = {
        1: np.pi * car * (1.0 + sar) * esa,
        2: np.pi**2 * (car**2 * (sar + 3.0) - 1.0 - sar) * esa,
        3: np.pi**3 * car * (car**2 * (sar + 6.0) - 4.0 - 7.0 * sar) * esa,
    }
    errs = []
    cols = {}
    for order in (1, 2, 3):
        num = fourier.spectral_derivative(u, order).values
        errs.append((order, float(np.max(np.abs(num - exact[order]))
                                  / np.max(np.abs(exact[order])))))
        cols[order] = num
    files = [write_csv(out / "deriv-errors.csv", ["order", "rel_sup_error"], errs)]
    rows = zip(x, u.values, cols[1], exact[1], cols[2], exact[2], cols[3], exact[3])
    files.append(write_csv(out / "deriv-profiles.csv",
                           ["x", "u", "d1_num", "d1_exact", "d2_num", "d2_exact",
                            "d3_num", "d3_exact"], rows))
    return files


@_experiment("soil-heat",
             "Exact non-periodic soil-temperature solution: space-time field and phase shift",
             nx=101, nt=121, t_max=9 * math.pi, depth=0.75, tol=1e-10)
def _run_soil(params, out, seed):
    sol = pde.ExactHeatSolution(tol=float(params["tol"]))
    xs = np.linspace(0.0, 1.0, int(params["nx"]))
    ts = np.linspace(0.0, float(params["t_max"]), int(params["nt"]))
    rows = []
    for t in ts:
        u = sol(xs, float(t))
        rows.extend((t, x, ui) for x, ui in zip(xs, u))
    files = [write_csv(out / "soil-heat-field.csv", ["t", "x", "u"], rows)]
    tp = np.linspace(6 * math.pi, 8 * math.pi, 481)
    depth = float(params["depth"])
    phase = [(t, sol(0.0, float(t)), sol(depth, float(t))) for t in tp]
    files.append(write_csv(out / "soil-heat-phase.csv",
                           ["t", "u_surface", "u_depth"], phase))
    files.append(write_config(out / "config.txt",
                              {"nx": int(params["nx"]), "nt": int(params["nt"]),
                               "t_max": float(params["t_max"]), "tol": float(params["tol"]),
                               "preset": "soil-temperature", "scheme": "exact-series",
                               "steps": 0, "dealias": False}))
    files.append(write_gnuplot(out / "soil-heat.gp", "soil-heat-phase.csv",
                               "Phase shift between surface and depth",
                               ["using 1:2 with lines title 'surface'",
                                "using 1:3 with lines title 'depth'"]))
    return files


@_experiment("brownian", "Sample Brownian paths and their batch statistics",
             M=100, N=1000, T=1.0, dump_paths=8)
def _run_brownian(params, out, seed):
    batch = montecarlo.brownian_batch(int(params["M"]), int(params["N"]),
                                      float(params["T"]), seed)
    W = batch.W
    times = (np.arange(batch.N) + 1) * batch.dt
    k = min(int(params["dump_paths"]), batch.M)
    header = ["t"] + [f"W{i}" for i in range(k)]
    files = [write_csv(out / "brownian-paths.csv", header,
                       (np.column_stack([times, W[:k].T])))]
    term = batch.terminal
    files.append(write_csv(out / "brownian-stats.csv",
                           ["M", "N", "T", "mean_WT", "var_WT"],
                           [(batch.M, batch.N, batch.T,
                             float(term.mean()), float(term.var(ddof=1)))]))
    files.append(write_gnuplot(out / "brownian.gp", "brownian-paths.csv",
                               "Brownian sample paths",
                               [f"using 1:{i + 2} with lines notitle" for i in range(k)]))
    return files


@_experiment("rk4-convergence", "RK4 error decay on the logistic equation",
             T=2.0,
             steps="100,150,200,250,350,500,750,900,1000,1250,1500,"
                   "2000,2500,3000,3500,4000,4500,5000,5500,6000")
def _run_rk4(params, out, seed):
    T = float(params["T"])
    problem = timestep.IvpProblem(rhs=lambda t, u: u * (1.0 - u), u0=2.0, t0=0.0, T=T)
    exact = 2.0 / (2.0 - math.exp(-T))
    pairs = timestep.convergence_study(timestep.rk4(), problem, exact,
                                       _parse_int_list(params["steps"]))
    rows = [(n, dt, err) for n, (dt, err) in zip(_parse_int_list(params["steps"]), pairs)]
    files = [write_csv(out / "rk4-convergence.csv", ["N", "dt", "error"], rows)]
    files.append(write_gnuplot(out / "rk4-convergence.gp", "rk4-convergence.csv",
                               "RK4 convergence on the logistic equation",
                               ["using 2:3 with linespoints title 'error'"]))
    return files


@_experiment("lebesgue-table", "Lebesgue constants for node families",
             Ns="4,8,10,16,20,32,40", families="chebyshev_extrema,uniform")
def _run_lebesgue(params, out, seed):
    jobs = [(fam, n)
            for fam in str(params["families"]).split(",")
            for n in _parse_int_list(params["Ns"])]

    def one(job):
        fam, n = job
        nodes = orthopoly.cheb_nodes(orthopoly.NodeFamily(fam, n))
        lam = interp.lebesgue_constant(nodes)
        if fam == "chebyshev_extrema":
            ref = 2.0 / math.pi * (math.log(n) + np.euler_gamma + math.log(8.0 / math.pi))
        elif fam == "uniform":
            ref = 2.0 ** (n + 1) / (math.e * n * math.log(n))
        else:
            ref = float("nan")
        return (fam, n, lam, ref)

    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        rows = list(pool.map(one, jobs))
    return [write_csv(out / "lebesgue-table.csv",
                      ["family", "N", "lebesgue_constant", "asymptotic"], rows)]


@_experiment("trefftz-disk", "Harmonic boundary fit on the unit disk",
             n_max=8, n_boundary=64, lattice=41)
def _run_trefftz(params, out, seed):
    harmonic = lambda p: p[:, 0] ** 2 - p[:, 1] ** 2 + p[:, 0]
    problem = trefftz.disk_problem(int(params["n_boundary"]), harmonic)
    sol = trefftz.solve_trefftz(problem, "least_squares", n_max=int(params["n_max"]))
    m = int(params["lattice"])
    g = np.linspace(-1.0, 1.0, m)
    X, Y = np.meshgrid(g, g)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    inside = np.sum(pts**2, axis=1) < 1.0
    vals = np.full(len(pts), np.nan)
    vals[inside] = sol(pts[inside])
    rows = [(p[0], p[1], v, harmonic(p[None, :])[0] if i else v)
            for p, v, i in zip(pts, vals, inside)]
    files = [write_csv(out / "trefftz-field.csv", ["x", "y", "u", "u_exact"], rows)]
    files.append(write_csv(out / "trefftz-summary.csv",
                           ["method", "n_coeffs", "boundary_residual_sup", "condition"],
                           [(sol.method, len(sol.coefficients),
                             sol.boundary_residual_sup, sol.condition_number)]))
    return files


@_experiment("feynman-kac-probe",
             "Path-sampling heat solution vs the spectral propagator at probe points",
             M=100000, nu=0.01, T=5.0, N_grid=256, steps=1,
             probes="-0.5,-0.25,0.0,0.25,0.5")
def _run_fk(params, out, seed):
    nu, T = float(params["nu"]), float(params["T"])
    grid = fourier.PeriodicGrid(int(params["N_grid"]), 1.0)
    u0_fn = lambda x: 1.0 / np.cosh(10.0 * _wrap(x, grid.l)) ** 2
    field = fourier.heat_propagate(
        fourier.SpectralField.from_function(grid, u0_fn), nu, T)
    rows = []
    for i, px in enumerate(_parse_float_list(params["probes"])):
        j = int(np.argmin(np.abs(grid.x - px)))  # snap probe to the grid
        x_probe = float(grid.x[j])
        prob = montecarlo.SdeProblem.pure_brownian(u0_fn, x0=x_probe,
                                                   sigma=math.sqrt(2.0 * nu))
        est = montecarlo.feynman_kac(prob, T, int(params["M"]), int(params["steps"]),
                                     seed + i)
        rows.append((x_probe, est["estimate"], est["std_error"],
                     float(field.values[j]), est["M"]))
    return [write_csv(out / "feynman-kac-probe.csv",
                      ["probe_x", "estimate", "std_error", "spectral_reference", "M"],
                      rows)]


def _wrap(x, l):
    return (x + l) % (2.0 * l) - l


# ------------------------------------------------------------------ driver


def list_experiments() -> list[tuple[str, str]]:
    return [(e.name, e.description) for e in _REGISTRY.values()]


def run(name: str, params: dict, out_dir, seed: int) -> dict:
    """Run one experiment; returns the manifest dictionary."""
    exp = _REGISTRY[name]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    merged = dict(exp.defaults)
    merged.update(params)
    files = exp.runner(merged, out, seed)
    manifest = {
        "experiment": name,
        "seed": seed,
        "params": {k: _fmt(v) for k, v in sorted(merged.items())},
        "files": {
            f.name: "sha256:" + hashlib.sha256(f.read_bytes()).hexdigest()
            for f in sorted(files, key=lambda p: p.name)
        },
    }
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        print("usage: spectral-kit <experiment> [--key value]... --out DIR --seed S",
              file=sys.stderr)
        print("       spectral-kit list [--json]", file=sys.stderr)
        return 2

    name = argv[0]
    if name in ("list", "--list"):
        as_json = "--json" in argv[1:]
        if as_json:
            print(json.dumps({e.name: e.description for e in _REGISTRY.values()},
                             indent=2, sort_keys=True))
        else:
            for n, d in list_experiments():
                print(f"{n:20s} {d}")
        return 0

    if name not in _REGISTRY:
        print(f"unknown experiment {name!r}; valid names:", file=sys.stderr)
        for n, _ in list_experiments():
            print(f"  {n}", file=sys.stderr)
        return 2

    parser = argparse.ArgumentParser(prog=f"spectral-kit {name}", add_help=True)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="seed for any randomness")
    known, rest = parser.parse_known_args(argv[1:])

    exp = _REGISTRY[name]
    params = {}
    i = 0
    while i < len(rest):
        tok = rest[i]
        if not tok.startswith("--") or i + 1 >= len(rest):
            print(f"bad argument {tok!r}; expected --key value pairs", file=sys.stderr)
            return 2
        key = tok[2:]
        if key not in exp.defaults:
            print(f"unknown parameter {key!r} for {name}; valid: "
                  f"{', '.join(sorted(exp.defaults))}", file=sys.stderr)
            return 2
        params[key] = rest[i + 1]
        i += 2

    try:
        manifest = run(name, params, known.out, known.seed)
    except Exception as exc:  # numerical failures propagate with context
        print(f"experiment {name} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
