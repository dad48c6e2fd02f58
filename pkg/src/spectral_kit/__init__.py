"""Pseudo-spectral numerical methods with a reproducible experiment CLI.

Subpackages by topic: :mod:`orthopoly` (Chebyshev/Hermite bases),
:mod:`fourier` (periodic transforms, dealiasing, heat semigroup),
:mod:`interp` (barycentric interpolation, Lebesgue constants),
:mod:`bvp` (weighted-residual two-point solvers), :mod:`timestep`
(ODE marching schemes), :mod:`pde` (method-of-lines drivers and exact
reference solutions), :mod:`montecarlo` (Brownian path sampling and the
probabilistic heat-solution estimator), :mod:`trefftz` (boundary
collocation for the Laplace equation) and :mod:`cli` (experiment runner).
"""

__version__ = "0.1.0"

from . import bvp, cli, fourier, interp, montecarlo, orthopoly, pde, timestep, trefftz

__all__ = [
    "bvp",
    "cli",
    "fourier",
    "interp",
    "montecarlo",
    "orthopoly",
    "pde",
    "timestep",
    "trefftz",
    "__version__",
]
