"""Periodic pseudo-spectral engine: grids, transforms, derivatives, dealiasing.

The discrete transform convention is the plain FFT pair: the forward
transform is unnormalized and the inverse carries the 1/N factor, so
coefficient dumps are directly comparable with textbook listings.  A real
field of amplitude one in mode k therefore shows up as a coefficient of
magnitude N/2 at +-k.

Wavenumber layout on a grid of half-length l with N points (N even):

    k = [0, 1, ..., N/2, 1 - N/2, ..., -1] * (pi / l)

i.e. the FFT order with the shared Nyquist slot assigned the positive
frequency +N/2.  Because (ik)^n is sign-ambiguous at that slot for odd n,
odd-order spectral derivatives zero the Nyquist mode; even orders keep it.

Dealiased products follow the classical 3/2 zero-padding rule (Orszag; see
also Trefethen, "Spectral Methods in MATLAB", 2000).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PeriodicGrid",
    "SpectralField",
    "dft_forward",
    "dft_inverse",
    "derivative_multiplier",
    "spectral_derivative",
    "dealias_product",
    "naive_product",
    "AliasingSplit",
    "aliasing_error",
    "heat_propagate",
]

#: max tolerated imaginary residue when synthesizing a real field
IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic grid on [-l, l) with its wavenumber bookkeeping."""

    N: int
    l: float = 1.0

    def __post_init__(self):
        if self.N < 4 or self.N % 2 != 0:
            raise ValueError("grid size N must be even and >= 4")
        if self.l <= 0:
            raise ValueError("half-length l must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.l / self.N

    @property
    def x(self) -> np.ndarray:
        """Nodes (1 - N/2 .. N/2) * dx, the rightmost node being +l."""
        return np.arange(1 - self.N // 2, self.N // 2 + 1) * self.dx

    @property
    def k(self) -> np.ndarray:
        """Wavenumbers [0 .. N/2, 1-N/2 .. -1] * (pi/l)."""
        n = self.N
        idx = np.concatenate([np.arange(0, n // 2 + 1), np.arange(1 - n // 2, 0)])
        return idx * (np.pi / self.l)

    @property
    def k_index(self) -> np.ndarray:
        """Integer mode numbers in the same layout as ``k``."""
        n = self.N
        return np.concatenate([np.arange(0, n // 2 + 1), np.arange(1 - n // 2, 0)])


class SpectralField:
    """A real field on a periodic grid, as samples and/or FFT coefficients.

    At least one representation is always present; the other is synthesized
    lazily and cached.  Synthesizing values checks that the imaginary residue
    of the inverse transform stays below ``IMAG_RESIDUE_TOL`` (relative to
    the field scale) before discarding it.
    """

    def __init__(self, grid: PeriodicGrid, values=None, coeffs=None):
        if values is None and coeffs is None:
            raise ValueError("need values and/or coeffs")
        self.grid = grid
        if values is not None:
            values = np.asarray(values, dtype=float)
            if values.shape != (grid.N,):
                raise ValueError(f"values shape {values.shape} does not match grid N={grid.N}")
        if coeffs is not None:
            coeffs = np.asarray(coeffs, dtype=complex)
            if coeffs.shape != (grid.N,):
                raise ValueError(f"coeffs shape {coeffs.shape} does not match grid N={grid.N}")
        self._values = values
        self._coeffs = coeffs

    @classmethod
    def from_values(cls, grid: PeriodicGrid, values) -> "SpectralField":
        return cls(grid, values=values)

    @classmethod
    def from_coeffs(cls, grid: PeriodicGrid, coeffs) -> "SpectralField":
        return cls(grid, coeffs=coeffs)

    @classmethod
    def from_function(cls, grid: PeriodicGrid, fn) -> "SpectralField":
        return cls(grid, values=fn(grid.x))

    @property
    def has_values(self) -> bool:
        return self._values is not None

    @property
    def has_coeffs(self) -> bool:
        return self._coeffs is not None

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            z = np.fft.ifft(self._coeffs)
            scale = max(np.max(np.abs(z)), 1.0)
            resid = np.max(np.abs(z.imag)) / scale
            if resid > IMAG_RESIDUE_TOL:
                raise ValueError(f"imaginary residue {resid:.3e} exceeds {IMAG_RESIDUE_TOL:.1e}")
            self._values = z.real
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = np.fft.fft(self._values)
        return self._coeffs


def dft_forward(field: SpectralField) -> SpectralField:
    """Field with its (unnormalized) forward-transform coefficients materialized."""
    return SpectralField(field.grid, values=field._values, coeffs=field.coeffs)


def dft_inverse(field: SpectralField) -> SpectralField:
    """Field with its physical samples materialized (inverse carries 1/N)."""
    return SpectralField(field.grid, values=field.values, coeffs=field._coeffs)


def derivative_multiplier(grid: PeriodicGrid, order: int) -> np.ndarray:
    """The (ik)^order multiplier, Nyquist slot zeroed for odd orders."""
    if order < 1:
        raise ValueError("order must be >= 1")
    mult = (1j * grid.k) ** order
    if order % 2 == 1:
        mult[grid.N // 2] = 0.0
    return mult


def spectral_derivative(field: SpectralField, order: int = 1) -> SpectralField:
    """Differentiate by multiplying coefficients with (ik)^order.

    For odd orders the Nyquist mode is zeroed; on real input this matches
    taking the real part of the inverse transform, since the stray Nyquist
    contribution is purely imaginary there.
    """
    mult = derivative_multiplier(field.grid, order)
    return SpectralField.from_coeffs(field.grid, mult * field.coeffs)


def naive_product(u_coeffs, v_coeffs) -> np.ndarray:
    """Coefficients of the pointwise product on the original grid (aliased)."""
    u_coeffs = np.asarray(u_coeffs, dtype=complex)
    v_coeffs = np.asarray(v_coeffs, dtype=complex)
    if u_coeffs.shape != v_coeffs.shape:
        raise ValueError("coefficient vectors must have equal length")
    return np.fft.fft(np.fft.ifft(u_coeffs) * np.fft.ifft(v_coeffs))


def dealias_product(u_coeffs, v_coeffs) -> np.ndarray:
    """Dealiased product coefficients by the 3/2 zero-padding rule.

    Both inputs are length-N coefficient vectors in FFT order.  The vectors
    are split after the first N/2 entries, padded with M - N zeros in the
    middle (M = 3N/2), multiplied pointwise on the fine grid, transformed
    back, and the N surviving coefficients are extracted with the 3/2
    normalization that compensates the grid-size change.  For inputs
    band-limited to |k| <= N/4 the result equals the exact convolution.
    """
    u_coeffs = np.asarray(u_coeffs, dtype=complex)
    v_coeffs = np.asarray(v_coeffs, dtype=complex)
    if u_coeffs.shape != v_coeffs.shape:
        raise ValueError("coefficient vectors must have equal length")
    N = u_coeffs.shape[0]
    if N % 2 != 0:
        raise ValueError("3/2-rule padding needs even N")
    M = 3 * N // 2
    zeros = np.zeros(M - N, dtype=complex)
    u_pad = np.concatenate([u_coeffs[: N // 2], zeros, u_coeffs[N // 2 :]])
    v_pad = np.concatenate([v_coeffs[: N // 2], zeros, v_coeffs[N // 2 :]])
    w_pad = np.fft.fft(np.fft.ifft(u_pad) * np.fft.ifft(v_pad))
    return 1.5 * np.concatenate([w_pad[: N // 2], w_pad[M - N // 2 :]])


@dataclass(frozen=True)
class AliasingSplit:
    """Interpolation/truncation decomposition of a finite spectrum on N points.

    Norms are l2 norms of coefficient vectors; by Parseval they differ from
    the L2 function norms only by a common factor, so the Pythagorean
    identity  interp_error^2 = trunc_error^2 + alias_norm^2  is unaffected.
    """

    interp_coeffs: dict
    trunc_coeffs: dict
    alias_norm: float
    trunc_error_norm: float
    interp_error_norm: float


def aliasing_error(full_spectrum: dict, N: int) -> AliasingSplit:
    """Fold a finite exact spectrum onto an N-point grid.

    ``full_spectrum`` maps integer mode number to coefficient.  Every mode
    k + jN is indistinguishable from k on the grid, so the interpolation
    coefficient of a resolved mode k is sum_j v_{k+jN}; the truncation
    coefficient is plainly v_k.  Works for even and odd N; the resolved band
    is -floor((N-1)/2) .. floor(N/2).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    band_lo = -((N - 1) // 2)
    band_hi = N // 2
    modes = list(full_spectrum.keys())
    interp = {}
    trunc = {}
    for k in range(band_lo, band_hi + 1):
        folded = sum(full_spectrum[m] for m in modes if (m - k) % N == 0)
        interp[k] = folded
        trunc[k] = full_spectrum.get(k, 0.0)
    alias_sq = sum(abs(interp[k] - trunc[k]) ** 2 for k in interp)
    trunc_err_sq = sum(
        abs(v) ** 2 for m, v in full_spectrum.items() if not band_lo <= m <= band_hi
    )
    return AliasingSplit(
        interp_coeffs=interp,
        trunc_coeffs=trunc,
        alias_norm=float(np.sqrt(alias_sq)),
        trunc_error_norm=float(np.sqrt(trunc_err_sq)),
        interp_error_norm=float(np.sqrt(alias_sq + trunc_err_sq)),
    )


def heat_propagate(field: SpectralField, nu: float, T: float) -> SpectralField:
    """Exact heat semigroup: multiply each coefficient by exp(-nu k^2 T).

    Mode zero is untouched (mass conservation) and every coefficient decays
    monotonically in T, which makes this the natural oracle for time-stepped
    diffusion runs.
    """
    if nu < 0 or T < 0:
        raise ValueError("nu and T must be >= 0")
    decay = np.exp(-nu * field.grid.k**2 * T)
    # nu T = 0: the semigroup is the identity; keep cached samples bit-exact
    values = field._values if field._values is not None and np.all(decay == 1.0) else None
    return SpectralField(field.grid, values=values, coeffs=decay * field.coeffs)
