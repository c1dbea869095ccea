"""Spectral core: periodic grids, Fourier fields, symbol calculus.

Conventions (documented once, used everywhere):

* The forward transform maps physical samples to Fourier coefficients
  ``c_k`` with kernel ``e^{+i k.x}``, i.e. ``coeffs = ifft2(values)`` and
  ``values = fft2(coeffs)``.  A field ``f`` is represented as
  ``f(x) = sum_k c_k e^{-i k.x}`` on the grid, so the symbol of d/dx is
  ``-i a`` at wavenumber ``(a, e)``.
* Wavenumbers follow natural FFT ordering: integer modes
  ``m in {0, 1, ..., n/2-1, -n/2, ..., -1}`` scaled by ``2 pi / L``.
* Coefficients approximate box-normalized Fourier integrals:
  ``c_k ~ (1/(Lx Ly)) integral f e^{+i k.x} dx``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import GridMismatch, NonFiniteSymbol, BadCutoffs

_WORKERS = 1


def set_fft_threads(n):
    """Set the worker count used by all FFT calls (deterministic for any n)."""
    global _WORKERS
    _WORKERS = max(1, int(n))


def get_fft_threads():
    return _WORKERS


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid on [0, Lx) x [0, Ly).

    Arrays are indexed ``[ix, iy]`` (x along axis 0).  ``nx, ny`` must be
    even so the mode set is symmetric apart from the Nyquist line.
    """

    nx: int
    ny: int
    Lx: float
    Ly: float

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8 or self.nx % 2 or self.ny % 2:
            raise ValueError("grid sizes must be even and at least 8")
        if self.Lx <= 0 or self.Ly <= 0:
            raise ValueError("box lengths must be positive")

    @cached_property
    def x(self):
        return self.Lx / self.nx * np.arange(self.nx)

    @cached_property
    def y(self):
        return self.Ly / self.ny * np.arange(self.ny)

    @cached_property
    def kx(self):
        return 2.0 * np.pi * sfft.fftfreq(self.nx, d=self.Lx / self.nx)

    @cached_property
    def ky(self):
        return 2.0 * np.pi * sfft.fftfreq(self.ny, d=self.Ly / self.ny)

    @cached_property
    def kx_mesh(self):
        return np.broadcast_to(self.kx[:, None], (self.nx, self.ny))

    @cached_property
    def ky_mesh(self):
        return np.broadcast_to(self.ky[None, :], (self.nx, self.ny))

    @cached_property
    def k2_mesh(self):
        return self.kx_mesh**2 + self.ky_mesh**2

    @cached_property
    def ky_half(self):
        # rfft-style half spectrum along y: modes 0 .. ny/2
        return 2.0 * np.pi / self.Ly * np.arange(self.ny // 2 + 1)

    @cached_property
    def k2_half(self):
        return self.kx[:, None] ** 2 + self.ky_half[None, :] ** 2

    @cached_property
    def half_weights(self):
        """Multiplicity of half-spectrum columns in full-spectrum sums.

        Interior y-modes represent a conjugate pair; the 0 and Nyquist
        columns appear once.
        """
        w = np.full(self.ny // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return w

    @cached_property
    def dealias_keep(self):
        """Boolean mask keeping modes with |m| <= n//3 in each direction."""
        mx = np.abs(sfft.fftfreq(self.nx) * self.nx)
        my = np.abs(sfft.fftfreq(self.ny) * self.ny)
        return (mx[:, None] <= self.nx // 3) & (my[None, :] <= self.ny // 3)

    @cached_property
    def dealias_keep_half(self):
        mx = np.abs(sfft.fftfreq(self.nx) * self.nx)
        my = np.arange(self.ny // 2 + 1)
        return (mx[:, None] <= self.nx // 3) & (my[None, :] <= self.ny // 3)

    @property
    def cell_area(self):
        return (self.Lx / self.nx) * (self.Ly / self.ny)

    @property
    def box_area(self):
        return self.Lx * self.Ly

    def same_as(self, other):
        return (self.nx, self.ny, self.Lx, self.Ly) == (
            other.nx,
            other.ny,
            other.Lx,
            other.Ly,
        )


def _check_same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if not g.same_as(f.grid):
            raise GridMismatch("operands live on different grids")
    return g


@dataclass
class PhysicalField:
    """Real scalar field sampled on the grid points."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError("values shape does not match grid")


@dataclass
class SpectralField:
    """Scalar field stored as Fourier coefficients (natural FFT order)."""

    grid: Grid2D
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.grid.nx, self.grid.ny):
            raise ValueError("coeffs shape does not match grid")

    def copy(self):
        return SpectralField(self.grid, self.coeffs.copy())

    def is_hermitian(self, tol=1e-10):
        """Check conjugate symmetry c(-k) = conj(c(k)) (real physical field)."""
        c = self.coeffs
        rx = (-np.arange(self.grid.nx)) % self.grid.nx
        ry = (-np.arange(self.grid.ny)) % self.grid.ny
        scale = np.max(np.abs(c)) + 1e-300
        return np.max(np.abs(c[np.ix_(rx, ry)] - np.conj(c))) <= tol * scale


@dataclass
class StateSpectral:
    """Spectral state (u, v, b, B) of the velocity and magnetic perturbation."""

    grid: Grid2D
    uhat: np.ndarray
    vhat: np.ndarray
    bhat: np.ndarray
    Bhat: np.ndarray

    def fields(self):
        return (self.uhat, self.vhat, self.bhat, self.Bhat)

    def copy(self):
        return StateSpectral(
            self.grid,
            self.uhat.copy(),
            self.vhat.copy(),
            self.bhat.copy(),
            self.Bhat.copy(),
        )

    def field(self, name):
        return SpectralField(self.grid, getattr(self, name + "hat"))

    def max_divergence(self):
        """Largest divergence coefficient of either vector field."""
        g = self.grid
        du = np.abs(-1j * (g.kx_mesh * self.uhat + g.ky_mesh * self.vhat))
        db = np.abs(-1j * (g.kx_mesh * self.bhat + g.ky_mesh * self.Bhat))
        return max(np.max(du), np.max(db))


def forward_transform(field):
    """Physical samples -> Fourier coefficients (kernel e^{+i k.x})."""
    c = sfft.ifft2(field.values, workers=_WORKERS)
    return SpectralField(field.grid, c)


def inverse_transform(field):
    """Fourier coefficients -> physical samples (real part)."""
    v = sfft.fft2(field.coeffs, workers=_WORKERS)
    return PhysicalField(field.grid, np.ascontiguousarray(v.real))


def half_from_values(grid, values):
    """Real samples -> half-spectrum coefficients (y modes 0 .. ny/2)."""
    return np.conj(sfft.rfft2(values, workers=_WORKERS)) / (grid.nx * grid.ny)


def values_from_half(grid, half):
    """Half-spectrum coefficients -> real samples."""
    return sfft.irfft2(
        np.conj(half) * (grid.nx * grid.ny), s=(grid.nx, grid.ny), workers=_WORKERS
    )


def half_from_full(grid, coeffs):
    return np.ascontiguousarray(coeffs[:, : grid.ny // 2 + 1])


def full_from_half(grid, half):
    """Rebuild the full spectrum from the half spectrum by conjugate symmetry."""
    nx, ny = grid.nx, grid.ny
    full = np.empty((nx, ny), dtype=complex)
    full[:, : ny // 2 + 1] = half
    rx = (-np.arange(nx)) % nx
    # y modes ny//2+1 .. ny-1 mirror modes ny-1 .. 1 reversed
    full[:, ny // 2 + 1 :] = np.conj(half[np.ix_(rx, np.arange(ny // 2 - 1, 0, -1))])
    return full


def apply_symbol(field, symbol):
    """Multiply a spectral field by a Fourier symbol.

    ``symbol`` is either a callable ``(kx_mesh, ky_mesh) -> array`` or a
    precomputed array.  Non-finite symbol values are allowed only at the
    zero frequency, where the output coefficient is set to zero (mean-mode
    annihilation for singular symbols); anywhere else they raise
    :class:`NonFiniteSymbol`.
    """
    g = field.grid
    s = symbol(g.kx_mesh, g.ky_mesh) if callable(symbol) else symbol
    s = np.asarray(s, dtype=complex)
    bad = ~np.isfinite(s)
    if bad.any():
        nz = bad.copy()
        nz[0, 0] = False
        if nz.any():
            raise NonFiniteSymbol("symbol is not finite at a nonzero frequency")
        s = s.copy()
        s[0, 0] = 0.0
    return SpectralField(g, s * field.coeffs)


# Symbol factories.  Each returns a finite array; singular symbols put 0 at
# the zero mode (they annihilate the mean).


def sym_dx(kx, ky):
    return -1j * kx + 0.0 * ky


def sym_dy(kx, ky):
    return 0.0 * kx - 1j * ky


def sym_inv_laplacian(kx, ky):
    k2 = kx**2 + ky**2
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -1.0 / k2
    return np.where(k2 > 0, s, 0.0)


def sym_abs_grad(kx, ky):
    return np.sqrt(kx**2 + ky**2)


def sym_inv_abs_grad(kx, ky):
    k = np.sqrt(kx**2 + ky**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = 1.0 / k
    return np.where(k > 0, s, 0.0)


def sym_jap(kx, ky):
    """Japanese bracket <grad> = sqrt(1 + |k|^2)."""
    return np.sqrt(1.0 + kx**2 + ky**2)


def sym_riesz1(kx, ky):
    """R1 = d/dx (-Lap)^{-1/2}."""
    k = np.sqrt(kx**2 + ky**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -1j * kx / k
    return np.where(k > 0, s, 0.0)


def sym_riesz2(kx, ky):
    k = np.sqrt(kx**2 + ky**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -1j * ky / k
    return np.where(k > 0, s, 0.0)


def sym_riesz1_prime(kx, ky):
    """R1' = -d/dx (-Lap)^{-1}."""
    k2 = kx**2 + ky**2
    with np.errstate(divide="ignore", invalid="ignore"):
        s = 1j * kx / k2
    return np.where(k2 > 0, s, 0.0)


def sym_riesz2_prime(kx, ky):
    """R2' = d/dy (-Lap)^{-1}."""
    k2 = kx**2 + ky**2
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -1j * ky / k2
    return np.where(k2 > 0, s, 0.0)


def leray_project(u, v):
    """Project a spectral vector field onto divergence-free fields.

    Subtracts the gradient part: what remains satisfies
    ``kx*u + ky*v = 0`` exactly at every frequency; the zero mode passes
    through unchanged.
    """
    g = _check_same_grid(u, v)
    kx, ky, k2 = g.kx_mesh, g.ky_mesh, g.k2_mesh
    with np.errstate(divide="ignore", invalid="ignore"):
        div = (kx * u.coeffs + ky * v.coeffs) / k2
    div = np.where(k2 > 0, div, 0.0)
    return (
        SpectralField(g, u.coeffs - kx * div),
        SpectralField(g, v.coeffs - ky * div),
    )


def dealiased_product(f, g):
    """Pointwise product with 2/3-rule dealiasing.

    Accepts PhysicalField or SpectralField inputs.  Both are truncated to
    modes |m| <= n//3, multiplied on the physical grid, and the result is
    truncated again, so products of band-limited fields are alias-free.
    """
    f = forward_transform(f) if isinstance(f, PhysicalField) else f
    g = forward_transform(g) if isinstance(g, PhysicalField) else g
    gr = _check_same_grid(f, g)
    keep = gr.dealias_keep
    fv = sfft.fft2(np.where(keep, f.coeffs, 0.0), workers=_WORKERS).real
    gv = sfft.fft2(np.where(keep, g.coeffs, 0.0), workers=_WORKERS).real
    c = sfft.ifft2(fv * gv, workers=_WORKERS)
    return SpectralField(gr, np.where(keep, c, 0.0))


def bump_psi(r):
    """Smooth cutoff: 1 for r <= 1, 0 for r >= 2, C^infinity in between.

    Built from the standard glue chi(s) = exp(-1/s) (s > 0):
    psi(r) = chi(2 - r) / (chi(2 - r) + chi(r - 1)).
    """
    r = np.asarray(r, dtype=float)

    def chi(s):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)

    a = chi(2.0 - r)
    b = chi(r - 1.0)
    # a + b never vanishes: a > 0 for r < 2 and b > 0 for r > 1.
    return a / (a + b)


def lp_project(f, kind, N, M=None):
    """Littlewood-Paley style smooth frequency projection.

    kind = "low":    multiply by psi(|k| / N)            (modes |k| <~ 2N)
    kind = "dyadic": multiply by psi(|k|/N) - psi(2|k|/N) (shell |k| ~ N)
    kind = "band":   multiply by psi(|k|/N) - psi(|k|/M)  (M < |k| <~ N)

    Cutoffs must satisfy N > 0 and, for "band", 0 <= M < N (M = 0 reduces
    to the low-pass).
    """
    if N is None or N <= 0:
        raise BadCutoffs("cutoff N must be positive")
    g = f.grid
    k = np.sqrt(g.k2_mesh)
    if kind == "low":
        w = bump_psi(k / N)
    elif kind == "dyadic":
        w = bump_psi(k / N) - bump_psi(2.0 * k / N)
    elif kind == "band":
        if M is None or M < 0 or M >= N:
            raise BadCutoffs("band requires 0 <= M < N")
        w = bump_psi(k / N) - (bump_psi(k / M) if M > 0 else 0.0)
    else:
        raise ValueError(f"unknown projection kind: {kind!r}")
    return SpectralField(g, w * f.coeffs)


def time_band_cutoffs(t, half=False):
    """Frequency cutoffs of the time-adapted band projection.

    Low cutoff <t>^-8, high cutoff 2 <t>^-0.05 where <t> = sqrt(1 + t^2);
    with half=True the cutoffs are evaluated at t/2.
    """
    s = 0.5 * t if half else t
    jt = np.sqrt(1.0 + s * s)
    return jt**-8.0, 2.0 * jt**-0.05


def time_band_project(f, t, half=False):
    lo, hi = time_band_cutoffs(t, half=half)
    return lp_project(f, "band", hi, M=lo)
