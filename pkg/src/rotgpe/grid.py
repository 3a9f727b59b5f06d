"""Periodic tensor-product grids and Fourier spectral primitives.

Fields on R^d (d = 2 or 3) are approximated by restriction to the periodic
box prod_j [-L_j, L_j).  Harmonically trapped states have Gaussian tails, so
once the box holds roughly eight standard deviations per axis
(L_j >= 8 / sqrt(omega_j)) the periodization error sits below quadrature
round-off.  A box that violates this rule triggers a warning downstream, not
an error.

All transforms use the unitary ("ortho") FFT normalization, so Parseval holds
with the same quadrature weight h^d on both sides and no stray factors enter
the diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

PHYSICAL = "physical"
FOURIER = "fourier"


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on prod_j [-L_j, L_j).

    Attributes:
        d: spatial dimension, 2 or 3.
        n: points per axis, each a power of two.
        L: half box length per axis.
        h: grid spacing, h_j = 2 L_j / n_j (exact in binary for 2^k points).
        x: 1d coordinate arrays, x_j = -L_j + h_j * arange(n_j).
        k: 1d angular wavenumber arrays in FFT ordering, k = pi * integer / L_j.
    """

    d: int
    n: tuple[int, ...]
    L: tuple[float, ...]
    h: tuple[float, ...]
    x: tuple[NDArray[np.float64], ...]
    k: tuple[NDArray[np.float64], ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def npoints(self) -> int:
        return int(np.prod(self.n))

    @property
    def cell_volume(self) -> float:
        """Quadrature weight h^d of the uniform trapezoid-equivalent rule."""
        return float(np.prod(self.h))

    def axis_view(self, arr: NDArray, axis: int) -> NDArray:
        """Reshape a 1d per-axis array for broadcasting against field data."""
        shape = [1] * self.d
        shape[axis] = self.n[axis]
        return arr.reshape(shape)

    def coordinate(self, axis: int) -> NDArray[np.float64]:
        """Coordinate array of one axis, broadcastable to the field shape."""
        return self.axis_view(self.x[axis], axis)

    def wavenumber(self, axis: int) -> NDArray[np.float64]:
        """Wavenumber array of one axis, broadcastable to the field shape."""
        return self.axis_view(self.k[axis], axis)

    def radius_squared(self) -> NDArray[np.float64]:
        """|x|^2 on the full grid."""
        r2 = np.zeros(self.n)
        for j in range(self.d):
            r2 = r2 + self.coordinate(j) ** 2
        return r2

    def k_squared(self) -> NDArray[np.float64]:
        """|k|^2 on the full grid (Fourier ordering)."""
        k2 = np.zeros(self.n)
        for j in range(self.d):
            k2 = k2 + self.wavenumber(j) ** 2
        return k2

    def integrate(self, values: NDArray) -> float | complex:
        """Quadrature sum(values) * h^d, exact for periodic band-limited data."""
        total = values.sum() * self.cell_volume
        if np.iscomplexobj(values):
            return complex(total)
        return float(total)


def make_grid(d: int, n, L) -> Grid:
    """Build a periodic grid for the box prod_j [-L_j, L_j).

    Args:
        d: dimension, 2 or 3.
        n: points per axis (scalar broadcasts); each must be a power of two >= 8.
        L: half box length per axis (scalar broadcasts); each must be positive.
    """
    if d not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {d}")
    n_arr = np.broadcast_to(np.asarray(n, dtype=int), (d,))
    L_arr = np.broadcast_to(np.asarray(L, dtype=float), (d,))
    for nj in n_arr:
        if nj < 8 or not _is_power_of_two(int(nj)):
            raise ValueError(f"points per axis must be a power of two >= 8, got {nj}")
    for Lj in L_arr:
        if not (Lj > 0):
            raise ValueError(f"half box length must be positive, got {Lj}")
    h = tuple(2.0 * Lj / nj for nj, Lj in zip(n_arr, L_arr))
    x = tuple(-Lj + hj * np.arange(nj) for nj, Lj, hj in zip(n_arr, L_arr, h))
    # 2*pi*fftfreq(n, h) = pi * integer / L, zero mode first.
    k = tuple(2.0 * np.pi * np.fft.fftfreq(int(nj), d=hj) for nj, hj in zip(n_arr, h))
    return Grid(d=d, n=tuple(int(v) for v in n_arr), L=tuple(float(v) for v in L_arr),
                h=h, x=x, k=k)


@dataclass
class ComplexField:
    """A complex-valued sample of the wavefunction on a Grid.

    ``space`` records whether ``data`` holds physical amplitudes or unitary
    Fourier coefficients.  Non-finite amplitudes signal numerical blow-up and
    are checked by the time stepper, not by the constructor.
    """

    grid: Grid
    data: NDArray[np.complex128]
    space: str = PHYSICAL

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.shape != self.grid.shape:
            raise ValueError(
                f"data shape {self.data.shape} does not match grid {self.grid.shape}")
        if self.space not in (PHYSICAL, FOURIER):
            raise ValueError(f"unknown space flag {self.space!r}")

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.data.copy(), self.space)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.data.view(np.float64))))


def _require_space(f: ComplexField, space: str, op: str) -> None:
    if f.space != space:
        raise ValueError(f"{op} expects a field in {space} space, got {f.space}")


def fft_forward(f: ComplexField) -> ComplexField:
    """Unitary forward FFT, physical -> Fourier."""
    _require_space(f, PHYSICAL, "fft_forward")
    return ComplexField(f.grid, np.fft.fftn(f.data, norm="ortho"), FOURIER)


def fft_inverse(f: ComplexField) -> ComplexField:
    """Unitary inverse FFT, Fourier -> physical."""
    _require_space(f, FOURIER, "fft_inverse")
    return ComplexField(f.grid, np.fft.ifftn(f.data, norm="ortho"), PHYSICAL)


def derivative_symbol(grid: Grid, axis: int) -> NDArray[np.complex128]:
    """Multiplier i*k along one axis, Nyquist mode zeroed.

    Zeroing the (sign-ambiguous) Nyquist mode keeps the discrete derivative
    exactly skew-adjoint, which the operator symmetry checks rely on.
    """
    kj = grid.k[axis].copy()
    kj[grid.n[axis] // 2] = 0.0
    return 1j * grid.axis_view(kj, axis)


def spectral_derivative(f: ComplexField, axis: int) -> ComplexField:
    """Partial derivative along ``axis`` by Fourier multiplication with i*k."""
    _require_space(f, PHYSICAL, "spectral_derivative")
    if not 0 <= axis < f.grid.d:
        raise ValueError(f"axis {axis} out of range for dimension {f.grid.d}")
    fh = np.fft.fft(f.data, axis=axis, norm="ortho")
    fh *= derivative_symbol(f.grid, axis)
    return ComplexField(f.grid, np.fft.ifft(fh, axis=axis, norm="ortho"), PHYSICAL)


def recommended_half_length(omega_min: float, widths: float = 8.0) -> float:
    """Box sizing rule of thumb: L >= widths / sqrt(omega_min)."""
    return widths / np.sqrt(omega_min)
