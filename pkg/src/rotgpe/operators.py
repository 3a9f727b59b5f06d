"""The linear Hamiltonian H = -1/2 Laplacian + V - Omega.L and its pieces.

The trap is harmonic, V(x) = 1/2 sum_j omega_j^2 x_j^2, and the rotation term
acts about the third coordinate axis (the only axis in 2D):

    Omega.L f = -i Omega (x_1 d_2 f - x_2 d_1 f).

Derivatives are spectral, coordinate multiplications use the grid coordinate
arrays directly.  With the Nyquist-zeroed derivative the discrete operator is
symmetric to round-off, so the commutator and self-adjointness checks below
probe only resolution, not the discretization itself.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .grid import (
    PHYSICAL,
    ComplexField,
    Grid,
    _require_space,
    recommended_half_length,
    spectral_derivative,
)

# Applying H to the Laguerre-Gaussian mode with angular factor e^{i m theta}
# gives lambda = omega (d/2 + k - 1) + ROTATION_SIGN * m * Omega; the minus
# sign is what the -Omega.L term in H produces (L e^{i m theta} = m e^{i m theta}).
ROTATION_SIGN = -1


@dataclass(frozen=True)
class PhysParams:
    """Physical parameters of the damped rotating condensate model.

    Attributes:
        omega: trap frequencies per axis (length sets the dimension).
        Omega: rotation speed about the third axis (signed scalar).
        g: interaction coupling, repulsive for g > 0.
        sigma: nonlinearity power in g |psi|^{2 sigma} psi.
        gamma: damping, strictly positive.
        mass_target: squared L2 norm the flow conserves.
    """

    omega: tuple[float, ...]
    Omega: float = 0.0
    g: float = 0.0
    sigma: float = 1.0
    gamma: float = 1.0
    mass_target: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", tuple(float(w) for w in np.atleast_1d(self.omega)))
        d = len(self.omega)
        if d not in (2, 3):
            raise ValueError(f"trap must have 2 or 3 frequencies, got {d}")
        if any(w <= 0 for w in self.omega):
            raise ValueError("trap frequencies must be positive")
        if self.gamma <= 0:
            raise ValueError("damping gamma must be positive")
        if self.sigma < 0:
            raise ValueError("nonlinearity power sigma must be >= 0")
        if d == 3 and self.sigma >= 2.0:
            raise ValueError("sigma must satisfy sigma < 2/(d-2) in 3D")
        if self.g < 0 and self.sigma >= 2.0 / d:
            raise ValueError("attractive coupling requires sigma < 2/d")
        if self.mass_target <= 0:
            raise ValueError("mass_target must be positive")

    @property
    def d(self) -> int:
        return len(self.omega)

    @property
    def omega_min(self) -> float:
        return min(self.omega)

    @property
    def isotropic(self) -> bool:
        return len(set(self.omega)) == 1

    @property
    def coercive(self) -> bool:
        """|Omega| < min_j omega_j: the quadratic energy is positive definite."""
        return abs(self.Omega) < self.omega_min

    @property
    def small_sigma_regime(self) -> bool:
        """|Omega| < omega/sqrt(2): the regime of the iterative local theory."""
        return abs(self.Omega) < self.omega_min / np.sqrt(2.0)


def coercivity_constant(p: PhysParams) -> float:
    """c with (H u, u) >= c (|grad u|^2 + |x u|^2) for generic trapped states.

    c = min((omega^2 - Omega^2)/2, (1 - Omega^2/omega^2)/2) with
    omega = min_j omega_j; positive exactly in the coercive regime.
    """
    w = p.omega_min
    return min((w * w - p.Omega * p.Omega) / 2.0,
               (1.0 - p.Omega * p.Omega / (w * w)) / 2.0)


def potential_array(grid: Grid, p: PhysParams) -> NDArray[np.float64]:
    """V(x) = 1/2 sum_j omega_j^2 x_j^2 sampled on the grid."""
    if grid.d != p.d:
        raise ValueError(f"grid dimension {grid.d} does not match parameters {p.d}")
    v = np.zeros(grid.shape)
    for j in range(grid.d):
        v = v + 0.5 * p.omega[j] ** 2 * grid.coordinate(j) ** 2
    return v


def warn_if_box_small(grid: Grid, p: PhysParams) -> None:
    """Warn when the box is below the eight-standard-deviations rule."""
    needed = recommended_half_length(p.omega_min)
    if min(grid.L) < needed:
        warnings.warn(
            f"half box length {min(grid.L):g} is below the recommended "
            f"{needed:g} = 8/sqrt(omega_min); periodization error may be visible",
            stacklevel=2)


def apply_potential(f: ComplexField, p: PhysParams) -> ComplexField:
    """Pointwise product V(x) f(x)."""
    _require_space(f, PHYSICAL, "apply_potential")
    return ComplexField(f.grid, potential_array(f.grid, p) * f.data, PHYSICAL)


def apply_rotation(f: ComplexField, p: PhysParams) -> ComplexField:
    """(Omega.L) f = -i Omega (x_1 d_2 f - x_2 d_1 f), derivatives spectral."""
    _require_space(f, PHYSICAL, "apply_rotation")
    if p.Omega == 0.0:
        return ComplexField(f.grid, np.zeros(f.grid.shape, dtype=np.complex128), PHYSICAL)
    g = f.grid
    d1 = spectral_derivative(f, 0).data
    d2 = spectral_derivative(f, 1).data
    out = -1j * p.Omega * (g.coordinate(0) * d2 - g.coordinate(1) * d1)
    return ComplexField(g, out, PHYSICAL)


def apply_kinetic(f: ComplexField) -> ComplexField:
    """-1/2 Laplacian f via the full Fourier symbol |k|^2 / 2."""
    _require_space(f, PHYSICAL, "apply_kinetic")
    fh = np.fft.fftn(f.data, norm="ortho")
    fh *= 0.5 * f.grid.k_squared()
    return ComplexField(f.grid, np.fft.ifftn(fh, norm="ortho"), PHYSICAL)


def apply_H(f: ComplexField, p: PhysParams) -> ComplexField:
    """H f = -1/2 Laplacian f + V f - (Omega.L) f."""
    out = apply_kinetic(f).data + apply_potential(f, p).data
    if p.Omega != 0.0:
        out = out - apply_rotation(f, p).data
    return ComplexField(f.grid, out, PHYSICAL)


@dataclass(frozen=True)
class CommutatorReport:
    """Max pointwise residuals of the two commutator identities of H.

    grad_residual: max_j || [d_j, H] f - (d_j V) f - (i grad wedge Omega)_j f ||_inf
    x_residual:    max_j || [x_j, H] f - d_j f + i (Omega wedge x)_j f ||_inf
    """

    grad_residual: float
    x_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.grad_residual, self.x_residual)


def check_commutators(p: PhysParams, trial: ComplexField) -> CommutatorReport:
    """Evaluate both sides of [grad,H] = grad V + i grad wedge Omega and
    [x,H] = grad - i Omega wedge x on a trial field by operator composition.

    The identities hold for any field; the residual measures how well the
    grid resolves the trial and its image under H.
    """
    g = trial.grid
    hf = apply_H(trial, p)
    derivs = [spectral_derivative(trial, j) for j in range(g.d)]
    grad_res = 0.0
    x_res = 0.0
    for j in range(g.d):
        # [d_j, H] f
        lhs = spectral_derivative(hf, j).data - apply_H(derivs[j], p).data
        rhs = p.omega[j] ** 2 * g.coordinate(j) * trial.data
        # (i grad wedge Omega)_j for Omega along the third axis:
        # j=0 -> +i Omega d_2 f, j=1 -> -i Omega d_1 f, j=2 -> 0.
        if j == 0:
            rhs = rhs + 1j * p.Omega * derivs[1].data
        elif j == 1:
            rhs = rhs - 1j * p.Omega * derivs[0].data
        grad_res = max(grad_res, float(np.max(np.abs(lhs - rhs))))

        # [x_j, H] f
        xf = ComplexField(g, g.coordinate(j) * trial.data, PHYSICAL)
        lhs = g.coordinate(j) * hf.data - apply_H(xf, p).data
        rhs = derivs[j].data
        # -i (Omega wedge x)_j: j=0 -> +i Omega x_2 f, j=1 -> -i Omega x_1 f, j=2 -> 0.
        if j == 0:
            rhs = rhs + 1j * p.Omega * g.coordinate(1) * trial.data
        elif j == 1:
            rhs = rhs - 1j * p.Omega * g.coordinate(0) * trial.data
        x_res = max(x_res, float(np.max(np.abs(lhs - rhs))))
    return CommutatorReport(grad_residual=grad_res, x_residual=x_res)
