"""Scalar observables of a state: mass, energy, chemical potential, norms.

All integrals are the uniform quadrature sum(...) h^d, which is exact for
periodic band-limited integrands and therefore matches the accuracy of the
spectral discretization.  |f|^{2 sigma} is computed as (|f|^2)^sigma with the
convention 0^sigma = 0, so non-integer powers stay NaN-free at zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .grid import PHYSICAL, ComplexField, _require_space, derivative_symbol
from .operators import PhysParams, apply_H, potential_array


@dataclass(frozen=True)
class DiagRecord:
    """One row of time-series diagnostics.

    diss_rate is the discrete dissipation estimate ||(psi_{n+1}-psi_n)/dt||^2
    of the step ending at time t (0 at t = 0); mass_drift is mass minus the
    conserved target.
    """

    t: float
    mass: float
    energy: float
    mu: float
    lz: float
    sigma_norm: float
    diss_rate: float
    mass_drift: float

    FIELDS = ("t", "mass", "energy", "mu", "lz", "sigma_norm", "diss_rate", "mass_drift")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.t, self.mass, self.energy, self.mu, self.lz,
                self.sigma_norm, self.diss_rate, self.mass_drift)

    def __post_init__(self) -> None:
        values = self.as_tuple()
        if not np.all(np.isfinite(values)):
            raise ValueError(f"non-finite diagnostics at t={self.t}: {values}")
        if self.mass <= 0.0:
            raise ValueError(f"non-positive mass {self.mass} at t={self.t}")


def inner(f: ComplexField, g: ComplexField) -> complex:
    """Complex L2 inner product (f, g) = sum f conj(g) h^d."""
    return complex(np.vdot(g.data, f.data) * f.grid.cell_volume)


def mass(f: ComplexField) -> float:
    """Squared L2 norm sum |f|^2 h^d."""
    _require_space(f, PHYSICAL, "mass")
    d = f.data
    return float((d.real**2 + d.imag**2).sum() * f.grid.cell_volume)


def l2_norm(f: ComplexField) -> float:
    return float(np.sqrt(mass(f)))


def l2_distance(f: ComplexField, g: ComplexField) -> float:
    diff = f.data - g.data
    return float(np.sqrt((diff.real**2 + diff.imag**2).sum() * f.grid.cell_volume))


def density_power(f: ComplexField, sigma: float) -> NDArray[np.float64]:
    """|f|^{2 sigma} with 0^sigma = 0 for sigma > 0."""
    rho = f.data.real**2 + f.data.imag**2
    if sigma == 1.0:
        return rho
    return np.power(rho, sigma)


@dataclass(frozen=True)
class EnergyParts:
    """Quadratic, interaction and rotation contributions to the energy."""

    kinetic: float           # integral of 1/2 |grad f|^2
    potential: float         # integral of V |f|^2
    interaction_density: float  # integral of |f|^{2 sigma + 2}
    rotation: float          # Re integral of conj(f) (Omega.L f)

    def energy(self, p: PhysParams) -> float:
        return (self.kinetic + self.potential - self.rotation
                + p.g / (p.sigma + 1.0) * self.interaction_density)

    def mu_numerator(self, p: PhysParams) -> float:
        return (self.kinetic + self.potential - self.rotation
                + p.g * self.interaction_density)


def energy_parts(f: ComplexField, p: PhysParams) -> EnergyParts:
    """All energy integrals from a single forward transform."""
    _require_space(f, PHYSICAL, "energy")
    g = f.grid
    w = g.cell_volume
    fh = np.fft.fftn(f.data, norm="ortho")
    kin = 0.5 * float((np.abs(fh) ** 2 * g.k_squared()).sum() * w)
    rho = f.data.real**2 + f.data.imag**2
    pot = float((potential_array(g, p) * rho).sum() * w)
    inter = float((density_power(f, p.sigma) * rho).sum() * w)
    rot = 0.0
    if p.Omega != 0.0:
        d1 = np.fft.ifft(np.fft.fft(f.data, axis=0, norm="ortho")
                         * derivative_symbol(g, 0), axis=0, norm="ortho")
        d2 = np.fft.ifft(np.fft.fft(f.data, axis=1, norm="ortho")
                         * derivative_symbol(g, 1), axis=1, norm="ortho")
        lf = -1j * p.Omega * (g.coordinate(0) * d2 - g.coordinate(1) * d1)
        rot = float((np.conj(f.data) * lf).real.sum() * w)
    return EnergyParts(kinetic=kin, potential=pot, interaction_density=inter, rotation=rot)


def energy(f: ComplexField, p: PhysParams) -> float:
    """E[f] = int 1/2|grad f|^2 + V|f|^2 + g/(sigma+1)|f|^{2sigma+2} - conj(f)(Omega.L)f."""
    return energy_parts(f, p).energy(p)


def chemical_potential(f: ComplexField, p: PhysParams) -> float:
    """mu[f]: same integrand as the energy but with the full g weight,
    normalized by the mass."""
    m = mass(f)
    if m <= 0.0:
        raise ValueError("chemical potential of a zero-mass field is undefined")
    return energy_parts(f, p).mu_numerator(p) / m


def sigma_norm(f: ComplexField) -> float:
    """|grad f|^2 + |x f|^2, the squared trap-space norm."""
    _require_space(f, PHYSICAL, "sigma_norm")
    g = f.grid
    w = g.cell_volume
    fh = np.fft.fftn(f.data, norm="ortho")
    grad2 = float((np.abs(fh) ** 2 * g.k_squared()).sum() * w)
    rho = f.data.real**2 + f.data.imag**2
    x2 = float((g.radius_squared() * rho).sum() * w)
    return grad2 + x2


def rotation_expectation(f: ComplexField, p: PhysParams) -> float:
    """Re (Omega.L f, f); zero for radial fields and for Omega = 0."""
    if p.Omega == 0.0:
        return 0.0
    return energy_parts(f, p).rotation


def mu_energy_gap(f: ComplexField, p: PhysParams) -> float:
    """mu[f] - E[f] for a unit-mass state: (g sigma/(sigma+1)) |f|_{2s+2}^{2s+2}."""
    parts = energy_parts(f, p)
    return parts.mu_numerator(p) / mass(f) - parts.energy(p)


def stationary_residual(f: ComplexField, p: PhysParams) -> float:
    """|| H f + g |f|^{2 sigma} f - mu[f] f ||_2 / ||f||_2."""
    m = mass(f)
    if m <= 0.0:
        raise ValueError("stationary residual of a zero-mass field is undefined")
    mu = chemical_potential(f, p)
    res = apply_H(f, p).data + (p.g * density_power(f, p.sigma) - mu) * f.data
    return float(np.sqrt((res.real**2 + res.imag**2).sum() * f.grid.cell_volume / m))
