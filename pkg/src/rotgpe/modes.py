"""Analytic eigenpairs of the rotating-trap Hamiltonian and a mode-space oracle.

For an isotropic trap the eigenfunctions are Laguerre-Gaussian in the rotation
plane (times a Hermite factor along the third axis in 3D),

    phi_{k,m} ~ (sqrt(omega) r)^{|m|} L_{n_r}^{|m|}(omega r^2)
                e^{-omega r^2 / 2} e^{i m theta},

with level index k >= 1, angular winding m, radial number
n_r = (k - 1 - |m| - n3) / 2 and eigenvalue

    lambda = omega (d/2 + k - 1) - m Omega.

The minus sign is the convention fixed by direct application of H to the
explicit modes (module operators, ROTATION_SIGN); the spectrum as a set is
symmetric in m, so listings in the +m Omega form simply relabel m -> -m.

The oracle integrates the exact projection of the damped linear flow onto a
finite mode set,

    db_n/dt = -((i + gamma)/(1 + gamma^2)) (lambda_n - mu(b)) b_n,
    mu(b) = sum lambda |b|^2 / sum |b|^2,

which conserves sum |b|^2 and decreases mu(b); it provides an independent
reference for the g = 0 dynamics of the PDE stepper.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import eval_genlaguerre, eval_hermite

from . import functionals
from .grid import PHYSICAL, ComplexField, Grid
from .operators import ROTATION_SIGN, PhysParams


@dataclass(frozen=True)
class EigenIndex:
    """Level k >= 1, angular winding m, and (3D only) axial quantum number n3.

    Admissible when |m| + n3 <= k - 1 and k - 1 - |m| - n3 is even, so the
    radial quantum number n_r = (k - 1 - |m| - n3)/2 is a nonnegative integer.
    In 2D the level k is exactly k-fold degenerate.
    """

    k: int
    m: int
    n3: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"level index must be >= 1, got {self.k}")
        if self.n3 < 0:
            raise ValueError(f"axial quantum number must be >= 0, got {self.n3}")
        rem = self.k - 1 - abs(self.m) - self.n3
        if rem < 0 or rem % 2 != 0:
            raise ValueError(
                f"inadmissible index (k={self.k}, m={self.m}, n3={self.n3}): "
                "need |m| + n3 <= k-1 with k-1-|m|-n3 even")

    @property
    def n_r(self) -> int:
        return (self.k - 1 - abs(self.m) - self.n3) // 2


def level_indices(k: int, d: int = 2) -> list[EigenIndex]:
    """All admissible indices of level k (ascending m, then n3)."""
    out = []
    for m in range(-(k - 1), k):
        if d == 2:
            if (k - 1 - abs(m)) % 2 == 0:
                out.append(EigenIndex(k, m))
        else:
            for n3 in range(k - abs(m)):
                if (k - 1 - abs(m) - n3) % 2 == 0:
                    out.append(EigenIndex(k, m, n3))
    return out


def _require_isotropic(p: PhysParams) -> float:
    if not p.isotropic:
        raise ValueError("analytic eigenpairs require an isotropic trap")
    return p.omega[0]


def eigenvalue(idx: EigenIndex, p: PhysParams) -> float:
    """lambda = omega (d/2 + k - 1) + ROTATION_SIGN * m * Omega."""
    w = _require_isotropic(p)
    if not abs(p.Omega) < w:
        raise ValueError("eigenvalue formula requires |Omega| < omega")
    return w * (p.d / 2.0 + idx.k - 1.0) + ROTATION_SIGN * idx.m * p.Omega


def _resolution_check(idx: EigenIndex, grid: Grid, w: float) -> None:
    # Classical turning radius sqrt(2 k / omega) must fit with two Gaussian
    # widths to spare, and the radial wavenumber sqrt(2 omega k) must stay
    # below half the Nyquist limit.
    r_turn = np.sqrt(2.0 * idx.k / w)
    margin = 2.0 / np.sqrt(w)
    if r_turn + margin > min(grid.L):
        raise ValueError(
            f"mode k={idx.k} extends past the box (needs L >= {r_turn + margin:.2f})")
    k_rad = np.sqrt(2.0 * w * idx.k)
    if k_rad > 0.5 * np.pi / max(grid.h):
        raise ValueError(
            f"mode k={idx.k} oscillates beyond half the Nyquist wavenumber")


def eigenfunction(idx: EigenIndex, grid: Grid, p: PhysParams) -> ComplexField:
    """Grid sample of phi_{k,m,n3}, normalized to unit mass on the grid."""
    w = _require_isotropic(p)
    if grid.d != p.d:
        raise ValueError("grid and parameter dimensions differ")
    _resolution_check(idx, grid, w)
    x1 = grid.coordinate(0)
    x2 = grid.coordinate(1)
    r2 = x1 * x1 + x2 * x2
    am = abs(idx.m)
    # r^|m| e^{i m theta} = (x1 +- i x2)^|m| avoids the axis singularity.
    if idx.m >= 0:
        angular = (x1 + 1j * x2) ** am
    else:
        angular = (x1 - 1j * x2) ** am
    data = np.asarray(w ** (am / 2.0) * angular
                      * eval_genlaguerre(idx.n_r, am, w * r2)
                      * np.exp(-0.5 * w * r2), dtype=np.complex128)
    if grid.d == 3:
        x3 = grid.coordinate(2)
        data = data * (eval_hermite(idx.n3, np.sqrt(w) * x3)
                       * np.exp(-0.5 * w * x3 * x3))
    f = ComplexField(grid, data, PHYSICAL)
    m0 = functionals.mass(f)
    if m0 <= 0.0:
        raise ValueError("eigenfunction sample vanished on the grid")
    f.data /= np.sqrt(m0)
    return f


@dataclass
class ModeState:
    """Coefficients of a state over a finite eigenmode set.

    captured is sum |b|^2 divided by the mass of the decomposed field (1.0 for
    states built directly in mode space).
    """

    indices: tuple[EigenIndex, ...]
    b: NDArray[np.complex128]
    lambdas: NDArray[np.float64]
    gamma: float
    captured: float = 1.0

    def __post_init__(self) -> None:
        self.b = np.asarray(self.b, dtype=np.complex128)
        self.lambdas = np.asarray(self.lambdas, dtype=np.float64)
        if not (len(self.indices) == self.b.size == self.lambdas.size):
            raise ValueError("indices, coefficients and eigenvalues must align")
        if float(np.sum(np.abs(self.b) ** 2)) <= 0.0:
            raise ValueError("mode state must carry positive mass")

    @property
    def total_mass(self) -> float:
        return float(np.sum(np.abs(self.b) ** 2))

    def mu(self) -> float:
        w = np.abs(self.b) ** 2
        return float(np.sum(self.lambdas * w) / np.sum(w))


def mode_state(indices, b, p: PhysParams) -> ModeState:
    """Assemble a ModeState with eigenvalues filled in from the parameters."""
    idx = tuple(indices)
    lam = np.array([eigenvalue(i, p) for i in idx])
    return ModeState(indices=idx, b=np.asarray(b, dtype=np.complex128),
                     lambdas=lam, gamma=p.gamma)


def synthesize(ms: ModeState, grid: Grid, p: PhysParams) -> ComplexField:
    """Sum b_n phi_n on the grid."""
    data = np.zeros(grid.shape, dtype=np.complex128)
    for c, idx in zip(ms.b, ms.indices):
        data += c * eigenfunction(idx, grid, p).data
    return ComplexField(grid, data, PHYSICAL)


def decompose(f: ComplexField, modes, p: PhysParams) -> ModeState:
    """Quadrature inner products b_n = (f, phi_n) over the given mode set."""
    idx = tuple(modes)
    b = np.empty(len(idx), dtype=np.complex128)
    for j, i in enumerate(idx):
        b[j] = functionals.inner(f, eigenfunction(i, f.grid, p))
    lam = np.array([eigenvalue(i, p) for i in idx])
    total = functionals.mass(f)
    captured = float(np.sum(np.abs(b) ** 2) / total) if total > 0 else 0.0
    return ModeState(indices=idx, b=b, lambdas=lam, gamma=p.gamma, captured=captured)


def smallest_eigenvalue_in_datum(ms: ModeState, eps: float = 1e-8) -> float:
    """min lambda over coefficients with |b| > eps * sqrt(sum |b|^2)."""
    if eps <= 0:
        raise ValueError("threshold must be positive")
    cut = eps * np.sqrt(ms.total_mass)
    active = np.abs(ms.b) > cut
    if not np.any(active):
        raise ValueError("no mode coefficient above the threshold")
    return float(np.min(ms.lambdas[active]))


@dataclass
class ModeTrajectory:
    """RK4 trajectory of the finite-mode system."""

    times: NDArray[np.float64]
    coeffs: NDArray[np.complex128]  # shape (n_times, n_modes)
    indices: tuple[EigenIndex, ...]
    lambdas: NDArray[np.float64]
    gamma: float

    def mass(self) -> NDArray[np.float64]:
        return np.sum(np.abs(self.coeffs) ** 2, axis=1)

    def mu(self) -> NDArray[np.float64]:
        w = np.abs(self.coeffs) ** 2
        return np.sum(self.lambdas * w, axis=1) / np.sum(w, axis=1)

    def final_state(self) -> ModeState:
        return ModeState(indices=self.indices, b=self.coeffs[-1].copy(),
                         lambdas=self.lambdas.copy(), gamma=self.gamma)


def ode_oracle(ms0: ModeState, T: float, dt: float | None = None) -> ModeTrajectory:
    """Integrate the projected damped flow in mode space with RK4.

    The default step 1e-3 * min(1, 1/max|lambda|) keeps the oracle at least
    two orders more accurate than the PDE stepper it cross-checks.
    """
    lam = ms0.lambdas
    gamma = ms0.gamma
    if dt is None:
        dt = 1e-3 * min(1.0, 1.0 / float(np.max(np.abs(lam))))
    if dt <= 0 or T < dt:
        raise ValueError("need 0 < dt <= T")
    c = (gamma + 1j) / (1.0 + gamma * gamma)

    def rhs(b):
        w = np.abs(b) ** 2
        mu = np.sum(lam * w) / np.sum(w)
        return -c * (lam - mu) * b

    n_steps = int(round(T / dt))
    times = np.empty(n_steps + 1)
    coeffs = np.empty((n_steps + 1, lam.size), dtype=np.complex128)
    b = ms0.b.astype(np.complex128).copy()
    times[0] = 0.0
    coeffs[0] = b
    for n in range(1, n_steps + 1):
        k1 = rhs(b)
        k2 = rhs(b + 0.5 * dt * k1)
        k3 = rhs(b + 0.5 * dt * k2)
        k4 = rhs(b + dt * k3)
        b = b + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        times[n] = n * dt
        coeffs[n] = b
    return ModeTrajectory(times=times, coeffs=coeffs, indices=ms0.indices,
                          lambdas=lam.copy(), gamma=gamma)
