"""Built-in invariant suite behind the ``selfcheck`` CLI subcommand.

Each check returns (ok, detail); the suite is deterministic (fixed seeds) and
sized to finish in seconds at n = 64^2.  The same helpers generate the random
Gaussian-enveloped trial fields used throughout the test suite: band-limited
noise under a Gaussian envelope, so spectral operations act on well-resolved
decaying data.
"""

from __future__ import annotations

import numpy as np

from . import modes
from .evolution import EvolveConfig, evolve, evolve_linear_semigroup
from .functionals import (
    chemical_potential,
    energy,
    inner,
    mass,
    mu_energy_gap,
    rotation_expectation,
    sigma_norm,
)
from .grid import ComplexField, fft_forward, fft_inverse, make_grid, spectral_derivative
from .operators import (
    PhysParams,
    apply_H,
    check_commutators,
    coercivity_constant,
)


def random_envelope_field(grid, rng: np.random.Generator, kc: int = 5,
                          width: float = 1.0) -> ComplexField:
    """Band-limited complex noise times exp(-|x|^2/(2 width^2)), unit mass.

    The noise lives on Fourier indices |m_j| <= kc (both signs), so the
    sample is smooth, statistically isotropic, and fully resolved.
    """
    mask = np.ones(grid.shape, dtype=bool)
    for j in range(grid.d):
        mj = np.rint(np.fft.fftfreq(grid.n[j]) * grid.n[j]).astype(int)
        mask &= np.abs(grid.axis_view(mj, j)) <= kc
    coeff = np.zeros(grid.shape, dtype=np.complex128)
    cnt = int(mask.sum())
    coeff[mask] = rng.standard_normal(cnt) + 1j * rng.standard_normal(cnt)
    base = np.fft.ifftn(coeff, norm="ortho")
    env = np.exp(-grid.radius_squared() / (2.0 * width * width))
    f = ComplexField(grid, base * env)
    f.data /= np.sqrt(mass(f))
    return f


def gaussian_field(grid, width_omega: float = 1.0) -> ComplexField:
    """Unit-mass isotropic ground Gaussian exp(-omega |x|^2 / 2)."""
    f = ComplexField(grid, np.exp(-0.5 * width_omega * grid.radius_squared())
                     .astype(np.complex128))
    f.data /= np.sqrt(mass(f))
    return f


def _check_fft_roundtrip(grid, rng):
    f = random_envelope_field(grid, rng)
    back = fft_inverse(fft_forward(f))
    err = float(np.max(np.abs(back.data - f.data)))
    return err < 1e-13, f"roundtrip max err {err:.3e}"


def _check_parseval(grid, rng):
    f = random_envelope_field(grid, rng)
    phys = mass(f)
    four = float((np.abs(fft_forward(f).data) ** 2).sum() * grid.cell_volume)
    rel = abs(phys - four) / phys
    return rel < 1e-12, f"Parseval rel err {rel:.3e}"


def _check_derivative(grid, rng):
    # exact on a resolved plane wave and on the Gaussian
    kx = grid.k[0][3]
    wave = ComplexField(grid, np.exp(1j * kx * grid.coordinate(0)) * np.ones(grid.shape, complex))
    err1 = float(np.max(np.abs(spectral_derivative(wave, 0).data - 1j * kx * wave.data)))
    g = ComplexField(grid, np.exp(-0.5 * grid.radius_squared()).astype(complex))
    err2 = float(np.max(np.abs(spectral_derivative(g, 0).data
                               + grid.coordinate(0) * g.data)))
    ok = err1 < 1e-12 and err2 < 1e-10
    return ok, f"plane-wave err {err1:.3e}, gaussian err {err2:.3e}"


def _check_commutators(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.3, gamma=1.0)
    worst = 0.0
    for trial in (random_envelope_field(grid, rng),
                  gaussian_field(grid)):
        rep = check_commutators(p, trial)
        worst = max(worst, rep.max_residual)
    return worst < 1e-8, f"max commutator residual {worst:.3e}"


def _check_self_adjoint(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.4, gamma=1.0)
    worst = 0.0
    for _ in range(20):
        u = random_envelope_field(grid, rng)
        v = random_envelope_field(grid, rng)
        a = inner(apply_H(u, p), v)
        b = inner(u, apply_H(v, p))
        worst = max(worst, abs(a - b) / max(abs(a), 1e-30))
    return worst < 1e-8, f"max self-adjointness rel err {worst:.3e}"


def _check_coercivity(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.5, gamma=1.0)
    c = coercivity_constant(p)
    margin = np.inf
    for _ in range(100):
        u = random_envelope_field(grid, rng)
        quad = energy(u, p)  # g = 0: E = (H u, u)
        margin = min(margin, quad - c * sigma_norm(u))
    return margin > 0.0, f"min (Hu,u) - c*sigma_norm = {margin:.3e} (c={c:.3f})"


def _check_rotation_bound(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.5, gamma=1.0)
    worst = -np.inf
    for _ in range(100):
        u = random_envelope_field(grid, rng)
        rot = abs(rotation_expectation(u, p))
        du = [spectral_derivative(u, j).data for j in range(2)]
        grad = float(np.sqrt(sum((d.real**2 + d.imag**2).sum() for d in du)
                             * grid.cell_volume))
        xn = float(np.sqrt((grid.radius_squared()
                            * (u.data.real**2 + u.data.imag**2)).sum() * grid.cell_volume))
        worst = max(worst, rot - abs(p.Omega) * xn * grad)
    return worst <= 1e-10, f"max |(OLu,u)| - |O| ||xu|| ||grad u|| = {worst:.3e}"


def _check_eigenpairs(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.5, gamma=1.0)
    worst_res = 0.0
    basis = []
    for k in range(1, 5):
        for idx in modes.level_indices(k):
            phi = modes.eigenfunction(idx, grid, p)
            lam = modes.eigenvalue(idx, p)
            res = np.sqrt(mass(ComplexField(grid, apply_H(phi, p).data - lam * phi.data)))
            worst_res = max(worst_res, float(res))
            basis.append(phi)
    worst_ortho = 0.0
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            worst_ortho = max(worst_ortho, abs(inner(basis[i], basis[j])))
    ok = worst_res < 1e-8 and worst_ortho < 1e-10
    return ok, f"eigen-residual {worst_res:.3e}, orthogonality {worst_ortho:.3e}"


def _check_mu_energy_identity(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.2, g=1.5, sigma=1.0, gamma=1.0)
    worst = 0.0
    for _ in range(10):
        u = random_envelope_field(grid, rng)
        gap = mu_energy_gap(u, p)
        from .functionals import density_power
        rho = u.data.real**2 + u.data.imag**2
        direct = (p.g * p.sigma / (p.sigma + 1.0)
                  * float((density_power(u, p.sigma) * rho).sum() * grid.cell_volume))
        worst = max(worst, abs(gap - direct) / max(abs(direct), 1e-30))
    return worst < 1e-12, f"mu-E identity rel err {worst:.3e}"


def _check_phase_invariance(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.2, g=2.0, sigma=1.0, gamma=1.0)
    u = random_envelope_field(grid, rng)
    e0, mu0 = energy(u, p), chemical_potential(u, p)
    v = ComplexField(grid, u.data * np.exp(1j * 0.7321))
    rel_e = abs(energy(v, p) - e0) / abs(e0)
    rel_mu = abs(chemical_potential(v, p) - mu0) / abs(mu0)
    ok = rel_e < 1e-12 and rel_mu < 1e-12
    return ok, f"phase invariance rel err E {rel_e:.3e}, mu {rel_mu:.3e}"


def _check_projection_mass(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.3, g=3.0, sigma=1.0, gamma=1.0)
    psi0 = random_envelope_field(grid, rng)
    traj = evolve(psi0, p, EvolveConfig(dt=1e-3, T=0.2, scheme="projection",
                                        record_every=20))
    drift = max(abs(r.mass_drift) for r in traj.records)
    return drift < 1e-12, f"max |mass drift| {drift:.3e}"


def _check_energy_monotone(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.3, g=3.0, sigma=1.0, gamma=1.0)
    psi0 = random_envelope_field(grid, rng)
    worst = -np.inf
    for scheme in ("projection", "explicit_mu"):
        traj = evolve(psi0, p, EvolveConfig(dt=5e-4, T=0.2, scheme=scheme))
        e = traj.series("energy")
        worst = max(worst, float(np.max(np.diff(e))))
    return worst < 1e-10, f"max energy increase per record {worst:.3e}"


def _check_semigroup_decay(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.0, gamma=1.0)
    phi = modes.eigenfunction(modes.EigenIndex(1, 0), grid, p)
    lam = modes.eigenvalue(modes.EigenIndex(1, 0), p)
    traj = evolve_linear_semigroup(phi, p, EvolveConfig(dt=1e-3, T=0.5))
    expected = np.exp(-2.0 * p.gamma * lam * 0.5 / (1.0 + p.gamma**2))
    got = traj.records[-1].mass
    rel = abs(got - expected) / expected
    return rel < 1e-6, f"single-mode decay rel err {rel:.3e}"


def _check_oracle_two_mode(grid, rng):
    p = PhysParams(omega=(1.0, 1.0), Omega=0.0, gamma=1.0)
    ms = modes.mode_state([modes.EigenIndex(1, 0), modes.EigenIndex(3, 0)],
                          [0.8, 0.6], p)
    # closed-form modulus ratio law with lambdas (1, 3):
    # |b2/b1|(t) = 0.75 exp(-gamma (l2 - l1) t / (1 + gamma^2)) = 0.75 e^{-t}
    traj = modes.ode_oracle(ms, T=2.0)
    ratio = np.abs(traj.coeffs[-1, 1] / traj.coeffs[-1, 0])
    rel = abs(ratio - 0.75 * np.exp(-2.0)) / (0.75 * np.exp(-2.0))
    mass_err = float(np.max(np.abs(traj.mass() - ms.total_mass)))
    ok = rel < 1e-8 and mass_err < 1e-10
    return ok, f"two-mode ratio rel err {rel:.3e}, mass err {mass_err:.3e}"


CHECKS = (
    ("fft round trip", _check_fft_roundtrip),
    ("parseval", _check_parseval),
    ("spectral derivative", _check_derivative),
    ("commutator identities", _check_commutators),
    ("self-adjointness", _check_self_adjoint),
    ("coercivity constant", _check_coercivity),
    ("rotation Cauchy-Schwarz", _check_rotation_bound),
    ("eigenpairs", _check_eigenpairs),
    ("mu-E identity", _check_mu_energy_identity),
    ("phase invariance", _check_phase_invariance),
    ("projection mass conservation", _check_projection_mass),
    ("energy monotone", _check_energy_monotone),
    ("linear semigroup decay", _check_semigroup_decay),
    ("mode oracle", _check_oracle_two_mode),
)


def run_selfcheck(verbose: bool = True, n: int = 64) -> bool:
    """Run every check; return True when all pass."""
    grid = make_grid(2, n, 8.0)
    all_ok = True
    for name, fn in CHECKS:
        rng = np.random.default_rng(2024)
        ok, detail = fn(grid, rng)
        all_ok = all_ok and ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name:32s} {detail}")
    return all_ok
