"""Spectral solver for the damped rotating Gross-Pitaevskii flow
(i - gamma) dpsi/dt = H psi + g |psi|^{2 sigma} psi - mu[psi] psi,
where the nonlocal chemical potential mu[psi] conserves the total mass.
"""

from .config import ConfigError, InitSpec, RunConfig, build_initial_state, parse_config
from .evolution import (
    BlowUpError,
    EvolveConfig,
    FrozenMuResult,
    Trajectory,
    evolve,
    evolve_linear_semigroup,
    flow_prefactor,
    frozen_mu_iteration,
    step_explicit_mu,
    step_projection,
    subflow_kinetic_rotation,
    subflow_local,
)
from .functionals import (
    DiagRecord,
    chemical_potential,
    energy,
    inner,
    l2_distance,
    l2_norm,
    mass,
    rotation_expectation,
    sigma_norm,
    stationary_residual,
)
from .grid import (
    ComplexField,
    Grid,
    fft_forward,
    fft_inverse,
    make_grid,
    spectral_derivative,
)
from .ground_state import (
    GroundStateResult,
    compute_ground_state,
    distance_mod_phase,
    gauge_fix,
    gaussian_seed,
    omega_limit_probe,
)
from .io import read_snapshot, read_timeseries, write_snapshot, write_timeseries
from .modes import (
    EigenIndex,
    ModeState,
    ModeTrajectory,
    decompose,
    eigenfunction,
    eigenvalue,
    level_indices,
    mode_state,
    ode_oracle,
    smallest_eigenvalue_in_datum,
    synthesize,
)
from .operators import (
    PhysParams,
    apply_H,
    apply_potential,
    apply_rotation,
    check_commutators,
    coercivity_constant,
)

__version__ = "0.1.0"
