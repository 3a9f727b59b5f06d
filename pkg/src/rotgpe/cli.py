"""Command-line driver.

Subcommands: evolve, groundstate, spectrum, linear-demo, iterate, selfcheck.
Exit codes: 0 success, 1 runtime failure (including blow-up), 2 config error.
Every config key can be overridden with ``--key value``; flags beat file
values in all cases.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import modes
from .config import ConfigError, build_initial_state, parse_config, _DEFAULTS
from .evolution import BlowUpError, EvolveConfig, evolve, frozen_mu_iteration
from .functionals import l2_distance
from .ground_state import compute_ground_state
from .io import write_snapshot, write_timeseries
from .operators import ROTATION_SIGN
from .selfcheck import run_selfcheck

_OVERRIDABLE = sorted(key for (_, key) in _DEFAULTS)


def _add_override_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", type=str, default=None, help="config file path")
    for key in _OVERRIDABLE:
        sp.add_argument(f"--{key}", type=str, default=None,
                        help=f"override config key {key!r}")


def _load_config(args, extra: dict | None = None):
    text = ""
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    overrides = {key: getattr(args, key) for key in _OVERRIDABLE
                 if getattr(args, key, None) is not None}
    if extra:
        overrides.update(extra)
    return parse_config(text, overrides)


def _outdir(rc) -> str:
    os.makedirs(rc.output_dir, exist_ok=True)
    return rc.output_dir


def cmd_evolve(args) -> int:
    rc = _load_config(args)
    out = _outdir(rc)
    psi0 = build_initial_state(rc)
    traj = evolve(psi0, rc.phys, rc.evolve)
    write_timeseries(traj.records, os.path.join(out, "timeseries.csv"))
    for i, (t, f) in enumerate(traj.snapshots):
        write_snapshot(f, t, os.path.join(out, f"snapshot_{i:05d}.gpsn"))
    write_snapshot(traj.final_state, traj.records[-1].t,
                   os.path.join(out, "final.gpsn"))
    last = traj.records[-1]
    print(f"evolved to t={last.t:g}: mass={last.mass:.12g} energy={last.energy:.12g} "
          f"mu={last.mu:.12g}")
    return 0


def cmd_groundstate(args) -> int:
    rc = _load_config(args)
    out = _outdir(rc)
    init = build_initial_state(rc)
    res = compute_ground_state(rc.phys, rc.grid, init, tol=args.tol,
                               max_T=args.max_T)
    write_snapshot(res.state, 0.0, os.path.join(out, "groundstate.gpsn"))
    status = "converged" if res.converged else "NOT converged"
    print(f"{status}: E={res.energy:.12g} mu={res.mu:.12g} "
          f"residual={res.residual:.3e} (t={res.elapsed_time:g}, dt={res.dt_final:g})")
    return 0


def cmd_spectrum(args) -> int:
    rc = _load_config(args)
    p = rc.phys
    if not p.isotropic:
        raise ConfigError("spectrum requires an isotropic trap")
    w = p.omega[0]
    print("# k  m  lambda   (lambda = omega (d/2 + k - 1) + m Omega;")
    print(f"#                the Laguerre-Gaussian mode with winding {ROTATION_SIGN:+d}*m "
          "realizes each row)")
    for k in range(1, args.levels + 1):
        for m in range(-(k - 1), k, 1):
            if (k - 1 - abs(m)) % 2 != 0:
                continue
            lam = w * (p.d / 2.0 + k - 1.0) + m * p.Omega
            print(f"{k:4d} {m:4d} {lam:.17g}")
    return 0


def cmd_linear_demo(args) -> int:
    rc = _load_config(args, {"g": "0"})
    out = _outdir(rc)
    psi0 = build_initial_state(rc)
    cfg = rc.evolve
    snap_every = cfg.snapshot_every or max(1, cfg.n_steps // 50)
    cfg = EvolveConfig(dt=cfg.dt, T=cfg.T, scheme=cfg.scheme,
                       record_every=cfg.record_every, snapshot_every=snap_every)
    traj = evolve(psi0, rc.phys, cfg)
    write_timeseries(traj.records, os.path.join(out, "timeseries.csv"))

    # compare against the finite-mode oracle on the first few levels
    idx = [i for k in range(1, 5) for i in modes.level_indices(k, rc.phys.d)]
    ms0 = modes.decompose(psi0, idx, rc.phys)
    oracle = modes.ode_oracle(ms0, T=cfg.n_steps * cfg.dt)
    abs_oracle = np.abs(oracle.coeffs)
    rows = []
    worst = 0.0
    for t, f in traj.snapshots:
        ms_t = modes.decompose(f, idx, rc.phys)
        o_t = np.array([np.interp(t, oracle.times, abs_oracle[:, j])
                        for j in range(len(idx))])
        rows.append((t, np.abs(ms_t.b), o_t))
        worst = max(worst, float(np.max(np.abs(np.abs(ms_t.b) - o_t))))
    header = ["t"]
    header += [f"pde_abs_b_{i.k}_{i.m}" for i in idx]
    header += [f"ode_abs_b_{i.k}_{i.m}" for i in idx]
    with open(os.path.join(out, "modes.csv"), "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for t, pde, ode in rows:
            vals = [t, *pde.tolist(), *ode.tolist()]
            fh.write(",".join(f"{v:.17g}" for v in vals) + "\n")
    lam_star = modes.smallest_eigenvalue_in_datum(ms0)
    print(f"captured mass of datum in first 4 levels: {ms0.captured:.12g}")
    print(f"smallest eigenvalue in datum: {lam_star:.12g}")
    print(f"final mu: {traj.records[-1].mu:.12g}")
    print(f"max |pde - oracle| coefficient modulus discrepancy: {worst:.3e}")
    return 0


def cmd_iterate(args) -> int:
    rc = _load_config(args)
    out = _outdir(rc)
    psi0 = build_initial_state(rc)
    cfg = rc.evolve
    snap_every = cfg.snapshot_every or max(1, cfg.n_steps // 25)
    cfg = EvolveConfig(dt=cfg.dt, T=cfg.T, scheme=cfg.scheme,
                       record_every=1, snapshot_every=snap_every)
    result = frozen_mu_iteration(psi0, rc.phys, cfg, K=args.iterations)
    for k, inc in enumerate(result.cauchy_increments, start=1):
        print(f"iterate {k}: max_t ||psi^(k) - psi^(k-1)||_L2 = {inc:.6e}")
    final = result.trajectories[-1]
    write_timeseries(final.records, os.path.join(out, "timeseries.csv"))
    direct = evolve(psi0, rc.phys, EvolveConfig(dt=cfg.dt, T=cfg.T,
                                                scheme="explicit_mu",
                                                record_every=cfg.record_every))
    gap = l2_distance(final.final_state, direct.final_state)
    print(f"final iterate vs explicit-mu solver: ||diff||_L2 = {gap:.6e}")
    return 0


def cmd_selfcheck(args) -> int:
    ok = run_selfcheck(verbose=True)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rotgpe",
        description="Spectral solver for the damped rotating condensate flow "
                    "with a mass-conserving chemical potential.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("evolve", help="run the configured time evolution")
    _add_override_flags(sp)
    sp.set_defaults(fn=cmd_evolve)

    sp = sub.add_parser("groundstate", help="run the projection flow to a stationary state")
    _add_override_flags(sp)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-T", dest="max_T", type=float, default=None)
    sp.set_defaults(fn=cmd_groundstate)

    sp = sub.add_parser("spectrum", help="print the eigenvalue table")
    _add_override_flags(sp)
    sp.add_argument("--levels", type=int, default=3)
    sp.set_defaults(fn=cmd_spectrum)

    sp = sub.add_parser("linear-demo", help="g = 0 run plus finite-mode oracle comparison")
    _add_override_flags(sp)
    sp.set_defaults(fn=cmd_linear_demo)

    sp = sub.add_parser("iterate", help="frozen-mu iteration, prints Cauchy increments")
    _add_override_flags(sp)
    sp.add_argument("--iterations", type=int, default=6)
    sp.set_defaults(fn=cmd_iterate)

    sp = sub.add_parser("selfcheck", help="run the built-in invariant suite")
    sp.set_defaults(fn=cmd_selfcheck)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
