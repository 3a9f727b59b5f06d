"""Config grammar, CSV schema, GPSN binary format, CLI behavior."""

import os
import subprocess
import sys

import numpy as np
import pytest

from rotgpe import DiagRecord, mass, read_snapshot, write_snapshot
from rotgpe.cli import main
from rotgpe.config import ConfigError, build_initial_state, parse_config
from rotgpe.io import (
    CSV_HEADER,
    SnapshotFormatError,
    format_timeseries,
    parse_snapshot,
    read_timeseries,
    snapshot_bytes,
    write_timeseries,
)
from rotgpe.selfcheck import random_envelope_field

MINIMAL = """
[grid]
d = 2
n = 128 128
L = 8 8

[phys]
omega = 1 1
Omega = 0
g = 0
sigma = 1
gamma = 1

[evolve]
dt = 1e-3
T = 1
"""


class TestParseConfig:
    def test_minimal_accepted(self):
        rc = parse_config(MINIMAL)
        assert rc.grid.n == (128, 128)
        assert rc.phys.gamma == 1.0
        assert rc.evolve.dt == 1e-3
        assert rc.init.kind == "gaussian"

    def test_defaults_only(self):
        rc = parse_config("")
        assert rc.grid.n == (128, 128)
        assert rc.output_dir == "out"

    def test_zero_gamma_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(MINIMAL.replace("gamma = 1", "gamma = 0"))

    def test_attractive_supercritical_rejected(self):
        text = MINIMAL.replace("d = 2", "d = 3").replace("n = 128 128", "n = 32") \
            .replace("L = 8 8", "L = 6").replace("omega = 1 1", "omega = 1") \
            .replace("g = 0", "g = -1")
        with pytest.raises(ConfigError, match="sigma < 2/d"):
            parse_config(text)

    def test_unknown_key_reports_line(self):
        bad = MINIMAL + "\nwhatever = 3\n"
        with pytest.raises(ConfigError, match="line"):
            parse_config(bad)

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[nope]\n")

    def test_type_mismatch_reports_line(self):
        with pytest.raises(ConfigError, match="line 3"):
            parse_config("[grid]\nd = 2\nn = lots\n")

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ConfigError, match="power of two"):
            parse_config("[grid]\nn = 100\n")

    def test_scalar_broadcast(self):
        rc = parse_config("[grid]\nd = 3\nn = 32\nL = 6\n[phys]\nomega = 2\n")
        assert rc.grid.n == (32, 32, 32)
        assert rc.phys.omega == (2.0, 2.0, 2.0)

    def test_override_beats_file_per_key(self):
        base = parse_config(MINIMAL)
        for key, value, probe in [
            ("g", "2.5", lambda rc: rc.phys.g == 2.5),
            ("gamma", "0.5", lambda rc: rc.phys.gamma == 0.5),
            ("Omega", "0.25", lambda rc: rc.phys.Omega == 0.25),
            ("sigma", "0.5", lambda rc: rc.phys.sigma == 0.5),
            ("dt", "5e-4", lambda rc: rc.evolve.dt == 5e-4),
            ("T", "2", lambda rc: rc.evolve.T == 2.0),
            ("scheme", "explicit_mu", lambda rc: rc.evolve.scheme == "explicit_mu"),
            ("record_every", "7", lambda rc: rc.evolve.record_every == 7),
            ("n", "64 64", lambda rc: rc.grid.n == (64, 64)),
            ("L", "4", lambda rc: rc.grid.L == (4.0, 4.0)),
            ("omega", "2 2", lambda rc: rc.phys.omega == (2.0, 2.0)),
            ("mass", "2", lambda rc: rc.phys.mass_target == 2.0),
            ("init", "eigenmode 2 1", lambda rc: rc.init.kind == "eigenmode"),
            ("seed", "7", lambda rc: rc.seed == 7),
            ("dir", "elsewhere", lambda rc: rc.output_dir == "elsewhere"),
        ]:
            rc = parse_config(MINIMAL, {key: value})
            assert probe(rc), key
            assert not probe(base) or key in ("scheme",), key

    def test_init_specs(self):
        for text, kind in [("gaussian", "gaussian"),
                           ("eigenmode 3 -2", "eigenmode"),
                           ("mix 1 0 0.8 3 0 0.6", "mix"),
                           ("vortex_seed", "vortex_seed"),
                           ("file some/path.gpsn", "file")]:
            rc = parse_config(f"[init]\ninit = {text}\n")
            assert rc.init.kind == kind
        with pytest.raises(ConfigError):
            parse_config("[init]\ninit = eigenmode 2\n")
        with pytest.raises(ConfigError):
            parse_config("[init]\ninit = warp\n")


class TestBuildInitialState:
    def test_gaussian_unit_mass(self):
        rc = parse_config(MINIMAL)
        f = build_initial_state(rc)
        assert abs(mass(f) - 1.0) < 1e-12

    def test_mix_matches_modes(self):
        rc = parse_config(MINIMAL, {"init": "mix 1 0 0.8 3 0 0.6"})
        f = build_initial_state(rc)
        from rotgpe import EigenIndex, decompose
        ms = decompose(f, [EigenIndex(1, 0), EigenIndex(3, 0)], rc.phys)
        assert abs(ms.b[0] - 0.8) < 1e-9
        assert abs(ms.b[1] - 0.6) < 1e-9

    def test_vortex_seed_deterministic(self):
        rc1 = build_initial_state(parse_config(MINIMAL, {"init": "vortex_seed",
                                                         "seed": "5"}))
        rc2 = build_initial_state(parse_config(MINIMAL, {"init": "vortex_seed",
                                                         "seed": "5"}))
        rc3 = build_initial_state(parse_config(MINIMAL, {"init": "vortex_seed",
                                                         "seed": "6"}))
        assert np.array_equal(rc1.data, rc2.data)
        assert not np.array_equal(rc1.data, rc3.data)

    def test_file_init_roundtrip(self, tmp_path, grid128, rng):
        f = random_envelope_field(grid128, rng)
        path = tmp_path / "state.gpsn"
        write_snapshot(f, 0.0, path)
        rc = parse_config(MINIMAL, {"init": f"file {path}"})
        g = build_initial_state(rc)
        assert abs(mass(g) - 1.0) < 1e-12  # rescaled to target


class TestTimeseries:
    def rec(self, t):
        return DiagRecord(t=t, mass=1.0, energy=2.0 / 3.0, mu=np.pi, lz=0.0,
                          sigma_norm=2.0, diss_rate=0.1, mass_drift=-1e-16)

    def test_header_exact(self):
        text = format_timeseries([self.rec(0.0)])
        assert text.splitlines()[0] == CSV_HEADER
        assert CSV_HEADER == "t,mass,energy,mu,lz,sigma_norm,diss_rate,mass_drift"

    def test_full_precision_roundtrip(self, tmp_path):
        recs = [self.rec(0.0), self.rec(1e-3)]
        path = tmp_path / "ts.csv"
        write_timeseries(recs, path)
        back = read_timeseries(path)
        assert back[0].mu == np.pi  # 17 significant digits reproduce doubles
        assert back[0].energy == 2.0 / 3.0
        assert back[1].t == 1e-3

    def test_row_count(self, tmp_path, grid64, rng, p_free):
        from rotgpe import EvolveConfig, evolve
        f = random_envelope_field(grid64, rng)
        traj = evolve(f, p_free, EvolveConfig(dt=1e-3, T=0.1, scheme="projection",
                                              record_every=10))
        path = tmp_path / "ts.csv"
        write_timeseries(traj.records, path)
        rows = path.read_text().strip().splitlines()
        assert len(rows) - 1 == 100 // 10 + 1


class TestSnapshots:
    def test_roundtrip_bit_exact(self, grid128, rng):
        f = random_envelope_field(grid128, rng)
        buf = snapshot_bytes(f, 0.625)
        t, g = parse_snapshot(buf)
        assert t == 0.625
        assert np.array_equal(g.data, f.data)
        assert snapshot_bytes(g, t) == buf

    def test_header_size_example(self):
        from rotgpe import ComplexField, make_grid
        g = make_grid(2, 8, 4.0)
        f = ComplexField(g, np.zeros(g.shape, dtype=complex))
        buf = snapshot_bytes(f, 0.0)
        assert len(buf) == 4 + 4 + 4 + 8 + 16 + 8 + 1024

    def test_bad_magic(self):
        with pytest.raises(SnapshotFormatError, match="magic"):
            parse_snapshot(b"NOPE" + b"\x00" * 100)

    def test_bad_version(self, grid64):
        from rotgpe import ComplexField
        f = ComplexField(grid64, np.zeros(grid64.shape, dtype=complex))
        buf = bytearray(snapshot_bytes(f, 0.0))
        buf[4] = 9
        with pytest.raises(SnapshotFormatError, match="version"):
            parse_snapshot(bytes(buf))

    def test_truncation(self, grid64):
        from rotgpe import ComplexField
        f = ComplexField(grid64, np.zeros(grid64.shape, dtype=complex))
        buf = snapshot_bytes(f, 0.0)
        with pytest.raises(SnapshotFormatError, match="truncated"):
            parse_snapshot(buf[:-8])

    def test_file_roundtrip(self, tmp_path, grid64, rng):
        f = random_envelope_field(grid64, rng)
        path = tmp_path / "snap.gpsn"
        write_snapshot(f, 2.5, path)
        t, g = read_snapshot(path)
        assert t == 2.5
        assert np.array_equal(g.data, f.data)


def run_cli(args, cwd):
    return main([*args])


class TestCli:
    def test_spectrum_rows(self, capsys):
        code = main(["spectrum", "--levels", "3", "--Omega", "0.5"])
        assert code == 0
        rows = [ln.split() for ln in capsys.readouterr().out.splitlines()
                if ln and not ln.startswith("#")]
        parsed = [(int(k), int(m), float(lam)) for k, m, lam in rows]
        assert parsed == [(1, 0, 1.0), (2, -1, 1.5), (2, 1, 2.5),
                          (3, -2, 2.0), (3, 0, 3.0), (3, 2, 4.0)]

    def test_config_error_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[phys]\ngamma = 0\n")
        code = main(["evolve", "--config", str(cfg)])
        assert code == 2

    def test_blowup_exit_1(self, tmp_path):
        out = tmp_path / "boom"
        code = main(["evolve", "--Omega", "40", "--dt", "0.5", "--T", "25",
                     "--scheme", "explicit_mu", "--n", "64 64",
                     "--dir", str(out)])
        assert code == 1

    def test_evolve_writes_outputs(self, tmp_path):
        out = tmp_path / "run"
        code = main(["evolve", "--T", "0.02", "--dt", "1e-3", "--n", "64 64",
                     "--record_every", "10", "--snapshot_every", "10",
                     "--dir", str(out)])
        assert code == 0
        assert (out / "timeseries.csv").exists()
        assert (out / "final.gpsn").exists()
        recs = read_timeseries(out / "timeseries.csv")
        assert len(recs) == 3  # steps 0, 10, 20

    def test_determinism_bit_identical_csv(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            code = main(["evolve", "--T", "0.05", "--dt", "1e-3", "--n", "64 64",
                         "--init", "vortex_seed", "--seed", "3",
                         "--g", "3", "--dir", str(out)])
            assert code == 0
            outs.append((out / "timeseries.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_selfcheck_exit_0(self, capsys):
        assert main(["selfcheck"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out

    def test_groundstate_command(self, tmp_path, capsys):
        out = tmp_path / "gs"
        code = main(["groundstate", "--n", "64 64", "--tol", "1e-7",
                     "--dir", str(out)])
        assert code == 0
        assert (out / "groundstate.gpsn").exists()
        assert "converged" in capsys.readouterr().out

    def test_iterate_command(self, tmp_path, capsys):
        out = tmp_path / "it"
        code = main(["iterate", "--n", "64 64", "--T", "0.2", "--dt", "1e-3",
                     "--g", "1", "--iterations", "3",
                     "--init", "vortex_seed", "--dir", str(out)])
        assert code == 0
        text = capsys.readouterr().out
        assert "iterate 1" in text and "explicit-mu" in text

    def test_linear_demo_command(self, tmp_path, capsys):
        out = tmp_path / "lin"
        code = main(["linear-demo", "--n", "64 64", "--T", "0.5", "--dt", "1e-3",
                     "--init", "mix 1 0 0.8 3 0 0.6", "--dir", str(out)])
        assert code == 0
        assert (out / "modes.csv").exists()
        text = capsys.readouterr().out
        assert "smallest eigenvalue in datum: 1" in text
