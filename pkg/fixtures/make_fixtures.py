"""Regenerate the shared fixture files consumed by the gpeviz test suite.

Run from the repository root:

    python3 fixtures/make_fixtures.py

Outputs (deterministic):
    fixtures/linear_demo/timeseries.csv   damped two-mode run, g = 0
    fixtures/linear_demo/modes.csv        PDE vs oracle coefficient moduli
    fixtures/m1_mode.gpsn                 winding-1 eigenmode snapshot
"""

import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))

from rotgpe.cli import main as rotgpe_main  # noqa: E402
from rotgpe import EigenIndex, PhysParams, eigenfunction, make_grid  # noqa: E402
from rotgpe.io import write_snapshot  # noqa: E402


def run() -> int:
    demo_dir = os.path.join(HERE, "linear_demo")
    code = rotgpe_main([
        "linear-demo",
        "--init", "mix 1 0 0.8 3 0 0.6",
        "--T", "5", "--dt", "1e-3", "--record_every", "20",
        "--dir", demo_dir,
    ])
    if code != 0:
        return code

    grid = make_grid(2, 128, 8.0)
    p = PhysParams(omega=(1.0, 1.0), Omega=0.5, gamma=1.0)
    phi = eigenfunction(EigenIndex(2, 1), grid, p)
    write_snapshot(phi, 0.0, os.path.join(HERE, "m1_mode.gpsn"))
    return 0


if __name__ == "__main__":
    sys.exit(run())
