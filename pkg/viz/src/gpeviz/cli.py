"""gpeviz: render solver CSV/GPSN outputs to image files.

Usage:
    gpeviz diagnostics timeseries.csv -o diag.png
    gpeviz density snapshot.gpsn -o density.png
    gpeviz phase snapshot.gpsn -o phase.png
    gpeviz modes modes.csv -o modes.png

Exit codes: 0 success, 1 malformed input (no image written), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .gpsn import GpsnError
from .plots import KINDS, PlotJob, plot
from .timeseries import TimeseriesError


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gpeviz", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("input", help="CSV or GPSN input file")
    ap.add_argument("-o", "--output", required=True, help="image file to write")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    job = PlotJob(inputs=(args.input,), kind=args.kind, output=args.output)
    try:
        plot(job)
    except (GpsnError, TimeseriesError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
