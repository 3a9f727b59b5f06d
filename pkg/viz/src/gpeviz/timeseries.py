"""Reader for the solver's diagnostics CSV.

The schema is fixed: ``t,mass,energy,mu,lz,sigma_norm,diss_rate,mass_drift``
with full-precision decimal floats.  Mode-coefficient tables from the linear
demo share the leading ``t`` column with arbitrary further columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIAG_HEADER = "t,mass,energy,mu,lz,sigma_norm,diss_rate,mass_drift"


class TimeseriesError(ValueError):
    """Malformed or empty CSV input."""


@dataclass
class Table:
    columns: list[str]
    values: np.ndarray  # shape (rows, columns)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]


def read_table(path, expect_header: str | None = None) -> Table:
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except UnicodeDecodeError:
        raise TimeseriesError(f"{path}: not a text CSV file")
    if not lines:
        raise TimeseriesError(f"{path}: empty CSV")
    header = lines[0]
    if expect_header is not None and header != expect_header:
        raise TimeseriesError(f"{path}: unexpected header {header!r}")
    columns = header.split(",")
    if len(lines) < 2:
        raise TimeseriesError(f"{path}: no data rows")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(columns):
            raise TimeseriesError(f"{path}: ragged row {ln!r}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError:
            raise TimeseriesError(f"{path}: non-numeric row {ln!r}")
    return Table(columns=columns, values=np.array(rows))


def read_diagnostics(path) -> Table:
    return read_table(path, expect_header=DIAG_HEADER)
