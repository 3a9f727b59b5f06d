"""Offline plotting for rotgpe diagnostics CSV and GPSN snapshot files."""

from .gpsn import GpsnError, Snapshot, parse, read, to_bytes
from .plots import KINDS, PlotJob, plot, winding_number
from .timeseries import Table, TimeseriesError, read_diagnostics, read_table

__version__ = "0.1.0"
