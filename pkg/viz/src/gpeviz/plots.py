"""Offline plots of solver outputs: diagnostics curves, density and phase
heatmaps, mode-coefficient decay.

Pure consumers of the CSV/GPSN formats; no solver logic is duplicated here.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .gpsn import read as read_gpsn
from .timeseries import TimeseriesError, read_diagnostics, read_table

KINDS = ("diagnostics", "density", "phase", "modes")


@dataclass(frozen=True)
class PlotJob:
    """One rendering task: input file(s), plot kind, output image path."""

    inputs: tuple[str, ...]
    kind: str
    output: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"plot kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")


def plot_diagnostics(csv_path, output) -> None:
    """E(t) and mu(t) on one axis, mass drift on a second."""
    table = read_diagnostics(csv_path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(table["t"], table["energy"], label="energy", color="tab:blue")
    ax.plot(table["t"], table["mu"], label="chemical potential",
            color="tab:orange")
    ax.set_xlabel("t")
    ax.set_ylabel("E, mu")
    ax2 = ax.twinx()
    ax2.plot(table["t"], table["mass_drift"], label="mass drift",
             color="tab:green", alpha=0.6)
    ax2.set_ylabel("mass drift")
    lines, labels = ax.get_legend_handles_labels()
    l2, lb2 = ax2.get_legend_handles_labels()
    ax.legend(lines + l2, labels + lb2, loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)


def _slice_2d(snap):
    if snap.d == 2:
        return snap.data
    return snap.data[:, :, snap.n[2] // 2]


def plot_density(gpsn_path, output) -> None:
    snap = read_gpsn(gpsn_path)
    rho = np.abs(_slice_2d(snap)) ** 2
    fig, ax = plt.subplots(figsize=(5.4, 4.5))
    extent = (-snap.L[0], snap.L[0], -snap.L[1], snap.L[1])
    im = ax.imshow(rho.T, origin="lower", extent=extent, cmap="viridis")
    fig.colorbar(im, ax=ax, label=r"$|\psi|^2$")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"density at t = {snap.t:g}")
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)


def plot_phase(gpsn_path, output) -> None:
    snap = read_gpsn(gpsn_path)
    field = _slice_2d(snap)
    phase = np.angle(field)
    # mask the phase where the density is negligible
    rho = np.abs(field) ** 2
    phase = np.where(rho > rho.max() * 1e-8, phase, np.nan)
    fig, ax = plt.subplots(figsize=(5.4, 4.5))
    extent = (-snap.L[0], snap.L[0], -snap.L[1], snap.L[1])
    im = ax.imshow(phase.T, origin="lower", extent=extent, cmap="twilight",
                   vmin=-np.pi, vmax=np.pi)
    fig.colorbar(im, ax=ax, label="arg psi")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"phase at t = {snap.t:g}")
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)


def plot_modes(csv_path, output) -> None:
    """Semilog decay of mode-coefficient moduli (linear-demo modes.csv)."""
    table = read_table(csv_path)
    if table.columns[0] != "t" or len(table.columns) < 2:
        raise TimeseriesError(f"{csv_path}: expected a t column plus mode columns")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name in table.columns[1:]:
        series = table[name]
        if np.all(series <= 0):
            continue
        style = "--" if name.startswith("ode_") else "-"
        ax.semilogy(table["t"], np.maximum(series, 1e-300), style,
                    label=name, linewidth=1.1)
    ax.set_xlabel("t")
    ax.set_ylabel("|b|")
    ax.legend(fontsize=7, ncols=2)
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)


def plot(job: PlotJob) -> str:
    """Render the job; returns the output path.  No file is written when the
    input is malformed."""
    if job.kind == "diagnostics":
        plot_diagnostics(job.inputs[0], job.output)
    elif job.kind == "density":
        plot_density(job.inputs[0], job.output)
    elif job.kind == "phase":
        plot_phase(job.inputs[0], job.output)
    else:
        plot_modes(job.inputs[0], job.output)
    return job.output


def winding_number(snap_or_path, radius: float = 1.0) -> int:
    """Total phase winding of a 2D snapshot along a centered circle,
    in units of 2 pi.  Diagnostic used to sanity-check vortex content."""
    snap = snap_or_path if hasattr(snap_or_path, "data") else read_gpsn(snap_or_path)
    theta = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
    x = radius * np.cos(theta)
    y = radius * np.sin(theta)
    ix = np.clip(np.round((x + snap.L[0]) / (2 * snap.L[0] / snap.n[0])).astype(int),
                 0, snap.n[0] - 1)
    iy = np.clip(np.round((y + snap.L[1]) / (2 * snap.L[1] / snap.n[1])).astype(int),
                 0, snap.n[1] - 1)
    field = _slice_2d(snap)
    phases = np.angle(field[ix, iy])
    jumps = np.diff(np.concatenate([phases, phases[:1]]))
    jumps = (jumps + np.pi) % (2.0 * np.pi) - np.pi
    return int(np.round(jumps.sum() / (2.0 * np.pi)))
