"""Plot-ready CSV files: sweep table, per-energy profiles, single-run profiles.

Every file starts with ``#``-prefixed metadata lines (format version and the
resolved config as one JSON line), then a header row. Numbers use ``%.10e``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from squeezetools.core.constants import FORMAT_VERSION, NANOSECOND
from squeezetools.core.models import ModeDecomposition, SweepRow, TimeGrid
from squeezetools.utils.config import RunConfig, config_to_dict


def _fmt(value) -> str:
    if value is None:
        return "nan"
    return f"{float(value):.10e}"


def _write_header(f, config: RunConfig, extra: dict | None = None):
    f.write(f"# format_version: {FORMAT_VERSION}\n")
    f.write("# config: " + json.dumps(config_to_dict(config), sort_keys=True) + "\n")
    for key, value in sorted((extra or {}).items()):
        f.write(f"# {key}: {value}\n")


def sweep_columns(mode_count: int) -> list[str]:
    return (
        ["energy_pJ"]
        + [f"n_mode_{i}" for i in range(mode_count)]
        + [
            "v_squeezed_db",
            "v_antisqueezed_db",
            "v_anti_pure_db",
            "schmidt_k",
            "fidelity_vs_lowest_energy",
            "pulse_fwhm_ns",
        ]
    )


def export_sweep_csv(rows: list[SweepRow], config: RunConfig, output_path: Path,
                     partial: bool = False):
    mode_count = config.solver.mode_count
    with open(output_path, "w", encoding="utf-8", newline="") as f:
        _write_header(f, config, {"partial": str(partial).lower()})
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(sweep_columns(mode_count))
        for row in rows:
            writer.writerow(
                [_fmt(row.energy_pj)]
                + [_fmt(n) for n in row.n_modes]
                + [
                    _fmt(row.v_squeezed_db),
                    _fmt(row.v_antisqueezed_db),
                    _fmt(row.v_anti_pure_db),
                    _fmt(row.schmidt_k),
                    _fmt(row.fidelity_vs_lowest_energy),
                    _fmt(row.pulse_fwhm_ns),
                ]
            )


def export_modes_csv(grid: TimeGrid, energies_pj: list[float], profiles: list[np.ndarray],
                     config: RunConfig, output_path: Path):
    """Dominant-mode intensity and phase per energy, one row per grid sample."""
    header = ["t_ns"]
    for energy in energies_pj:
        tag = f"{energy:.6g}pJ"
        header += [f"re_{tag}", f"im_{tag}", f"intensity_{tag}", f"phase_{tag}"]
    times = grid.times / NANOSECOND
    with open(output_path, "w", encoding="utf-8", newline="") as f:
        _write_header(f, config)
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for k, t in enumerate(times):
            row = [_fmt(t)]
            for profile in profiles:
                value = complex(profile[k])
                row += [_fmt(value.real), _fmt(value.imag), _fmt(abs(value) ** 2),
                        _fmt(np.angle(value))]
            writer.writerow(row)


def export_profiles_csv(grid: TimeGrid, decomposition: ModeDecomposition, config: RunConfig,
                        output_path: Path):
    """Profiles of all reported modes of a single run."""
    modes = decomposition.modes
    header = ["t_ns"]
    for i in range(len(modes)):
        header += [f"re_{i}", f"im_{i}"]
    times = grid.times / NANOSECOND
    with open(output_path, "w", encoding="utf-8", newline="") as f:
        _write_header(f, config)
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for k, t in enumerate(times):
            row = [_fmt(t)]
            for mode in modes:
                row += [_fmt(mode.profile[k].real), _fmt(mode.profile[k].imag)]
            writer.writerow(row)


def read_csv_table(path: Path) -> tuple[list[str], list[list[float]]]:
    """Header and numeric rows of a file written here (metadata lines skipped)."""
    with open(path, encoding="utf-8", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [[float(v) for v in row] for row in reader]
