"""Export run, phase-match and noise reports to JSON.

Floats are written through ``%.10e`` and keys are sorted so that repeated runs
produce byte-identical files. Non-finite values become ``null``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from squeezetools.core.constants import FORMAT_VERSION, NANOSECOND, PICOJOULE
from squeezetools.core.models import (
    DerivedRates,
    NoiseReport,
    PhaseMatchReport,
    RunResult,
    ThermalEquivalents,
)
from squeezetools.utils.config import GRID_RULE, RunConfig, config_to_dict


def _number(value: float) -> float | None:
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.10e}")


def _clean(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, complex):
        return {"re": _number(value.real), "im": _number(value.imag)}
    if isinstance(value, (int,)):
        return value
    if isinstance(value, float):
        return _number(value)
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return _number(value)


def rates_to_dict(rates: DerivedRates) -> dict:
    return {
        "gamma_coupling": rates.gamma_coupling,
        "m_scattering": rates.m_scattering,
        "gamma_total": rates.gamma_total,
        "q_loaded": rates.q_loaded,
        "dwell_time": rates.dwell_time,
        "escape_efficiency": rates.escape_efficiency,
        "omega": rates.omega,
    }


def phase_match_to_dict(report: PhaseMatchReport | None) -> dict | None:
    if report is None:
        return None
    return {
        "delta_res": report.delta_res,
        "delta_spm": report.delta_spm,
        "delta_xpm": report.delta_xpm,
        "delta_net": report.delta_net,
    }


def _thermal_to_dict(thermal: ThermalEquivalents) -> dict:
    return {
        "reported": {"n_bar": thermal.n_bar_reported, "r_prime": thermal.r_prime_reported},
        "williamson": {"n_bar": thermal.n_bar_williamson, "r_prime": thermal.r_prime_williamson},
    }


def result_to_dict(result: RunResult, config: RunConfig) -> dict:
    """Convert a RunResult to a serializable dict (dense tables excluded)."""
    decomposition = result.decomposition
    squeezing = result.squeezing
    modes = []
    for i, mode in enumerate(decomposition.modes):
        entry = {
            "index": i,
            "n_lambda": mode.n_lambda,
            "m_lambda": mode.m_lambda,
            "r_pure": mode.r_pure,
            "takagi_value": mode.takagi_value,
            "takagi_profile_fidelity": decomposition.takagi_fidelities[i],
        }
        if i < len(result.thermal):
            entry["thermal_equivalents"] = _thermal_to_dict(result.thermal[i])
        modes.append(entry)

    data = {
        "format_version": FORMAT_VERSION,
        "config": config_to_dict(config),
        "energy_pJ": result.energy / PICOJOULE,
        "grid": {
            "t_start": result.grid.t_start,
            "t_end": result.grid.t_end,
            "n_points": result.grid.n_points,
            "rule": GRID_RULE if config.grid.auto else "explicit",
        },
        "derived": {
            "coupling_lambda": result.coupling,
            "drive_power": result.drive.power,
            "beta_d": result.drive.beta_d,
            "delta_net": result.drive.delta_net,
            "rates": {
                "drive": rates_to_dict(result.drive_rates),
                "signal": rates_to_dict(result.signal_rates),
                "pump": rates_to_dict(result.pump_rates),
            },
        },
        "phase_match": phase_match_to_dict(result.phase_match),
        "metrics": {
            "v_squeezed_db": squeezing.v_squeezed_db,
            "v_antisqueezed_db": squeezing.v_antisqueezed_db,
            "v_anti_pure_db": squeezing.v_anti_pure_db,
            "pulse_fwhm_ns": squeezing.pulse_fwhm / NANOSECOND,
            "multi_peak": squeezing.multi_peak,
            "schmidt_number": decomposition.schmidt_number,
            "schmidt_number_defined": decomposition.schmidt_number is not None,
            "total_photons": decomposition.total_photons,
            "eta_escape": decomposition.eta_escape,
        },
        "modes": modes,
        "diagnostics": dict(result.diagnostics),
    }
    return _clean(data)


def noise_to_dict(report: NoiseReport, config: RunConfig) -> dict:
    return _clean({
        "format_version": FORMAT_VERSION,
        "config": config_to_dict(config),
        "noise": {
            "delta": report.delta,
            "linewidth": report.linewidth,
            "suppression": report.suppression,
            "snr": report.snr,
            "snr_structural": report.snr_structural,
            "xi": report.xi,
            "bs_fwm_modeled": report.bs_fwm_modeled,
            "note": "only drive-induced spontaneous FWM is modeled; Bragg-scattering FWM "
                    "loss is not included",
        },
    })


def phase_match_document(power: float, report: PhaseMatchReport | None,
                         config: RunConfig) -> dict:
    return _clean({
        "format_version": FORMAT_VERSION,
        "config": config_to_dict(config),
        "drive_power": power,
        "phase_match": phase_match_to_dict(report),
    })


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(data: dict, output_path: Path):
    """Write a report dict with sorted keys."""
    with open(output_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(data))


def export_run_json(result: RunResult, config: RunConfig, output_path: Path):
    write_json(result_to_dict(result, config), output_path)
