"""Single-run orchestration: parameters → pump → Green table → moments → modes."""

from __future__ import annotations

import logging
import math

import numpy as np

from squeezetools.analyzer.modes import decompose, squeezing_report, thermal_equivalents
from squeezetools.analyzer.moments import intracavity_moments, output_moments
from squeezetools.analyzer.noise_budget import noise_report
from squeezetools.core.constants import MILLIWATT, NANOSECOND, PICOJOULE
from squeezetools.core.errors import ConfigError
from squeezetools.core.models import (
    DerivedRates,
    DriveConfig,
    ModeLabel,
    NoiseReport,
    PhaseMatchReport,
    RunResult,
)
from squeezetools.core.params import (
    derive_rates,
    drive_amplitude,
    nonlinear_coupling,
    phase_match_power,
    spm_xpm_report,
    validate_resonator,
)
from squeezetools.dynamics.green import coupling_matrix, solve_green
from squeezetools.dynamics.pump import gaussian_pulse, pump_photon_budget, solve_pump
from squeezetools.utils.config import (
    RunConfig,
    mode_spec,
    pulse_fwhm,
    resolve_grid,
    resonator_spec,
)

logger = logging.getLogger(__name__)


def mode_rates(config: RunConfig) -> dict[ModeLabel, DerivedRates]:
    convention = config.solver.dwell_convention
    return {
        label: derive_rates(mode_spec(config, label), convention)
        for label in ModeLabel
    }


def drive_setup(config: RunConfig) -> tuple[DriveConfig, PhaseMatchReport | None, float]:
    """Drive power, amplitude and net detuning; returns (drive, phase-match report, Λ)."""
    spec = validate_resonator(resonator_spec(config))
    rates = mode_rates(config)
    signal = mode_spec(config, ModeLabel.SIGNAL)
    coupling = nonlinear_coupling(spec, signal.omega)
    drive_rates = rates[ModeLabel.DRIVE]
    block = config.drive

    if block.phase_match:
        power = phase_match_power(block.delta_res_rad_per_s, coupling, drive_rates)
        beta_d = drive_amplitude(power, drive_rates)
        report = spm_xpm_report(beta_d, coupling, block.delta_res_rad_per_s)
        delta_net = report.delta_net
    else:
        power = block.power_mW * MILLIWATT
        beta_d = drive_amplitude(power, drive_rates)
        report = None
        delta_net = block.delta_net_rad_per_s
    return DriveConfig(power=power, delta_net=delta_net, beta_d=beta_d), report, coupling


def run_simulation(
    config: RunConfig,
    energy_pj: float | None = None,
    reference_profile: np.ndarray | None = None,
) -> RunResult:
    """Full pipeline for one pulse energy (pJ); defaults to ``pulse.energy_pJ``."""
    if energy_pj is None:
        energy_pj = config.pulse.energy_pJ
    if energy_pj is None:
        raise ConfigError("no pulse energy given (pulse.energy_pJ or --energy)")
    energy = energy_pj * PICOJOULE

    spec = validate_resonator(resonator_spec(config))
    rates = mode_rates(config)
    signal, pump_rates = rates[ModeLabel.SIGNAL], rates[ModeLabel.PUMP]
    drive, report, coupling = drive_setup(config)

    fwhm = pulse_fwhm(config, signal)
    grid = resolve_grid(config, fwhm, signal, pump_rates)
    logger.info("run at %.4g pJ: grid %d points over [%.4e, %.4e] s, pulse fwhm %.4e s",
                energy_pj, grid.n_points, grid.t_start, grid.t_end, fwhm)

    omega_p = mode_spec(config, ModeLabel.PUMP).omega
    alpha_in = gaussian_pulse(energy, fwhm, config.pulse.center_ns * NANOSECOND,
                              grid, omega_p, spec.v_g)
    pump = solve_pump(alpha_in, pump_rates, coupling, drive.beta_d, grid, spec.v_g,
                      config.solver.pump_tolerance)
    series = coupling_matrix(pump, drive.delta_net, coupling, signal.gamma_total)
    green = solve_green(series)
    kernels = output_moments(green, signal.gamma_coupling, signal.gamma_total)
    decomposition = decompose(kernels, signal.escape_efficiency, config.solver.mode_count)
    squeezing = squeezing_report(decomposition, grid, reference_profile)
    thermal = [
        thermal_equivalents(mode.n_lambda, mode.m_lambda, signal.escape_efficiency)
        for mode in decomposition.modes
    ]

    budget = pump_photon_budget(alpha_in, pump.beta_p, pump_rates, grid, spec.v_g)
    trace = float(np.real(np.sum(grid.weights * np.diag(kernels.kernel_n))))
    flux = 2.0 * signal.gamma_coupling * intracavity_moments(series).n_c
    flux_scale = max(float(np.max(flux)), np.finfo(float).tiny)
    modes = decomposition.modes
    diagnostics = {
        "peak_g_over_gamma_s": float(np.max(np.abs(pump.g))) / signal.gamma_total,
        "peak_xpm_over_gamma_s": float(2.0 * coupling * np.max(np.abs(pump.beta_p)) ** 2)
        / signal.gamma_total,
        "loss_limit_db": -10.0 * math.log10(1.0 - signal.escape_efficiency)
        if signal.escape_efficiency < 1.0 else math.inf,
        "photon_number_trace": trace,
        "photon_number_modes": decomposition.total_photons,
        "emission_flux_error": float(np.max(np.abs(np.diag(kernels.kernel_n).real - flux)))
        / flux_scale,
        "dominant_ratio": modes[0].n_lambda / modes[1].n_lambda
        if len(modes) > 1 and modes[1].n_lambda > 0.0 else math.inf,
        "pump_richardson_error": pump.richardson_error,
        "pump_budget_imbalance": budget.imbalance,
        "pulse_fwhm_s": fwhm,
    }
    logger.info("V- = %.4f dB, V+ = %.4f dB, K = %s",
                squeezing.v_squeezed_db, squeezing.v_antisqueezed_db,
                decomposition.schmidt_number)
    return RunResult(
        energy=energy,
        grid=grid,
        signal_rates=signal,
        pump_rates=pump_rates,
        drive_rates=rates[ModeLabel.DRIVE],
        coupling=coupling,
        drive=drive,
        phase_match=report,
        pump=pump,
        green=green,
        kernels=kernels,
        decomposition=decomposition,
        squeezing=squeezing,
        thermal=thermal,
        diagnostics=diagnostics,
    )


def run_noise(config: RunConfig) -> NoiseReport:
    """Noise budget at the configured drive point; Q from ``noise.q_mode``."""
    spec = validate_resonator(resonator_spec(config))
    drive, _, _ = drive_setup(config)
    label = ModeLabel(config.noise.q_mode)
    rates = mode_rates(config)[label]
    omega_d = mode_spec(config, ModeLabel.DRIVE).omega
    return noise_report(
        spec,
        omega=omega_d,
        q=rates.q_loaded,
        power_d=drive.power,
        power_p=config.noise.pump_power_mW * MILLIWATT,
    )
