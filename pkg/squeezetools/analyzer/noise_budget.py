"""Spurious spontaneous four-wave mixing budget.

The strong drive also seeds unwanted SFWM into the signal resonance. Its
self-phase modulation detunes that process by δ, which suppresses the pair
rate by Δ²/(δ² + Δ²) with Δ = ω/Q the full linewidth. Only this drive-induced
channel is modeled; Bragg-scattering FWM is flagged as unmodeled.
"""

from __future__ import annotations

import logging
import math

from squeezetools.core.constants import SPEED_OF_LIGHT, TWO_PI
from squeezetools.core.errors import ConfigError, InvalidParameterError
from squeezetools.core.models import NoiseReport, ResonatorSpec

logger = logging.getLogger(__name__)


def _require_geometry(spec: ResonatorSpec) -> tuple[float, float]:
    if spec.effective_index is None or spec.ring_radius is None:
        raise ConfigError("noise budget needs resonator effective_index and ring_radius")
    return spec.effective_index, spec.ring_radius


def spurious_detuning(spec: ResonatorSpec, omega_d: float, q: float, power_d: float) -> float:
    """δ = -(3c / (ω_D n_eff)) γ_NL (v_g Q / (2πR)) P_D."""
    n_eff, radius = _require_geometry(spec)
    return -(3.0 * SPEED_OF_LIGHT / (omega_d * n_eff)) * spec.gamma_nl \
        * (spec.v_g * q / (TWO_PI * radius)) * power_d


def suppression_factor(delta: float, linewidth: float) -> float:
    if not linewidth > 0.0:
        raise InvalidParameterError(f"linewidth must be positive, got {linewidth!r}")
    return linewidth**2 / (delta**2 + linewidth**2)


def xi_parameter(spec: ResonatorSpec, omega: float) -> float:
    """ξ = 3c² γ_NL / (2π ω² n_eff n_g), in m/W."""
    n_eff, _ = _require_geometry(spec)
    return 3.0 * SPEED_OF_LIGHT**2 * spec.gamma_nl / (TWO_PI * omega**2 * n_eff * spec.n_g)


def snr(power_p: float, power_d: float, delta: float, linewidth: float) -> float:
    """Signal-to-noise ratio (P_P/P_D)(1 + δ²/Δ²)."""
    if not (power_p > 0.0 and power_d > 0.0):
        raise InvalidParameterError("pump and drive powers must be positive")
    return (power_p / power_d) * (1.0 + (delta / linewidth) ** 2)


def snr_structural(power_p: float, power_d: float, xi: float, q: float, radius: float) -> float:
    """Same ratio written through the device constants: (P_P/P_D)(1 + ξ²Q⁴P_D²/R²)."""
    if not (power_p > 0.0 and power_d > 0.0):
        raise InvalidParameterError("pump and drive powers must be positive")
    return (power_p / power_d) * (1.0 + (xi * q * q * power_d / radius) ** 2)


def noise_report(
    spec: ResonatorSpec,
    omega: float,
    q: float,
    power_d: float,
    power_p: float,
) -> NoiseReport:
    """Full budget for one operating point, linewidth Δ = ω/Q."""
    if not q > 0.0:
        raise InvalidParameterError(f"quality factor must be positive, got {q!r}")
    linewidth = omega / q
    delta = spurious_detuning(spec, omega, q, power_d)
    xi = xi_parameter(spec, omega)
    report = NoiseReport(
        delta=delta,
        linewidth=linewidth,
        suppression=suppression_factor(delta, linewidth),
        snr=snr(power_p, power_d, delta, linewidth),
        xi=xi,
        snr_structural=snr_structural(power_p, power_d, xi, q, spec.ring_radius),
    )
    if not math.isclose(report.snr, report.snr_structural, rel_tol=1e-6):
        logger.warning(
            "SNR forms disagree (%.6e vs %.6e); check group index against group velocity",
            report.snr, report.snr_structural,
        )
    logger.info("noise budget: delta/linewidth = %.4e, SNR = %.4e",
                delta / linewidth, report.snr)
    return report
