"""Physical parameters and derived quantities of the three-mode resonator.

Nonlinear coupling, decay rates, drive amplitude and the SPM/XPM phase-matching
bookkeeping. Everything here is a pure function of immutable value types.
"""

from __future__ import annotations

import math

from squeezetools.core.constants import (
    DWELL_CONVENTIONS,
    DWELL_INVERSE_LINEWIDTH,
    DWELL_INVERSE_TOTAL,
    GROUP_VELOCITY_RTOL,
    HBAR,
    SPEED_OF_LIGHT,
)
from squeezetools.core.errors import (
    InvalidParameterError,
    NoSolutionError,
    UnderdeterminedError,
)
from squeezetools.core.models import (
    DerivedRates,
    ModeSpec,
    PhaseMatchReport,
    ResonatorSpec,
)


def validate_resonator(spec: ResonatorSpec) -> ResonatorSpec:
    """Check the resonator invariants and return the spec unchanged."""
    if spec.group_velocity is None and spec.group_index is None:
        raise InvalidParameterError("either group_velocity or group_index is required")
    for name in ("round_trip_length", "group_velocity", "group_index",
                 "effective_index", "ring_radius"):
        value = getattr(spec, name)
        if value is not None and not (math.isfinite(value) and value > 0.0):
            raise InvalidParameterError(f"{name} must be strictly positive, got {value!r}")
    # zero nonlinearity is a valid (linear) resonator
    if not (math.isfinite(spec.gamma_nl) and spec.gamma_nl >= 0.0):
        raise InvalidParameterError(f"gamma_nl must be non-negative, got {spec.gamma_nl!r}")
    if spec.group_velocity is not None and spec.group_index is not None:
        implied = SPEED_OF_LIGHT / spec.group_index
        if abs(implied - spec.group_velocity) > GROUP_VELOCITY_RTOL * spec.group_velocity:
            raise InvalidParameterError(
                f"group_velocity {spec.group_velocity!r} disagrees with "
                f"c/group_index = {implied!r}"
            )
    return spec


def validate_mode(mode: ModeSpec) -> ModeSpec:
    if not (mode.omega > 0.0 and math.isfinite(mode.omega)):
        raise InvalidParameterError(f"{mode.label.value}: omega must be positive")
    if not (mode.q_intrinsic > 0.0 and math.isfinite(mode.q_intrinsic)):
        raise InvalidParameterError(f"{mode.label.value}: q_intrinsic must be positive")
    if not (0.0 < mode.escape_efficiency <= 1.0):
        raise InvalidParameterError(
            f"{mode.label.value}: escape_efficiency must lie in (0, 1], "
            f"got {mode.escape_efficiency!r}"
        )
    if mode.q_loaded is not None and not mode.q_loaded > 0.0:
        raise InvalidParameterError(f"{mode.label.value}: q_loaded must be positive")
    return mode


def nonlinear_coupling(spec: ResonatorSpec, omega_s: float) -> float:
    """Λ = ħ ω_S v_g² γ_NL / (2L), in rad/s per photon."""
    validate_resonator(spec)
    if not omega_s > 0.0:
        raise InvalidParameterError(f"omega_s must be positive, got {omega_s!r}")
    return HBAR * omega_s * spec.v_g**2 * spec.gamma_nl / (2.0 * spec.round_trip_length)


def dwell_time(gamma_total: float, convention: str = DWELL_INVERSE_TOTAL) -> float:
    """Dwell time of a loaded resonance under the chosen convention.

    1/Γ̄ (amplitude decay time), 1/(2Γ̄) (energy decay time) or 1/Δν = π/Γ̄
    (inverse FWHM linewidth in Hz).
    """
    if convention not in DWELL_CONVENTIONS:
        raise InvalidParameterError(
            f"unknown dwell convention {convention!r}; expected one of {DWELL_CONVENTIONS}"
        )
    if convention == DWELL_INVERSE_TOTAL:
        return 1.0 / gamma_total
    if convention == DWELL_INVERSE_LINEWIDTH:
        return math.pi / gamma_total
    return 1.0 / (2.0 * gamma_total)


def derive_rates(mode: ModeSpec, convention: str = DWELL_INVERSE_TOTAL) -> DerivedRates:
    """Scattering, coupling and total decay rates of one resonance.

    M = ω/(2 Q_int), Γ̄ = M/(1 - η), Γ = η Γ̄. A lossless resonance (η = 1)
    has M = 0 and needs an explicit loaded Q to fix Γ̄.
    """
    validate_mode(mode)
    eta = mode.escape_efficiency
    if eta == 1.0:
        if mode.q_loaded is None:
            raise UnderdeterminedError(
                f"{mode.label.value}: escape_efficiency = 1 needs an explicit q_loaded"
            )
        m_scattering = 0.0
        gamma_total = mode.omega / (2.0 * mode.q_loaded)
        gamma_coupling = gamma_total
    else:
        if mode.q_loaded is not None:
            raise InvalidParameterError(
                f"{mode.label.value}: q_loaded is only used when escape_efficiency = 1; "
                f"Q_int and escape_efficiency already fix it at eta = {eta!r}"
            )
        m_scattering = mode.omega / (2.0 * mode.q_intrinsic)
        gamma_total = m_scattering / (1.0 - eta)
        gamma_coupling = eta * gamma_total
    return DerivedRates(
        gamma_coupling=gamma_coupling,
        m_scattering=m_scattering,
        gamma_total=gamma_total,
        q_loaded=mode.omega / (2.0 * gamma_total),
        dwell_time=dwell_time(gamma_total, convention),
        omega=mode.omega,
    )


def coupling_amplitude(rates: DerivedRates, v_g: float) -> float:
    """Channel-resonator coupling γ = √(2 Γ v_g), taken real positive."""
    return math.sqrt(2.0 * rates.gamma_coupling * v_g)


def drive_amplitude(power: float, drive_rates: DerivedRates) -> float:
    """β̄_D = 2 √(P_D Q_D η_D / (ħ ω_D²)) for a resonant CW drive."""
    if not (power >= 0.0 and math.isfinite(power)):
        raise InvalidParameterError(f"drive power must be non-negative, got {power!r}")
    q = drive_rates.q_loaded
    eta = drive_rates.escape_efficiency
    return 2.0 * math.sqrt(power * q * eta / (HBAR * drive_rates.omega**2))


def spm_shift(beta_d: float, coupling: float) -> float:
    return coupling * beta_d**2


def phase_match_power(delta_res: float, coupling: float, drive_rates: DerivedRates) -> float:
    """Drive power whose SPM shift cancels the dispersion detuning Δ_res.

    Inverse of :func:`drive_amplitude` composed with Δ_SPM = Λ β̄_D².
    """
    if delta_res == 0.0:
        return 0.0
    if delta_res < 0.0:
        raise NoSolutionError(
            "phase matching by drive power needs normal dispersion (delta_res > 0); "
            f"got delta_res = {delta_res!r}"
        )
    if coupling <= 0.0:
        raise NoSolutionError("zero nonlinear coupling cannot shift the resonances")
    q = drive_rates.q_loaded
    eta = drive_rates.escape_efficiency
    return delta_res * HBAR * drive_rates.omega**2 / (4.0 * coupling * q * eta)


def spm_xpm_report(beta_d: float, coupling: float, delta_res: float) -> PhaseMatchReport:
    delta_spm = spm_shift(beta_d, coupling)
    return PhaseMatchReport(
        delta_res=delta_res,
        delta_spm=delta_spm,
        delta_xpm=2.0 * delta_spm,
        delta_net=delta_res - delta_spm,
    )
