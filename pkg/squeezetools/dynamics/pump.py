"""Classical pump dynamics: input pulse, intraresonator envelope, effective pump.

The pump envelope obeys
    dβ̄_P/dt = (-Γ̄_P + iΛ|β̄_P|²) β̄_P - iγ_P α_in(t),
integrated with fixed-step RK4 on the uniform grid, starting from an empty
resonator. The depletion of the pump by the squeezing process is neglected.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from squeezetools.core.constants import (
    HBAR,
    MIN_GRID_POINTS,
    PULSE_TRUNCATION_FWHM,
    PUMP_CONVERGENCE_RTOL,
)
from squeezetools.core.errors import (
    GridTooCoarseError,
    InvalidParameterError,
    TruncationError,
)
from squeezetools.core.models import DerivedRates, PumpBudget, PumpSolution, TimeGrid
from squeezetools.core.params import coupling_amplitude

logger = logging.getLogger(__name__)

# Intensity FWHM → Gaussian exponent: |α|² ∝ exp(-4 ln2 t²/τ²)
_FWHM_EXPONENT = 4.0 * math.log(2.0)


def validate_grid(grid: TimeGrid) -> TimeGrid:
    if not grid.t_end > grid.t_start:
        raise InvalidParameterError("grid t_end must exceed t_start")
    if grid.n_points < MIN_GRID_POINTS:
        raise InvalidParameterError(
            f"grid needs at least {MIN_GRID_POINTS} points, got {grid.n_points}"
        )
    return grid


def _complex_spline(times: np.ndarray, values: np.ndarray) -> CubicSpline:
    return CubicSpline(times, np.column_stack([values.real, values.imag]), axis=0)


def _as_complex(stacked: np.ndarray) -> np.ndarray:
    return stacked[..., 0] + 1j * stacked[..., 1]


def gaussian_pulse(
    energy: float,
    fwhm: float,
    center: float,
    grid: TimeGrid,
    omega_p: float,
    v_g: float,
) -> np.ndarray:
    """Sampled input pulse α_P,in(t) with Gaussian intensity and flat phase.

    Normalized so that ħ ω_P v_g ∫|α|² dt equals ``energy`` under the
    trapezoid rule on ``grid``.
    """
    validate_grid(grid)
    if energy < 0.0:
        raise InvalidParameterError(f"pulse energy must be non-negative, got {energy!r}")
    if not fwhm > 0.0:
        raise InvalidParameterError(f"pulse fwhm must be positive, got {fwhm!r}")
    lo = center - PULSE_TRUNCATION_FWHM * fwhm
    hi = center + PULSE_TRUNCATION_FWHM * fwhm
    if grid.t_start > lo or grid.t_end < hi:
        raise TruncationError(
            f"grid [{grid.t_start:.4e}, {grid.t_end:.4e}] s does not cover the pulse "
            f"span [{lo:.4e}, {hi:.4e}] s"
        )
    if energy == 0.0:
        return np.zeros(grid.n_points, dtype=complex)

    t = grid.times
    shape = np.exp(-0.5 * _FWHM_EXPONENT * ((t - center) / fwhm) ** 2).astype(complex)
    target = energy / (HBAR * omega_p * v_g)
    norm = trapezoid(np.abs(shape) ** 2, dx=grid.dt)
    return shape * math.sqrt(target / norm)


def pulse_energy(alpha_in: np.ndarray, grid: TimeGrid, omega_p: float, v_g: float) -> float:
    return HBAR * omega_p * v_g * float(trapezoid(np.abs(alpha_in) ** 2, dx=grid.dt))


def _pump_rhs(beta: complex, alpha: complex, gamma_total: float, coupling: float,
              gamma_p: float) -> complex:
    return (-gamma_total + 1j * coupling * (beta.real**2 + beta.imag**2)) * beta \
        - 1j * gamma_p * alpha


def _rk4_pump(alpha, alpha_mid, h, beta0, gamma_total, coupling, gamma_p):
    """RK4 over samples ``alpha`` with ``alpha_mid[k]`` between alpha[k] and alpha[k+1]."""
    beta = np.empty(len(alpha), dtype=complex)
    b = complex(beta0)
    beta[0] = b
    for k in range(len(alpha) - 1):
        a0, am, a1 = complex(alpha[k]), complex(alpha_mid[k]), complex(alpha[k + 1])
        k1 = _pump_rhs(b, a0, gamma_total, coupling, gamma_p)
        k2 = _pump_rhs(b + 0.5 * h * k1, am, gamma_total, coupling, gamma_p)
        k3 = _pump_rhs(b + 0.5 * h * k2, am, gamma_total, coupling, gamma_p)
        k4 = _pump_rhs(b + h * k3, a1, gamma_total, coupling, gamma_p)
        b = b + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        beta[k + 1] = b
    return beta


def integrate_pump(
    alpha_in: np.ndarray,
    pump_rates: DerivedRates,
    coupling: float,
    grid: TimeGrid,
    v_g: float,
    tolerance: float = PUMP_CONVERGENCE_RTOL,
    initial: complex = 0j,
) -> np.ndarray:
    """Intraresonator pump envelope β̄_P on the grid.

    The drive at step midpoints comes from a cubic spline of the samples. A
    second pass with step 2·dt (odd samples as exact midpoints) gives a
    Richardson estimate of the error; above ``tolerance`` relative to the peak
    amplitude the grid is refused. ``initial`` is the envelope at t_start,
    zero for a resonator that is empty before the pulse.
    """
    beta, _ = _integrate_checked(alpha_in, pump_rates, coupling, grid, v_g, tolerance, initial)
    return beta


def _integrate_checked(alpha_in, pump_rates, coupling, grid, v_g, tolerance, initial):
    validate_grid(grid)
    alpha_in = np.asarray(alpha_in, dtype=complex)
    if alpha_in.shape != (grid.n_points,):
        raise InvalidParameterError("alpha_in must have one sample per grid point")
    gamma_p = coupling_amplitude(pump_rates, v_g)
    gamma_total = pump_rates.gamma_total
    h = grid.dt

    alpha_mid = _as_complex(_complex_spline(grid.times, alpha_in)(grid.midpoints))
    beta = _rk4_pump(alpha_in, alpha_mid, h, initial, gamma_total, coupling, gamma_p)

    if not np.all(np.isfinite(beta)):
        raise GridTooCoarseError("pump integration diverged; refine the grid")

    even = alpha_in[::2]
    beta_coarse = _rk4_pump(even, alpha_in[1::2][: len(even) - 1], 2.0 * h, initial,
                            gamma_total, coupling, gamma_p)
    peak = float(np.max(np.abs(beta)))
    error = 0.0
    if peak > 0.0:
        error = float(np.max(np.abs(beta[::2] - beta_coarse))) / 15.0 / peak
        logger.debug("pump Richardson estimate %.3e (tolerance %.1e)", error, tolerance)
        if not math.isfinite(error) or error > tolerance:
            raise GridTooCoarseError(
                f"pump step-doubling estimate {error:.3e} exceeds tolerance "
                f"{tolerance:.1e}; use more grid points"
            )
    return beta, error


def effective_pump(beta_p: np.ndarray, beta_d: float, coupling: float) -> np.ndarray:
    """g(t) = 2iΛ β̄_D β̄_P(t)."""
    return 2j * coupling * beta_d * np.asarray(beta_p, dtype=complex)


def pump_midpoints(
    alpha_in: np.ndarray,
    beta_p: np.ndarray,
    pump_rates: DerivedRates,
    coupling: float,
    grid: TimeGrid,
    v_g: float,
) -> np.ndarray:
    """β̄_P at step midpoints from a cubic Hermite interpolant fed by the ODE."""
    gamma_p = coupling_amplitude(pump_rates, v_g)
    slope = (-pump_rates.gamma_total + 1j * coupling * np.abs(beta_p) ** 2) * beta_p \
        - 1j * gamma_p * alpha_in
    t = grid.times
    spline = CubicHermiteSpline(
        t,
        np.column_stack([beta_p.real, beta_p.imag]),
        np.column_stack([slope.real, slope.imag]),
        axis=0,
    )
    return _as_complex(spline(grid.midpoints))


def solve_pump(
    alpha_in: np.ndarray,
    pump_rates: DerivedRates,
    coupling: float,
    beta_d: float,
    grid: TimeGrid,
    v_g: float,
    tolerance: float = PUMP_CONVERGENCE_RTOL,
) -> PumpSolution:
    """Integrate the pump and package grid and midpoint samples of β̄_P and g."""
    beta_p, error = _integrate_checked(alpha_in, pump_rates, coupling, grid, v_g, tolerance, 0j)
    beta_mid = pump_midpoints(alpha_in, beta_p, pump_rates, coupling, grid, v_g)
    solution = PumpSolution(
        grid=grid,
        alpha_in=np.asarray(alpha_in, dtype=complex),
        beta_p=beta_p,
        g=effective_pump(beta_p, beta_d, coupling),
        beta_mid=beta_mid,
        g_mid=effective_pump(beta_mid, beta_d, coupling),
        richardson_error=error,
    )
    logger.info(
        "pump solved: peak |beta_P|^2 = %.4e photons, peak |g| = %.4e rad/s",
        float(np.max(np.abs(beta_p)) ** 2),
        float(np.max(np.abs(solution.g))),
    )
    return solution


def pump_photon_budget(
    alpha_in: np.ndarray,
    beta_p: np.ndarray,
    pump_rates: DerivedRates,
    grid: TimeGrid,
    v_g: float,
) -> PumpBudget:
    """Photon bookkeeping of the pump pulse.

    Input flux v_g|α|² splits into the transmitted channel flux
    v_g|α - iγβ̄/v_g|², the scattered flux 2M|β̄|², and what is still stored in
    the resonator at the end of the grid.
    """
    gamma_p = coupling_amplitude(pump_rates, v_g)
    transmitted = alpha_in - 1j * (gamma_p / v_g) * beta_p
    return PumpBudget(
        input_photons=float(v_g * trapezoid(np.abs(alpha_in) ** 2, dx=grid.dt)),
        transmitted_photons=float(v_g * trapezoid(np.abs(transmitted) ** 2, dx=grid.dt)),
        scattered_photons=float(
            2.0 * pump_rates.m_scattering * trapezoid(np.abs(beta_p) ** 2, dx=grid.dt)
        ),
        residual_photons=float(np.abs(beta_p[-1]) ** 2),
    )
