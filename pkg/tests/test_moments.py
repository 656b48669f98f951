"""Tests for intracavity and output moment kernels."""

import math
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import solve_continuous_lyapunov

from squeezetools.analyzer.modes import decompose, schmidt_modes
from squeezetools.analyzer.moments import (
    bogoliubov_oracle,
    check_kernels,
    emission_factors,
    emission_moments,
    intracavity_moments,
    output_moments,
    stationary_moments,
)
from squeezetools.core.constants import NANOSECOND, PICOJOULE
from squeezetools.core.errors import DerivationError, InvalidParameterError
from squeezetools.core.models import (
    CouplingMatrixSeries,
    GreenTable,
    ModeLabel,
    MomentKernels,
    TimeGrid,
)
from squeezetools.dynamics.green import coupling_matrix, solve_green
from squeezetools.dynamics.pump import gaussian_pulse, solve_pump
from squeezetools.runner.pipeline import drive_setup, mode_rates
from squeezetools.utils.config import auto_grid, load_config, mode_spec, pulse_fwhm, resonator_spec

GAMMA = 1e9
REFERENCE = Path(__file__).resolve().parent.parent / "configs" / "reference_ring.json"


def _constant_series(grid, g0, delta, gamma_total=GAMMA) -> CouplingMatrixSeries:
    n = grid.n_points
    return CouplingMatrixSeries(
        grid=grid,
        gamma_total=gamma_total,
        delta_tilde=np.full(n, delta),
        g=np.full(n, g0, dtype=complex),
        delta_tilde_mid=np.full(n - 1, delta),
        g_mid=np.full(n - 1, g0, dtype=complex),
    )


def _lyapunov_moments(g0, delta, gamma_total):
    """Steady state of S = <v v†>, v = (b, b†), from the linear drift and input noise."""
    drift = np.array([
        [-gamma_total + 1j * delta, g0],
        [np.conj(g0), -gamma_total - 1j * delta],
    ])
    noise = np.diag([2.0 * gamma_total, 0.0]).astype(complex)
    s = solve_continuous_lyapunov(drift, -noise)
    return s[1, 1].real, s[0, 1]


def _relative_frobenius(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.mark.parametrize("g0, delta", [(0.5e9, 0.0), (0.4e9 * np.exp(1.1j), 0.3e9),
                                       (0.9e9j, -0.2e9)])
def test_stationary_moments_match_lyapunov(g0, delta):
    steady = stationary_moments(g0, delta, GAMMA)
    n, m = _lyapunov_moments(g0, delta, GAMMA)
    assert steady.n_c[0] == pytest.approx(n, rel=1e-10)
    assert steady.m_c[0] == pytest.approx(m, rel=1e-10)


def test_stationary_moments_above_threshold():
    with pytest.raises(InvalidParameterError):
        stationary_moments(1.2e9, 0.0, GAMMA)


def test_intracavity_moments_reach_steady_state():
    g0, delta = 0.5e9 * np.exp(0.2j), 0.2e9
    grid = TimeGrid(0.0, 20e-9, 4001)
    cavity = intracavity_moments(_constant_series(grid, g0, delta))
    steady = stationary_moments(g0, delta, GAMMA)
    assert cavity.n_c[0] == 0.0 and cavity.m_c[0] == 0.0
    assert cavity.n_c[-1] == pytest.approx(steady.n_c[0], rel=1e-6)
    assert cavity.m_c[-1] == pytest.approx(steady.m_c[0], rel=1e-6)


def test_vacuum_gives_zero_kernels():
    grid = TimeGrid(0.0, 2e-9, 65)
    green = solve_green(_constant_series(grid, 0.0, 0.3e9))
    kernels = output_moments(green, 0.9 * GAMMA, GAMMA)
    assert not np.any(kernels.kernel_n)
    assert not np.any(kernels.kernel_m)


def test_kernel_symmetries_and_diagonal():
    """N is Hermitian, M symmetric, and diag N follows the emitted flux 2Γ n_c."""
    grid = TimeGrid(0.0, 3e-9, 129)
    series = _constant_series(grid, 0.6e9 * np.exp(0.5j), 0.1e9)
    kernels = output_moments(solve_green(series), 0.9 * GAMMA, GAMMA)
    np.testing.assert_allclose(kernels.kernel_n, kernels.kernel_n.conj().T, atol=0.0)
    np.testing.assert_allclose(kernels.kernel_m, kernels.kernel_m.T, atol=0.0)
    flux = 2.0 * 0.9 * GAMMA * intracavity_moments(series).n_c
    np.testing.assert_allclose(np.diag(kernels.kernel_n).real, flux, rtol=0.0,
                               atol=2e-3 * np.max(flux))
    emitted = emission_moments(series)
    _, leak = emission_factors(grid, GAMMA)
    np.testing.assert_allclose(np.diag(kernels.kernel_n).real,
                               0.9 * leak**2 / grid.weights * emitted.n_c, rtol=1e-12)
    np.testing.assert_array_equal(kernels.weights, grid.weights)


def test_escape_efficiency_scales_kernels():
    """At fixed Γ̄ the kernels are proportional to the coupling rate Γ = ηΓ̄."""
    grid = TimeGrid(0.0, 3e-9, 129)
    green = solve_green(_constant_series(grid, 0.6e9, 0.0))
    full = output_moments(green, GAMMA, GAMMA)
    half = output_moments(green, 0.5 * GAMMA, GAMMA)
    np.testing.assert_allclose(half.kernel_n, 0.5 * full.kernel_n, rtol=1e-12)
    np.testing.assert_allclose(half.kernel_m, 0.5 * full.kernel_m, rtol=1e-12)


def test_output_moments_argument_checks():
    grid = TimeGrid(0.0, 1e-9, 33)
    green = solve_green(_constant_series(grid, 0.2e9, 0.0))
    with pytest.raises(InvalidParameterError):
        output_moments(green, 1.5 * GAMMA, GAMMA)
    with pytest.raises(InvalidParameterError):
        output_moments(green, 0.5 * GAMMA, 2.0 * GAMMA)
    bare = GreenTable(grid=grid, gamma_total=GAMMA, g11=green.g11, g12=green.g12)
    with pytest.raises(InvalidParameterError):
        output_moments(bare, 0.5 * GAMMA, GAMMA)


def test_check_kernels_catches_broken_symmetry():
    n = np.array([[1.0, 0.5j], [0.5j, 2.0]])
    good = np.array([[0.1, 0.2], [0.2, 0.3]], dtype=complex)
    with pytest.raises(DerivationError):
        check_kernels(MomentKernels(kernel_n=n, kernel_m=good, weights=np.ones(2)))
    with pytest.raises(DerivationError):
        check_kernels(MomentKernels(kernel_n=np.eye(2, dtype=complex),
                                    kernel_m=np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
                                    weights=np.ones(2)))


def test_oracle_matches_regression_constant_pump():
    grid = TimeGrid(0.0, 3e-9, 129)
    series = _constant_series(grid, 0.5e9 * np.exp(0.3j), 0.2e9)
    kernels = output_moments(solve_green(series), 0.9 * GAMMA, GAMMA)
    oracle = bogoliubov_oracle(series, 0.9 * GAMMA, GAMMA)
    assert _relative_frobenius(kernels.kernel_n, oracle.kernel_n) < 1e-8
    assert _relative_frobenius(kernels.kernel_m, oracle.kernel_m) < 1e-8


def _device_series(config, energy_pj: float, n_points: int):
    """Coupling series of the reference ring on an n-point version of its auto grid."""
    rates = mode_rates(config)
    signal, pump_rates = rates[ModeLabel.SIGNAL], rates[ModeLabel.PUMP]
    drive, _, coupling = drive_setup(config)
    spec = resonator_spec(config)
    fwhm = pulse_fwhm(config, signal)
    span = auto_grid(0.0, fwhm, signal, pump_rates)
    grid = TimeGrid(span.t_start, span.t_end, n_points)

    alpha = gaussian_pulse(energy_pj * PICOJOULE, fwhm, config.pulse.center_ns * NANOSECOND,
                           grid, mode_spec(config, ModeLabel.PUMP).omega, spec.v_g)
    # coarse on purpose: both methods see the same coupling samples
    pump = solve_pump(alpha, pump_rates, coupling, drive.beta_d, grid, spec.v_g, tolerance=1.0)
    return coupling_matrix(pump, drive.delta_net, coupling, signal.gamma_total), signal


def test_oracle_matches_regression_pulsed_device():
    """1 pJ through the three-mode ring on a 256-point grid: the two assemblies agree."""
    series, signal = _device_series(load_config(REFERENCE), 1.0, 256)
    kernels = output_moments(solve_green(series), signal.gamma_coupling, signal.gamma_total)
    oracle = bogoliubov_oracle(series, signal.gamma_coupling, signal.gamma_total)
    assert np.linalg.norm(oracle.kernel_n) > 0.0
    schmidt_modes(kernels)  # PSD to 1e-10 of the largest eigenvalue
    assert _relative_frobenius(kernels.kernel_n, oracle.kernel_n) < 1e-8
    assert _relative_frobenius(kernels.kernel_m, oracle.kernel_m) < 1e-8


def test_oracle_is_pure_without_escape_loss():
    """All loss through the channel: the dominant mode is a pure squeezed vacuum."""
    config = load_config(REFERENCE)
    series, signal = _device_series(config, 10.0, 256)
    oracle = bogoliubov_oracle(series, signal.gamma_total, signal.gamma_total)
    mode = decompose(oracle, eta=1.0, n_modes=2).dominant
    n0 = mode.n_lambda
    assert n0 > 1e-3
    assert abs(mode.m_lambda) == pytest.approx(math.sqrt(n0 * (n0 + 1.0)), rel=1e-3)


def test_oracle_lossy_kernels_scale_with_escape_efficiency():
    """Scattering bins only dilute the output: N and M scale by η exactly."""
    grid = TimeGrid(0.0, 3e-9, 129)
    series = _constant_series(grid, 0.5e9 * np.exp(0.3j), 0.2e9)
    pure = bogoliubov_oracle(series, GAMMA, GAMMA)
    lossy = bogoliubov_oracle(series, 0.7 * GAMMA, GAMMA)
    np.testing.assert_allclose(lossy.kernel_n, 0.7 * pure.kernel_n,
                               atol=1e-12 * np.max(np.abs(pure.kernel_n)))
    np.testing.assert_allclose(lossy.kernel_m, 0.7 * pure.kernel_m,
                               atol=1e-12 * np.max(np.abs(pure.kernel_m)))


def test_emission_moments_match_continuous_steady_state():
    """Halfway through the beam splitter the emission model sits on the CW state."""
    g0, delta = 0.5e9 * np.exp(0.2j), 0.2e9
    grid = TimeGrid(0.0, 20e-9, 4001)
    emitted = emission_moments(_constant_series(grid, g0, delta))
    steady = stationary_moments(g0, delta, GAMMA)
    keep = math.exp(-GAMMA * grid.dt)
    assert emitted.n_c[0] == 0.0 and emitted.m_c[0] == 0.0
    assert keep * emitted.n_c[-1] == pytest.approx(steady.n_c[0], rel=1e-3)
    assert keep * emitted.m_c[-1] == pytest.approx(steady.m_c[0], rel=1e-3)


def test_emission_factors_conserve_photons():
    grid = TimeGrid(0.0, 1e-9, 33)
    keep, leak = emission_factors(grid, GAMMA)
    np.testing.assert_allclose(keep**2 + leak**2, 1.0, rtol=1e-15)
    assert keep[0] == pytest.approx(math.exp(-0.5 * GAMMA * grid.dt))
    assert keep[1] == pytest.approx(math.exp(-GAMMA * grid.dt))


def test_oracle_grid_limit():
    grid = TimeGrid(0.0, 1e-9, 257)
    with pytest.raises(InvalidParameterError):
        bogoliubov_oracle(_constant_series(grid, 0.1e9, 0.0), 0.5 * GAMMA, GAMMA)
