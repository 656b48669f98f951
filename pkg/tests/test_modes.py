"""Tests for the temporal-mode decomposition and squeezing metrics."""

import math

import numpy as np
import pytest

from squeezetools.analyzer.modes import (
    decompose,
    lossy_squeezed_moments,
    mode_fidelity,
    profile_fwhm,
    pure_squeezing,
    quadrature_variances,
    schmidt_modes,
    schmidt_number,
    squeezing_report,
    takagi,
    takagi_modes,
    thermal_equivalents,
)
from squeezetools.core.errors import (
    InvalidParameterError,
    NonPhysicalError,
    PSDViolationError,
    UncertaintyViolationError,
    UndefinedError,
)
from squeezetools.core.models import MomentKernels, TimeGrid

E2_DB = 20.0 / math.log(10.0)  # 10 log10(e^2)


def _random_unitary(rng, size):
    q, r = np.linalg.qr(rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size)))
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


def _orthonormal_profiles(grid: TimeGrid, count: int) -> np.ndarray:
    """Real profiles orthonormal under the trapezoid inner product."""
    t = (grid.times - grid.times.mean()) / (0.15 * (grid.t_end - grid.t_start))
    raw = np.stack([t**k * np.exp(-0.5 * t**2) for k in range(count)], axis=1)
    root = np.sqrt(grid.weights)
    q, _ = np.linalg.qr(root[:, None] * raw)
    return q / root[:, None]


def _synthetic_kernels(grid, n_values, m_values):
    f = _orthonormal_profiles(grid, len(n_values))
    kernel_n = (f * np.asarray(n_values)[None, :]) @ f.T
    kernel_m = (f * np.asarray(m_values)[None, :]) @ f.T
    return MomentKernels(kernel_n=kernel_n.astype(complex), kernel_m=kernel_m.astype(complex),
                         weights=grid.weights), f


# ── Takagi ─────────────────────────────────────────────────────────────


def test_takagi_reconstructs_random_symmetric():
    rng = np.random.default_rng(11)
    x = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    a = x + x.T
    s, u = takagi(a)
    np.testing.assert_allclose(u @ np.diag(s) @ u.T, a, atol=1e-10 * np.max(np.abs(a)))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-10)
    assert np.all(np.diff(s) <= 0.0)


def test_takagi_degenerate_values():
    rng = np.random.default_rng(3)
    u0 = _random_unitary(rng, 5)
    a = u0 @ np.diag([2.0, 1.0, 1.0, 0.5, 0.0]) @ u0.T
    s, u = takagi(a)
    np.testing.assert_allclose(s, [2.0, 1.0, 1.0, 0.5, 0.0], atol=1e-12)
    np.testing.assert_allclose(u @ np.diag(s) @ u.T, a, atol=1e-10)


def test_takagi_zero_matrix():
    s, u = takagi(np.zeros((4, 4), dtype=complex))
    assert not np.any(s)
    np.testing.assert_array_equal(u, np.eye(4))


# ── Schmidt / Takagi modes ─────────────────────────────────────────────


def test_rank_one_kernel():
    """N = n0 f fᴴ returns n0 and f itself as the only occupied mode."""
    grid = TimeGrid(0.0, 1e-9, 101)
    kernels, f = _synthetic_kernels(grid, [0.3], [0.0])
    values, profiles = schmidt_modes(kernels)
    assert values[0] == pytest.approx(0.3, rel=1e-10)
    assert np.all(values[1:] < 1e-12)
    lead = profiles[:, 0] * np.sign(f[np.argmax(np.abs(f[:, 0])), 0])
    np.testing.assert_allclose(lead, f[:, 0], atol=1e-8 * np.max(np.abs(f)))


def test_schmidt_modes_orthonormal_and_sorted():
    grid = TimeGrid(-1e-9, 1e-9, 121)
    kernels, _ = _synthetic_kernels(grid, [0.5, 0.2, 0.05], [0.6, 0.3, 0.1])
    values, profiles = schmidt_modes(kernels)
    assert np.all(np.diff(values) <= 0.0)
    gram = profiles[:, :3].conj().T @ (grid.weights[:, None] * profiles[:, :3])
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-10)


def test_takagi_modes_values():
    grid = TimeGrid(-1e-9, 1e-9, 121)
    kernels, f = _synthetic_kernels(grid, [0.5, 0.2], [0.6 * np.exp(0.7j), 0.3])
    values, profiles = takagi_modes(kernels)
    np.testing.assert_allclose(values[:2], [0.6, 0.3], rtol=1e-10)
    assert mode_fidelity(profiles[:, 0], f[:, 0], grid.weights) == pytest.approx(1.0, abs=1e-10)


def _bump(grid: TimeGrid, center: float, width: float) -> np.ndarray:
    f = np.exp(-0.5 * ((grid.times - center) / width) ** 2)
    return f / math.sqrt(float(np.sum(grid.weights * f**2)))


def test_degenerate_modes_ordered_by_earliest_peak():
    """Equal occupations in two separated pulses: the earlier pulse comes first."""
    grid = TimeGrid(0.0, 1e-9, 201)
    late, early = _bump(grid, 0.75e-9, 0.04e-9), _bump(grid, 0.25e-9, 0.04e-9)
    pair = np.outer(late, late) + np.outer(early, early)
    kernels = MomentKernels(kernel_n=(0.4 * pair).astype(complex),
                            kernel_m=(math.sqrt(0.4 * 1.4) * pair).astype(complex),
                            weights=grid.weights)
    for values, profiles in (schmidt_modes(kernels), takagi_modes(kernels)):
        assert values[0] == pytest.approx(values[1], rel=1e-10)
        peaks = np.argmax(np.abs(profiles[:, :2]), axis=0)
        assert grid.times[peaks[0]] < grid.times[peaks[1]]


def test_takagi_modes_rejects_asymmetric_m():
    kernels = MomentKernels(kernel_n=np.zeros((2, 2), dtype=complex),
                            kernel_m=np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
                            weights=np.ones(2))
    with pytest.raises(InvalidParameterError):
        takagi_modes(kernels)


def test_negative_eigenvalue_is_psd_violation():
    kernels = MomentKernels(kernel_n=np.diag([1.0, -0.1]).astype(complex),
                            kernel_m=np.zeros((2, 2), dtype=complex), weights=np.ones(2))
    with pytest.raises(PSDViolationError):
        schmidt_modes(kernels)


def test_decompose_synthetic_state():
    grid = TimeGrid(-1e-9, 1e-9, 121)
    n_values = [0.5, 0.2, 0.05]
    m_values = [math.sqrt(0.5 * 1.5), math.sqrt(0.2 * 1.2), math.sqrt(0.05 * 1.05)]
    kernels, _ = _synthetic_kernels(grid, n_values, m_values)
    result = decompose(kernels, eta=1.0, n_modes=3)
    assert [m.n_lambda for m in result.modes] == pytest.approx(n_values, rel=1e-9)
    assert [abs(m.m_lambda) for m in result.modes] == pytest.approx(m_values, rel=1e-9)
    assert result.takagi_fidelities == pytest.approx([1.0, 1.0, 1.0], abs=1e-9)
    assert result.schmidt_number == pytest.approx(schmidt_number(n_values))
    assert result.total_photons == pytest.approx(0.75, rel=1e-9)
    assert result.modes[0].r_pure == pytest.approx(math.asinh(math.sqrt(0.5)))


def test_decompose_vacuum_has_no_schmidt_number():
    grid = TimeGrid(0.0, 1e-9, 32)
    zeros = np.zeros((32, 32), dtype=complex)
    result = decompose(MomentKernels(zeros, zeros, grid.weights), eta=0.9, n_modes=4)
    assert result.schmidt_number is None
    assert len(result.modes) == 4
    assert result.modes[0].n_lambda == 0.0


def test_decompose_rejects_bad_efficiency():
    grid = TimeGrid(0.0, 1e-9, 32)
    zeros = np.zeros((32, 32), dtype=complex)
    with pytest.raises(InvalidParameterError):
        decompose(MomentKernels(zeros, zeros, grid.weights), eta=0.0)


def test_squeezing_report_dominant_mode():
    grid = TimeGrid(-1e-9, 1e-9, 401)
    n, m = lossy_squeezed_moments(1.0, 1.0)
    kernels, f = _synthetic_kernels(grid, [n, 0.01], [m, 0.1])
    result = decompose(kernels, eta=1.0, n_modes=2)
    report = squeezing_report(result, grid, reference_profile=f[:, 0])
    assert report.v_squeezed_db == pytest.approx(-E2_DB, rel=1e-8)
    assert report.v_antisqueezed_db == pytest.approx(E2_DB, rel=1e-8)
    assert report.fidelity_vs_reference == pytest.approx(1.0, abs=1e-9)
    assert not report.multi_peak


def test_squeezing_report_vacuum_has_no_pulse_width():
    grid = TimeGrid(0.0, 1e-9, 32)
    zeros = np.zeros((32, 32), dtype=complex)
    result = decompose(MomentKernels(zeros, zeros, grid.weights), eta=0.9, n_modes=2)
    report = squeezing_report(result, grid)
    assert report.v_squeezed_db == 0.0
    assert report.pulse_fwhm == 0.0
    assert not report.multi_peak


# ── Schmidt number ─────────────────────────────────────────────────────


@pytest.mark.parametrize("n_list, expected", [
    ([1.0], 1.0),
    ([1.0, 0.0, 0.0], 1.0),
    ([1.0, 1.0], 2.0),
    ([1.0, 0.01], 1.0201 / 1.0001),
    ([100.0, 1.0], 101.0**2 / 10001.0),
])
def test_schmidt_number_values(n_list, expected):
    assert schmidt_number(n_list) == pytest.approx(expected, rel=1e-12)


def test_schmidt_number_scale_invariant():
    n = np.array([0.3, 0.1, 0.02])
    assert schmidt_number(7.5 * n) == pytest.approx(schmidt_number(n), rel=1e-12)


def test_schmidt_number_errors():
    with pytest.raises(UndefinedError):
        schmidt_number([0.0, 0.0])
    with pytest.raises(InvalidParameterError):
        schmidt_number([1.0, -0.1])


# ── Quadrature variances ───────────────────────────────────────────────


def test_pure_state_variances():
    """η = 1, r = 1: V∓ = e^{∓2}, and the pure anti-squeezing equals V+."""
    n, m = lossy_squeezed_moments(1.0, 1.0)
    r = pure_squeezing(n, 1.0)
    assert r == pytest.approx(1.0, rel=1e-12)
    v_minus, v_plus, v_pure = quadrature_variances(n, m, r)
    assert v_minus == pytest.approx(-E2_DB, rel=1e-10)
    assert v_plus == pytest.approx(E2_DB, rel=1e-10)
    assert v_pure == pytest.approx(E2_DB, rel=1e-10)


def test_escape_loss_limit():
    """Strong squeezing saturates at 10 log10(1 - η)."""
    n, m = lossy_squeezed_moments(5.0, 0.9)
    v_minus, _, _ = quadrature_variances(n, m, pure_squeezing(n, 0.9))
    assert v_minus == pytest.approx(-10.0, abs=0.2)
    n, m = lossy_squeezed_moments(5.0, 0.99)
    v_minus, _, _ = quadrature_variances(n, m, pure_squeezing(n, 0.99))
    assert v_minus <= -15.0


def test_uncertainty_violation():
    with pytest.raises(UncertaintyViolationError):
        quadrature_variances(1.0, 1.6, 0.0)


def test_vacuum_variances():
    assert quadrature_variances(0.0, 0.0, 0.0) == (0.0, 0.0, 0.0)


# ── Thermal equivalents ────────────────────────────────────────────────


def test_thermal_equivalents_lossy_example():
    """η = 0.5, r = 1: reported r′ ≈ 0.599, Williamson r′ = 1/2 exactly."""
    n, m = lossy_squeezed_moments(1.0, 0.5)
    result = thermal_equivalents(n, m, 0.5)
    assert result.n_bar_reported == pytest.approx(0.5 * math.sinh(1.0) ** 2, rel=1e-12)
    assert result.r_prime_reported == pytest.approx(0.5996, abs=1e-3)
    assert result.r_prime_williamson == pytest.approx(0.5, rel=1e-9)
    assert result.n_bar_williamson == pytest.approx(0.5 * math.cosh(1.0) - 0.5, rel=1e-9)


def test_williamson_pair_reproduces_moments():
    n, m = 0.8, 0.6 * np.exp(0.4j)
    result = thermal_equivalents(n, m, 0.7)
    width = 2.0 * result.n_bar_williamson + 1.0
    two_r = 2.0 * result.r_prime_williamson
    assert 0.5 * width * math.cosh(two_r) - 0.5 == pytest.approx(n, rel=1e-9)
    assert 0.5 * width * math.sinh(two_r) == pytest.approx(abs(m), rel=1e-9)


def test_pure_state_has_no_thermal_part():
    n, m = lossy_squeezed_moments(1.3, 1.0)
    result = thermal_equivalents(n, m, 1.0)
    assert result.n_bar_williamson == pytest.approx(0.0, abs=1e-9)
    assert result.r_prime_williamson == pytest.approx(1.3, rel=1e-9)


def test_thermal_equivalents_non_physical():
    with pytest.raises(NonPhysicalError):
        thermal_equivalents(0.1, 0.9, 0.5)
    with pytest.raises(NonPhysicalError):
        thermal_equivalents(-0.1, 0.0, 0.5)


# ── Profiles ───────────────────────────────────────────────────────────


def test_fidelity_ignores_global_phase():
    grid = TimeGrid(-1e-9, 1e-9, 201)
    f = _orthonormal_profiles(grid, 2)
    assert mode_fidelity(f[:, 0], np.exp(1.3j) * f[:, 0], grid.weights) == pytest.approx(1.0)
    assert mode_fidelity(f[:, 0], f[:, 1], grid.weights) == pytest.approx(0.0, abs=1e-12)


def test_gaussian_profile_fwhm():
    tau = 0.2e-9
    grid = TimeGrid(-1e-9, 1e-9, 2001)
    profile = np.exp(-2.0 * math.log(2.0) * (grid.times / tau) ** 2)
    fwhm, flagged = profile_fwhm(profile, grid)
    assert fwhm == pytest.approx(tau, rel=1e-3)
    assert not flagged


def test_exponential_profile_fwhm():
    """A two-sided e^{-Γ̄|t|} amplitude has intensity FWHM ln2/Γ̄."""
    gamma = 3e9
    grid = TimeGrid(-2e-9, 2e-9, 4001)
    fwhm, flagged = profile_fwhm(np.exp(-gamma * np.abs(grid.times)), grid)
    assert fwhm == pytest.approx(math.log(2.0) / gamma, rel=1e-3)
    assert not flagged


def test_flat_and_double_peaked_profiles_flagged():
    grid = TimeGrid(-1e-9, 1e-9, 401)
    fwhm, flagged = profile_fwhm(np.ones(grid.n_points), grid)
    assert flagged
    assert fwhm == pytest.approx(2e-9)
    t = grid.times
    double = np.exp(-((t - 0.5e-9) / 0.1e-9) ** 2) + 0.9 * np.exp(-((t + 0.5e-9) / 0.1e-9) ** 2)
    _, flagged = profile_fwhm(double, grid)
    assert flagged
