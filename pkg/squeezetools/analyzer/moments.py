"""Second-order moments of the output field.

The outgoing field is binned on the grid: sample k stands for a bin of
trapezoid width w_k, and the resonator exchanges photons with that bin
through a beam splitter of transmissivity c_k² = e^{-2Γ̄ w_k}. Between grid
points it follows the undamped Magnus step. Every step of this emission
model is a Bogoliubov transformation of the resonator and fresh vacuum bins,
so for η = 1 the kernels describe a pure Gaussian state of the binned modes
up to what is still stored in the resonator at the grid end, and η < 1 scales
them by η exactly. It converges to the continuous kernels at second order.

With s_k² = 1 - c_k², moments n_k = <b†b>, m_k = <bb> just before emission k
and the Green table G = e^{-Γ̄τ} U, the kernels for t_j > t_k are

    N(t_k, t_j) = η a_j a_k c_k e^{Γ̄h} [G11(t_j, t_k) n_k + G12(t_j, t_k) m_k*]
    M(t_j, t_k) = -η a_j a_k c_k e^{Γ̄h} [G11(t_j, t_k) m_k + G12(t_j, t_k) n_k]

with a_k = s_k / √w_k → √(2Γ̄), and on the diagonal N = η a_k² n_k,
M = -η a_k² m_k. This is the quantum-regression form of
    N = 4Γ_S Γ̄_S ∫ G12*(t, s) G12(t', s) ds,
    M = 2Γ_S [Θ(t' - t) G12(t', t) - 2Γ̄_S ∫ G11(t, s) G12(t', s) ds].
Filling one triangle and mirroring makes N Hermitian and M symmetric.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from squeezetools.core.constants import HERMITICITY_RTOL, ORACLE_MAX_POINTS
from squeezetools.core.errors import DerivationError, InvalidParameterError
from squeezetools.core.models import (
    CouplingMatrixSeries,
    GreenTable,
    IntracavityMoments,
    MomentKernels,
    TimeGrid,
)
from squeezetools.dynamics.green import magnus_half_steps, magnus_steps

logger = logging.getLogger(__name__)


def emission_factors(grid: TimeGrid, gamma_total: float) -> tuple[np.ndarray, np.ndarray]:
    """Beam-splitter amplitudes (c_k, s_k) of the emission bins, c_k² + s_k² = 1."""
    w = grid.weights
    keep = np.exp(-gamma_total * w)
    leak = np.sqrt(-np.expm1(-2.0 * gamma_total * w))
    return keep, leak


def emission_moments(series: CouplingMatrixSeries) -> IntracavityMoments:
    """Resonator moments n_k, m_k just before each emission, starting from vacuum.

    S = [[<bb†>, <bb>], [<b†b†>, <b†b>]] goes through the beam splitter as
    S → c² S + s² diag(1, 0) and through the step as S → U S U†.
    """
    grid = series.grid
    keep, _ = emission_factors(grid, series.gamma_total)
    steps = magnus_steps(series)
    vacuum = np.diag([1.0, 0.0]).astype(complex)

    n_c = np.zeros(grid.n_points)
    m_c = np.zeros(grid.n_points, dtype=complex)
    s = vacuum.copy()
    for k in range(grid.n_points - 1):
        c2 = keep[k] ** 2
        s = c2 * s + (1.0 - c2) * vacuum
        u = steps[k]
        s = u @ s @ u.conj().T
        s = 0.5 * (s + s.conj().T)
        n_c[k + 1] = s[1, 1].real
        m_c[k + 1] = s[0, 1]
    return IntracavityMoments(n_c=n_c, m_c=m_c)


def intracavity_moments(series: CouplingMatrixSeries) -> IntracavityMoments:
    """Continuous-time intracavity moments n_c, m_c, starting from vacuum.

    Carries S from step to step as S → E S E† + Q with E the damped step
    propagator. Q is the vacuum noise D = diag(2Γ̄, 0) entering during the
    step, integrated with Simpson weights along the start, midpoint and end
    propagators. Fourth order; the reference the emitted photon flux is
    checked against.
    """
    grid = series.grid
    h = grid.dt
    gt = series.gamma_total
    full = math.exp(-gt * h) * magnus_steps(series)
    half = math.exp(-0.5 * gt * h) * magnus_half_steps(series)
    noise = np.diag([2.0 * gt, 0.0]).astype(complex)

    n_c = np.zeros(grid.n_points)
    m_c = np.zeros(grid.n_points, dtype=complex)
    s = np.diag([1.0, 0.0]).astype(complex)
    for k in range(grid.n_points - 1):
        e, r = full[k], half[k]
        s = (
            e @ (s + (h / 6.0) * noise) @ e.conj().T
            + (2.0 * h / 3.0) * (r @ noise @ r.conj().T)
            + (h / 6.0) * noise
        )
        s = 0.5 * (s + s.conj().T)
        n_c[k + 1] = s[1, 1].real
        m_c[k + 1] = s[0, 1]
    return IntracavityMoments(n_c=n_c, m_c=m_c)


def stationary_moments(g0: complex, delta: float, gamma_total: float) -> IntracavityMoments:
    """Below-threshold CW steady state of the intracavity moments.

    n = |g|² / (2(Γ̄² + Δ̃² - |g|²)),  m = g (2n + 1) / (2(Γ̄ - iΔ̃)).
    """
    margin = gamma_total**2 + delta**2 - abs(g0) ** 2
    if margin <= 0.0:
        raise InvalidParameterError("constant pump is at or above the oscillation threshold")
    n = abs(g0) ** 2 / (2.0 * margin)
    m = g0 * (2.0 * n + 1.0) / (2.0 * (gamma_total - 1j * delta))
    return IntracavityMoments(n_c=np.array([n]), m_c=np.array([m]))


def check_kernels(kernels: MomentKernels) -> MomentKernels:
    """Raise if N is not Hermitian or M not symmetric."""
    n, m = kernels.kernel_n, kernels.kernel_m
    scale_n = max(float(np.max(np.abs(n))), np.finfo(float).tiny)
    scale_m = max(float(np.max(np.abs(m))), np.finfo(float).tiny)
    herm = float(np.max(np.abs(n - n.conj().T))) / scale_n
    sym = float(np.max(np.abs(m - m.T))) / scale_m
    if herm > HERMITICITY_RTOL or sym > HERMITICITY_RTOL:
        raise DerivationError(
            f"kernel symmetry broken (N Hermiticity {herm:.2e}, M symmetry {sym:.2e}); "
            "the moment derivation or its signs are inconsistent"
        )
    return kernels


def output_moments(
    green: GreenTable,
    gamma_coupling: float,
    gamma_total: float,
    grid: TimeGrid | None = None,
) -> MomentKernels:
    """Output kernels N(t, t') and M(t, t') on the grid."""
    grid = grid or green.grid
    if green.series is None:
        raise InvalidParameterError("green table carries no coupling series")
    if not 0.0 <= gamma_coupling <= gamma_total * (1.0 + 1e-12):
        raise InvalidParameterError("coupling rate must lie in [0, gamma_total]")
    if not math.isclose(gamma_total, green.gamma_total, rel_tol=1e-12):
        raise InvalidParameterError("gamma_total differs from the one the green table used")

    cavity = emission_moments(green.series)
    n_c, m_c = cavity.n_c, cavity.m_c
    eta = min(gamma_coupling / gamma_total, 1.0)
    keep, leak = emission_factors(grid, gamma_total)
    amp = leak / np.sqrt(grid.weights)
    # the beam splitters strictly between t_k and t_j decay one step less than G
    source = amp * keep * math.exp(gamma_total * grid.dt)

    # lower[j, k] = N(t_k, t_j), j >= k; G11/G12 vanish above the diagonal
    lower = eta * amp[:, None] * (
        green.g11 * (source * n_c)[None, :] + green.g12 * (source * np.conj(m_c))[None, :]
    )
    np.fill_diagonal(lower, eta * amp**2 * n_c)
    kernel_n = np.triu(lower.T) + np.tril(np.conj(lower), -1)
    pair = -eta * amp[:, None] * (
        green.g11 * (source * m_c)[None, :] + green.g12 * (source * n_c)[None, :]
    )
    np.fill_diagonal(pair, -eta * amp**2 * m_c)
    kernel_m = pair + np.tril(pair, -1).T

    kernels = check_kernels(
        MomentKernels(kernel_n=kernel_n, kernel_m=kernel_m, weights=grid.weights)
    )
    logger.info(
        "moment kernels assembled: photon number %.6e",
        float(np.real(np.sum(grid.weights * np.diag(kernel_n)))),
    )
    return kernels


def bogoliubov_oracle(
    series: CouplingMatrixSeries,
    gamma_coupling: float,
    gamma_total: float,
) -> MomentKernels:
    """Brute-force kernels from the explicit Bogoliubov map of the emission model.

    The inputs are the initial resonator vacuum plus one channel bin and one
    scattering bin per grid point. The resonator amplitude b = X·a + Y·a†
    meets both bins at every grid point through the beam splitter of the
    total decay rate and follows the undamped step in between; the channel
    output of each bin is read off at the exchange. N and M are matrix
    products over the inputs, without the Green table or the regression form.
    """
    grid = series.grid
    size = grid.n_points
    if size > ORACLE_MAX_POINTS:
        raise InvalidParameterError(
            f"oracle grids are limited to {ORACLE_MAX_POINTS} points, got {size}"
        )
    eta = min(gamma_coupling / gamma_total, 1.0)
    root_eta, root_loss = math.sqrt(eta), math.sqrt(1.0 - eta)
    keep, leak = emission_factors(grid, gamma_total)
    steps = magnus_steps(series)

    n_inputs = 2 * size + 1
    x_out = np.zeros((size, n_inputs), dtype=complex)
    y_out = np.zeros((size, n_inputs), dtype=complex)
    xb = np.zeros(n_inputs, dtype=complex)
    yb = np.zeros(n_inputs, dtype=complex)
    xb[-1] = 1.0

    for j in range(size):
        channel, scatter = 2 * j, 2 * j + 1
        c, s = keep[j], leak[j]
        x_out[j] = -1j * root_eta * s * xb
        y_out[j] = -1j * root_eta * s * yb
        x_out[j, channel] += eta * c + 1.0 - eta
        x_out[j, scatter] += root_eta * root_loss * (c - 1.0)
        xb, yb = c * xb, c * yb
        xb[channel] = -1j * s * root_eta
        xb[scatter] = -1j * s * root_loss
        if j < size - 1:
            u = steps[j]
            xb, yb = u[0, 0] * xb + u[0, 1] * np.conj(yb), u[0, 0] * yb + u[0, 1] * np.conj(xb)

    root = np.sqrt(grid.weights)
    scale = 1.0 / np.outer(root, root)
    kernel_n = scale * (np.conj(y_out) @ y_out.T)
    kernel_m = scale * (x_out @ y_out.T)
    kernel_n = 0.5 * (kernel_n + kernel_n.conj().T)
    kernel_m = 0.5 * (kernel_m + kernel_m.T)
    return MomentKernels(kernel_n=kernel_n, kernel_m=kernel_m, weights=grid.weights)
