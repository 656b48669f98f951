"""Two-time Green function of the linearized signal dynamics.

d/dt (b, b†)ᵀ = M(t) (b, b†)ᵀ + d_in(t) with M(t) = -Γ̄_S I₂ + A(t),
A(t) = [[iΔ̃, g], [g*, -iΔ̃]], Δ̃ = Δ_net/2 + 2Λ|β̄_P|².

The propagator factorizes as P(t) = e^{-Γ̄_S (t - t_start)} U(t) where U is the
propagator of the traceless A(t), so G(t_j, t_k) = e^{-Γ̄_S (t_j - t_k)} U_j U_k⁻¹
and U_k⁻¹ is the adjugate. U is advanced with a fourth-order Magnus step built
from the start, midpoint and end samples of A, exponentiated in closed form,
which keeps det U = 1 and the Bogoliubov structure exact up to rounding.
"""

from __future__ import annotations

import logging

import numpy as np

from squeezetools.core.constants import PROPAGATOR_MAX_ENTRY, SU11_RTOL
from squeezetools.core.errors import ConditioningError, InvalidParameterError, SolverAccuracyError
from squeezetools.core.models import CouplingMatrixSeries, GreenTable, PumpSolution, TimeGrid

logger = logging.getLogger(__name__)


def coupling_matrix(
    pump: PumpSolution,
    delta_net: float,
    coupling: float,
    gamma_total: float,
) -> CouplingMatrixSeries:
    """Coupling-matrix samples (grid points and step midpoints) from a pump solution."""
    return CouplingMatrixSeries(
        grid=pump.grid,
        gamma_total=gamma_total,
        delta_tilde=0.5 * delta_net + 2.0 * coupling * np.abs(pump.beta_p) ** 2,
        g=np.asarray(pump.g, dtype=complex),
        delta_tilde_mid=0.5 * delta_net + 2.0 * coupling * np.abs(pump.beta_mid) ** 2,
        g_mid=np.asarray(pump.g_mid, dtype=complex),
    )


def _commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def expm_traceless(omega: np.ndarray) -> np.ndarray:
    """exp of a stack of traceless 2x2 matrices: cosh κ I + (sinh κ / κ) Ω, κ² = -det Ω."""
    kappa_sq = omega[:, 0, 0] ** 2 + omega[:, 0, 1] * omega[:, 1, 0]
    kappa = np.sqrt(kappa_sq.astype(complex))
    c = np.cosh(kappa)
    s = np.sinc(1j * kappa / np.pi)  # sinh κ / κ, finite at κ = 0
    out = s[:, None, None] * omega
    out[:, 0, 0] += c
    out[:, 1, 1] += c
    return out


def magnus_steps(series: CouplingMatrixSeries) -> np.ndarray:
    """One-step propagators E_k of the traceless part, shape (n-1, 2, 2)."""
    h = series.grid.dt
    a0 = CouplingMatrixSeries.traceless(series.delta_tilde[:-1], series.g[:-1])
    am = CouplingMatrixSeries.traceless(series.delta_tilde_mid, series.g_mid)
    a1 = CouplingMatrixSeries.traceless(series.delta_tilde[1:], series.g[1:])
    omega = (h / 6.0) * (a0 + 4.0 * am + a1) - (h * h / 12.0) * _commutator(a0, a1)
    return expm_traceless(omega)


def magnus_half_steps(series: CouplingMatrixSeries) -> np.ndarray:
    """Traceless propagators from each step midpoint to the step end, shape (n-1, 2, 2).

    A at the three-quarter point comes from the quadratic through the start,
    midpoint and end samples.
    """
    h = 0.5 * series.grid.dt
    a0 = CouplingMatrixSeries.traceless(series.delta_tilde[:-1], series.g[:-1])
    am = CouplingMatrixSeries.traceless(series.delta_tilde_mid, series.g_mid)
    a1 = CouplingMatrixSeries.traceless(series.delta_tilde[1:], series.g[1:])
    a_quarter = (6.0 * am + 3.0 * a1 - a0) / 8.0
    omega = (h / 6.0) * (am + 4.0 * a_quarter + a1) - (h * h / 12.0) * _commutator(am, a1)
    return expm_traceless(omega)


def propagators(series: CouplingMatrixSeries) -> np.ndarray:
    """U_k with U_0 = I, shape (n, 2, 2)."""
    steps = magnus_steps(series)
    n = series.grid.n_points
    u = np.empty((n, 2, 2), dtype=complex)
    u[0] = np.eye(2)
    for k in range(n - 1):
        u[k + 1] = steps[k] @ u[k]
    peak = float(np.max(np.abs(u)))
    if not np.isfinite(peak) or peak > PROPAGATOR_MAX_ENTRY:
        raise ConditioningError(
            f"propagator entries reached {peak:.3e}; the squeezing gain is too large "
            "for the factorized solver"
        )
    return u


def solve_green(series: CouplingMatrixSeries, grid: TimeGrid | None = None) -> GreenTable:
    """Lower-triangular Green table G(t_j, t_k), j >= k."""
    grid = grid or series.grid
    if grid.n_points != len(series.g):
        raise InvalidParameterError("coupling series and grid lengths differ")
    if not (np.all(np.isfinite(series.g)) and np.all(np.isfinite(series.delta_tilde))):
        raise InvalidParameterError("coupling series contains non-finite samples")

    u = propagators(series)
    # adjugate = inverse, det U = 1
    inv00, inv01 = u[:, 1, 1], -u[:, 0, 1]
    inv10, inv11 = -u[:, 1, 0], u[:, 0, 0]
    w11 = np.outer(u[:, 0, 0], inv00) + np.outer(u[:, 0, 1], inv10)
    w12 = np.outer(u[:, 0, 0], inv01) + np.outer(u[:, 0, 1], inv11)

    lower = np.tri(grid.n_points, dtype=bool)
    _check_su11(w11, w12, lower)

    t = grid.times
    tau = np.maximum(np.subtract.outer(t, t), 0.0)
    decay = np.where(lower, np.exp(-series.gamma_total * tau), 0.0)
    g11 = w11 * decay
    g12 = w12 * decay
    np.fill_diagonal(g11, 1.0)
    np.fill_diagonal(g12, 0.0)
    logger.info("green table solved on %d points", grid.n_points)
    return GreenTable(grid=grid, gamma_total=series.gamma_total, g11=g11, g12=g12,
                      series=series)


def _check_su11(w11: np.ndarray, w12: np.ndarray, lower: np.ndarray) -> None:
    norm = np.abs(w11) ** 2 - np.abs(w12) ** 2
    drift = float(np.max(np.where(lower, np.abs(norm - 1.0) / np.abs(w11) ** 2, 0.0)))
    logger.debug("SU(1,1) norm drift %.3e", drift)
    if drift > SU11_RTOL:
        raise SolverAccuracyError(
            f"SU(1,1) norm drift {drift:.3e} exceeds {SU11_RTOL:.0e}; "
            "try a finer grid (more grid points)"
        )


def su11_norm(green: GreenTable) -> np.ndarray:
    """|G11 e^{Γ̄τ}|² - |G12 e^{Γ̄τ}|² on the stored triangle (ones ideally)."""
    t = green.grid.times
    tau = np.subtract.outer(t, t)
    lower = np.tri(green.grid.n_points, dtype=bool)
    undo = np.where(lower, np.exp(green.gamma_total * np.where(lower, tau, 0.0)), 0.0)
    return np.where(
        lower,
        np.abs(green.g11 * undo) ** 2 - np.abs(green.g12 * undo) ** 2,
        1.0,
    )
