"""Temporal-mode decomposition of the output moment kernels.

Kernels are discretized with trapezoid weights W. The Hermitian kernel is
diagonalized as W^{1/2} N W^{1/2} = V diag(n) V†, the symmetric one is
Takagi-factorized as W^{1/2} M W^{1/2} = U diag(m) Uᵀ, and in both cases the
profiles are f = W^{-1/2}·(column), orthonormal under the weighted inner
product. The mode operator of a profile is A = Σ_k w_k f(t_k) a(t_k), so
n = ⟨A†A⟩ = f† W N W f and m = ⟨AA⟩ = fᵀ W M W f.
"""

from __future__ import annotations

import logging
import math

import numpy as np
import scipy.linalg

from squeezetools.core.constants import (
    DEFAULT_MODE_COUNT,
    PSD_RTOL,
    TAKAGI_DEGENERACY_TOL,
)
from squeezetools.core.errors import (
    InvalidParameterError,
    NonPhysicalError,
    PSDViolationError,
    UncertaintyViolationError,
    UndefinedError,
)
from squeezetools.core.models import (
    ModeDecomposition,
    ModeRecord,
    MomentKernels,
    SqueezingReport,
    ThermalEquivalents,
    TimeGrid,
)

logger = logging.getLogger(__name__)


def _fix_phase(profiles: np.ndarray) -> np.ndarray:
    """Rotate each column so its sample of largest modulus is real positive."""
    peaks = np.argmax(np.abs(profiles), axis=0)
    values = profiles[peaks, np.arange(profiles.shape[1])]
    phases = np.where(np.abs(values) > 0.0, np.conj(values) / np.abs(values), 1.0)
    return profiles * phases[None, :]


def _order_ties(values: np.ndarray, profiles: np.ndarray,
                 tol: float = TAKAGI_DEGENERACY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Within runs of (relatively) equal values, order profiles by earliest peak."""
    size = len(values)
    if size == 0:
        return values, profiles
    scale = max(float(values[0]), np.finfo(float).tiny)
    peaks = np.argmax(np.abs(profiles), axis=0)
    order = np.arange(size)
    start = 0
    for k in range(1, size + 1):
        if k == size or values[k - 1] - values[k] > tol * scale:
            block = order[start:k]
            order[start:k] = block[np.argsort(peaks[block], kind="stable")]
            start = k
    return values[order], profiles[:, order]


def schmidt_modes(kernels: MomentKernels) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues n_λ (descending) and profiles (columns) of the N kernel."""
    root = np.sqrt(kernels.weights)
    weighted = root[:, None] * kernels.kernel_n * root[None, :]
    weighted = 0.5 * (weighted + weighted.conj().T)
    values, vectors = scipy.linalg.eigh(weighted)
    values, vectors = values[::-1], vectors[:, ::-1]

    top = float(values[0]) if len(values) else 0.0
    floor = float(values[-1]) if len(values) else 0.0
    logger.debug("N kernel spectrum: max %.4e, min %.4e", top, floor)
    if floor < -PSD_RTOL * max(top, np.finfo(float).tiny):
        raise PSDViolationError(
            f"N kernel has eigenvalue {floor:.3e} below -{PSD_RTOL:.0e} x max ({top:.3e})"
        )
    values = np.clip(values, 0.0, None)
    return _order_ties(values, _fix_phase(vectors / root[:, None]))


def takagi(matrix: np.ndarray, tol: float = TAKAGI_DEGENERACY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization A = U diag(s) Uᵀ of a complex symmetric matrix.

    SVD A = V diag(s) W†; within each block of (relatively) equal singular
    values Z = Vᵀ W is symmetric unitary and U = V (√Z)*. Blocks with zero
    singular value keep the columns of V.
    """
    size = matrix.shape[0]
    if not np.any(matrix):
        return np.zeros(size), np.eye(size, dtype=complex)

    v, s, wh = np.linalg.svd(matrix)
    w = wh.conj().T
    scale = float(s[0])
    blocks: list[np.ndarray] = []
    start = 0
    for k in range(1, size + 1):
        if k == size or s[k - 1] - s[k] > tol * scale:
            idx = np.arange(start, k)
            if s[start] <= tol * scale:
                blocks.append(np.eye(len(idx), dtype=complex))
            else:
                z = v[:, idx].T @ w[:, idx]
                blocks.append(scipy.linalg.sqrtm(z).conj())
            start = k
    u = v @ scipy.linalg.block_diag(*blocks)
    return s, u


def takagi_modes(kernels: MomentKernels) -> tuple[np.ndarray, np.ndarray]:
    """Takagi values m_λ ≥ 0 (descending) and profiles of the M kernel."""
    m = kernels.kernel_m
    scale = max(float(np.max(np.abs(m))), np.finfo(float).tiny)
    if float(np.max(np.abs(m - m.T))) > 1e-10 * scale:
        raise InvalidParameterError("M kernel is not symmetric")
    root = np.sqrt(kernels.weights)
    weighted = root[:, None] * m * root[None, :]
    values, u = takagi(0.5 * (weighted + weighted.T))
    profiles = np.conj(u) / root[:, None]
    return _order_ties(values, _fix_phase(profiles))


def schmidt_number(n_list) -> float:
    """K = (Σn)² / Σn²."""
    n = np.asarray(n_list, dtype=float)
    if np.any(n < 0.0):
        raise InvalidParameterError("mode occupations must be non-negative")
    total_sq = float(np.sum(n**2))
    if total_sq == 0.0:
        raise UndefinedError("Schmidt number is undefined for a vacuum output")
    return float(np.sum(n)) ** 2 / total_sq


def mode_fidelity(f_a: np.ndarray, f_b: np.ndarray, weights: np.ndarray) -> float:
    """|⟨f_a, f_b⟩_w|², insensitive to the global phase of either profile."""
    return float(abs(np.sum(weights * np.conj(f_a) * f_b)) ** 2)


def pure_squeezing(n: float, eta: float = 1.0) -> float:
    """r_pure with sinh²r_pure = n/η."""
    if eta <= 0.0:
        return 0.0
    return math.asinh(math.sqrt(max(n, 0.0) / eta))


def lossy_squeezed_moments(r: float, eta: float) -> tuple[float, float]:
    """(n, m) of a squeezed vacuum of parameter r after transmission η."""
    return eta * math.sinh(r) ** 2, eta * math.sinh(r) * math.cosh(r)


def _db(value: float) -> float:
    return 10.0 * math.log10(value)


def quadrature_variances(n0: float, m0: complex, r_pure: float) -> tuple[float, float, float]:
    """(V-, V+, V_anti,pure) in dB relative to vacuum (vacuum variance = 1)."""
    v_minus = 1.0 + 2.0 * n0 - 2.0 * abs(m0)
    v_plus = 1.0 + 2.0 * n0 + 2.0 * abs(m0)
    if not v_minus > 0.0:
        raise UncertaintyViolationError(
            f"squeezed-quadrature variance {v_minus:.3e} is not positive "
            f"(n = {n0:.6e}, |m| = {abs(m0):.6e})"
        )
    return _db(v_minus), _db(v_plus), _db(math.exp(2.0 * r_pure))


def thermal_equivalents(n: float, m: complex, eta: float) -> ThermalEquivalents:
    """Thermal-then-squeezed equivalents of a single-mode state.

    The reported pair uses n̄ = η sinh²r, r′ = atanh(η sinh r cosh r / (1 + η sinh²r))
    with r the pure-state parameter. The Williamson pair is the decomposition
    that reproduces (n, m): n̄ = √((n + ½)² - |m|²) - ½, r′ = ½ atanh(2|m|/(2n + 1)).
    The two pairs differ whenever η < 1.
    """
    if n < 0.0:
        raise NonPhysicalError(f"mode occupation must be non-negative, got {n!r}")
    if 2.0 * abs(m) >= 2.0 * n + 1.0:
        raise NonPhysicalError(
            f"|2m| = {2.0 * abs(m):.6e} violates the bound 2n + 1 = {2.0 * n + 1.0:.6e}"
        )
    r = pure_squeezing(n, eta)
    sh, ch = math.sinh(r), math.cosh(r)
    n_bar_reported = eta * sh * sh
    r_prime_reported = math.atanh(eta * sh * ch / (1.0 + eta * sh * sh))
    n_bar_w = math.sqrt((n + 0.5) ** 2 - abs(m) ** 2) - 0.5
    r_prime_w = 0.5 * math.atanh(2.0 * abs(m) / (2.0 * n + 1.0))
    return ThermalEquivalents(
        n_bar_reported=n_bar_reported,
        r_prime_reported=r_prime_reported,
        n_bar_williamson=max(n_bar_w, 0.0),
        r_prime_williamson=r_prime_w,
    )


def profile_fwhm(profile: np.ndarray, grid: TimeGrid) -> tuple[float, bool]:
    """Intensity FWHM of |f|² around its global peak, and a multi-peak flag.

    The flag is also raised when the half-maximum region touches the grid
    edge (flat or truncated profiles).
    """
    intensity = np.abs(profile) ** 2
    t = grid.times
    peak = int(np.argmax(intensity))
    half = 0.5 * float(intensity[peak])
    if half == 0.0:
        return 0.0, True
    above = intensity >= half
    runs = int(np.count_nonzero(np.diff(above.astype(np.int8)) == 1)) + int(above[0])
    flagged = runs > 1

    left = peak
    while left > 0 and intensity[left - 1] >= half:
        left -= 1
    if left == 0:
        t_left = t[0]
        flagged = True
    else:
        i0, i1 = intensity[left - 1], intensity[left]
        t_left = t[left - 1] + (half - i0) / (i1 - i0) * (t[left] - t[left - 1])

    right = peak
    last = len(intensity) - 1
    while right < last and intensity[right + 1] >= half:
        right += 1
    if right == last:
        t_right = t[last]
        flagged = True
    else:
        i0, i1 = intensity[right], intensity[right + 1]
        t_right = t[right] + (i0 - half) / (i0 - i1) * (t[right + 1] - t[right])

    if flagged:
        logger.warning("profile has no single dominant peak; FWHM taken around the global peak")
    return float(t_right - t_left), flagged


def decompose(
    kernels: MomentKernels,
    eta: float,
    n_modes: int = DEFAULT_MODE_COUNT,
) -> ModeDecomposition:
    """Joint Schmidt/Takagi decomposition keeping the ``n_modes`` largest modes."""
    if not 0.0 < eta <= 1.0:
        raise InvalidParameterError(f"escape efficiency must lie in (0, 1], got {eta!r}")
    n_values, n_profiles = schmidt_modes(kernels)
    m_values, m_profiles = takagi_modes(kernels)
    w = kernels.weights
    weighted_m = w[:, None] * kernels.kernel_m * w[None, :]

    count = min(n_modes, len(n_values))
    modes: list[ModeRecord] = []
    fidelities: list[float] = []
    for k in range(count):
        f = n_profiles[:, k]
        n_k = float(n_values[k])
        modes.append(
            ModeRecord(
                n_lambda=n_k,
                m_lambda=complex(f @ weighted_m @ f),
                r_pure=pure_squeezing(n_k, eta),
                profile=f,
                takagi_value=float(m_values[k]),
            )
        )
        fidelities.append(mode_fidelity(f, m_profiles[:, k], w))

    total = float(np.sum(n_values))
    try:
        k_number = schmidt_number(n_values)
    except UndefinedError:
        logger.warning("vacuum output: Schmidt number undefined")
        k_number = None
    logger.info(
        "decomposition: n0 = %.6e, K = %s, total photons %.6e",
        modes[0].n_lambda if modes else 0.0,
        "undefined" if k_number is None else f"{k_number:.6f}",
        total,
    )
    return ModeDecomposition(
        modes=modes,
        schmidt_number=k_number,
        eta_escape=eta,
        total_photons=total,
        takagi_fidelities=fidelities,
    )


def squeezing_report(
    decomposition: ModeDecomposition,
    grid: TimeGrid,
    reference_profile: np.ndarray | None = None,
) -> SqueezingReport:
    """Squeezing metrics of the dominant mode."""
    mode = decomposition.dominant
    if mode is None:
        raise InvalidParameterError("decomposition holds no modes")
    v_minus, v_plus, v_pure = quadrature_variances(mode.n_lambda, mode.m_lambda, mode.r_pure)
    if mode.n_lambda > 0.0:
        fwhm, multi_peak = profile_fwhm(mode.profile, grid)
    else:
        # vacuum: the profile is an arbitrary null-space vector
        fwhm, multi_peak = 0.0, False
    fidelity = 1.0
    if reference_profile is not None:
        fidelity = mode_fidelity(reference_profile, mode.profile, grid.weights)
    return SqueezingReport(
        v_squeezed_db=v_minus,
        v_antisqueezed_db=v_plus,
        v_anti_pure_db=v_pure,
        pulse_fwhm=fwhm,
        fidelity_vs_reference=fidelity,
        multi_peak=multi_peak,
    )
