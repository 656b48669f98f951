"""Dataclasses for all squeezetools data structures.

Units are strict SI with angular frequencies in rad/s. Array-holding classes use
``eq=False`` so that equality is identity rather than an element-wise comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from squeezetools.core.constants import SPEED_OF_LIGHT


class ModeLabel(Enum):
    DRIVE = "drive"
    SIGNAL = "signal"
    PUMP = "pump"


# ── Parameters ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ResonatorSpec:
    round_trip_length: float
    gamma_nl: float
    group_velocity: float | None = None
    group_index: float | None = None
    effective_index: float | None = None
    ring_radius: float | None = None

    @property
    def v_g(self) -> float:
        if self.group_velocity is not None:
            return self.group_velocity
        return SPEED_OF_LIGHT / self.group_index

    @property
    def n_g(self) -> float:
        if self.group_index is not None:
            return self.group_index
        return SPEED_OF_LIGHT / self.group_velocity


@dataclass(frozen=True)
class ModeSpec:
    label: ModeLabel
    omega: float
    q_intrinsic: float
    escape_efficiency: float
    q_loaded: float | None = None  # only with escape_efficiency == 1, and required there


@dataclass(frozen=True)
class DerivedRates:
    gamma_coupling: float
    m_scattering: float
    gamma_total: float
    q_loaded: float
    dwell_time: float
    omega: float = 0.0

    @property
    def escape_efficiency(self) -> float:
        return self.gamma_coupling / self.gamma_total


@dataclass(frozen=True)
class DriveConfig:
    power: float
    delta_net: float
    beta_d: float


@dataclass(frozen=True)
class PhaseMatchReport:
    delta_res: float
    delta_spm: float
    delta_xpm: float
    delta_net: float


# ── Pump ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_points: int

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.n_points - 1)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)

    @property
    def midpoints(self) -> np.ndarray:
        t = self.times
        return 0.5 * (t[:-1] + t[1:])

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights."""
        w = np.full(self.n_points, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return w


@dataclass(eq=False)
class PumpSolution:
    grid: TimeGrid
    alpha_in: np.ndarray
    beta_p: np.ndarray
    g: np.ndarray
    beta_mid: np.ndarray
    g_mid: np.ndarray
    richardson_error: float = 0.0


@dataclass(frozen=True)
class PumpBudget:
    input_photons: float
    transmitted_photons: float
    scattered_photons: float
    residual_photons: float

    @property
    def imbalance(self) -> float:
        accounted = self.transmitted_photons + self.scattered_photons + self.residual_photons
        if self.input_photons == 0.0:
            return abs(accounted)
        return abs(accounted - self.input_photons) / self.input_photons


# ── Green function ──────────────────────────────────────────────────────


@dataclass(eq=False)
class CouplingMatrixSeries:
    grid: TimeGrid
    gamma_total: float
    delta_tilde: np.ndarray
    g: np.ndarray
    delta_tilde_mid: np.ndarray
    g_mid: np.ndarray

    @staticmethod
    def traceless(delta_tilde: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Stack of A = [[iΔ̃, g], [g*, -iΔ̃]] matrices, shape (n, 2, 2)."""
        a = np.empty((len(g), 2, 2), dtype=complex)
        a[:, 0, 0] = 1j * delta_tilde
        a[:, 0, 1] = g
        a[:, 1, 0] = np.conj(g)
        a[:, 1, 1] = -1j * delta_tilde
        return a

    @property
    def matrices(self) -> np.ndarray:
        """Full M_k = -Γ̄ I + A_k on the grid samples."""
        m = self.traceless(self.delta_tilde, self.g)
        m[:, 0, 0] -= self.gamma_total
        m[:, 1, 1] -= self.gamma_total
        return m


@dataclass(eq=False)
class GreenTable:
    """Two-time Green function G(t_j, t_k) for j >= k.

    Only G11 and G12 are stored; the Bogoliubov structure fixes G22 = G11*
    and G21 = G12*. Entries with j < k are zero.
    """

    grid: TimeGrid
    gamma_total: float
    g11: np.ndarray
    g12: np.ndarray
    series: CouplingMatrixSeries | None = field(default=None, repr=False)

    @property
    def g21(self) -> np.ndarray:
        return np.conj(self.g12)

    @property
    def g22(self) -> np.ndarray:
        return np.conj(self.g11)

    def at(self, j: int, k: int) -> np.ndarray:
        if j < k:
            raise IndexError("GreenTable stores t_j >= t_k only")
        a, b = self.g11[j, k], self.g12[j, k]
        return np.array([[a, b], [np.conj(b), np.conj(a)]])


# ── Moments ─────────────────────────────────────────────────────────────


@dataclass(eq=False)
class IntracavityMoments:
    n_c: np.ndarray
    m_c: np.ndarray


@dataclass(eq=False)
class MomentKernels:
    kernel_n: np.ndarray
    kernel_m: np.ndarray
    weights: np.ndarray


# ── Modes ───────────────────────────────────────────────────────────────


@dataclass(eq=False)
class ModeRecord:
    n_lambda: float
    m_lambda: complex
    r_pure: float
    profile: np.ndarray
    takagi_value: float = 0.0


@dataclass(eq=False)
class ModeDecomposition:
    modes: list[ModeRecord] = field(default_factory=list)
    schmidt_number: float | None = None
    eta_escape: float = 1.0
    total_photons: float = 0.0
    takagi_fidelities: list[float] = field(default_factory=list)

    @property
    def dominant(self) -> ModeRecord | None:
        return self.modes[0] if self.modes else None


@dataclass(frozen=True)
class ThermalEquivalents:
    n_bar_reported: float
    r_prime_reported: float
    n_bar_williamson: float
    r_prime_williamson: float


@dataclass(frozen=True)
class SqueezingReport:
    v_squeezed_db: float
    v_antisqueezed_db: float
    v_anti_pure_db: float
    pulse_fwhm: float
    fidelity_vs_reference: float
    multi_peak: bool = False


# ── Noise budget ────────────────────────────────────────────────────────


@dataclass(frozen=True)
class NoiseReport:
    delta: float
    linewidth: float
    suppression: float
    snr: float
    xi: float
    snr_structural: float
    bs_fwm_modeled: bool = False


# ── Runs ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SweepRow:
    energy_pj: float
    n_modes: tuple[float, ...]
    v_squeezed_db: float
    v_antisqueezed_db: float
    v_anti_pure_db: float
    schmidt_k: float | None
    fidelity_vs_lowest_energy: float
    pulse_fwhm_ns: float


@dataclass(eq=False)
class SweepOutcome:
    """Rows and dominant profiles of a sweep; ``error`` is set when it aborted early."""

    grid: TimeGrid | None
    energies_pj: list[float] = field(default_factory=list)
    rows: list[SweepRow] = field(default_factory=list)
    profiles: list[np.ndarray] = field(default_factory=list)
    error: Exception | None = None

    @property
    def partial(self) -> bool:
        return self.error is not None


@dataclass(eq=False)
class RunResult:
    """Everything one pipeline run produced."""

    energy: float
    grid: TimeGrid
    signal_rates: DerivedRates
    pump_rates: DerivedRates
    drive_rates: DerivedRates
    coupling: float
    drive: DriveConfig
    phase_match: PhaseMatchReport | None
    pump: PumpSolution
    green: GreenTable
    kernels: MomentKernels
    decomposition: ModeDecomposition
    squeezing: SqueezingReport
    thermal: list[ThermalEquivalents] = field(default_factory=list)
    diagnostics: dict[str, float] = field(default_factory=dict)
