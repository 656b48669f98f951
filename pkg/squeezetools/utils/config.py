"""Run configuration: JSON schema, defaults, unit conversion and the auto grid.

Keys carry their unit (``frequency_THz``, ``energy_pJ``, ``power_mW``...).
Unknown keys are rejected at every level. Values are converted to SI with
angular frequencies in rad/s only when the physical value types are built.
"""

from __future__ import annotations

import dataclasses
import json
import math
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

from squeezetools.core.constants import (
    DEFAULT_MODE_COUNT,
    DEFAULT_PUMP_FWHM_FRACTION,
    DWELL_CONVENTIONS,
    DWELL_INVERSE_TOTAL,
    GRID_SAMPLES_PER_FWHM,
    GRID_SAMPLES_PER_PUMP_LIFETIME,
    GRID_TAIL_DWELLS,
    MAX_KERNEL_POINTS,
    MICROMETER,
    MIN_GRID_POINTS,
    MODE_LABELS,
    NANOSECOND,
    PULSE_LEAD_FWHM,
    PUMP_CONVERGENCE_RTOL,
    THZ,
    TWO_PI,
)
from squeezetools.core.errors import ConfigError, TruncationError
from squeezetools.core.models import DerivedRates, ModeLabel, ModeSpec, ResonatorSpec, TimeGrid

APP_NAME = "squeezetools"
APP_VERSION = "1.0.0"
GRID_RULE = (
    "span [center - 5 fwhm, center + 8/gamma_total_S]; n_points = smallest power of two "
    "with dt <= min(fwhm/20, 1/(20 gamma_total_P))"
)


@dataclass(frozen=True)
class ResonatorBlock:
    round_trip_length_um: float
    gamma_nl_per_W_m: float
    group_index: float | None = None
    group_velocity_m_per_s: float | None = None
    effective_index: float | None = None
    ring_radius_um: float | None = None


@dataclass(frozen=True)
class ModeBlock:
    frequency_THz: float
    q_intrinsic: float
    escape_efficiency: float
    q_loaded: float | None = None


@dataclass(frozen=True)
class ModesBlock:
    drive: ModeBlock
    signal: ModeBlock
    pump: ModeBlock


@dataclass(frozen=True)
class DriveBlock:
    power_mW: float | None = None
    phase_match: bool = False
    delta_res_rad_per_s: float = 0.0
    delta_net_rad_per_s: float = 0.0


@dataclass(frozen=True)
class PulseBlock:
    shape: str = "gaussian"
    energy_pJ: float | None = None
    energies_pJ: tuple[float, ...] = ()
    fwhm_ns: float | None = None
    fwhm_dwell_fraction: float = DEFAULT_PUMP_FWHM_FRACTION
    center_ns: float = 0.0


@dataclass(frozen=True)
class GridBlock:
    auto: bool = True
    t_start_ns: float | None = None
    t_end_ns: float | None = None
    n_points: int | None = None


@dataclass(frozen=True)
class SolverBlock:
    pump_tolerance: float = PUMP_CONVERGENCE_RTOL
    mode_count: int = DEFAULT_MODE_COUNT
    dwell_convention: str = DWELL_INVERSE_TOTAL
    max_kernel_points: int = MAX_KERNEL_POINTS
    workers: int = 1


@dataclass(frozen=True)
class NoiseBlock:
    pump_power_mW: float = 1.0
    q_mode: str = "signal"


@dataclass(frozen=True)
class OutputBlock:
    directory: str = "out"
    formats: tuple[str, ...] = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    resonator: ResonatorBlock
    modes: ModesBlock
    drive: DriveBlock = field(default_factory=DriveBlock)
    pulse: PulseBlock = field(default_factory=PulseBlock)
    grid: GridBlock = field(default_factory=GridBlock)
    solver: SolverBlock = field(default_factory=SolverBlock)
    noise: NoiseBlock = field(default_factory=NoiseBlock)
    output: OutputBlock = field(default_factory=OutputBlock)


# ── Loading ─────────────────────────────────────────────────────────────


def _type_name(hint) -> str:
    return getattr(hint, "__name__", None) or str(hint).replace("typing.", "")


def _coerce(value, hint, key: str):
    """Check a JSON value against a field annotation; ints widen to float."""
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        args = typing.get_args(hint)
        if value is None and type(None) in args:
            return None
        for arg in args:
            if arg is type(None):
                continue
            try:
                return _coerce(value, arg, key)
            except ConfigError:
                pass
        raise ConfigError(f"{key} must be {_type_name(hint)}, got {value!r}")
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} must be a list, got {value!r}")
        item = typing.get_args(hint)[0]
        return tuple(_coerce(v, item, f"{key}[{i}]") for i, v in enumerate(value))
    if hint is bool:
        ok = isinstance(value, bool)
    elif hint is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif hint is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok:
            value = float(value)
    elif hint is str:
        ok = isinstance(value, str)
    else:
        ok = True
    if not ok:
        raise ConfigError(f"{key} must be {_type_name(hint)}, got {value!r}")
    return value


def _build(cls, data, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    known = {f.name: f for f in dataclasses.fields(cls)}
    hints = typing.get_type_hints(cls)
    unknown = sorted(set(data) - set(known))
    if unknown:
        where = ", ".join(f"{path}.{k}" if path else k for k in unknown)
        raise ConfigError(f"unknown config key(s): {where}")
    kwargs = {}
    for name, f in known.items():
        key = f"{path}.{name}" if path else name
        if name not in data:
            if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
                raise ConfigError(f"missing config key: {key}")
            continue
        nested = _BLOCKS.get((cls, name))
        if nested is not None:
            kwargs[name] = _build(nested, data[name], key)
        else:
            kwargs[name] = _coerce(data[name], hints[name], key)
    return cls(**kwargs)


_BLOCKS = {
    (RunConfig, "resonator"): ResonatorBlock,
    (RunConfig, "modes"): ModesBlock,
    (RunConfig, "drive"): DriveBlock,
    (RunConfig, "pulse"): PulseBlock,
    (RunConfig, "grid"): GridBlock,
    (RunConfig, "solver"): SolverBlock,
    (RunConfig, "noise"): NoiseBlock,
    (RunConfig, "output"): OutputBlock,
    (ModesBlock, "drive"): ModeBlock,
    (ModesBlock, "signal"): ModeBlock,
    (ModesBlock, "pump"): ModeBlock,
}


def config_from_dict(data: dict) -> RunConfig:
    """Build and validate a RunConfig from a parsed JSON object."""
    return validate_config(_build(RunConfig, data, ""))


def load_config(path: Path | str) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def config_to_dict(config: RunConfig) -> dict:
    """Canonical dict of the resolved config (tuples become lists)."""

    def convert(value):
        if isinstance(value, dict):
            return {k: convert(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [convert(v) for v in value]
        return value

    return convert(dataclasses.asdict(config))


def _positive(value, key: str) -> None:
    if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if not (math.isfinite(value) and value > 0.0):
        raise ConfigError(f"{key} must be strictly positive, got {value!r}")


def validate_config(config: RunConfig) -> RunConfig:
    """Check value ranges and cross-field rules that the schema cannot express."""
    for label in MODE_LABELS:
        mode = getattr(config.modes, label)
        _positive(mode.frequency_THz, f"modes.{label}.frequency_THz")
        _positive(mode.q_intrinsic, f"modes.{label}.q_intrinsic")
        if mode.q_loaded is not None and mode.escape_efficiency != 1.0:
            raise ConfigError(
                f"modes.{label}.q_loaded is only allowed with escape_efficiency = 1 "
                f"(got escape_efficiency = {mode.escape_efficiency!r})"
            )
    pulse = config.pulse
    if pulse.shape != "gaussian":
        raise ConfigError(f"pulse.shape {pulse.shape!r} is not supported (only 'gaussian')")
    if pulse.fwhm_ns is not None:
        _positive(pulse.fwhm_ns, "pulse.fwhm_ns")
    _positive(pulse.fwhm_dwell_fraction, "pulse.fwhm_dwell_fraction")
    if pulse.energy_pJ is not None and not pulse.energy_pJ >= 0.0:
        raise ConfigError(f"pulse.energy_pJ must be non-negative, got {pulse.energy_pJ!r}")
    if config.drive.phase_match:
        if config.drive.power_mW is not None:
            raise ConfigError("drive.power_mW and drive.phase_match are mutually exclusive")
    elif config.drive.power_mW is None or not config.drive.power_mW >= 0.0:
        raise ConfigError("drive.power_mW is required unless drive.phase_match is set")
    grid = config.grid
    if not grid.auto:
        if grid.t_start_ns is None or grid.t_end_ns is None or grid.n_points is None:
            raise ConfigError("grid.t_start_ns, grid.t_end_ns and grid.n_points are required "
                              "when grid.auto is false")
        if not grid.t_end_ns > grid.t_start_ns:
            raise ConfigError("grid.t_end_ns must exceed grid.t_start_ns")
        if grid.n_points < MIN_GRID_POINTS:
            raise ConfigError(f"grid.n_points must be at least {MIN_GRID_POINTS}")
    solver = config.solver
    if solver.dwell_convention not in DWELL_CONVENTIONS:
        raise ConfigError(
            f"solver.dwell_convention must be one of {DWELL_CONVENTIONS}, "
            f"got {solver.dwell_convention!r}"
        )
    _positive(solver.pump_tolerance, "solver.pump_tolerance")
    if solver.mode_count < 1 or solver.workers < 1 or solver.max_kernel_points < MIN_GRID_POINTS:
        raise ConfigError("solver.mode_count, solver.workers and solver.max_kernel_points "
                          "must be positive")
    if config.noise.q_mode not in MODE_LABELS:
        raise ConfigError(f"noise.q_mode must be one of {MODE_LABELS}")
    return config


def with_energy(config: RunConfig, energy_pj: float) -> RunConfig:
    return dataclasses.replace(
        config, pulse=dataclasses.replace(config.pulse, energy_pJ=float(energy_pj))
    )


def parse_energies(text: str) -> tuple[float, ...]:
    """``"1,10,100"`` or ``"log:1,100,10"`` (min, max, count) in pJ."""
    text = text.strip()
    try:
        if text.startswith("log:"):
            lo, hi, count = text[4:].split(",")
            lo, hi, n = float(lo), float(hi), int(count)
            if not (0.0 < lo < hi) or n < 2:
                raise ConfigError(f"invalid log energy range {text!r}")
            ratio = (hi / lo) ** (1.0 / (n - 1))
            return tuple(lo * ratio**k for k in range(n - 1)) + (hi,)
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse energy list {text!r}") from exc


# ── Physical value types from the config ────────────────────────────────


def resonator_spec(config: RunConfig) -> ResonatorSpec:
    block = config.resonator
    return ResonatorSpec(
        round_trip_length=block.round_trip_length_um * MICROMETER,
        gamma_nl=block.gamma_nl_per_W_m,
        group_velocity=block.group_velocity_m_per_s,
        group_index=block.group_index,
        effective_index=block.effective_index,
        ring_radius=None if block.ring_radius_um is None else block.ring_radius_um * MICROMETER,
    )


def mode_spec(config: RunConfig, label: ModeLabel) -> ModeSpec:
    block: ModeBlock = getattr(config.modes, label.value)
    return ModeSpec(
        label=label,
        omega=TWO_PI * block.frequency_THz * THZ,
        q_intrinsic=block.q_intrinsic,
        escape_efficiency=block.escape_efficiency,
        q_loaded=block.q_loaded,
    )


def pulse_fwhm(config: RunConfig, signal_rates: DerivedRates) -> float:
    """Intensity FWHM in seconds; by default a fraction of the signal dwell time."""
    if config.pulse.fwhm_ns is not None:
        return config.pulse.fwhm_ns * NANOSECOND
    return config.pulse.fwhm_dwell_fraction * signal_rates.dwell_time


def auto_grid(
    center: float,
    fwhm: float,
    signal_rates: DerivedRates,
    pump_rates: DerivedRates,
) -> TimeGrid:
    """Grid spanning the pulse lead-in and the signal ring-down."""
    t_start = center - PULSE_LEAD_FWHM * fwhm
    t_end = center + GRID_TAIL_DWELLS / signal_rates.gamma_total
    dt_max = min(fwhm / GRID_SAMPLES_PER_FWHM,
                 1.0 / (GRID_SAMPLES_PER_PUMP_LIFETIME * pump_rates.gamma_total))
    n_points = MIN_GRID_POINTS
    while (t_end - t_start) / (n_points - 1) > dt_max:
        n_points *= 2
    return TimeGrid(t_start, t_end, n_points)


def resolve_grid(
    config: RunConfig,
    fwhm: float,
    signal_rates: DerivedRates,
    pump_rates: DerivedRates,
) -> TimeGrid:
    center = config.pulse.center_ns * NANOSECOND
    if config.grid.auto:
        grid = auto_grid(center, fwhm, signal_rates, pump_rates)
    else:
        grid = TimeGrid(
            config.grid.t_start_ns * NANOSECOND,
            config.grid.t_end_ns * NANOSECOND,
            int(config.grid.n_points),
        )
    lead = center - grid.t_start
    if lead < PULSE_LEAD_FWHM * fwhm * (1.0 - 1e-9):
        raise TruncationError(
            f"grid starts {lead / fwhm:.3g} pulse FWHM before the pulse centre; "
            f"at least {PULSE_LEAD_FWHM:g} are needed for the pump to start from vacuum"
        )
    if grid.n_points > config.solver.max_kernel_points:
        raise ConfigError(
            f"grid of {grid.n_points} points exceeds solver.max_kernel_points = "
            f"{config.solver.max_kernel_points}; dense kernels need O(n^2) memory"
        )
    return grid
