"""Energy sweeps and the target-photon-number solve."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

from scipy.optimize import brentq

from squeezetools.analyzer.modes import mode_fidelity
from squeezetools.core.constants import NANOSECOND
from squeezetools.core.errors import InvalidParameterError, NoSolutionError, SqueezeToolsError
from squeezetools.core.models import RunResult, SweepOutcome, SweepRow
from squeezetools.runner.pipeline import run_simulation
from squeezetools.utils.config import RunConfig

logger = logging.getLogger(__name__)


def _check_energies(energies) -> list[float]:
    energies = [float(e) for e in energies]
    if len(energies) < 2:
        raise InvalidParameterError("a sweep needs at least two energies")
    if any(b <= a for a, b in zip(energies, energies[1:])):
        raise InvalidParameterError("sweep energies must be strictly increasing")
    if energies[0] < 0.0:
        raise InvalidParameterError("sweep energies must be non-negative")
    return energies


def _summary(result: RunResult, mode_count: int):
    """Keep what the sweep reports and let the dense tables go."""
    occupations = [mode.n_lambda for mode in result.decomposition.modes]
    occupations += [0.0] * (mode_count - len(occupations))
    return result.grid, result.decomposition, result.squeezing, tuple(occupations[:mode_count])


def sweep_energies(
    config: RunConfig,
    energies_pj,
    progress_callback: callable | None = None,
) -> SweepOutcome:
    """Run the pipeline at each energy (pJ) and build one SweepRow per energy.

    Points run on ``solver.workers`` threads and are merged in energy order.
    The first failing point aborts the sweep; rows before it are kept and the
    outcome carries the error. progress_callback(current, total, energy_pj) is
    called as points complete.
    """
    energies = _check_energies(energies_pj)
    mode_count = config.solver.mode_count
    total = len(energies)
    summaries = []
    error: SqueezeToolsError | None = None

    def run_point(energy: float):
        return _summary(run_simulation(config, energy), mode_count)

    with ThreadPoolExecutor(max_workers=config.solver.workers) as pool:
        futures = [pool.submit(run_point, energy) for energy in energies]
        for i, (energy, future) in enumerate(zip(energies, futures)):
            try:
                summaries.append(future.result())
            except SqueezeToolsError as exc:
                logger.warning("sweep aborted at %.4g pJ: %s", energy, exc)
                error = exc
                for pending in futures[i + 1:]:
                    pending.cancel()
                break
            if progress_callback:
                progress_callback(i + 1, total, energy)

    outcome = SweepOutcome(grid=summaries[0][0] if summaries else None, error=error)
    if not summaries:
        return outcome
    reference = summaries[0][1].dominant.profile
    weights = outcome.grid.weights
    for energy, (grid, decomposition, squeezing, occupations) in zip(energies, summaries):
        profile = decomposition.dominant.profile
        outcome.energies_pj.append(energy)
        outcome.profiles.append(profile)
        outcome.rows.append(
            SweepRow(
                energy_pj=energy,
                n_modes=occupations,
                v_squeezed_db=squeezing.v_squeezed_db,
                v_antisqueezed_db=squeezing.v_antisqueezed_db,
                v_anti_pure_db=squeezing.v_anti_pure_db,
                schmidt_k=decomposition.schmidt_number,
                fidelity_vs_lowest_energy=mode_fidelity(reference, profile, weights),
                pulse_fwhm_ns=squeezing.pulse_fwhm / NANOSECOND,
            )
        )
    return outcome


def solve_energy_for_photons(
    config: RunConfig,
    photons: float,
    bracket_pj: tuple[float, float] = (0.01, 1000.0),
    rtol: float = 1e-4,
) -> tuple[float, RunResult]:
    """Pulse energy (pJ) whose dominant mode carries ``photons`` mean photons."""
    if not photons > 0.0:
        raise InvalidParameterError("target photon number must be positive")
    lo, hi = bracket_pj
    if not 0.0 < lo < hi:
        raise InvalidParameterError("energy bracket must satisfy 0 < low < high")

    def dominant(log_energy: float) -> float:
        result = run_simulation(config, math.exp(log_energy))
        n0 = result.decomposition.dominant.n_lambda
        logger.debug("target solve: %.6g pJ -> n0 = %.6e", math.exp(log_energy), n0)
        return n0 - photons

    f_lo, f_hi = dominant(math.log(lo)), dominant(math.log(hi))
    if f_lo * f_hi > 0.0:
        raise NoSolutionError(
            f"{photons} photons is not reached between {lo} and {hi} pJ"
        )
    log_energy = brentq(dominant, math.log(lo), math.log(hi), rtol=rtol)
    energy_pj = math.exp(log_energy)
    logger.info("target %.4g photons reached at %.6g pJ", photons, energy_pj)
    return energy_pj, run_simulation(config, energy_pj)
