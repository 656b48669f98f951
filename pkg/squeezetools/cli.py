"""Command-line interface.

Usage:
    python -m squeezetools.cli simulate --config configs/reference_ring.json --out out/
    python -m squeezetools.cli sweep --config configs/reference_ring.json --energies log:1,100,10 --out out/
    python -m squeezetools.cli phase-match --config configs/reference_ring.json
    python -m squeezetools.cli noise --config configs/reference_ring.json
    python -m squeezetools.cli target --config configs/reference_ring.json --photons 1 --out out/

Failures print a JSON error record to stdout and exit with 2 (configuration),
3 (solver) or 4 (physics invariant).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from squeezetools.core.errors import ConfigError, SqueezeToolsError
from squeezetools.export.binary_dump import dump_green, dump_kernels
from squeezetools.export.csv_export import (
    export_modes_csv,
    export_profiles_csv,
    export_sweep_csv,
)
from squeezetools.export.report_export import (
    dumps,
    export_run_json,
    noise_to_dict,
    phase_match_document,
    write_json,
)
from squeezetools.runner.pipeline import drive_setup, run_noise, run_simulation
from squeezetools.runner.sweep import solve_energy_for_photons, sweep_energies
from squeezetools.utils.config import (
    APP_NAME,
    APP_VERSION,
    RunConfig,
    load_config,
    parse_energies,
    with_energy,
)
from squeezetools.utils.file_utils import ensure_output_dir, format_size

logger = logging.getLogger(__name__)


def _configure_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _write_run(result, config, out: Path, dump_green_table: bool, dump_kernel_table: bool):
    export_run_json(result, config, out / "report.json")
    if "csv" in config.output.formats:
        export_profiles_csv(result.grid, result.decomposition, config, out / "profiles.csv")
    if dump_green_table:
        path = out / "green.bin"
        dump_green(result.green, path)
        logger.info("wrote %s (%s)", path, format_size(path.stat().st_size))
    if dump_kernel_table:
        path = out / "kernels.bin"
        dump_kernels(result.kernels, result.grid, path)
        logger.info("wrote %s (%s)", path, format_size(path.stat().st_size))


def _with_output(config: RunConfig, directory) -> RunConfig:
    """Fold the output directory into the config that gets embedded in every file."""
    return dataclasses.replace(
        config, output=dataclasses.replace(config.output, directory=str(directory))
    )


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    if args.energy is not None:
        config = with_energy(config, args.energy)
    config = _with_output(config, args.out or config.output.directory)
    out = ensure_output_dir(config.output.directory)
    result = run_simulation(config)
    _write_run(result, config, out, args.dump_green, args.dump_kernels)
    print(json.dumps({"status": "ok", "report": str(out / "report.json")}))
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.energies:
        energies = parse_energies(args.energies)
    elif config.pulse.energies_pJ:
        energies = tuple(config.pulse.energies_pJ)
    else:
        raise ConfigError("no energies given (--energies or pulse.energies_pJ)")
    config = dataclasses.replace(
        config, pulse=dataclasses.replace(config.pulse, energies_pJ=tuple(energies))
    )
    config = _with_output(config, args.out or config.output.directory)
    out = ensure_output_dir(config.output.directory)

    def progress(current, total, energy):
        logger.info("sweep point %d/%d done (%.4g pJ)", current, total, energy)

    outcome = sweep_energies(config, energies, progress_callback=progress)
    export_sweep_csv(outcome.rows, config, out / "sweep.csv", partial=outcome.partial)
    if outcome.grid is not None:
        export_modes_csv(outcome.grid, outcome.energies_pj, outcome.profiles, config,
                         out / "modes.csv")
    if outcome.partial:
        status = {
            "partial": True,
            "completed_energies_pJ": outcome.energies_pj,
            "error": outcome.error.to_record(),
        }
        write_json(status, out / "sweep_status.json")
        raise outcome.error
    print(json.dumps({"status": "ok", "sweep": str(out / "sweep.csv")}))
    return 0


def cmd_phase_match(args) -> int:
    config = load_config(args.config)
    drive, report, _ = drive_setup(config)
    document = phase_match_document(drive.power, report, config)
    if args.out:
        write_json(document, Path(args.out))
    else:
        sys.stdout.write(dumps(document))
    return 0


def cmd_noise(args) -> int:
    config = load_config(args.config)
    document = noise_to_dict(run_noise(config), config)
    if args.out:
        write_json(document, Path(args.out))
    else:
        sys.stdout.write(dumps(document))
    return 0


def cmd_target(args) -> int:
    config = load_config(args.config)
    config = _with_output(config, args.out or config.output.directory)
    out = ensure_output_dir(config.output.directory)
    lo, hi = (float(v) for v in args.bracket.split(","))
    energy_pj, result = solve_energy_for_photons(config, args.photons, (lo, hi))
    _write_run(result, with_energy(config, energy_pj), out, False, False)
    print(json.dumps({"status": "ok", "energy_pJ": float(f"{energy_pj:.10e}"),
                      "report": str(out / "report.json")}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=APP_NAME, description="Pulsed squeezed-light generation in a dual-pumped microresonator"
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for solver details (stderr)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Run the full pipeline at one pulse energy")
    p.add_argument("--config", required=True, help="Path to run config JSON")
    p.add_argument("--out", help="Output directory (default: output.directory)")
    p.add_argument("--energy", type=float, help="Pulse energy in pJ (overrides the config)")
    p.add_argument("--dump-green", action="store_true", help="Write green.bin")
    p.add_argument("--dump-kernels", action="store_true", help="Write kernels.bin")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Run a pulse-energy sweep")
    p.add_argument("--config", required=True, help="Path to run config JSON")
    p.add_argument("--energies", help="'1,10,100' or 'log:min,max,count' in pJ")
    p.add_argument("--out", help="Output directory (default: output.directory)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("phase-match", help="Drive power and SPM/XPM shifts")
    p.add_argument("--config", required=True, help="Path to run config JSON")
    p.add_argument("--out", help="Write the report to this file instead of stdout")
    p.set_defaults(func=cmd_phase_match)

    p = sub.add_parser("noise", help="Spurious-SFWM noise budget")
    p.add_argument("--config", required=True, help="Path to run config JSON")
    p.add_argument("--out", help="Write the report to this file instead of stdout")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("target", help="Pulse energy for a target dominant-mode photon number")
    p.add_argument("--config", required=True, help="Path to run config JSON")
    p.add_argument("--photons", type=float, required=True, help="Target mean photon number")
    p.add_argument("--bracket", default="0.01,1000", help="Energy bracket 'low,high' in pJ")
    p.add_argument("--out", help="Output directory (default: output.directory)")
    p.set_defaults(func=cmd_target)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except SqueezeToolsError as e:
        print(json.dumps(e.to_record()))
        return e.exit_code
    except (OSError, ValueError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e), "exit_code": 1}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
