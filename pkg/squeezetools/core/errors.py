"""Exception hierarchy. Every error knows the CLI exit code it maps to."""

from __future__ import annotations


class SqueezeToolsError(Exception):
    """Base class for all squeezetools errors."""

    exit_code = 1

    def to_record(self) -> dict:
        """Machine-readable error record printed by the CLI."""
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


# ── Configuration / parameter errors (exit 2) ───────────────────────────


class ConfigError(SqueezeToolsError):
    exit_code = 2


class InvalidParameterError(ConfigError):
    pass


class UnderdeterminedError(ConfigError):
    pass


class NoSolutionError(ConfigError):
    pass


# ── Solver errors (exit 3) ──────────────────────────────────────────────


class SolverError(SqueezeToolsError):
    exit_code = 3


class GridTooCoarseError(SolverError):
    pass


class TruncationError(SolverError):
    pass


class SolverAccuracyError(SolverError):
    pass


class ConditioningError(SolverError):
    pass


# ── Physics-invariant violations (exit 4) ───────────────────────────────


class PhysicsInvariantError(SqueezeToolsError):
    exit_code = 4


class DerivationError(PhysicsInvariantError):
    pass


class PSDViolationError(PhysicsInvariantError):
    pass


class UncertaintyViolationError(PhysicsInvariantError):
    pass


class NonPhysicalError(PhysicsInvariantError):
    pass


class UndefinedError(PhysicsInvariantError):
    pass
