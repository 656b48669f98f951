"""File and path utility functions."""

from pathlib import Path

from squeezetools.core.errors import ConfigError


def format_size(size_bytes: int | float) -> str:
    for unit in ["B", "KB", "MB", "GB"]:
        if size_bytes < 1024:
            return f"{size_bytes:.1f} {unit}"
        size_bytes /= 1024
    return f"{size_bytes:.1f} TB"


def ensure_output_dir(path: Path | str) -> Path:
    path = Path(path)
    if path.exists() and not path.is_dir():
        raise ConfigError(f"output path exists and is not a directory: {path}")
    path.mkdir(parents=True, exist_ok=True)
    return path
