"""Data files shipped with the package: rules, structure templates, traces."""

import os
from pathlib import Path

_DEFAULT = Path(__file__).resolve().parent


def data_dir() -> Path:
    """Data directory; the ``HCA_DATA_DIR`` environment variable overrides it."""
    env = os.environ.get("HCA_DATA_DIR")
    return Path(env) if env else _DEFAULT


def data_path(*parts: str) -> Path:
    return data_dir().joinpath(*parts)
