"""Deterministic file output.

CSV files use a fixed column order, a header row and a fixed float format, and
every file is written to a temporary sibling and renamed into place so readers
never see a partial file.
"""

from __future__ import annotations

import json
import os
import platform
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

FLOAT_FORMAT = "{:.10e}"


def _format(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if np.isnan(value):
        return "nan"
    if value == 0.0:
        value = 0.0  # drop the sign of negative zero
    return FLOAT_FORMAT.format(value)


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(columns: Sequence[str], rows) -> str:
    """CSV text with a header row; integer columns stay integers."""
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row length does not match the header")
        lines.append(",".join(_format(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, columns: Sequence[str], rows) -> Path:
    """Atomically write a CSV file."""
    return atomic_write_text(path, csv_text(columns, rows))


def read_csv(path: str | Path):
    """Return ``(columns, data)`` of a file written by :func:`write_csv`."""
    with open(path) as fh:
        columns = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        data = np.zeros((0, len(columns)))
    return columns, data


def write_json(path: str | Path, payload) -> Path:
    """Atomically write sorted, indented JSON."""
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def versions() -> dict:
    """Versions of the interpreter and the numerical libraries in use."""
    import matplotlib
    import scipy

    from . import __version__
    from ._accel import HAVE_NUMBA, backend_name

    numba_version = None
    if HAVE_NUMBA:
        import numba

        numba_version = numba.__version__
    return {
        "eostomo": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba_version,
        "matplotlib": matplotlib.__version__,
        "backend": backend_name(),
    }


def write_manifest(directory: str | Path, command: str, config_digest: str, seed: int | None,
                   files: Sequence[Path], extra: dict | None = None) -> Path:
    """Record what produced the files in ``directory``."""
    payload = {
        "command": command,
        "config_sha256": config_digest,
        "seed": seed,
        "versions": versions(),
        "files": sorted(Path(f).name for f in files),
    }
    if extra:
        payload.update(extra)
    return write_json(Path(directory) / "manifest.json", payload)
