"""Deterministic artifact emission: CSV/JSON written atomically.

Floats are rendered with %.17g so that identical runs produce
byte-identical files; writes go through a temp file in the target
directory followed by an atomic rename.
"""

import json
import os
import tempfile
from dataclasses import asdict, is_dataclass
from fractions import Fraction

import numpy as np

__all__ = ["fmt", "atomic_write_text", "write_csv", "write_json"]


def fmt(x) -> str:
    """Fixed 17-significant-digit rendering for floats; passthrough else."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return str(x)


def atomic_write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, rows, columns) -> None:
    lines = [",".join(columns)]
    for r in rows:
        lines.append(",".join(fmt(r.get(c) if isinstance(r, dict) else getattr(r, c))
                              for c in columns))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _plain(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _plain(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else fmt(v) or "nan"
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    return obj


def write_json(path: str, obj) -> None:
    atomic_write_text(path, json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")
