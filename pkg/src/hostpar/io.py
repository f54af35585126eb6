"""Deterministic text serialisation.

All floating output is printed with 17 significant digits (%.17g), which
round-trips IEEE doubles exactly, so repeated runs of a deterministic
computation produce byte-identical files. CSV files carry a header row,
'.' decimals, '\\n' newlines, UTF-8. JSON reports carry a schema_version
field and are emitted by a small recursive writer (the stdlib encoder does
not let us pin float formatting).
"""

from __future__ import annotations

import dataclasses
import math
from enum import Enum
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def fmt_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> None:
    Path(path).write_text(csv_text(header, rows), encoding="utf-8")


def _jsonify(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return f'"{fmt_float(v)}"'   # JSON has no literal for these
        return fmt_float(v)
    if isinstance(obj, str):
        escaped = (obj.replace("\\", "\\\\").replace('"', '\\"')
                   .replace("\n", "\\n").replace("\t", "\\t"))
        return f'"{escaped}"'
    if isinstance(obj, Enum):
        return _jsonify(obj.value)
    if isinstance(obj, complex):
        return _jsonify({"re": obj.real, "im": obj.imag})
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, dict):
        items = ",".join(f'{_jsonify(str(k))}:{_jsonify(v)}' for k, v in obj.items())
        return "{" + items + "}"
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonify({f.name: getattr(obj, f.name)
                         for f in dataclasses.fields(obj)})
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_jsonify(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj)!r}")


def json_text(obj, schema: str | None = None) -> str:
    """Serialise to deterministic JSON, injecting schema_version (and an
    optional schema name) at the top of mapping-like objects."""
    if isinstance(obj, dict):
        doc = {"schema_version": SCHEMA_VERSION}
        if schema:
            doc["schema"] = schema
        doc.update(obj)
        return _jsonify(doc) + "\n"
    return _jsonify(obj) + "\n"


def write_json(path, obj, schema: str | None = None) -> None:
    Path(path).write_text(json_text(obj, schema), encoding="utf-8")


def orbit_csv_text(samples: np.ndarray, t0: int = 0) -> str:
    """Orbit samples as `t,x,y` rows."""
    samples = np.asarray(samples)
    rows = ((t0 + i, samples[i, 0], samples[i, 1]) for i in range(len(samples)))
    return csv_text(("t", "x", "y"), rows)


def curve_csv_text(curve) -> str:
    """BoundaryCurve as `internal_param,growth_param,b,model,jury` rows."""
    rows = ((curve.internal[i], curve.growth_param[i], curve.b[i],
             curve.model, curve.jury) for i in range(len(curve.internal)))
    return csv_text(("internal_param", "growth_param", "b", "model", "jury"), rows)
