"""Machine-readable reports (JSON / CSV) with a stable schema.

Serialization is deterministic: keys are sorted, separators fixed, floats
rendered with ``repr``.  Identical inputs (config + seed + bits) therefore
produce byte-identical files.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from enum import Enum
from fractions import Fraction

import numpy as np
from gmpy2 import mpfr

SCHEMA_VERSION = "lemniscate-lab/1"


def to_jsonable(obj):
    """Recursively convert dataclasses, mpfr, numpy and enum values to
    JSON-friendly types.  mpfr values become floats (reports are summaries;
    full-precision values are exported as strings where that matters)."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, mpfr):
        return float(obj)
    if isinstance(obj, Fraction):
        return {"numerator": obj.numerator, "denominator": obj.denominator}
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [[float(z.real), float(z.imag)] for z in obj]
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj)!r}")


def report_payload(kind: str, body) -> dict:
    return {"schema": SCHEMA_VERSION, "kind": kind, "body": to_jsonable(body)}


def render_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def render_csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_text(text: str, out_path=None) -> None:
    if out_path is None:
        print(text, end="")
    else:
        with open(out_path, "w") as fh:
            fh.write(text)
