"""Deterministic text output: fixed float formatting, JSON and CSV writers.

Identical inputs must produce byte-identical files, so numbers are always
rendered with 17 significant digits in lowercase scientific notation and
JSON keys are emitted in sorted order.
"""

from __future__ import annotations

import json

__all__ = ["fmt_float", "dump_json", "csv_table"]


def fmt_float(x: float) -> str:
    return "{:.16e}".format(float(x))


def _emit(obj) -> str:
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        inner = ",".join(f"{json.dumps(str(k))}:{_emit(v)}" for k, v in items)
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, complex):
        return "[" + fmt_float(obj.real) + "," + fmt_float(obj.imag) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot serialise {type(obj)!r}")


def dump_json(obj) -> str:
    return _emit(obj) + "\n"


def csv_table(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = [fmt_float(c) if isinstance(c, float) else str(c) for c in row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
