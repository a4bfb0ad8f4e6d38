"""Field files.

CSV layout: ``#``-prefixed metadata lines (``# key: <json>``), one header row
``x1,x2,x3,x4,component,re,im`` and one row per (point, component), points in
grid order with the component index varying fastest.  Floats are written with
17 significant digits, which round-trips every double exactly.
"""
from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .fields import WaveField

COLUMNS = ("x1", "x2", "x3", "x4", "component", "re", "im")


def _g(x: float) -> str:
    return format(float(x), ".17g")


def field_to_csv(wf: WaveField) -> str:
    buf = _io.StringIO()
    for key in sorted(wf.metadata):
        buf.write(f"# {key}: {json.dumps(wf.metadata[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    vals = np.asarray(wf.values)
    for x, row in zip(np.asarray(wf.points), vals):
        xs = [_g(c) for c in x]
        for c, z in enumerate(row):
            w.writerow(xs + [c, _g(z.real), _g(z.imag)])
    return buf.getvalue()


def field_from_csv(text: str) -> WaveField:
    meta = {}
    lines = text.splitlines()
    body = []
    for ln in lines:
        if ln.startswith("#"):
            key, _, val = ln[1:].strip().partition(": ")
            meta[key] = json.loads(val)
        else:
            body.append(ln)
    rows = list(csv.reader(body))
    if not rows or tuple(rows[0]) != COLUMNS:
        raise ValueError("missing or unexpected CSV header")
    data = rows[1:]
    ncomp = 1 + max(int(r[4]) for r in data) if data else 0
    n = len(data) // max(ncomp, 1)
    pts = np.array([[float(v) for v in data[i * ncomp][:4]] for i in range(n)])
    vals = np.array([complex(float(r[5]), float(r[6])) for r in data]).reshape(n, ncomp)
    return WaveField(pts, vals, meta)


def field_to_json(wf: WaveField) -> str:
    vals = np.asarray(wf.values)
    doc = {
        "metadata": wf.metadata,
        "points": np.asarray(wf.points).tolist(),
        "values": [[[z.real, z.imag] for z in row] for row in vals.tolist()],
    }
    return json.dumps(doc, sort_keys=True)


def write_field(wf: WaveField, path: str | Path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    text = field_to_json(wf) if fmt == "json" else field_to_csv(wf)
    path.write_text(text)
    return path
