"""JSON/CSV formats and atomic file writes.

Channel: ``{"inputs": k, "outputs": m, "rows": [[...], ...]}``
Compound: ``{"states": [{"label": "...", "W": <channel>, "V": <channel>}, ...]}``
Region CSV: columns ``n,R0,R1,aux_id``
Sweep CSV: columns ``lambda,symmetrizable,residual``
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .channels import BroadcastPair, Channel, CompoundBCC, validate_channel
from .errors import DimensionMismatch


def channel_from_dict(d: dict) -> Channel:
    ch = validate_channel(d["rows"])
    if "inputs" in d and int(d["inputs"]) != ch.input_size:
        raise DimensionMismatch(f"declared {d['inputs']} inputs, found {ch.input_size} rows")
    if "outputs" in d and int(d["outputs"]) != ch.output_size:
        raise DimensionMismatch(f"declared {d['outputs']} outputs, found {ch.output_size} columns")
    return ch


def compound_from_dict(d: dict) -> CompoundBCC:
    states, labels = [], []
    for i, s in enumerate(d["states"]):
        states.append(BroadcastPair(channel_from_dict(s["W"]), channel_from_dict(s["V"])))
        labels.append(str(s.get("label", f"s{i}")))
    return CompoundBCC(tuple(states), tuple(labels))


def compound_to_dict(c: CompoundBCC) -> dict:
    return {
        "states": [
            {"label": lab, "W": s.w.to_dict(), "V": s.v.to_dict()} for lab, s in zip(c.labels, c.states)
        ]
    }


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_channel(path) -> Channel:
    return channel_from_dict(load_json(path))


def load_compound(path) -> CompoundBCC:
    return compound_from_dict(load_json(path))


def load_points(path) -> np.ndarray:
    """Rate pairs from a CSV with ``R0``/``R1`` columns, or a JSON list / hull file."""
    p = Path(path)
    if p.suffix.lower() == ".json":
        data = load_json(p)
        if isinstance(data, dict):
            data = data.get("vertices", data.get("points"))
        return np.asarray(data, dtype=float).reshape(-1, 2)
    with open(p, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([[float(r["R0"]), float(r["R1"])] for r in rows]).reshape(-1, 2)


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def region_csv(region) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "R0", "R1", "aux_id"])
    for n, (r0, r1), aux_id in zip(region.point_n.tolist(), region.points.tolist(), region.aux_ids):
        w.writerow([n, repr(r0), repr(r1), aux_id])
    return buf.getvalue()


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "symmetrizable", "residual"])
    for r in rows:
        w.writerow([repr(r.lam), "true" if r.symmetrizable else "false", repr(r.residual)])
    return buf.getvalue()
