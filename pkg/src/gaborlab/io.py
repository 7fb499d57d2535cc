"""FLD-JSON v1 fields, sequence JSON and CSV series."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .grid import Field, Grid, PhaseField
from .sequences import LatticeSeq

__all__ = [
    "FORMAT",
    "field_to_json",
    "field_from_json",
    "read_field",
    "write_field",
    "read_sequence",
    "write_sequence",
    "write_csv",
]

FORMAT = "fld-json/1"


def _pairs(values: np.ndarray) -> list[list[float]]:
    v = np.asarray(values, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in v]


def _complex(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("values must be a list of [re, im] pairs")
    return a[:, 0] + 1j * a[:, 1]


def field_to_json(f: Field | PhaseField) -> dict:
    g = f.grid
    kind = "phasefield" if isinstance(f, PhaseField) else "field"
    return {"format": FORMAT, "d": g.d, "L": g.L, "N": g.N, "kind": kind, "values": _pairs(f.values)}


def field_from_json(doc: dict) -> Field | PhaseField:
    if doc.get("format") != FORMAT:
        raise ValueError(f"expected format {FORMAT!r}, got {doc.get('format')!r}")
    g = Grid(int(doc["d"]), float(doc["L"]), int(doc["N"]))
    vals = _complex(doc["values"])
    kind = doc.get("kind", "field")
    if kind == "field":
        return Field(g, vals)
    if kind == "phasefield":
        return PhaseField(g, vals)
    raise ValueError(f"unknown kind {kind!r}")


def read_field(path) -> Field | PhaseField:
    return field_from_json(json.loads(Path(path).read_text()))


def write_field(path, f: Field | PhaseField) -> None:
    Path(path).write_text(json.dumps(field_to_json(f)))


def read_sequence(path, split=None, basis=None) -> LatticeSeq:
    """Sequence JSON ``{"indices": [[...], ...], "values": [[re, im], ...]}``."""
    doc = json.loads(Path(path).read_text())
    split = doc.get("split", split)
    return LatticeSeq.from_entries(doc["indices"], _complex(doc["values"]), split=split, basis=basis)


def write_sequence(path, a: LatticeSeq) -> None:
    idx, vals = a.entries()
    doc = {"indices": idx.tolist(), "values": _pairs(vals), "split": list(a.split)}
    Path(path).write_text(json.dumps(doc))


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
