"""
Trace serialization: JSON (full record), CSV (one row per checkpoint, no
distributions) and Lorenz files (two columns per checkpoint).

Floats are written with 17 significant digits so that parsing a file
gives back the exact doubles.
"""
from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .distmaj import lorenz_points
from .tracer import Checkpoint, Trace

CSV_COLUMNS = (
    "step", "stage", "gate", "qubits", "angle", "verdict", "max_violation",
    "hpair_holds", "hpair_max_dev", "natural", "max_residual", "entropy",
    "distribution_unchanged", "in_scope",
)
GROVER_CSV_COLUMNS = ("step", "verdict", "natural", "p_marked")
LORENZ_HEADER = ("fraction", "cumulative")


def fmt_float(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite float {v!r}")
    return format(v, ".17g")


def _emit(obj, out: list, indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
            parts: list = []
            for v in items:
                _emit(v, parts, indent, level)
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(items):
            out.append(pad)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "]")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 1) -> str:
    out: list = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"


def checkpoint_to_dict(cp: Checkpoint) -> dict:
    v = cp.verdict
    return {
        "step": cp.step,
        "stage": cp.stage,
        "gate": cp.gate.describe() if cp.gate is not None else None,
        "distribution": cp.distribution,
        "verdict": str(v.relation) if v is not None else None,
        "max_violation": v.max_violation if v is not None else None,
        "hpair": None if cp.hpair is None else {
            "holds": cp.hpair.holds,
            "max_dev": cp.hpair.max_modulus_deviation,
        },
        "natural": None if cp.natural is None else {
            "is_natural": cp.natural.natural,
            "max_residual": cp.natural.max_residual,
            "doubly_stochastic": cp.natural.stochastic.ok,
        },
        "entropy": cp.entropy,
        "distribution_unchanged": cp.distribution_unchanged,
        "in_scope": cp.in_scope,
    }


def trace_to_dict(trace: Trace) -> dict:
    return {
        "meta": trace.meta,
        "checkpoints": [checkpoint_to_dict(c) for c in trace.checkpoints],
        "summary": trace.summary,
    }


def trace_to_json(trace: Trace) -> str:
    return dumps(trace_to_dict(trace))


def load_trace(source) -> dict:
    """Parse a JSON trace from a string or a path."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        source = Path(source).read_text()
    return json.loads(source)


def trace_schema() -> dict:
    return json.loads(resources.files("qmaj").joinpath("trace.schema.json").read_text())


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    return str(v)


def trace_to_csv(trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if trace.meta["circuit"] == "grover":
        w.writerow(GROVER_CSV_COLUMNS)
        marked = trace.meta["marked"]
        for c in trace.checkpoints:
            w.writerow([
                c.step,
                str(c.verdict.relation) if c.verdict else "",
                _cell(c.natural.natural if c.natural else None),
                _cell(float(c.distribution[marked])),
            ])
        return buf.getvalue()
    w.writerow(CSV_COLUMNS)
    for c in trace.checkpoints:
        d = checkpoint_to_dict(c)
        gate = d["gate"] or {}
        w.writerow([
            c.step, c.stage, gate.get("kind", ""),
            " ".join(str(q) for q in gate.get("qubits", [])),
            _cell(gate.get("angle")),
            d["verdict"] or "", _cell(d["max_violation"]),
            _cell(d["hpair"]["holds"] if d["hpair"] else None),
            _cell(d["hpair"]["max_dev"] if d["hpair"] else None),
            _cell(d["natural"]["is_natural"] if d["natural"] else None),
            _cell(d["natural"]["max_residual"] if d["natural"] else None),
            _cell(c.entropy), _cell(c.distribution_unchanged), _cell(c.in_scope),
        ])
    return buf.getvalue()


def lorenz_csv(distribution) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LORENZ_HEADER)
    for fx, cy in lorenz_points(distribution):
        w.writerow([fmt_float(float(fx)), fmt_float(float(cy))])
    return buf.getvalue()


def write_lorenz(trace: Trace, directory) -> list[Path]:
    """One ``step_<k>.lorenz.csv`` per checkpoint."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for c in trace.checkpoints:
        p = directory / f"step_{c.step}.lorenz.csv"
        p.write_text(lorenz_csv(c.distribution))
        paths.append(p)
    return paths


def read_lorenz(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
