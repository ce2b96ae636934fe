"""CSV persistence for entropy traces.

One row per sample, fixed column order, full round-trip decimal precision
(shortest repr that parses back to the identical float).  Columns of the
inactive system are written as empty fields, as is the sphere defect for
GL runs; empty fields read back as NaN.
"""

from __future__ import annotations

import csv
import math
from typing import Dict, List, Sequence

import numpy as np

from .constitutive import System
from .verifier import EntropyTrace

COLUMNS = (
    "t",
    "entropy",
    "h_hat",
    "energy_candidate",
    "energy_reference",
    "dissipation_candidate",
    "dissipation_reference",
    "r_d",
    "r_c",
    "r_bar_d",
    "r_bar_c",
    "r_1d",
    "r_1c",
    "r_1c_a",
    "r_1c_b",
    "mass_candidate",
    "sphere_defect",
)


class TraceFormatError(ValueError):
    """Malformed trace file."""


def _fmt(x: float) -> str:
    if math.isnan(x):
        return ""
    return repr(float(x))


def write_columns(columns: Dict[str, Sequence[float]], path: str) -> None:
    """Write named columns in the fixed order; missing columns are empty."""
    n = max((len(v) for v in columns.values()), default=0)
    for name, vals in columns.items():
        if name not in COLUMNS:
            raise TraceFormatError(f"unknown trace column {name!r}")
        if len(vals) != n:
            raise TraceFormatError(f"column {name!r} has inconsistent length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for k in range(n):
            w.writerow(
                [
                    _fmt(float(columns[name][k])) if name in columns else ""
                    for name in COLUMNS
                ]
            )


def write_trace(trace: EntropyTrace, path: str) -> None:
    """Serialize a trace; see COLUMNS for the order."""
    cols = {
        "t": trace.times,
        "entropy": trace.entropy,
        "h_hat": trace.h_hat,
        "energy_candidate": trace.energy_candidate,
        "energy_reference": trace.energy_reference,
        "dissipation_candidate": trace.dissipation_candidate,
        "dissipation_reference": trace.dissipation_reference,
        "r_d": trace.r_d,
        "r_c": trace.r_c,
        "r_bar_d": trace.r_bar_d,
        "r_bar_c": trace.r_bar_c,
        "r_1d": trace.r_1d,
        "r_1c": trace.r_1c,
        "r_1c_a": trace.r_1c_a,
        "r_1c_b": trace.r_1c_b,
        "mass_candidate": trace.mass_candidate,
        "sphere_defect": trace.sphere_defect,
    }
    write_columns(cols, path)


def read_columns(path: str) -> Dict[str, np.ndarray]:
    """Parse a trace file back into named float columns (empty -> NaN)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise TraceFormatError(f"{path}: empty file")
    header = tuple(rows[0])
    if header != COLUMNS:
        raise TraceFormatError(f"{path}: unexpected header {header}")
    data: List[List[float]] = [[] for _ in COLUMNS]
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(COLUMNS):
            raise TraceFormatError(f"{path}: row {r} has {len(row)} fields")
        for i, cell in enumerate(row):
            data[i].append(float(cell) if cell != "" else math.nan)
    return {name: np.asarray(vals) for name, vals in zip(COLUMNS, data)}


def read_trace(path: str) -> EntropyTrace:
    """Deserialize a trace, inferring the system from the active columns."""
    cols = read_columns(path)
    n = cols["t"].shape[0]
    if n and np.any(np.isfinite(cols["r_1d"])):
        system = System.SPHERE
    else:
        system = System.GL
    return EntropyTrace(
        system=system,
        times=cols["t"],
        entropy=cols["entropy"],
        h_hat=cols["h_hat"],
        energy_candidate=cols["energy_candidate"],
        energy_reference=cols["energy_reference"],
        dissipation_candidate=cols["dissipation_candidate"],
        dissipation_reference=cols["dissipation_reference"],
        mass_candidate=cols["mass_candidate"],
        sphere_defect=cols["sphere_defect"],
        r_d=cols["r_d"],
        r_c=cols["r_c"],
        r_bar_d=cols["r_bar_d"],
        r_bar_c=cols["r_bar_c"],
        r_1d=cols["r_1d"],
        r_1c=cols["r_1c"],
        r_1c_a=cols["r_1c_a"],
        r_1c_b=cols["r_1c_b"],
    )
