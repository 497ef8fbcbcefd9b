"""Deterministic CSV/JSON emission of sweep rows.

Columns are fixed and converted to reporting units (meV, e*nm, nm, ns).
Floats carry 12 significant digits, so the same rows always produce the
same bytes.  Missing couplings are written as empty cells (CSV) or null
(JSON); a forbidden transition's infinite lifetime is ``inf`` in CSV and
null in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable

import numpy as np

from .constants import ev_to_mev, s_to_ns
from .design import SweepRow
from .errors import DomainError
from .schrodinger import EigenSolution, probability_density

COLUMNS: tuple[str, ...] = (
    "bl",
    "x",
    "delta_e_meV",
    "d_enm",
    "D_nm",
    "v_dd_meV",
    "t_d_ns",
    "phonon_ok",
)
FORMATS = ("csv", "json")
_SIG = 12


def _round(value: float) -> float:
    return float(f"{value:.{_SIG}g}")


def row_record(row: SweepRow) -> dict:
    """Row as a dict in reporting units, keyed by :data:`COLUMNS`."""
    return {
        "bl": _round(row.bl),
        "x": _round(row.x),
        "delta_e_meV": _round(ev_to_mev(row.delta_e)),
        "d_enm": _round(row.d),
        "D_nm": _round(row.D),
        "v_dd_meV": None if row.v_dd is None else _round(ev_to_mev(row.v_dd)),
        "t_d_ns": _round(s_to_ns(row.t_d)) if math.isfinite(row.t_d) else math.inf,
        "phonon_ok": bool(row.phonon_ok),
    }


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return f"{value:.{_SIG}g}"


def render(rows: Iterable[SweepRow], fmt: str) -> str:
    rows = list(rows)
    if not rows:
        raise DomainError("no rows to emit")
    if fmt not in FORMATS:
        raise DomainError(f"unknown table format {fmt!r}; choose from {FORMATS}")
    records = [row_record(r) for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for rec in records:
            writer.writerow([_csv_cell(rec[c]) for c in COLUMNS])
        return buf.getvalue()
    for rec in records:
        if rec["t_d_ns"] == math.inf:
            rec["t_d_ns"] = None
    return json.dumps(records, indent=2, allow_nan=False) + "\n"


def emit_table(rows: Iterable[SweepRow], fmt: str, sink) -> int:
    """Write ``rows`` to ``sink`` (a path, or ``"-"`` for stdout); return bytes written.

    Nothing is written when ``rows`` is empty.
    """
    data = render(rows, fmt).encode("utf-8")
    if str(sink) == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(sink).write_bytes(data)
    return len(data)


def _parse_csv_cell(column: str, text: str):
    if column == "phonon_ok":
        return text == "true"
    if text == "":
        return None
    return float(text)


def read_table(path) -> list[dict]:
    """Parse a table written by :func:`emit_table` back into records."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        records = json.loads(text)
        for rec in records:
            if rec["t_d_ns"] is None:
                rec["t_d_ns"] = math.inf
        return records
    reader = csv.DictReader(io.StringIO(text))
    return [{c: _parse_csv_cell(c, rec[c]) for c in COLUMNS} for rec in reader]


def render_density(solution: EigenSolution) -> str:
    """Plot-ready CSV of z, V(z) and |psi_i|^2 for every computed state."""
    profile = solution.profile
    potential = profile.potential if profile is not None else np.zeros_like(solution.grid)
    header = ["z_nm", "potential_meV"] + [f"density_{i}" for i in range(solution.n_states)]
    densities = [probability_density(solution, i) for i in range(solution.n_states)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for k, z in enumerate(solution.grid):
        cells = [z, ev_to_mev(potential[k])] + [rho[k] for rho in densities]
        writer.writerow([f"{float(v):.{_SIG}g}" for v in cells])
    return buf.getvalue()
