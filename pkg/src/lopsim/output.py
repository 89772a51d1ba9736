"""CSV and JSON rendering of rate tables, sweeps and simulation results.

Floats are written with ``repr`` (shortest round-trip form) and nothing
time-dependent enters the payload, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Sequence

from . import __version__
from .analysis import BELL_ORDER, ErrorReport
from .detection import RateTable


def output_record(command: str, parameters: dict[str, Any], payload: Any) -> dict[str, Any]:
    return {
        "command": command,
        "parameters": parameters,
        "version": __version__,
        "payload": payload,
    }


def round_floats(obj: Any, digits: int) -> Any:
    """Round every float inside nested lists/tuples/dicts to ``digits`` significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return type(obj)(round_floats(v, digits) for v in obj)
    return obj


def to_json(record: dict[str, Any]) -> str:
    return json.dumps(record, indent=2, allow_nan=False) + "\n"


def to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def rate_table_rows(table: RateTable) -> tuple[list[str], list[list[Any]]]:
    header = ["input"] + table.column_labels()
    rows = [[label] + [float(v) for v in table.values[i]] for i, label in enumerate(table.rows)]
    return header, rows


def rate_table_payload(table: RateTable) -> dict[str, Any]:
    return {
        "rows": list(table.rows),
        "columns": table.column_labels(),
        "values": [[float(v) for v in row] for row in table.values],
    }


def sweep_rows(reports: Sequence[ErrorReport], params: Sequence[str]) -> tuple[list[str], list[list[Any]]]:
    header = list(params) + [f"error_{k.value}" for k in BELL_ORDER]
    rows = [
        [float(getattr(r, p)) for p in params] + [float(r.errors[k]) for k in BELL_ORDER]
        for r in reports
    ]
    return header, rows


def sweep_payload(reports: Sequence[ErrorReport]) -> list[dict[str, Any]]:
    return [
        {
            "eta": r.eta,
            "eta_prime": r.eta_prime,
            "xi": r.xi,
            "errors": {k.value: float(r.errors[k]) for k in BELL_ORDER},
            "totals": {k.value: float(r.totals[k]) for k in BELL_ORDER},
            "degenerate": [k.value for k in r.degenerate],
        }
        for r in reports
    ]
