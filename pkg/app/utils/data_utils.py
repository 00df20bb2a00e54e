"""
Utility functions for sweep row serialization.
"""
import json
import math
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, TextIO, Union

import pandas as pd

from app.config.settings import CSV_HEADER, UNBOUNDED_TOKEN
from app.models.errors import OutputError
from app.models.noise import ChannelKind
from app.models.sweep import ChannelColumns, SweepRow, Table2Report

Destination = Union[str, os.PathLike, TextIO, None]


def format_number(value: Optional[float]) -> str:
    """Shortest round-trip decimal; Unbounded as 'inf'; missing as ''."""
    if value is None:
        return ""
    if math.isinf(value):
        return UNBOUNDED_TOKEN
    return repr(float(value))


def _json_number(value: Optional[float]):
    if value is None:
        return None
    if math.isinf(value):
        return UNBOUNDED_TOKEN
    return float(value)


def _parse_number(value) -> Optional[float]:
    if value is None or value == "":
        return None
    if value == UNBOUNDED_TOKEN:
        return math.inf
    return float(value)


def row_to_record(row: SweepRow) -> Dict[str, str]:
    """One CSV line as column -> text; channels absent from the row stay empty."""
    record = {
        "ratio": format_number(row.ratio),
        "ej_sum_ghz": format_number(row.ej_sum),
        "e01_ghz": format_number(row.e01),
        "alpha_ghz": format_number(row.anharmonicity),
    }
    for kind in ChannelKind:
        columns = row.channels.get(kind)
        record[f"t2_{kind.value}_s"] = format_number(columns.t2_seconds) if columns else ""
        record[f"t2_{kind.value}_asym_s"] = format_number(columns.t2_asymptotic) if columns else ""
        record[f"err_{kind.value}_pct"] = format_number(columns.percent_error) if columns else ""
    return record


def rows_to_dataframe(rows: List[SweepRow]) -> pd.DataFrame:
    """Text-valued frame with the frozen CSV column order."""
    return pd.DataFrame([row_to_record(row) for row in rows], columns=CSV_HEADER, dtype=str)


def row_to_dict(row: SweepRow) -> Dict:
    return {
        "ratio": _json_number(row.ratio),
        "ej_sum_ghz": _json_number(row.ej_sum),
        "e01_ghz": _json_number(row.e01),
        "alpha_ghz": _json_number(row.anharmonicity),
        "channels": {
            kind.value: {
                "slope_ghz": _json_number(columns.slope),
                "t2_s": _json_number(columns.t2_seconds),
                "t2_asym_s": _json_number(columns.t2_asymptotic),
                "err_pct": _json_number(columns.percent_error),
            }
            for kind, columns in row.channels.items()
        },
    }


def row_from_dict(data: Dict) -> SweepRow:
    channels = {
        ChannelKind(name): ChannelColumns(
            slope=_parse_number(values["slope_ghz"]),
            t2_seconds=_parse_number(values["t2_s"]),
            t2_asymptotic=_parse_number(values.get("t2_asym_s")),
            percent_error=_parse_number(values.get("err_pct")),
        )
        for name, values in data.get("channels", {}).items()
    }
    return SweepRow(
        ratio=_parse_number(data["ratio"]),
        ej_sum=_parse_number(data["ej_sum_ghz"]),
        e01=_parse_number(data["e01_ghz"]),
        anharmonicity=_parse_number(data["alpha_ghz"]),
        channels=channels,
    )


def rows_to_text(rows: List[SweepRow], fmt: str) -> str:
    if fmt == "csv":
        return rows_to_dataframe(rows).to_csv(index=False, lineterminator="\n")
    if fmt == "json":
        return json.dumps([row_to_dict(row) for row in rows], indent=2) + "\n"
    raise OutputError(f"unknown row format {fmt!r}")


def write_text(text: str, destination: Destination) -> int:
    """Write text to a path, an open stream, or stdout; returns the UTF-8 byte count."""
    data = text.encode("utf-8")
    if destination is None:
        destination = sys.stdout
    if hasattr(destination, "write"):
        destination.write(text)
        return len(data)

    path = Path(destination)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as e:
        raise OutputError(f"could not write {path}: {e}", path=str(path)) from e
    return len(data)


def emit_rows(rows: List[SweepRow], fmt: str = "csv", destination: Destination = None) -> int:
    """Serialize rows as CSV or JSON to destination; returns bytes written."""
    return write_text(rows_to_text(rows, fmt), destination)


def format_table2_report(report: Table2Report) -> str:
    lines = [f"{'Channel':<18} {'T2 (s)':>14} {'Target (s)':>14} {'Deviation':>11}  Bias"]
    lines.append("-" * 80)
    for kind, result in report.results.items():
        point = result.point
        bias = f"ng={point.ng:.6f} phi_ext={point.phi_ext:.6f} ({point.policy.value}, {result.method.value})"
        if point.clamped:
            bias += " clamped"
        lines.append(
            f"{kind.value:<18} {result.t2_seconds:>14.6g} "
            f"{report.targets[kind]:>14.6g} {report.deviations_pct[kind]:>+10.1f}%  {bias}"
        )
    lines.append("")
    lines.append("Conventions:")
    lines.extend(f"  - {line}" for line in report.conventions)
    return "\n".join(lines) + "\n"
