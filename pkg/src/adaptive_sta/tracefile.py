"""Trace and report writers. CSV is locale independent: '.' decimals, LF endings."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .engine import COLUMNS, SimResult, Trace

HEADER = ",".join(COLUMNS)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_trace(trace: Trace, path: str | Path) -> None:
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(HEADER + "\n")
        for row in trace.data.tolist():
            fh.write(",".join(map(_fmt, row)) + "\n")


def read_trace(path: str | Path) -> tuple[list[str], list[list[float]]]:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = [[float(v) for v in line.rstrip("\n").split(",")] for line in fh if line.strip()]
    return header, rows


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def report_dict(res: SimResult, name: str = "") -> dict:
    return _clean(
        {
            "scenario": name,
            "rows": len(res.trace),
            "wall_time_s": res.wall_time,
            "convergence": res.report.to_dict(),
            "certificate": res.certificate.to_dict(),
        }
    )


def write_report(res: SimResult, path: str | Path, name: str = "") -> None:
    Path(path).write_text(json.dumps(report_dict(res, name), indent=2) + "\n")
