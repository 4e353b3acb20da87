"""CSV trace schemas, writers, readers, and the trace comparator.

Three trace files per run, all floats printed with 9 significant digits
so identical runs produce byte-identical files:

* phases:    t,agent_id,theta,hidden
* positions: t,agent_id,x,y,vx,vy
* metrics:   t,order_param,max_pair_diff,am,gm,min,max,collisions_cum

Fields a model does not define (hidden for the pulse and reference
models, spacing for the single-population pulse model) are left empty.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

PHASE_HEADER = ("t", "agent_id", "theta", "hidden")
POSITION_HEADER = ("t", "agent_id", "x", "y", "vx", "vy")
METRICS_HEADER = (
    "t",
    "order_param",
    "max_pair_diff",
    "am",
    "gm",
    "min",
    "max",
    "collisions_cum",
)


def fmt(value) -> str:
    """Canonical cell formatting: 9 significant digits, '' for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.9g}"
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_summary(path: Path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


class TraceSchemaError(ValueError):
    pass


def read_metrics_csv(path: Path) -> dict[str, list[float | None]]:
    """Read a metrics trace into columns; empty cells become None."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceSchemaError(f"{path}: empty file")
        if tuple(header) != METRICS_HEADER:
            raise TraceSchemaError(
                f"{path}: unexpected header {header!r}, expected {list(METRICS_HEADER)}"
            )
        cols: dict[str, list[float | None]] = {name: [] for name in header}
        for row in reader:
            if len(row) != len(header):
                raise TraceSchemaError(f"{path}: ragged row {row!r}")
            for name, cell in zip(header, row):
                cols[name].append(float(cell) if cell != "" else None)
    return cols


@dataclass
class CompareReport:
    metric: str
    tolerance: float
    rows: int
    max_delta: float
    mean_delta: float
    final_delta: float
    final_third_mean: tuple[float, float]
    final_third_std: tuple[float, float]
    passed: bool

    def render(self) -> str:
        lines = [
            f"metric: {self.metric}",
            f"rows compared: {self.rows}",
            f"max |delta|: {fmt(self.max_delta)} (tolerance {fmt(self.tolerance)})",
            f"mean |delta|: {fmt(self.mean_delta)}",
            f"final |delta|: {fmt(self.final_delta)}",
            f"final-third mean: a={fmt(self.final_third_mean[0])} b={fmt(self.final_third_mean[1])}",
            f"final-third std:  a={fmt(self.final_third_std[0])} b={fmt(self.final_third_std[1])}",
            "result: PASS" if self.passed else "result: FAIL",
        ]
        return "\n".join(lines)


def _stats(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def compare_metrics(
    path_a: Path, path_b: Path, metric: str, tolerance: float
) -> CompareReport:
    """Row-aligned comparison of one metric column of two traces.

    Traces must share the schema, length, and time column exactly; the
    metric column must be populated in both. The verdict is on the
    largest absolute row delta; final-third statistics of both traces
    are reported alongside for stability comparisons.
    """
    a = read_metrics_csv(path_a)
    b = read_metrics_csv(path_b)
    if metric not in METRICS_HEADER or metric == "t":
        raise TraceSchemaError(f"unknown metric {metric!r}")
    if len(a["t"]) != len(b["t"]) or a["t"] != b["t"]:
        raise TraceSchemaError("traces are not time-aligned")
    if not a["t"]:
        raise TraceSchemaError("traces contain no rows")
    va, vb = a[metric], b[metric]
    if any(v is None for v in va) or any(v is None for v in vb):
        raise TraceSchemaError(f"metric {metric!r} not populated in both traces")

    deltas = [abs(x - y) for x, y in zip(va, vb)]
    third = max(1, len(va) // 3)
    mean_a, std_a = _stats(va[-third:])
    mean_b, std_b = _stats(vb[-third:])
    max_delta = max(deltas)
    return CompareReport(
        metric=metric,
        tolerance=tolerance,
        rows=len(deltas),
        max_delta=max_delta,
        mean_delta=sum(deltas) / len(deltas),
        final_delta=deltas[-1],
        final_third_mean=(mean_a, mean_b),
        final_third_std=(std_a, std_b),
        passed=max_delta <= tolerance,
    )
