"""Sweep execution and tabular result output (CSV/JSON)."""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import SweepSpec
from .sim import SimConfig, run, summarize

log = logging.getLogger(__name__)

COLUMNS = (
    "scheduler",
    "n_vehicles",
    "fd_positions",
    "sic_level_db",
    "rate",
    "seed",
    "total_slots",
    "frame_length",
    "mean_latency_ms",
    "max_latency_ms",
    "delivered",
    "undelivered",
    "recomputations",
    "violations",
    "stable",
    "per_flow_mean_ms",
    "per_flow_max_ms",
    "error",
)


def _axis_values(config: SimConfig) -> dict:
    return {
        "scheduler": config.scheduler,
        "n_vehicles": config.n_vehicles,
        "fd_positions": sorted(config.fd_positions),
        "sic_level_db": config.channel.sic_level,
        "rate": config.arrivals.rate,
        "seed": config.seed,
        "total_slots": config.total_slots,
    }


def row_from_report(config: SimConfig, rep: dict) -> dict:
    row = _axis_values(config)
    row.update(
        frame_length=rep["frame_length"],
        mean_latency_ms=rep["mean_ms"],
        max_latency_ms=rep["max_ms"],
        delivered=rep["delivered"],
        undelivered=rep["undelivered"],
        recomputations=rep["recomputations"],
        violations=rep["violations"],
        stable=rep["stable"],
        per_flow_mean_ms=[p["mean_ms"] for p in rep["per_flow"]],
        per_flow_max_ms=[p["max_ms"] for p in rep["per_flow"]],
        per_flow=rep["per_flow"],
        error="",
    )
    return row


def run_point(config: SimConfig) -> dict:
    """One simulation reduced to a result row; failures land in ``error``."""
    try:
        rep = summarize(run(config))
    except Exception as exc:  # recorded in-row, sweep continues
        log.exception("run failed: %s", config)
        row = _axis_values(config)
        row.update({k: None for k in COLUMNS if k not in row})
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    return row_from_report(config, rep)


def run_sweep(spec: SweepSpec, parallel: int = 1) -> list[dict]:
    points = spec.points()
    if parallel > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(run_point, points))
    else:
        rows = [run_point(p) for p in points]
    return rows


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in COLUMNS])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    return json.dumps(rows, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_rows(rows, out_dir, formats=("csv", "json"), stem="results") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = out_dir / f"{stem}.csv"
        p.write_text(rows_to_csv(rows))
        written.append(p)
    if "json" in formats:
        p = out_dir / f"{stem}.json"
        p.write_text(rows_to_json(rows))
        written.append(p)
    return written
