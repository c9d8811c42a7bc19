"""Figures written next to the CSV/JSON tables."""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SCHEDULER_ORDER = ("fb", "qb", "bp")
COLORS = {"fb": "#4c72b0", "qb": "#dd8452", "bp": "#55a868"}

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}


def _fd_label(fd) -> str:
    fd = sorted(fd)
    return "HD" if not fd else "FD " + ",".join(str(p) for p in fd)


def plot_latency_histogram(latencies_slots, slot_duration, path, title=""):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        ms = np.asarray(latencies_slots, dtype=float) * slot_duration * 1e3
        if ms.size:
            ax.hist(ms, bins=min(60, max(5, int(np.sqrt(ms.size)))), color="#4c72b0")
        ax.set_xlabel("end-to-end latency [ms]")
        ax.set_ylabel("packets")
        ax.set_title(title)
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def plot_backlog(trace, path, title=""):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        ax.plot(np.asarray(trace) / 1e3, lw=0.5, color="#55a868")
        ax.set_xlabel("slot")
        ax.set_ylabel("total backlog [kbit]")
        ax.set_title(title)
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def _grouped(rows, value):
    """(sic, fd label) -> scheduler -> seed-averaged value."""
    acc = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r.get("error") or r.get(value) is None:
            continue
        acc[(r["sic_level_db"], _fd_label(r["fd_positions"]))][r["scheduler"]].append(r[value])
    return {k: {s: float(np.mean(v)) for s, v in d.items()} for k, d in acc.items()}


def plot_sweep_bars(rows, out_dir, stem="latency") -> list[Path]:
    """Bar charts of seed-averaged mean and max latency, one group per FD
    placement, one figure per SIC level and metric."""
    out_dir = Path(out_dir)
    written = []
    for value, label in (("mean_latency_ms", "mean"), ("max_latency_ms", "max")):
        grouped = _grouped(rows, value)
        for sic in sorted({k[0] for k in grouped}):
            groups = [k[1] for k in grouped if k[0] == sic]
            groups = sorted(set(groups), key=lambda g: (g != "HD", len(g), g))
            scheds = [s for s in SCHEDULER_ORDER if any(s in grouped[(sic, g)] for g in groups)]
            width = 0.8 / max(1, len(scheds))
            x = np.arange(len(groups))
            with plt.rc_context(RC):
                fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(groups) + 1), 3))
                for k, s in enumerate(scheds):
                    ys = [grouped[(sic, g)].get(s, np.nan) for g in groups]
                    ax.bar(x + (k - (len(scheds) - 1) / 2) * width, ys, width,
                           label=s.upper(), color=COLORS.get(s))
                ax.set_xticks(x)
                ax.set_xticklabels(groups)
                ax.set_ylabel(f"{label} latency [ms]")
                ax.set_title(f"SIC = {sic:g} dB")
                ax.legend(frameon=False)
                p = out_dir / f"{stem}_{label}_sic{sic:g}.png"
                fig.savefig(p)
                plt.close(fig)
            written.append(p)
    return written
