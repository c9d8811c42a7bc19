"""Slotted simulation loop and latency bookkeeping."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelConfig, Coherence, draw_capacities
from .queueing import ArrivalConfig, QueueState, generate_arrivals
from .schedulers import LAYOUTS, SCHEDULERS, fb_frame_length, make_scheduler, violations
from .topology import build_topology

STABILITY_FLOOR_BITS = 1_000_000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n_vehicles: int = 5
    fd_positions: frozenset = frozenset()
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    arrivals: ArrivalConfig = field(default_factory=ArrivalConfig)
    scheduler: str = "bp"
    gammas: tuple | None = None
    total_slots: int = 40000
    slot_duration: float = 125e-6
    frame_length: int | None = None
    frame_layout: str = "spread"
    seed: int = 0
    warmup_slots: int = 0
    check_invariants: bool = False

    def __post_init__(self):
        object.__setattr__(self, "fd_positions", frozenset(int(p) for p in self.fd_positions))
        if self.gammas is not None:
            object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if self.n_vehicles < 3:
            raise ConfigError("n_vehicles: a platoon needs at least 3 vehicles")
        if any(not 0 <= p < self.n_vehicles for p in self.fd_positions):
            raise ConfigError(f"fd_positions: must lie in 0..{self.n_vehicles - 1}")
        if self.scheduler not in SCHEDULERS:
            raise ConfigError(f"scheduler: unknown {self.scheduler!r}, expected one of {sorted(SCHEDULERS)}")
        if self.frame_layout not in LAYOUTS:
            raise ConfigError(f"frame_layout: expected one of {list(LAYOUTS)}")
        if self.total_slots < 1:
            raise ConfigError("total_slots: must be >= 1")
        if self.slot_duration <= 0:
            raise ConfigError("slot_duration: must be positive")
        if not 0 <= self.warmup_slots < self.total_slots:
            raise ConfigError("warmup_slots: must be in [0, total_slots)")
        if self.gammas is not None:
            if len(self.gammas) != 2 * (self.n_vehicles - 1):
                raise ConfigError(f"gammas: need {2 * (self.n_vehicles - 1)} values")
            if any(not 0 < g <= 1 for g in self.gammas):
                raise ConfigError("gammas: each must lie in (0, 1]")
        if self.frame_length is not None:
            if self.frame_length < 1:
                raise ConfigError("frame_length: must be >= 1")
            if self.scheduler == "fb" and self.frame_length < fb_frame_length(self.topology()):
                raise ConfigError(
                    f"frame_length: flow-based frame needs at least {fb_frame_length(self.topology())} slots")

    def topology(self):
        return build_topology(self.n_vehicles, self.fd_positions, self.gammas)

    def resolved_frame_length(self) -> int:
        return self.frame_length or fb_frame_length(self.topology())


@dataclass
class Metrics:
    n_flows: int
    slot_duration: float
    frame_length: int
    latencies: list  # per flow, list of latency samples in slots
    undelivered: int
    backlog_trace: np.ndarray
    link_busy: list  # slots each directional link was active
    recomputations: int
    violations: int
    first_violation: str = ""
    arrived: int = 0

    @property
    def delivered(self) -> list[int]:
        return [len(x) for x in self.latencies]

    def all_latencies(self) -> list[int]:
        return [v for per in self.latencies for v in per]


def run(config: SimConfig, on_slot=None) -> Metrics:
    """Simulate ``config.total_slots`` slots.

    Per slot: arrivals, channel redraw on coherence boundaries, scheduling,
    service of every activation with budget C_l(t), then hand-over of
    packets that completed a hop.  ``on_slot(t, queues, activations)`` is an
    optional observer hook.
    """
    topo = config.topology()
    T = config.resolved_frame_length()
    sched = make_scheduler(config.scheduler, topo, T, config.frame_layout)
    arr_seq, ch_seq = np.random.SeedSequence(config.seed).spawn(2)
    arr_rng = np.random.default_rng(arr_seq)
    ch_rng = np.random.default_rng(ch_seq)
    coherence = 1 if config.channel.coherence is Coherence.SLOT else T

    queues = QueueState(topo)
    ids = itertools.count()
    trace = np.zeros(config.total_slots, dtype=np.int64)
    busy = [0] * topo.n_links
    n_viol, first_viol = 0, ""
    caps = None
    for t in range(config.total_slots):
        queues.admit(generate_arrivals(config.arrivals, topo.flows, t, arr_rng, ids))
        if t % coherence == 0:
            caps = draw_capacities(config.channel, topo, ch_rng, config.slot_duration)
        acts = sched.decide(t, queues, caps)
        bad = violations(topo, acts)
        if bad:
            n_viol += 1
            first_viol = first_viol or f"slot {t}: {bad[0]}"
        budgets = caps.for_set(topo, [l for l, _ in acts])
        for l, f in acts:
            queues.serve(l, f, budgets[l], t)
            busy[l - 1] += 1
        queues.commit()
        trace[t] = queues.total_backlog()
        if config.check_invariants:
            queues.check_conservation()
        if on_slot is not None:
            on_slot(t, queues, acts)

    lat = [[] for _ in range(topo.n_flows)]
    for p in queues.delivered:
        if p.arrival_slot >= config.warmup_slots:
            lat[p.flow - 1].append(p.delivered_slot - p.arrival_slot)
    return Metrics(
        n_flows=topo.n_flows,
        slot_duration=config.slot_duration,
        frame_length=T,
        latencies=lat,
        undelivered=queues.undelivered(),
        backlog_trace=trace,
        link_busy=busy,
        recomputations=sched.recomputations,
        violations=n_viol,
        first_violation=first_viol,
        arrived=queues.n_arrived,
    )


def _stats_ms(samples, slot_ms):
    if not samples:
        return None, None
    return sum(samples) / len(samples) * slot_ms, max(samples) * slot_ms


def backlog_slope(trace) -> float:
    """Least-squares growth of the aggregate backlog, bits per slot."""
    y = np.asarray(trace, dtype=float)
    if len(y) < 2:
        return 0.0
    return float(np.polyfit(np.arange(len(y)), y, 1)[0])


def summarize(metrics: Metrics, slot_duration: float | None = None) -> dict:
    """Mean/max latency (ms) per flow and overall, throughput, stability flag."""
    slot = slot_duration if slot_duration is not None else metrics.slot_duration
    slot_ms = slot * 1e3
    per_flow = []
    n_slots = len(metrics.backlog_trace)
    for f, samples in enumerate(metrics.latencies, start=1):
        mean, mx = _stats_ms(samples, slot_ms)
        per_flow.append({"flow": f, "delivered": len(samples), "mean_ms": mean, "max_ms": mx})
    everything = metrics.all_latencies()
    mean, mx = _stats_ms(everything, slot_ms)
    slope = backlog_slope(metrics.backlog_trace)
    mean_backlog = float(np.mean(metrics.backlog_trace)) if n_slots else 0.0
    growth = slope * n_slots
    return {
        "no_samples": not everything,
        "mean_ms": mean,
        "max_ms": mx,
        "delivered": len(everything),
        "undelivered": metrics.undelivered,
        "per_flow": per_flow,
        "throughput_pkts_per_s": [
            len(s) / (n_slots * slot) if n_slots else 0.0 for s in metrics.latencies
        ],
        "backlog_slope_bits_per_slot": slope,
        "stable": growth <= max(0.5 * mean_backlog, STABILITY_FLOOR_BITS),
        "recomputations": metrics.recomputations,
        "violations": metrics.violations,
        "frame_length": metrics.frame_length,
        "link_utilization": [b / n_slots if n_slots else 0.0 for b in metrics.link_busy],
    }
