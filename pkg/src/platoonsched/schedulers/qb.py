"""Queue-based TDMA: per-frame demands from backlog/capacity ratios, fitted to
the fixed frame length and then edge-coloured like the flow-based frame."""
from __future__ import annotations

from ..topology import Topology
from .backlog import differential_backlogs
from .fb import edge_color, fb_frame_length, frame_activations, max_degree, unit_demands
from .fd import fd_merge


def link_demands(queues, capacities, topology: Topology, gammas=None) -> list[int]:
    """Directional demand: how often each link is the best W/mu choice of a flow."""
    Q = queues.backlog if hasattr(queues, "backlog") else queues
    db = differential_backlogs(Q, topology, gammas)
    clear = capacities.clear if hasattr(capacities, "clear") else capacities
    demand = [0] * topology.n_links
    for fl in topology.flows:
        fi = fl.id - 1
        if not any(Q[topology.links[l - 1].tx][fi] for l in fl.links):
            continue
        best, best_l = -1.0, None
        for l in fl.links:
            w = db.per_flow[(l, fl.id)]
            mu = clear[l - 1]
            ratio = w / mu if mu > 0 else (float("inf") if w > 0 else 0.0)
            if ratio > best:
                best, best_l = ratio, l
        demand[best_l - 1] += 1
    return demand


def qb_demands(queues, capacities, topology: Topology, gammas=None) -> list[int]:
    """Bidirectional demand: each link's count plus that of its mirror."""
    d = link_demands(queues, capacities, topology, gammas)
    half = topology.half
    return [d[b - 1] + d[b - 1 + half] for b in range(1, half + 1)]


def qb_adjust_demands(demands, T: int) -> list[int]:
    """Fit a demand vector so its largest adjacent-pair sum equals ``T``.

    Too much: take one slot at a time from the largest demand (lowest index
    on ties).  Too little: add one slot at a time round-robin from the first
    unit, skipping any unit whose increment would overshoot ``T``.
    """
    if T < 1:
        raise ValueError("frame length must be at least 1")
    d = [int(x) for x in demands]
    if not d:
        return d
    while max_degree(d) > T:
        k = max(range(len(d)), key=lambda i: (d[i], -i))
        d[k] -= 1
    k = 0
    stalled = 0
    while max_degree(d) < T and stalled < len(d):
        d[k] += 1
        if max_degree(d) > T:
            d[k] -= 1
            stalled += 1
        else:
            stalled = 0
        k = (k + 1) % len(d)
    return d


class QBScheduler:
    name = "qb"
    frame_based = True

    def __init__(self, topology: Topology, T: int | None = None, layout: str = "spread"):
        self.topology = topology
        self.layout = layout
        self.units = fd_merge(topology)
        self.T = T if T is not None else fb_frame_length(topology)
        self.frame = None
        self.recomputations = 0

    def start_frame(self, queues, capacities) -> None:
        bidi = qb_demands(queues, capacities, self.topology)
        demands = qb_adjust_demands(unit_demands(bidi, self.units), self.T)
        self.frame = edge_color(demands, self.T, self.units, self.layout)
        self.recomputations += 1

    def decide(self, slot: int, queues, capacities) -> list[tuple[int, int]]:
        if slot % self.T == 0 or self.frame is None:
            self.start_frame(queues, capacities)
        db = differential_backlogs(queues, self.topology)
        return frame_activations(self.frame, slot % self.T, db, self.topology)
