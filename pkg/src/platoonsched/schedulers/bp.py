"""Slot-by-slot back-pressure: maximise sum(W_l * mu_l) over every
conflict-free activation set, with mu_l = min(Q, C_l)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..topology import Duplex, Topology
from .backlog import differential_backlogs


@dataclass(frozen=True)
class SlotDecision:
    activations: tuple[tuple[int, int], ...]  # (link, flow)
    objective: float = 0.0

    @property
    def links(self) -> tuple[int, ...]:
        return tuple(l for l, _ in self.activations)


def _si_links(topology: Topology, links) -> set[int]:
    """Links whose FD receiver also transmits inside ``links``."""
    tx = {topology.links[l - 1].tx for l in links}
    return {
        l for l in links
        if topology.links[l - 1].rx in tx and topology.modes[topology.links[l - 1].rx] is Duplex.FD
    }


def _set_tables(topology: Topology):
    key = "bp_tables"
    if key not in topology._cache:
        sets = topology.conflict_free_sets()
        L = topology.n_links
        clear = np.zeros((len(sets), L))
        si = np.zeros((len(sets), L))
        for k, s in enumerate(sets):
            hit = _si_links(topology, s)
            for l in s:
                (si if l in hit else clear)[k, l - 1] = 1.0
        topology._cache[key] = (sets, clear, si)
    return topology._cache[key]


def _terms(links, si_hit, w, q, clear, with_si):
    return [w[l - 1] * min(q[l - 1], with_si[l - 1] if l in si_hit else clear[l - 1]) for l in links]


def bp_slot(queues, capacities, topology: Topology, gammas=None) -> SlotDecision:
    """Exact max-weight activation by enumerating conflict-free sets.

    Among sets with the same objective the lexicographically smallest
    (lowest link ids) wins; links contributing nothing are left idle.
    """
    Q = queues.backlog if hasattr(queues, "backlog") else queues
    db = differential_backlogs(Q, topology, gammas)
    w = db.link
    if max(w) <= 0.0:
        return SlotDecision(())
    L = topology.n_links
    q = [
        Q[topology.links[l].tx][db.best_flow[l] - 1] if db.best_flow[l] is not None else 0
        for l in range(L)
    ]
    clear, with_si = capacities.clear, capacities.with_si
    sets, m_clear, m_si = _set_tables(topology)

    wv = np.asarray(w)
    qv = np.asarray(q, dtype=float)
    obj = m_clear @ (wv * np.minimum(qv, clear)) + m_si @ (wv * np.minimum(qv, with_si))
    top = obj.max()
    if top <= 0.0:
        return SlotDecision(())
    # BLAS sums may differ in the last ulp; settle near-ties with exact sums
    cand = np.flatnonzero(obj >= top * (1.0 - 1e-9))
    best_k, best_val = None, -1.0
    for k in cand:
        s = sets[k]
        val = math.fsum(_terms(s, _si_links(topology, s), w, q, clear, with_si))
        if val > best_val:
            best_k, best_val = int(k), val
    s = sets[best_k]
    hit = _si_links(topology, s)
    terms = _terms(s, hit, w, q, clear, with_si)
    acts = tuple((l, db.best_flow[l - 1]) for l, t in zip(s, terms) if t > 0)
    return SlotDecision(acts, best_val)


class BPScheduler:
    name = "bp"
    frame_based = False

    def __init__(self, topology: Topology, T: int | None = None, layout: str = "spread"):
        self.topology = topology
        self.T = T
        self.recomputations = 0

    def decide(self, slot: int, queues, capacities) -> list[tuple[int, int]]:
        self.recomputations += 1
        return list(bp_slot(queues, capacities, self.topology).activations)
