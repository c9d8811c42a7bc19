"""Per-node, per-flow FIFO packet queues with bit-level backlogs.

Store-and-forward: a packet is handed to the next hop only after its last
bit has been sent, and becomes eligible there from the following slot
(``commit`` is called once all links of a slot have been served).
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .topology import Topology

KBIT = 1000
DEFAULT_PACKET_SIZES = (40 * KBIT, 72 * KBIT, 104 * KBIT, 136 * KBIT)


class RoutingError(ValueError):
    pass


class ConservationError(AssertionError):
    pass


@dataclass(slots=True)
class Packet:
    id: int
    flow: int
    size: int
    arrival_slot: int
    remaining: int = -1  # bits still to send on the current hop
    delivered_slot: int | None = None

    def __post_init__(self):
        if self.remaining < 0:
            self.remaining = self.size

    @property
    def latency(self) -> int:
        return latency(self)


def latency(packet: Packet) -> int:
    """End-to-end latency in slots."""
    if packet.delivered_slot is None:
        raise ValueError(f"packet {packet.id} has not been delivered")
    return packet.delivered_slot - packet.arrival_slot


@dataclass(frozen=True)
class ArrivalConfig:
    rate: float = 0.04  # packets per slot per flow
    sizes: tuple[int, ...] = DEFAULT_PACKET_SIZES

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("arrival rate must be >= 0")
        if not self.sizes or any(s <= 0 for s in self.sizes):
            raise ValueError("packet sizes must be positive")


def generate_arrivals(config: ArrivalConfig, flows, slot: int, rng: np.random.Generator,
                      ids=None) -> list[Packet]:
    """Poisson packet counts per flow for one slot, sizes uniform over ``config.sizes``."""
    if ids is None:
        ids = itertools.count()
    if config.rate == 0:
        return []
    counts = rng.poisson(config.rate, len(flows))
    out = []
    for fl, n in zip(flows, counts):
        for _ in range(int(n)):
            size = config.sizes[int(rng.integers(len(config.sizes)))]
            out.append(Packet(next(ids), fl.id, size, slot))
    return out


@dataclass
class QueueState:
    topology: Topology
    queues: list = field(init=False)
    backlog: list = field(init=False)
    staged: list = field(init=False, default_factory=list)
    delivered: list = field(init=False, default_factory=list)
    arrived_bits: int = field(init=False, default=0)
    delivered_bits: int = field(init=False, default=0)
    n_arrived: int = field(init=False, default=0)

    def __post_init__(self):
        n, F = self.topology.n_vehicles, self.topology.n_flows
        self.queues = [[deque() for _ in range(F)] for _ in range(n)]
        self.backlog = [[0] * F for _ in range(n)]
        self._dest = [fl.destination for fl in self.topology.flows]
        self._routes = [frozenset(fl.links) for fl in self.topology.flows]

    def q(self, node: int, flow: int) -> int:
        """Backlog Q_i^f in bits."""
        return self.backlog[node][flow - 1]

    def total_backlog(self) -> int:
        return sum(map(sum, self.backlog))

    def admit(self, packets) -> None:
        """Enqueue fresh arrivals at their flow's source."""
        for p in packets:
            src = self.topology.flows[p.flow - 1].source
            self.queues[src][p.flow - 1].append(p)
            self.backlog[src][p.flow - 1] += p.remaining
            self.arrived_bits += p.size
            self.n_arrived += 1

    def serve(self, link: int, flow: int, budget: int, slot: int) -> int:
        """Send up to ``budget`` bits of ``flow`` over ``link``; returns bits sent."""
        if link not in self._routes[flow - 1]:
            raise RoutingError(f"flow {flow} may not use link {link}")
        lk = self.topology.links[link - 1]
        fi = flow - 1
        q = self.queues[lk.tx][fi]
        sent = 0
        budget = max(0, int(budget))
        while q and budget > 0:
            head = q[0]
            chunk = head.remaining if head.remaining <= budget else budget
            head.remaining -= chunk
            budget -= chunk
            sent += chunk
            if head.remaining == 0:
                q.popleft()
                if lk.rx == self._dest[fi]:
                    head.delivered_slot = slot
                    self.delivered.append(head)
                    self.delivered_bits += head.size
                else:
                    self.staged.append((lk.rx, head))
        self.backlog[lk.tx][fi] -= sent
        return sent

    def commit(self) -> None:
        """Move packets that finished a hop this slot into their next queue."""
        for node, p in self.staged:
            p.remaining = p.size
            self.queues[node][p.flow - 1].append(p)
            self.backlog[node][p.flow - 1] += p.size
        self.staged.clear()

    def queued_sizes(self) -> int:
        return sum(p.size for row in self.queues for q in row for p in q)

    def check_conservation(self) -> None:
        """Bits arrived == delivered + queued (incl. partly sent heads) + staged."""
        for node, row in enumerate(self.queues):
            for fi, q in enumerate(row):
                rem = sum(p.remaining for p in q)
                if rem != self.backlog[node][fi]:
                    raise ConservationError(
                        f"backlog mismatch at node {node} flow {fi + 1}: "
                        f"{self.backlog[node][fi]} != {rem}")
                if self.backlog[node][fi] < 0:
                    raise ConservationError(f"negative backlog at node {node} flow {fi + 1}")
                if q and node == self._dest[fi]:
                    raise ConservationError(f"flow {fi + 1} queued at its destination")
        staged = sum(p.size for _, p in self.staged)
        total = self.delivered_bits + self.queued_sizes() + staged
        if total != self.arrived_bits:
            raise ConservationError(f"arrived {self.arrived_bits} bits, accounted {total}")

    def undelivered(self) -> int:
        return self.n_arrived - len(self.delivered)
