"""Platoon line graph: nodes, directional/bidirectional links, flows and
the one-hop conflict structure.

Indexing (1-based ids for links and flows, 0-based node indices):

* node 0 is the platoon leader, node ``n_vehicles - 1`` the tail;
* right-hand link ``l`` in ``1..L/2`` carries traffic ``l-1 -> l``;
* left-hand link ``l`` in ``L/2+1..L`` carries ``l-L/2 -> l-L/2-1``;
* bidirectional link ``b`` groups right-hand ``b`` with its mirror ``b + L/2``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property


class TopologyError(ValueError):
    pass


class Duplex(enum.Enum):
    HD = "HD"
    FD = "FD"


class Direction(enum.Enum):
    RIGHT = "right"  # away from the leader
    LEFT = "left"    # towards the leader


@dataclass(frozen=True)
class Link:
    id: int
    tx: int
    rx: int
    direction: Direction


@dataclass(frozen=True)
class BidiLink:
    id: int
    members: tuple[int, int]  # (right-hand id, left-hand id)


@dataclass(frozen=True)
class Flow:
    id: int
    source: int
    destination: int
    direction: Direction
    links: tuple[int, ...]  # ordered from source to destination
    gamma: float = 1.0

    @property
    def hops(self) -> int:
        return len(self.links)


def default_gamma(hops: int, max_hops: int) -> float:
    """Backlog exponent by hop count: 1.0 for the longest flows, 0.8 for
    one-hop flows, 0.9 otherwise."""
    if hops >= max_hops:
        return 1.0
    if hops == 1:
        return 0.8
    return 0.9


@dataclass(frozen=True)
class Topology:
    n_vehicles: int
    modes: tuple[Duplex, ...]
    links: tuple[Link, ...]
    bidi: tuple[BidiLink, ...]
    flows: tuple[Flow, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def n_members(self) -> int:
        return self.n_vehicles - 2

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def n_flows(self) -> int:
        return len(self.flows)

    @property
    def half(self) -> int:
        return self.n_links // 2

    @property
    def tail(self) -> int:
        return self.n_vehicles - 1

    @cached_property
    def fd_nodes(self) -> frozenset[int]:
        return frozenset(i for i, m in enumerate(self.modes) if m is Duplex.FD)

    def is_fd(self, node: int) -> bool:
        return self.modes[node] is Duplex.FD

    def link(self, l: int) -> Link:
        if not 1 <= l <= self.n_links:
            raise TopologyError(f"invalid link id {l} (valid 1..{self.n_links})")
        return self.links[l - 1]

    def flow(self, f: int) -> Flow:
        if not 1 <= f <= self.n_flows:
            raise TopologyError(f"invalid flow id {f} (valid 1..{self.n_flows})")
        return self.flows[f - 1]

    def mirror(self, l: int) -> int:
        self.link(l)
        return l + self.half if l <= self.half else l - self.half

    def bidi_of(self, l: int) -> int:
        self.link(l)
        return l if l <= self.half else l - self.half

    def flows_on(self, l: int) -> tuple[int, ...]:
        """Flow ids whose routing set contains link ``l``."""
        return self._flows_on[l - 1]

    @cached_property
    def _flows_on(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(f.id for f in self.flows if lk.id in f.links) for lk in self.links
        )

    def congestion(self, l: int) -> int:
        self.link(l)
        return len(self.flows_on(l))

    def bidi_congestion(self) -> list[int]:
        return [self.congestion(b.members[0]) + self.congestion(b.members[1]) for b in self.bidi]

    def with_gammas(self, gammas) -> "Topology":
        gammas = list(gammas)
        if len(gammas) != self.n_flows:
            raise TopologyError(f"need {self.n_flows} gammas, got {len(gammas)}")
        for g in gammas:
            if not 0.0 < g <= 1.0:
                raise TopologyError(f"gamma {g} outside (0, 1]")
        flows = tuple(
            Flow(f.id, f.source, f.destination, f.direction, f.links, float(g))
            for f, g in zip(self.flows, gammas)
        )
        return Topology(self.n_vehicles, self.modes, self.links, self.bidi, flows)

    @property
    def gammas(self) -> tuple[float, ...]:
        return tuple(f.gamma for f in self.flows)

    def is_feasible(self, active) -> bool:
        """One-hop interference check on a set of directional link ids.

        Every node transmits on at most one link and receives on at most one;
        an HD node additionally takes part in at most one active link.
        """
        tx_busy: set[int] = set()
        rx_busy: set[int] = set()
        for l in active:
            lk = self.links[l - 1]
            if lk.tx in tx_busy or lk.rx in rx_busy:
                return False
            tx_busy.add(lk.tx)
            rx_busy.add(lk.rx)
        for node in tx_busy & rx_busy:
            if self.modes[node] is Duplex.HD:
                return False
        return True

    def conflict_free_sets(self, maximal: bool = False) -> list[tuple[int, ...]]:
        """All feasible activation sets (sorted tuples), the empty set included.

        Built by extending sets one link at a time in increasing id order, so
        the result is in lexicographic order.  With ``maximal=True`` only sets
        that cannot take another link are returned.
        """
        key = ("cfs", maximal)
        if key not in self._cache:
            out: list[tuple[int, ...]] = []

            def extend(current: tuple[int, ...], start: int) -> None:
                out.append(current)
                for l in range(start, self.n_links + 1):
                    cand = current + (l,)
                    if self.is_feasible(cand):
                        extend(cand, l + 1)

            extend((), 1)
            if maximal:
                out = [
                    s for s in out
                    if not any(
                        l not in s and self.is_feasible(s + (l,))
                        for l in range(1, self.n_links + 1)
                    )
                ]
            self._cache[key] = out
        return list(self._cache[key])


def build_topology(n_vehicles: int, fd_positions=(), gammas=None) -> Topology:
    if n_vehicles < 3:
        raise TopologyError(f"a platoon needs at least 3 vehicles, got {n_vehicles}")
    fd = set(fd_positions)
    bad = sorted(p for p in fd if not 0 <= p < n_vehicles)
    if bad:
        raise TopologyError(f"FD positions {bad} outside node range 0..{n_vehicles - 1}")

    half = n_vehicles - 1  # N_r + 1
    modes = tuple(Duplex.FD if i in fd else Duplex.HD for i in range(n_vehicles))
    links = tuple(
        [Link(l, l - 1, l, Direction.RIGHT) for l in range(1, half + 1)]
        + [Link(l, l - half, l - half - 1, Direction.LEFT) for l in range(half + 1, 2 * half + 1)]
    )
    bidi = tuple(BidiLink(b, (b, b + half)) for b in range(1, half + 1))

    flows = []
    for f in range(1, half + 1):
        flows.append(Flow(f, 0, f, Direction.RIGHT, tuple(range(1, f + 1))))
    for f in range(half + 1, 2 * half + 1):
        # left-hand flow f starts at node f - half and walks down to the leader
        path = tuple(range(f, half, -1))
        flows.append(Flow(f, f - half, 0, Direction.LEFT, path))
    if gammas is None:
        gammas = [default_gamma(fl.hops, half) for fl in flows]
    topo = Topology(n_vehicles, modes, links, bidi, tuple(flows))
    return topo.with_gammas(gammas)

