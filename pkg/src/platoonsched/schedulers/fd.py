"""Merging of bidirectional links around FD relays, and per-slot flow
selection for an activated (possibly merged) unit."""
from __future__ import annotations

from ..topology import Topology
from .backlog import DifferentialBacklog


def fd_merge(topology: Topology) -> list[tuple[int, ...]]:
    """Group bidirectional links into schedulable units along the path.

    An FD member at node ``i`` joins bidirectional links ``i`` and ``i+1``;
    runs of consecutive FD members chain into one unit.  Without FD members
    every unit is a single bidirectional link.
    """
    units: list[list[int]] = [[1]]
    for b in range(2, len(topology.bidi) + 1):
        relay = b - 1  # node shared by bidi links b-1 and b
        if topology.is_fd(relay):
            units[-1].append(b)
        else:
            units.append([b])
    return [tuple(u) for u in units]


def _best(db: DifferentialBacklog, topology: Topology, l: int) -> tuple[float, int | None]:
    top, arg = 0.0, None
    for f in topology.flows_on(l):
        w = db.per_flow[(l, f)]
        if w > top:
            top, arg = w, f
    return top, arg


def select_flow(unit, db: DifferentialBacklog, topology: Topology) -> list[tuple[int, int]]:
    """Choose which (directional link, flow) pairs an activated unit serves.

    Single bidirectional link: the largest per-flow differential backlog over
    both directions wins (ties go right-hand, then to the lower flow id).
    Merged unit: per direction, the per-link maxima are summed; the larger
    sum (right-hand on ties) picks the direction, and every link of that
    direction serves its own best flow.  Returns ``[]`` when the unit idles.
    """
    half = topology.half
    unit = tuple(unit)
    if len(unit) == 1:
        b = unit[0]
        w_r, f_r = _best(db, topology, b)
        w_l, f_l = _best(db, topology, b + half)
        if f_r is None and f_l is None:
            return []
        if f_l is None or (f_r is not None and w_r >= w_l):
            return [(b, f_r)]
        return [(b + half, f_l)]

    right = [(b,) + _best(db, topology, b) for b in unit]
    left = [(b + half,) + _best(db, topology, b + half) for b in unit]
    s_r = sum(w for _, w, _ in right)
    s_l = sum(w for _, w, _ in left)
    chosen = right if s_r >= s_l else left
    return [(l, f) for l, w, f in chosen if f is not None]
