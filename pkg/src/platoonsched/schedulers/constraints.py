"""Activation validator written directly against the link-index form of the
scheduling constraints (binary activation, HD incidence sets, single
transmit/receive per node, routing sets).  Kept deliberately separate from
``Topology.is_feasible`` so the two can cross-check each other."""
from __future__ import annotations

from ..topology import Duplex, Topology


def allowed(f: int, l: int, n_links: int) -> bool:
    half = n_links // 2
    if f <= half:
        return 1 <= l <= f
    return half + 1 <= l <= f


def violations(topology: Topology, activations) -> list[str]:
    """Return a list of human-readable violations (empty when feasible).

    ``activations`` is an iterable of ``(link, flow)`` pairs.
    """
    out = []
    L = topology.n_links
    F = topology.n_flows
    nr = topology.n_members
    pairs = list(activations)
    links = [l for l, _ in pairs]

    for l, f in pairs:
        if not 1 <= l <= L:
            out.append(f"link {l} does not exist")
        if not 1 <= f <= F:
            out.append(f"flow {f} does not exist")
        elif not allowed(f, l, L):
            out.append(f"flow {f} not routed over link {l}")
    if len(set(links)) != len(links):
        out.append("a link carries more than one flow")

    on = set(links)

    def at_most_one(group, label):
        n = sum(1 for l in group if l in on)
        if n > 1:
            out.append(f"{label}: {n} active links among {sorted(group)}")

    for i in range(1, nr + 1):
        if topology.modes[i] is Duplex.HD:
            at_most_one({i, i + 1, i + nr + 1, i + nr + 2}, f"HD node {i}")
    if topology.modes[0] is Duplex.HD:
        at_most_one({1, nr + 2}, "HD node 0")
    if topology.modes[nr + 1] is Duplex.HD:
        at_most_one({nr + 1, 2 * nr + 2}, f"HD node {nr + 1}")
    for i in range(1, nr + 1):
        at_most_one({i + 1, i + nr + 1}, f"node {i} transmits twice")
        at_most_one({i, i + nr + 2}, f"node {i} receives twice")
    return out


def is_valid(topology: Topology, activations) -> bool:
    return not violations(topology, activations)
