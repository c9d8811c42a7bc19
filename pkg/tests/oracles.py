"""Independent reference computations used by the tests.

Nothing here calls into the scheduler code paths under test; link and flow
indexing is re-derived from the closed-form index rules.
"""
from __future__ import annotations

import itertools
import math

from platoonsched.schedulers.constraints import allowed, violations


def endpoints(l, n_vehicles):
    half = n_vehicles - 1
    if l <= half:
        return l - 1, l
    return l - half, l - half - 1


def destination(f, n_vehicles):
    half = n_vehicles - 1
    return f if f <= half else 0


def brute_force_bp(Q, clear, with_si, fd_nodes, n_vehicles, gammas):
    """Max of sum W_l * min(Q, C_l) over all 2^L link subsets that pass the
    index-form constraint validator.  Returns (objective, best subset)."""
    L = 2 * (n_vehicles - 1)
    W, arg = {}, {}
    for l in range(1, L + 1):
        tx, rx = endpoints(l, n_vehicles)
        best, bf = 0.0, None
        for f in range(1, L + 1):
            if not allowed(f, l, L):
                continue
            g = gammas[f - 1]
            down = 0 if rx == destination(f, n_vehicles) else Q[rx][f - 1]
            w = max(float(Q[tx][f - 1]) ** g - float(down) ** g, 0.0)
            if w > best:
                best, bf = w, f
        W[l], arg[l] = best, bf

    class _Topo:  # just enough of a topology for the index-form validator
        pass

    from platoonsched.topology import Duplex
    topo = _Topo()
    topo.n_links, topo.n_flows, topo.n_members = L, L, n_vehicles - 2
    topo.modes = [Duplex.FD if i in fd_nodes else Duplex.HD for i in range(n_vehicles)]

    top, top_set = 0.0, ()
    for r in range(L + 1):
        for subset in itertools.combinations(range(1, L + 1), r):
            acts = [(l, arg[l] if arg[l] is not None else _any_flow(l, L)) for l in subset]
            if violations(topo, acts):
                continue
            tx_nodes = {endpoints(l, n_vehicles)[0] for l in subset}
            terms = []
            for l in subset:
                rx = endpoints(l, n_vehicles)[1]
                cap = with_si[l - 1] if (rx in fd_nodes and rx in tx_nodes) else clear[l - 1]
                q = Q[endpoints(l, n_vehicles)[0]][arg[l] - 1] if arg[l] is not None else 0
                terms.append(W[l] * min(q, cap))
            val = math.fsum(terms)
            if val > top:
                top, top_set = val, subset
    return top, top_set


def _any_flow(l, L):
    return next(f for f in range(1, L + 1) if allowed(f, l, L))


def fspl_db(d, f):
    c = 299_792_458.0
    return 10 * math.log10((4 * math.pi * d * f / c) ** 2)


def valid_path_coloring(frame, demands):
    """Counts per unit match and neighbouring units are slot-disjoint."""
    per_unit = [set() for _ in demands]
    for s, active in enumerate(frame.slots):
        for k in active:
            per_unit[k].add(s)
    if [len(x) for x in per_unit] != list(demands):
        return False
    return all(not (a & b) for a, b in zip(per_unit, per_unit[1:]))
