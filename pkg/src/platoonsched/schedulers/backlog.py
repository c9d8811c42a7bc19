from __future__ import annotations

from dataclasses import dataclass

from ..topology import Topology


@dataclass(frozen=True)
class DifferentialBacklog:
    per_flow: dict  # (link, flow) -> W_l^f
    link: tuple[float, ...]  # W_l, index l-1
    best_flow: tuple[int | None, ...]  # argmax flow per link, None when W_l == 0

    def w(self, l: int, f: int) -> float:
        return self.per_flow.get((l, f), 0.0)


def _backlog_matrix(queues):
    return queues.backlog if hasattr(queues, "backlog") else queues


def differential_backlogs(queues, topology: Topology, gammas=None) -> DifferentialBacklog:
    """Exponentiated upstream-minus-downstream backlog per (link, flow).

    ``queues`` is a ``QueueState`` or a ``[node][flow-1]`` backlog matrix.
    The destination of a flow holds no queue, so its side counts as zero.
    Ties for the per-link maximum go to the lowest flow id.
    """
    Q = _backlog_matrix(queues)
    if gammas is None:
        gammas = topology.gammas
    per_flow = {}
    W = []
    best = []
    for lk in topology.links:
        top, arg = 0.0, None
        for f in topology.flows_on(lk.id):
            fl = topology.flows[f - 1]
            g = gammas[f - 1]
            up = Q[lk.tx][f - 1]
            down = 0 if lk.rx == fl.destination else Q[lk.rx][f - 1]
            w = float(up) ** g - float(down) ** g
            if w < 0:
                w = 0.0
            per_flow[(lk.id, f)] = w
            if w > top:
                top, arg = w, f
        W.append(top)
        best.append(arg)
    return DifferentialBacklog(per_flow, tuple(W), tuple(best))
