"""Flow-based TDMA: slot counts follow link congestion, frame length is the
maximum adjacent demand sum, and the frame is an edge colouring of the
(merged) bidirectional path."""
from __future__ import annotations

from dataclasses import dataclass

from ..topology import Topology
from .backlog import differential_backlogs
from .fd import fd_merge, select_flow


class ColoringError(ValueError):
    pass


@dataclass(frozen=True)
class FrameSchedule:
    T: int
    units: tuple[tuple[int, ...], ...]  # bidirectional link ids per unit, path order
    demands: tuple[int, ...]  # slots per unit
    slots: tuple[tuple[int, ...], ...]  # slot (0-based) -> indices into ``units``

    def slots_of(self, unit_index: int) -> list[int]:
        return [s for s, active in enumerate(self.slots) if unit_index in active]

    def active_bidi(self, slot: int) -> list[int]:
        return sorted(b for u in self.slots[slot] for b in self.units[u])

    def table(self) -> str:
        """Slot x bidirectional-link table, '#' where the link is active."""
        n_bidi = max(b for u in self.units for b in u)
        head = "slot " + " ".join(f"b{b:<2d}" for b in range(1, n_bidi + 1))
        rows = [head]
        for s in range(self.T):
            on = set(self.active_bidi(s))
            rows.append(f"{s + 1:>4d} " + " ".join(" # " if b in on else " . " for b in range(1, n_bidi + 1)))
        return "\n".join(rows)


def max_degree(demands) -> int:
    """Colours needed on a path: the largest adjacent-pair demand sum."""
    d = list(demands)
    if not d:
        return 0
    if len(d) == 1:
        return d[0]
    return max(a + b for a, b in zip(d, d[1:]))


def fb_color_counts(topology: Topology) -> list[int]:
    """Slots per bidirectional link: both directions' congestion combined."""
    nr = topology.n_members
    return [2 * (nr + 1) - 2 * (b - 1) for b in range(1, len(topology.bidi) + 1)]


def unit_demands(demands, units) -> list[int]:
    """A merged unit shares its colours, so it needs the largest member demand."""
    return [max(demands[b - 1] for b in u) for u in units]


def fb_frame_length(topology: Topology) -> int:
    return max_degree(unit_demands(fb_color_counts(topology), fd_merge(topology)))


LAYOUTS = ("spread", "block")


def _spread(available: list[int], d: int) -> list[int]:
    n = len(available)
    return [available[(j * n) // d] for j in range(d)]


def edge_color(demands, T: int, units=None, layout: str = "spread") -> FrameSchedule:
    """Colour a path of units with ``demands[k]`` slots each in a ``T``-slot frame.

    Neighbouring units never share a slot; units further apart may.

    ``layout="block"``: units at odd path positions take the earliest slots,
    even positions the latest (contiguous blocks).
    ``layout="spread"``: each unit takes slots evenly spaced over whatever its
    upstream neighbour left free, which interleaves neighbours and shortens
    the wait between consecutive hops.
    """
    demands = [int(d) for d in demands]
    if units is None:
        units = [(b,) for b in range(1, len(demands) + 1)]
    units = tuple(tuple(u) for u in units)
    if layout not in LAYOUTS:
        raise ColoringError(f"unknown layout {layout!r}")
    if len(units) != len(demands):
        raise ColoringError("one demand per unit required")
    if any(d < 0 for d in demands):
        raise ColoringError("negative demand")
    if T < 1:
        raise ColoringError("frame length must be at least 1")
    if max_degree(demands) > T:
        raise ColoringError(f"demand {demands} needs {max_degree(demands)} slots, frame has {T}")
    active: list[list[int]] = [[] for _ in range(T)]
    prev: set[int] = set()
    for k, d in enumerate(demands):
        if layout == "block":
            mine = list(range(d)) if k % 2 == 0 else list(range(T - d, T))
        else:
            mine = _spread([s for s in range(T) if s not in prev], d)
        prev = set(mine)
        for s in mine:
            active[s].append(k)
    return FrameSchedule(T, units, tuple(demands), tuple(tuple(a) for a in active))


def frame_activations(frame: FrameSchedule, slot_in_frame: int, db, topology: Topology):
    out = []
    for k in frame.slots[slot_in_frame]:
        out.extend(select_flow(frame.units[k], db, topology))
    return out


class FBScheduler:
    """Static congestion-proportional frame; flows picked per slot by backlog."""

    name = "fb"
    frame_based = True

    def __init__(self, topology: Topology, T: int | None = None, layout: str = "spread"):
        self.topology = topology
        self.units = fd_merge(topology)
        demands = unit_demands(fb_color_counts(topology), self.units)
        self.T = T if T is not None else max_degree(demands)
        self.frame = edge_color(demands, self.T, self.units, layout)
        self.recomputations = 0

    def start_frame(self, queues, capacities) -> None:
        # static frame; counted to compare signalling with the adaptive schemes
        self.recomputations += 1

    def decide(self, slot: int, queues, capacities) -> list[tuple[int, int]]:
        if slot % self.T == 0:
            self.start_frame(queues, capacities)
        db = differential_backlogs(queues, self.topology)
        return frame_activations(self.frame, slot % self.T, db, self.topology)
