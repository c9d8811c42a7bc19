from .backlog import DifferentialBacklog, differential_backlogs
from .bp import BPScheduler, SlotDecision, bp_slot
from .constraints import is_valid, violations
from .fb import (
    ColoringError,
    FBScheduler,
    FrameSchedule,
    LAYOUTS,
    edge_color,
    fb_color_counts,
    fb_frame_length,
    max_degree,
)
from .fd import fd_merge, select_flow
from .qb import QBScheduler, qb_adjust_demands, qb_demands

SCHEDULERS = {"fb": FBScheduler, "bp": BPScheduler, "qb": QBScheduler}


def make_scheduler(name: str, topology, T=None, layout="spread"):
    try:
        cls = SCHEDULERS[name]
    except KeyError:
        raise ValueError(f"unknown scheduler {name!r}; choose from {sorted(SCHEDULERS)}") from None
    return cls(topology, T, layout)


__all__ = [
    "BPScheduler", "ColoringError", "DifferentialBacklog", "FBScheduler", "FrameSchedule", "LAYOUTS",
    "QBScheduler", "SCHEDULERS", "SlotDecision", "bp_slot", "differential_backlogs",
    "edge_color", "fb_color_counts", "fb_frame_length", "fd_merge", "is_valid",
    "make_scheduler", "max_degree", "qb_adjust_demands", "qb_demands", "select_flow",
    "violations",
]
