"""Latency-oriented link scheduling for vehicle platoons.

Three schedulers share one slotted simulator: a static flow-based TDMA
frame (``fb``), a queue-driven TDMA frame rebuilt every frame (``qb``), and
per-slot back-pressure (``bp``).  Any interior vehicle can be made
full-duplex.
"""
from .channel import ChannelConfig, Coherence
from .queueing import ArrivalConfig
from .sim import ConfigError, Metrics, SimConfig, run, summarize
from .topology import build_topology

__version__ = "0.1.0"

__all__ = [
    "ArrivalConfig", "ChannelConfig", "Coherence", "ConfigError", "Metrics", "SimConfig",
    "build_topology", "run", "summarize",
]
