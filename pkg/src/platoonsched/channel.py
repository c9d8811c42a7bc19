"""LOS link budget at mmWave: free-space path loss, log-normal shadowing,
Shannon capacity per slot, and residual self-interference at FD receivers."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .topology import Duplex, Topology

SPEED_OF_LIGHT = 299_792_458.0


class Coherence(enum.Enum):
    SLOT = "slot"
    FRAME = "frame"


def path_loss(distance: float, freq: float) -> float:
    """Free-space path loss in dB."""
    if distance <= 0:
        raise ValueError(f"distance must be positive, got {distance}")
    if freq <= 0:
        raise ValueError(f"frequency must be positive, got {freq}")
    return 20.0 * math.log10(4.0 * math.pi * distance * freq / SPEED_OF_LIGHT)


def dbm_to_mw(p: float) -> float:
    return 10.0 ** (p / 10.0)


@dataclass(frozen=True)
class ChannelConfig:
    carrier_freq: float = 30e9
    bandwidth: float = 200e6
    tx_power: float = 23.0
    shadowing_mean: float = 0.0
    shadowing_std: float = 8.0
    noise_psd: float = -174.0
    noise_figure: float = 3.0
    sic_level: float = 40.0
    vehicle_length: float = 5.0
    vehicle_separation: float = 33.33
    # isolation between a vehicle's own front and rear transceivers before
    # active cancellation; None -> free-space loss over one vehicle length
    si_isolation: float | None = None
    coherence: Coherence = Coherence.FRAME

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.carrier_freq <= 0:
            raise ValueError("carrier_freq must be positive")
        if self.sic_level < 0:
            raise ValueError("sic_level must be >= 0")
        if self.shadowing_std < 0:
            raise ValueError("shadowing_std must be >= 0")
        if self.vehicle_length <= 0 or self.vehicle_separation <= 0:
            raise ValueError("vehicle_length and vehicle_separation must be positive")
        if self.si_isolation is not None and self.si_isolation < 0:
            raise ValueError("si_isolation must be >= 0")

    @property
    def link_distance(self) -> float:
        return self.vehicle_separation + self.vehicle_length

    @property
    def noise_power(self) -> float:
        """Thermal noise plus receiver noise figure, dBm."""
        return self.noise_psd + 10.0 * math.log10(self.bandwidth) + self.noise_figure

    @property
    def isolation(self) -> float:
        if self.si_isolation is not None:
            return self.si_isolation
        return path_loss(self.vehicle_length, self.carrier_freq)

    @property
    def residual_si(self) -> float:
        """Self-interference left at an FD receiver while it transmits, dBm."""
        return self.tx_power - self.isolation - self.sic_level


def capacity_bits(config: ChannelConfig, rx_power: float, interference_mw: float,
                  slot_duration: float) -> int:
    """Shannon capacity over one slot, floored to whole bits."""
    sinr = dbm_to_mw(rx_power) / (dbm_to_mw(config.noise_power) + interference_mw)
    c = config.bandwidth * math.log2(1.0 + sinr) * slot_duration
    return max(0, int(math.floor(c)))


def link_capacity(config: ChannelConfig, topology: Topology, link: int, active,
                  shadowing: float, slot_duration: float) -> int:
    """Capacity of ``link`` (bits/slot) when the links in ``active`` transmit.

    Residual self-interference applies only when the receiver is FD and is
    itself transmitting on another active link.
    """
    lk = topology.link(link)
    rx_power = config.tx_power - path_loss(config.link_distance, config.carrier_freq) - shadowing
    interference = 0.0
    if topology.is_fd(lk.rx) and any(topology.link(a).tx == lk.rx for a in active if a != link):
        if math.isfinite(config.sic_level):
            interference = dbm_to_mw(config.residual_si)
    return capacity_bits(config, rx_power, interference, slot_duration)


@dataclass(frozen=True)
class CapacityMap:
    """Per-link capacity for one coherence interval.

    ``clear[l-1]`` is the capacity without self-interference, ``with_si[l-1]``
    the capacity when the link's FD receiver is transmitting at the same time.
    """
    clear: tuple[int, ...]
    with_si: tuple[int, ...]
    shadowing: tuple[float, ...]

    def for_set(self, topology: Topology, active) -> dict[int, int]:
        out = {}
        transmitting = {topology.links[a - 1].tx for a in active}
        for l in active:
            rx = topology.links[l - 1].rx
            si = rx in transmitting and topology.modes[rx] is Duplex.FD
            out[l] = self.with_si[l - 1] if si else self.clear[l - 1]
        return out


def capacities_from_shadowing(config: ChannelConfig, topology: Topology, shadowing,
                              slot_duration: float) -> CapacityMap:
    loss = path_loss(config.link_distance, config.carrier_freq)
    si_mw = dbm_to_mw(config.residual_si) if math.isfinite(config.sic_level) else 0.0
    clear, with_si = [], []
    for s in shadowing:
        rx_power = config.tx_power - loss - float(s)
        clear.append(capacity_bits(config, rx_power, 0.0, slot_duration))
        with_si.append(capacity_bits(config, rx_power, si_mw, slot_duration))
    return CapacityMap(tuple(clear), tuple(with_si), tuple(float(s) for s in shadowing))


def draw_capacities(config: ChannelConfig, topology: Topology, rng: np.random.Generator,
                    slot_duration: float = 125e-6) -> CapacityMap:
    """One i.i.d. Gaussian (dB) shadowing draw per directional link."""
    shadowing = rng.normal(config.shadowing_mean, config.shadowing_std, topology.n_links)
    return capacities_from_shadowing(config, topology, shadowing, slot_duration)
