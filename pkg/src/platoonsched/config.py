"""TOML configuration files for single runs and sweeps.

Every key is optional; omitted keys take the defaults below.

    [topology]   n_vehicles, fd_positions
    [channel]    carrier_freq_hz, bandwidth_hz, tx_power_dbm, shadowing_mean_db,
                 shadowing_std_db, noise_psd_dbm_hz, noise_figure_db, sic_level_db,
                 vehicle_length_m, vehicle_separation_m, si_isolation_db, coherence
    [arrivals]   rate, packet_sizes_kbit
    [scheduler]  name, gammas, frame_length, frame_layout
    [sim]        total_slots, slot_duration_s, seed, warmup_slots, check_invariants
    [sweep]      fd_positions, sic_level_db, scheduler, rate, seeds, replications,
                 max_points

A file with a ``[sweep]`` table describes a sweep; the other tables then
form its base point.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .channel import ChannelConfig, Coherence
from .queueing import KBIT, ArrivalConfig
from .sim import ConfigError, SimConfig

# toml key -> dataclass attribute
CHANNEL_KEYS = {
    "carrier_freq_hz": "carrier_freq",
    "bandwidth_hz": "bandwidth",
    "tx_power_dbm": "tx_power",
    "shadowing_mean_db": "shadowing_mean",
    "shadowing_std_db": "shadowing_std",
    "noise_psd_dbm_hz": "noise_psd",
    "noise_figure_db": "noise_figure",
    "sic_level_db": "sic_level",
    "vehicle_length_m": "vehicle_length",
    "vehicle_separation_m": "vehicle_separation",
    "si_isolation_db": "si_isolation",
    "coherence": "coherence",
}
TOPOLOGY_KEYS = {"n_vehicles", "fd_positions"}
ARRIVAL_KEYS = {"rate", "packet_sizes_kbit"}
SCHEDULER_KEYS = {"name", "gammas", "frame_length", "frame_layout"}
SIM_KEYS = {"total_slots", "slot_duration_s", "seed", "warmup_slots", "check_invariants"}
SWEEP_KEYS = {"fd_positions", "sic_level_db", "scheduler", "rate", "seeds", "replications", "max_points"}
SECTIONS = {
    "topology": TOPOLOGY_KEYS,
    "channel": set(CHANNEL_KEYS),
    "arrivals": ARRIVAL_KEYS,
    "scheduler": SCHEDULER_KEYS,
    "sim": SIM_KEYS,
    "sweep": SWEEP_KEYS,
}
DEFAULT_MAX_POINTS = 10_000


@dataclass(frozen=True)
class SweepSpec:
    base: SimConfig = field(default_factory=SimConfig)
    fd_positions: tuple | None = None
    sic_level: tuple | None = None
    scheduler: tuple | None = None
    rate: tuple | None = None
    seeds: tuple | None = None
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        if self.fd_positions is not None:
            object.__setattr__(self, "fd_positions",
                               tuple(frozenset(int(p) for p in s) for s in self.fd_positions))
        for name in ("sic_level", "scheduler", "rate", "seeds"):
            v = getattr(self, name)
            if v is not None:
                if len(v) == 0:
                    raise ConfigError(f"sweep.{name}: axis must not be empty")
                object.__setattr__(self, name, tuple(v))
        if self.fd_positions is not None and len(self.fd_positions) == 0:
            raise ConfigError("sweep.fd_positions: axis must not be empty")
        if self.size() > self.max_points:
            raise ConfigError(f"sweep: {self.size()} runs exceed max_points = {self.max_points}")
        self.points()  # every point must be a valid SimConfig

    def axes(self) -> dict:
        b = self.base
        return {
            "fd_positions": self.fd_positions or (b.fd_positions,),
            "sic_level": self.sic_level or (b.channel.sic_level,),
            "scheduler": self.scheduler or (b.scheduler,),
            "rate": self.rate or (b.arrivals.rate,),
            "seed": self.seeds or (b.seed,),
        }

    def size(self) -> int:
        return math.prod(len(v) for v in self.axes().values())

    def points(self) -> list[SimConfig]:
        """All run configurations, ordered by (FD set, SIC, scheduler, rate, seed)."""
        ax = self.axes()
        fd_sorted = sorted(ax["fd_positions"], key=lambda s: (len(s), sorted(s)))
        out = []
        for fd, sic, sched, rate, seed in itertools.product(
            fd_sorted, sorted(ax["sic_level"]), sorted(ax["scheduler"]),
            sorted(ax["rate"]), sorted(ax["seed"]),
        ):
            try:
                out.append(replace(
                    self.base,
                    fd_positions=fd,
                    channel=replace(self.base.channel, sic_level=float(sic)),
                    scheduler=sched,
                    arrivals=replace(self.base.arrivals, rate=float(rate)),
                    seed=int(seed),
                ))
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"sweep point invalid: {exc}") from exc
        return out


def _check_keys(doc: dict) -> None:
    for section, body in doc.items():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key in body:
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {section}.{key}")


def _typed(section, key, value, kind):
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"{section}.{key}: expected integer, got boolean")
    if not isinstance(value, kind):
        raise ConfigError(f"{section}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def config_from_dict(doc: dict) -> SimConfig | SweepSpec:
    _check_keys(doc)
    topo = doc.get("topology", {})
    ch = doc.get("channel", {})
    arr = doc.get("arrivals", {})
    sch = doc.get("scheduler", {})
    sim = doc.get("sim", {})

    ch_kwargs = {}
    for key, attr in CHANNEL_KEYS.items():
        if key not in ch:
            continue
        if key == "coherence":
            try:
                ch_kwargs[attr] = Coherence(_typed("channel", key, ch[key], str))
            except ValueError:
                raise ConfigError("channel.coherence: expected 'frame' or 'slot'") from None
        else:
            ch_kwargs[attr] = _typed("channel", key, ch[key], float)
    try:
        channel = ChannelConfig(**ch_kwargs)
    except ValueError as exc:
        raise ConfigError(f"channel: {exc}") from exc

    arr_kwargs = {}
    if "rate" in arr:
        arr_kwargs["rate"] = _typed("arrivals", "rate", arr["rate"], float)
    if "packet_sizes_kbit" in arr:
        sizes = _typed("arrivals", "packet_sizes_kbit", arr["packet_sizes_kbit"], list)
        arr_kwargs["sizes"] = tuple(int(round(_typed("arrivals", "packet_sizes_kbit", s, float) * KBIT))
                                    for s in sizes)
    try:
        arrivals = ArrivalConfig(**arr_kwargs)
    except ValueError as exc:
        raise ConfigError(f"arrivals: {exc}") from exc

    kw = {"channel": channel, "arrivals": arrivals}
    if "n_vehicles" in topo:
        kw["n_vehicles"] = _typed("topology", "n_vehicles", topo["n_vehicles"], int)
    if "fd_positions" in topo:
        kw["fd_positions"] = frozenset(
            _typed("topology", "fd_positions", p, int)
            for p in _typed("topology", "fd_positions", topo["fd_positions"], list))
    if "name" in sch:
        kw["scheduler"] = _typed("scheduler", "name", sch["name"], str)
    if "gammas" in sch:
        kw["gammas"] = tuple(_typed("scheduler", "gammas", g, float)
                             for g in _typed("scheduler", "gammas", sch["gammas"], list))
    if "frame_length" in sch:
        kw["frame_length"] = _typed("scheduler", "frame_length", sch["frame_length"], int)
    if "frame_layout" in sch:
        kw["frame_layout"] = _typed("scheduler", "frame_layout", sch["frame_layout"], str)
    for key, attr, kind in (("total_slots", "total_slots", int), ("slot_duration_s", "slot_duration", float),
                            ("seed", "seed", int), ("warmup_slots", "warmup_slots", int),
                            ("check_invariants", "check_invariants", bool)):
        if key in sim:
            kw[attr] = _typed("sim", key, sim[key], kind)
    base = SimConfig(**kw)

    if "sweep" not in doc:
        return base
    sw = doc["sweep"]
    seeds = None
    if "seeds" in sw and "replications" in sw:
        raise ConfigError("sweep: give either seeds or replications, not both")
    if "seeds" in sw:
        seeds = [_typed("sweep", "seeds", s, int) for s in _typed("sweep", "seeds", sw["seeds"], list)]
    elif "replications" in sw:
        n = _typed("sweep", "replications", sw["replications"], int)
        if n < 1:
            raise ConfigError("sweep.replications: must be >= 1")
        seeds = [base.seed + k for k in range(n)]

    def axis(key, kind):
        if key not in sw:
            return None
        return [_typed("sweep", key, v, kind) for v in _typed("sweep", key, sw[key], list)]

    fd = None
    if "fd_positions" in sw:
        fd = [[_typed("sweep", "fd_positions", p, int) for p in _typed("sweep", "fd_positions", s, list)]
              for s in _typed("sweep", "fd_positions", sw["fd_positions"], list)]
    return SweepSpec(
        base=base,
        fd_positions=fd,
        sic_level=axis("sic_level_db", float),
        scheduler=axis("scheduler", str),
        rate=axis("rate", float),
        seeds=seeds,
        max_points=_typed("sweep", "max_points", sw.get("max_points", DEFAULT_MAX_POINTS), int),
    )


def parse_config_text(text: str) -> SimConfig | SweepSpec:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    return config_from_dict(doc)


def parse_config(path) -> SimConfig | SweepSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_config_text(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_to_dict(cfg: SimConfig | SweepSpec) -> dict:
    if isinstance(cfg, SweepSpec):
        doc = config_to_dict(cfg.base)
        sw = {"max_points": cfg.max_points}
        if cfg.fd_positions is not None:
            sw["fd_positions"] = [sorted(s) for s in cfg.fd_positions]
        if cfg.sic_level is not None:
            sw["sic_level_db"] = list(cfg.sic_level)
        if cfg.scheduler is not None:
            sw["scheduler"] = list(cfg.scheduler)
        if cfg.rate is not None:
            sw["rate"] = list(cfg.rate)
        if cfg.seeds is not None:
            sw["seeds"] = list(cfg.seeds)
        doc["sweep"] = sw
        return doc
    ch = {}
    for key, attr in CHANNEL_KEYS.items():
        v = getattr(cfg.channel, attr)
        if v is None:
            continue
        ch[key] = v.value if isinstance(v, Coherence) else v
    sch = {"name": cfg.scheduler, "frame_layout": cfg.frame_layout}
    if cfg.gammas is not None:
        sch["gammas"] = list(cfg.gammas)
    if cfg.frame_length is not None:
        sch["frame_length"] = cfg.frame_length
    return {
        "topology": {"n_vehicles": cfg.n_vehicles, "fd_positions": sorted(cfg.fd_positions)},
        "channel": ch,
        "arrivals": {"rate": cfg.arrivals.rate,
                     "packet_sizes_kbit": [s / KBIT for s in cfg.arrivals.sizes]},
        "scheduler": sch,
        "sim": {
            "total_slots": cfg.total_slots,
            "slot_duration_s": cfg.slot_duration,
            "seed": cfg.seed,
            "warmup_slots": cfg.warmup_slots,
            "check_invariants": cfg.check_invariants,
        },
    }


def dump_config(cfg: SimConfig | SweepSpec) -> str:
    return tomli_w.dumps(config_to_dict(cfg))
