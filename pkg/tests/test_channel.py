import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from platoonsched.channel import (
    SPEED_OF_LIGHT,
    ChannelConfig,
    capacities_from_shadowing,
    capacity_bits,
    draw_capacities,
    link_capacity,
    path_loss,
)
from platoonsched.topology import build_topology

from oracles import fspl_db

SLOT = 125e-6


def test_fspl_zero_at_unit_scale():
    assert path_loss(1.0, SPEED_OF_LIGHT / (4 * math.pi)) == pytest.approx(0.0, abs=1e-9)


def test_fspl_platoon_hop():
    assert path_loss(38.33, 30e9) == pytest.approx(fspl_db(38.33, 30e9), abs=1e-9)
    assert path_loss(38.33, 30e9) == pytest.approx(93.66, abs=0.01)


@given(d=st.floats(0.1, 1e4), f=st.floats(1e6, 1e11))
def test_fspl_doubling(d, f):
    assert path_loss(2 * d, f) - path_loss(d, f) == pytest.approx(20 * math.log10(2), abs=1e-9)


def test_fspl_rejects_nonpositive():
    with pytest.raises(ValueError):
        path_loss(0, 30e9)


def test_nominal_capacity_exceeds_largest_packet():
    cfg = ChannelConfig(sic_level=40.0)
    rx = cfg.tx_power - path_loss(cfg.link_distance, cfg.carrier_freq)
    assert capacity_bits(cfg, rx, 0.0, SLOT) > 136_000


def test_capacity_hand_computation():
    cfg = ChannelConfig(noise_figure=0.0)
    snr_db = 23 - fspl_db(38.33, 30e9) - (-174 + 10 * math.log10(200e6))
    expected = math.floor(200e6 * math.log2(1 + 10 ** (snr_db / 10)) * SLOT)
    rx = cfg.tx_power - path_loss(cfg.link_distance, cfg.carrier_freq)
    assert capacity_bits(cfg, rx, 0.0, SLOT) == expected


def test_hd_receiver_ignores_active_set():
    topo = build_topology(5)
    cfg = ChannelConfig()
    assert link_capacity(cfg, topo, 1, (1, 3), 0.0, SLOT) == link_capacity(cfg, topo, 1, (1,), 0.0, SLOT)


def test_self_interference_only_when_receiver_transmits():
    topo = build_topology(5, {1})
    cfg = ChannelConfig(sic_level=10.0)
    alone = link_capacity(cfg, topo, 1, (1,), 0.0, SLOT)
    busy = link_capacity(cfg, topo, 1, (1, 2), 0.0, SLOT)
    assert busy < alone
    # link 2's receiver is HD node 2
    assert link_capacity(cfg, topo, 2, (1, 2), 0.0, SLOT) == link_capacity(cfg, topo, 2, (2,), 0.0, SLOT)


def test_infinite_sic_is_interference_free():
    topo = build_topology(5, {1})
    cfg = ChannelConfig(sic_level=math.inf)
    assert link_capacity(cfg, topo, 1, (1, 2), 0.0, SLOT) == link_capacity(cfg, topo, 1, (1,), 0.0, SLOT)
    cmap = capacities_from_shadowing(cfg, topo, [0.0] * 8, SLOT)
    assert cmap.clear == cmap.with_si


@given(s=st.floats(-20, 20), lo=st.floats(0, 60), hi=st.floats(0, 60))
def test_sic_monotone(s, lo, hi):
    lo, hi = sorted((lo, hi))
    topo = build_topology(5, {1})
    c_lo = link_capacity(ChannelConfig(sic_level=lo), topo, 1, (1, 2), s, SLOT)
    c_hi = link_capacity(ChannelConfig(sic_level=hi), topo, 1, (1, 2), s, SLOT)
    assert c_hi >= c_lo


def test_capacity_map_matches_link_capacity():
    topo = build_topology(5, {1, 3})
    cfg = ChannelConfig()
    cmap = draw_capacities(cfg, topo, np.random.default_rng(3))
    for active in [(1, 2), (1, 3), (4, 7), (2, 3, 6)]:
        got = cmap.for_set(topo, active)
        for l in active:
            assert got[l] == link_capacity(cfg, topo, l, active, cmap.shadowing[l - 1], SLOT)


def test_draw_determinism():
    topo, cfg = build_topology(5), ChannelConfig()
    a = draw_capacities(cfg, topo, np.random.default_rng(7))
    b = draw_capacities(cfg, topo, np.random.default_rng(7))
    assert a == b
    assert a != draw_capacities(cfg, topo, np.random.default_rng(8))


def test_shadowing_statistics():
    topo, cfg = build_topology(5), ChannelConfig()
    rng = np.random.default_rng(0)
    s = np.array([draw_capacities(cfg, topo, rng).shadowing for _ in range(3000)]).ravel()
    assert abs(s.mean()) < 0.2 and abs(s.std() - 8.0) < 0.2


@pytest.mark.parametrize("field,value", [("bandwidth", 0), ("sic_level", -3), ("shadowing_std", -1)])
def test_config_validation(field, value):
    with pytest.raises(ValueError):
        ChannelConfig(**{field: value})
