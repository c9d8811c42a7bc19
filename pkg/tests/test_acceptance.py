"""Acceptance suite: full-length runs, one PASS/FAIL line per criterion.

Run on its own with ``pytest tests/test_acceptance.py -v``; the results of
40000-slot simulations are cached per (scheduler, FD set, SIC, seed) so the
latency criteria share them.
"""
import random
import time

import numpy as np
import pytest

from platoonsched.channel import CapacityMap, ChannelConfig
from platoonsched.cli import main
from platoonsched.schedulers import bp_slot, fb_color_counts, fb_frame_length
from platoonsched.sim import SimConfig, run, summarize
from platoonsched.topology import build_topology

from oracles import brute_force_bp

SLOTS = 40_000
SEEDS = (1, 2, 3, 4, 5)
FD_SETS = ((), (1,), (1, 2), (1, 2, 3))

_cache = {}


def full_run(scheduler, fd=(), sic=40.0, seed=1):
    key = (scheduler, tuple(fd), sic, seed)
    if key not in _cache:
        cfg = SimConfig(scheduler=scheduler, fd_positions=fd, seed=seed, total_slots=SLOTS,
                        channel=ChannelConfig(sic_level=sic))
        m = run(cfg)
        _cache[key] = (m.violations, summarize(m))
    return _cache[key]


def mean_latency(scheduler, fd=(), sic=40.0):
    return float(np.mean([full_run(scheduler, fd, sic, s)[1]["mean_ms"] for s in SEEDS]))


def verdict(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_c1_combinatorics(capsys):
    t0 = time.perf_counter()
    t = build_topology(5)
    o, T = fb_color_counts(t), fb_frame_length(t)
    dt = time.perf_counter() - t0
    verdict(capsys, 1, o == [8, 6, 4, 2] and T == 14 and dt < 1.0,
            f"colour counts {o}, frame length {T}, {dt * 1e3:.1f} ms")


def test_c2_bp_oracle(capsys):
    rng = random.Random(2024)
    t0 = time.perf_counter()
    mismatches = 0
    n_cases = 1000
    for _ in range(n_cases):
        n = rng.choice([3, 4, 5])
        L = 2 * (n - 1)
        fd = {i for i in range(n) if rng.random() < 0.4}
        Q = [[rng.choice([0, rng.randint(1, 400_000)]) for _ in range(L)] for _ in range(n)]
        clear = [rng.randint(0, 200_000) for _ in range(L)]
        with_si = [rng.randint(0, c) for c in clear]
        topo = build_topology(n, fd)
        caps = CapacityMap(tuple(clear), tuple(with_si), (0.0,) * L)
        got = bp_slot(Q, caps, topo).objective
        want, _ = brute_force_bp(Q, clear, with_si, fd, n, topo.gammas)
        mismatches += got != want
    dt = time.perf_counter() - t0
    verdict(capsys, 2, mismatches == 0 and dt < 60,
            f"{n_cases} instances, {mismatches} mismatches, {dt:.1f} s")


def test_c3_feasibility(capsys):
    bad = []
    for sched in ("fb", "qb", "bp"):
        for fd in FD_SETS:
            v, _ = full_run(sched, fd)
            if v:
                bad.append((sched, fd, v))
    verdict(capsys, 3, not bad, f"12 full runs, violating: {bad or 'none'}")


def test_c4_conservation(capsys):
    cfg = SimConfig(scheduler="qb", fd_positions={1, 2}, total_slots=SLOTS, seed=7,
                    check_invariants=True)
    try:
        m = run(cfg)
        ok, detail = True, f"{m.arrived} packets, checked every slot"
    except AssertionError as exc:
        ok, detail = False, str(exc)
    verdict(capsys, 4, ok, detail)


def test_c5_latency_magnitude(capsys):
    means = {s: mean_latency(s) for s in ("fb", "qb", "bp")}
    verdict(capsys, 5, all(v < 2.0 for v in means.values()),
            "all-HD mean latency ms " + ", ".join(f"{k}={v:.3f}" for k, v in means.items()))


@pytest.mark.parametrize("fd", [(), (1,)])
def test_c6_ordering(capsys, fd):
    bp, qb, fb = (mean_latency(s, fd) for s in ("bp", "qb", "fb"))
    verdict(capsys, 6, bp <= qb <= fb,
            f"FD {list(fd)}: bp={bp:.3f} qb={qb:.3f} fb={fb:.3f} ms")


@pytest.mark.parametrize("sched", ["bp", "qb"])
def test_c7_fd_position(capsys, sched):
    means = {p: mean_latency(sched, (p,)) for p in (1, 2, 3)}
    best = min(means, key=means.get)
    verdict(capsys, 7, best == 1,
            f"{sched} single FD at " + ", ".join(f"{p}: {v:.3f}" for p, v in means.items()) + " ms")


def test_c8_sic_degradation(capsys):
    lines, ok = [], True
    for fd in FD_SETS[1:]:
        lo, hi = mean_latency("bp", fd, 10.0), mean_latency("bp", fd, 40.0)
        ok &= lo > hi
        lines.append(f"FD {list(fd)}: SIC10={lo:.3f} SIC40={hi:.3f}")
    verdict(capsys, 8, ok, "bp " + "; ".join(lines))


def test_c9_determinism(capsys, tmp_path):
    spec = tmp_path / "spec.toml"
    spec.write_text("[sim]\ntotal_slots = 5000\n[sweep]\nscheduler = ['fb', 'qb', 'bp']\n"
                    "fd_positions = [[], [1, 2]]\nseeds = [3]\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}"
        assert main(["sweep", str(spec), "--no-plots", "--out-dir", str(out)]) == 0
        outs.append((out / "results.csv").read_bytes())
    one = tmp_path / "one.toml"
    one.write_text(f"[scheduler]\nname = 'bp'\n[topology]\nfd_positions = [1]\n"
                   f"[sim]\nseed = 11\ntotal_slots = {SLOTS}\n")
    run_outs = []
    for k in range(2):
        out = tmp_path / f"single{k}"
        assert main(["run", str(one), "--no-plots", "--out-dir", str(out)]) == 0
        run_outs.append((out / "run.csv").read_bytes())
    verdict(capsys, 9, outs[0] == outs[1] and run_outs[0] == run_outs[1],
            f"sweep CSV {len(outs[0])} bytes, run CSV {len(run_outs[0])} bytes, identical")

