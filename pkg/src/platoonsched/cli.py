"""Command line front end.

    platoonsched run <config>       one simulation
    platoonsched sweep <spec>       cross-product of axes, one row per (point, seed)
    platoonsched validate <config>  parse + validate, print the normalised config
    platoonsched frame <config>     print the FB/QB frame as a slot x link table

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .channel import draw_capacities
from .config import SweepSpec, dump_config, parse_config
from .queueing import QueueState
from .schedulers import FBScheduler, QBScheduler
from .sim import ConfigError, SimConfig, run, summarize
from .sweep import row_from_report, rows_to_csv, run_sweep, write_rows

log = logging.getLogger("platoonsched")

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


def _formats(args):
    return (args.format,) if args.format else ("csv", "json")


def _load(path, seed=None, want=None):
    cfg = parse_config(path)
    if want is SimConfig and isinstance(cfg, SweepSpec):
        raise ConfigError(f"{path}: a [sweep] file cannot be used here, use 'sweep'")
    if seed is not None:
        if isinstance(cfg, SweepSpec):
            cfg = replace(cfg, base=replace(cfg.base, seed=seed))
        else:
            cfg = replace(cfg, seed=seed)
    if want is SweepSpec and isinstance(cfg, SimConfig):
        cfg = SweepSpec(base=cfg)
    return cfg


def cmd_run(args) -> int:
    cfg = _load(args.config, args.seed, SimConfig)
    out = Path(args.out_dir)
    metrics = run(cfg)
    rep = summarize(metrics)
    row = row_from_report(cfg, rep)
    write_rows([row], out, _formats(args), stem="run")
    (out / "config.toml").write_text(dump_config(cfg))
    hist = out / "latency_slots.csv"
    hist.write_text("flow,latency_slots\n" + "".join(
        f"{f},{v}\n" for f, per in enumerate(metrics.latencies, start=1) for v in per))
    if not args.no_plots:
        from .report import plot_backlog, plot_latency_histogram
        title = f"{cfg.scheduler.upper()} seed {cfg.seed}"
        plot_latency_histogram(metrics.all_latencies(), cfg.slot_duration, out / "latency_hist.png", title)
        plot_backlog(metrics.backlog_trace, out / "backlog.png", title)
    sys.stdout.write(rows_to_csv([row]))
    if rep["no_samples"]:
        log.warning("no packets delivered: no latency samples")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _load(args.spec, args.seed, SweepSpec)
    out = Path(args.out_dir)
    rows = run_sweep(spec, parallel=args.parallel)
    write_rows(rows, out, _formats(args))
    (out / "spec.toml").write_text(dump_config(spec))
    if not args.no_plots:
        from .report import plot_sweep_bars
        plot_sweep_bars(rows, out)
    failed = sum(1 for r in rows if r["error"])
    log.info("%d runs, %d failed, results in %s", len(rows), failed, out)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args.config, args.seed)
    sys.stdout.write(dump_config(cfg))
    n = cfg.size() if isinstance(cfg, SweepSpec) else 1
    print(f"# ok: {n} run(s)", file=sys.stderr)
    return EXIT_OK


def cmd_frame(args) -> int:
    cfg = _load(args.config, args.seed)
    base = cfg.base if isinstance(cfg, SweepSpec) else cfg
    topo = base.topology()
    T = base.resolved_frame_length()
    fb = FBScheduler(topo, T, base.frame_layout)
    print(f"FB frame, T = {T}, units = {list(fb.units)}, demands = {list(fb.frame.demands)}")
    print(fb.frame.table())
    qb = QBScheduler(topo, T, base.frame_layout)
    # with empty queues the QB frame is the demand-increase fill alone
    qb.start_frame(QueueState(topo), draw_capacities(base.channel, topo, np.random.default_rng(base.seed)))
    print(f"\nQB frame (empty queues), T = {T}, demands = {list(qb.frame.demands)}")
    print(qb.frame.table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="platoonsched", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None, help="override the configured seed")

    def outputs(sp):
        sp.add_argument("--out-dir", default="results")
        sp.add_argument("--format", choices=("csv", "json"), default=None,
                        help="write only this table format (default: both)")
        sp.add_argument("--no-plots", action="store_true", help="skip the PNG figures")

    sp = sub.add_parser("run", help="run one simulation")
    sp.add_argument("config")
    common(sp)
    outputs(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run a parameter sweep")
    sp.add_argument("spec")
    common(sp)
    outputs(sp)
    sp.add_argument("--parallel", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate", help="check a config or sweep file")
    sp.add_argument("config")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("frame", help="print the TDMA frame for a config")
    sp.add_argument("config")
    common(sp)
    sp.set_defaults(func=cmd_frame)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:
        log.debug("runtime failure", exc_info=True)
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
