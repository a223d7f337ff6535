"""``lorawan-capacity`` command line: one subcommand per reproduced exhibit."""

from __future__ import annotations

import argparse
import csv
import io
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from functools import partial

import numpy as np

from . import analytic
from .config import load_scenario, sweep_spec
from .errors import ConfigError, DomainError
from .geometry import CELL_PRESETS, preset_cell, sample_distances
from .netsim import CSV_COLUMNS, metrics_rows, run
from .phy import SPREADING_FACTORS, airtime_table
from .regulation import ChannelPlan

SCHEMA_LINE = "#schema=1"
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    with _output(path) as out:
        out.write(SCHEMA_LINE + "\n")
        out.write(buf.getvalue())


def _f(x, digits=6) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.{digits}f}"


def _pool_map(fn, items, jobs: int):
    """Ordered map; results come back in input order whatever the completion order."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _mean_half_width(values) -> tuple[float, float]:
    if len(values) < 2:
        return float(values[0]), math.nan
    return statistics.fmean(values), 1.96 * statistics.stdev(values) / math.sqrt(len(values))


def _sim_per_node(spec, duration_s, seed):
    return run(spec, duration_s, seed).metrics.total.throughput_pkt_h


def _sim_columns(spec, seeds, duration_s, jobs):
    vals = _pool_map(partial(_sim_per_node, spec, duration_s), seeds, jobs)
    return _mean_half_width(vals)


def _plan(args) -> ChannelPlan:
    if args.shared_sub_band:
        return ChannelPlan.shared_sub_band(args.n_channels, args.duty_cycle)
    return ChannelPlan(args.n_channels, args.duty_cycle)


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def cmd_toa(args) -> int:
    rows = [
        (sf, pl, _f(ms, 3))
        for sf, pl, ms in airtime_table(bandwidth_hz=args.bandwidth_hz, coding_rate_denominator=args.coding_rate_denominator)
    ]
    _write_csv(args.out, ("sf", "payload_bytes", "toa_ms"), rows)
    return 0


def cmd_sf_dist(args) -> int:
    if args.config:
        scen = load_scenario(args.config)
        probs = scen.spec.sf_probabilities
        cell = scen.cell
    else:
        cell = preset_cell(args.preset)
        probs = cell.probabilities
    header = ["sf", "probability"]
    emp = None
    if args.empirical:
        if cell is None:
            raise ConfigError("empirical comparison needs a geometric cell, not explicit probabilities")
        _, sfs = sample_distances(cell, args.empirical, args.seed)
        emp = [float(np.mean(sfs == sf)) for sf in SPREADING_FACTORS]
        header.append("empirical")
    rows = []
    for k, sf in enumerate(SPREADING_FACTORS):
        row = [sf, _f(probs[k], 4)]
        if emp is not None:
            row.append(_f(emp[k], 4))
        rows.append(row)
    if args.out:
        _write_csv(args.out, header, rows)
    else:
        print("  ".join(f"{h:>11}" for h in header))
        for row in rows:
            print("  ".join(f"{str(v):>11}" for v in row))
    return 0


def _base_spec(args, n_devices=1, lam=0.0) -> analytic.ScenarioSpec:
    return analytic.ScenarioSpec(
        n_devices, lam, args.payload, plan=_plan(args), sf_probabilities=preset_cell(args.preset).probabilities
    )


def cmd_fig2(args) -> int:
    base = _base_spec(args)
    n_values = _ints(args.n_devices) if args.n_devices else np.unique(
        np.round(np.logspace(0, math.log10(args.n_max), args.points)).astype(int)
    ).tolist()
    header = ["n_devices", "network_pkt_h", "per_node_pkt_h"]
    if args.simulate:
        header += ["sim_network_pkt_h", "sim_half_width"]
    rows = []
    for pt in analytic.network_received_at_max_rate(base, n_values):
        row = [pt.n_devices, _f(pt.network_packets_per_hour, 3), _f(pt.per_node_packets_per_hour, 4)]
        if args.simulate:
            # Simulated devices generate far above every cap, which saturates the duty-cycle gate.
            spec = base.with_(n_devices=pt.n_devices, lambda_per_hour=args.sim_lambda)
            mean, hw = _sim_columns(spec, range(args.seeds), args.sim_duration_s, args.jobs)
            row += [_f(mean * pt.n_devices, 3), _f(hw * pt.n_devices, 3)]
        rows.append(row)
    _write_csv(args.out, header, rows)
    return 0


def cmd_fig3(args) -> int:
    lambdas = np.logspace(math.log10(args.lambda_min), math.log10(args.lambda_max), args.points)
    header = ["n_devices", "lambda_per_hour", "per_node_pkt_h", "per_node_bytes_h", "delivery_ratio"]
    if args.simulate:
        header += ["sim_per_node_pkt_h", "sim_half_width"]
    rows = []
    for n in _ints(args.n_devices):
        spec = _base_spec(args, n)
        curve = analytic.throughput_curve(spec, lambdas)
        for lam, thr in zip(lambdas, curve):
            row = [n, _f(lam, 3), _f(thr, 4), _f(thr * args.payload, 3), _f(thr / lam, 6)]
            if args.simulate:
                mean, hw = _sim_columns(spec.with_(lambda_per_hour=float(lam)), range(args.seeds), args.sim_duration_s, args.jobs)
                row += [_f(mean, 4), _f(hw, 4)]
            rows.append(row)
    _write_csv(args.out, header, rows)
    return 0


def cmd_table1(args) -> int:
    header = [
        "n_devices",
        "payload_bytes",
        "max_pkt_h",
        "max_bytes_h",
        "lambda_star_pkt_h",
        "success_pct",
        "collision_success_pct",
    ]
    if args.simulate:
        header += ["sim_pkt_h", "sim_half_width"]
    probs = preset_cell(args.preset).probabilities
    rows = []
    for n in _ints(args.n_devices):
        for pl in _ints(args.payloads):
            r = analytic.table1(n, pl, plan=_plan(args), sf_probabilities=probs)
            row = [
                n,
                pl,
                _f(r.max_packets_per_hour, 3),
                _f(r.max_bytes_per_hour, 2),
                _f(r.lambda_star_per_hour, 2),
                _f(100 * r.success_probability, 3),
                _f(100 * r.collision_success, 3),
            ]
            if args.simulate:
                spec = analytic.ScenarioSpec(n, r.lambda_star_per_hour, pl, plan=_plan(args), sf_probabilities=probs)
                mean, hw = _sim_columns(spec, range(args.seeds), args.sim_duration_s, args.jobs)
                row += [_f(mean, 3), _f(hw, 3)]
            rows.append(row)
    _write_csv(args.out, header, rows)
    return 0


def _run_seed(scen, spec, seed, trace_path=None):
    if trace_path:
        with open(trace_path, "w", newline="") as fh:
            res = run(spec, scen.duration_s, seed, gateway=scen.gateway, traffic=scen.traffic, fair_access=scen.fair_access, trace=fh)
    else:
        res = run(spec, scen.duration_s, seed, gateway=scen.gateway, traffic=scen.traffic, fair_access=scen.fair_access)
    return res.metrics


def _trace_name(path: str, seed: int, n_seeds: int) -> str:
    if n_seeds == 1:
        return path
    stem, dot, ext = path.rpartition(".")
    return f"{stem}.seed{seed}.{ext}" if dot else f"{path}.seed{seed}"


def cmd_simulate(args) -> int:
    scen = load_scenario(args.config)
    seeds = tuple(range(args.seeds)) if args.seeds is not None else scen.seeds
    trace = args.trace or scen.trace_path
    out = args.out or scen.metrics_csv
    if trace:
        metrics = [_run_seed(scen, scen.spec, s, _trace_name(trace, s, len(seeds))) for s in seeds]
    else:
        metrics = _pool_map(partial(_run_seed, scen, scen.spec), seeds, args.jobs)
    rows = [row for m in metrics for row in metrics_rows(m)]
    _write_csv(out, CSV_COLUMNS, rows)
    if hasattr(scen.traffic, "trigger_s"):
        for m in metrics:
            print(
                f"seed {m.seed}: time_to_drain_s={m.time_to_drain_s(scen.traffic.trigger_s):.6f} "
                f"collision_ratio={m.collision_ratio:.6f}",
                file=sys.stderr,
            )
    return 0


def _sweep_point(scen, item):
    value, seed = item
    spec = sweep_spec(scen.spec, scen.sweep_parameter, value)
    return _run_seed(scen, spec, seed)


def cmd_sweep(args) -> int:
    scen = load_scenario(args.config)
    if not scen.sweep_parameter or not scen.sweep_values:
        raise ConfigError("[sweep] needs parameter and values")
    seeds = tuple(range(args.seeds)) if args.seeds is not None else scen.seeds
    items = [(v, s) for v in scen.sweep_values for s in seeds]
    results = _pool_map(partial(_sweep_point, scen), items, args.jobs)
    header = [
        scen.sweep_parameter,
        "analytic_per_node_pkt_h",
        "analytic_delivery_ratio",
        "sim_per_node_pkt_h",
        "sim_half_width",
        "sim_delivery_ratio",
        "sim_gateway_utilization",
    ]
    rows = []
    for k, value in enumerate(scen.sweep_values):
        ms = results[k * len(seeds) : (k + 1) * len(seeds)]
        spec = sweep_spec(scen.spec, scen.sweep_parameter, value)
        rep = analytic.per_node_throughput(spec)
        mean, hw = _mean_half_width([m.total.throughput_pkt_h for m in ms])
        rows.append(
            [
                value,
                _f(rep.per_node_packets_per_hour, 4),
                _f(rep.delivery_ratio, 6),
                _f(mean, 4),
                _f(hw, 4),
                _f(statistics.fmean(m.total.delivery_ratio for m in ms), 6),
                _f(statistics.fmean(m.gateway_utilization for m in ms), 6),
            ]
        )
    _write_csv(args.out or scen.metrics_csv, header, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lorawan-capacity", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, payload=10):
        sp.add_argument("--out", help="output CSV path (default stdout)")
        sp.add_argument("--preset", default="paper-urban", choices=CELL_PRESETS)
        sp.add_argument("--payload", type=int, default=payload)
        sp.add_argument("--n-channels", type=int, default=3)
        sp.add_argument("--duty-cycle", type=float, default=0.01)
        sp.add_argument("--shared-sub-band", action="store_true", help="account all channels in one sub-band")
        sp.add_argument("--simulate", action="store_true", help="append simulated columns")
        sp.add_argument("--seeds", type=int, default=4)
        sp.add_argument("--sim-duration-s", type=float, default=3600.0)
        sp.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("toa", help="airtime for every SF and payload")
    s.add_argument("--out")
    s.add_argument("--bandwidth-hz", type=int, default=125000)
    s.add_argument("--coding-rate-denominator", type=int, default=5)
    s.set_defaults(func=cmd_toa)

    s = sub.add_parser("sf-dist", help="SF shares of the configured cell")
    s.add_argument("--preset", default="paper-urban", choices=CELL_PRESETS)
    s.add_argument("--config")
    s.add_argument("--empirical", type=int, default=0, metavar="N", help="also sample N devices")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sf_dist)

    s = sub.add_parser("fig2", help="network packets/hour with devices at their duty-cycle cap")
    common(s)
    s.add_argument("--n-devices", help="comma-separated device counts")
    s.add_argument("--n-max", type=int, default=5000)
    s.add_argument("--points", type=int, default=60)
    s.add_argument("--sim-lambda", type=float, default=1e5, help="generation rate used when simulating")
    s.set_defaults(func=cmd_fig2)

    s = sub.add_parser("fig3", help="per-node packets/hour versus generation rate")
    common(s)
    s.add_argument("--n-devices", default="250,500,1000,5000")
    s.add_argument("--lambda-min", type=float, default=1.0)
    s.add_argument("--lambda-max", type=float, default=1e4)
    s.add_argument("--points", type=int, default=81)
    s.set_defaults(func=cmd_fig3)

    s = sub.add_parser("table1", help="maximum per-node throughput per deployment")
    common(s)
    s.add_argument("--n-devices", default="250,500,1000,5000")
    s.add_argument("--payloads", default="10,30,50")
    s.set_defaults(func=cmd_table1)

    for name, fn, hlp in (
        ("simulate", cmd_simulate, "run the simulator on a scenario file"),
        ("sweep", cmd_sweep, "simulate a scenario over a swept parameter"),
    ):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("config", nargs="?", help="scenario TOML file")
        s.add_argument("--config", dest="config_opt")
        s.add_argument("--out")
        s.add_argument("--seeds", type=int)
        s.add_argument("--jobs", type=int, default=1)
        if name == "simulate":
            s.add_argument("--trace", help="per-event trace CSV path")
        s.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config_opt", None):
        args.config = args.config_opt
    if args.command in ("simulate", "sweep") and not args.config:
        parser.error(f"{args.command} needs a scenario file")
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
