"""Command-line entry point: run, sweep, verify, dump-config."""

from __future__ import annotations

import argparse
import copy
import csv
import itertools
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import yaml

from .config import ConfigError, apply_override, dump_config, load_config, to_scenario
from .engine import simulate
from .errors import DivergenceError, InfeasibleDesignError
from .tracefile import write_report, write_trace
from .verify import run_suite

OUTPUT_ENV = "ADAPTIVE_STA_OUTPUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 2, 3, 4, 1

log = logging.getLogger("adaptive_sta")


def _output_dir(arg: str | None) -> Path:
    d = Path(os.environ.get(OUTPUT_ENV) or arg or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _effective_config(source: str, overrides: list[str], full_rate: bool = False) -> dict:
    cfg = load_config(source)
    for ov in overrides or []:
        apply_override(cfg, ov)
    if full_rate:
        cfg["sim"]["decimation"] = 1
    return cfg


def _run_one(cfg: dict, out_dir: Path, name: str, trace_name: str | None = None, report_name: str | None = None) -> int:
    try:
        scn = to_scenario(cfg)
        res = simulate(scn)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleDesignError as exc:
        print(f"infeasible gain design: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DivergenceError as exc:
        print(f"diverged: {exc}; last valid row: {exc.last_row}", file=sys.stderr)
        partial = getattr(exc, "partial", None)
        if partial is not None:
            write_trace(partial, out_dir / (trace_name or cfg["output"]["trace"]))
        return EXIT_DIVERGED
    trace_path = out_dir / (trace_name or cfg["output"]["trace"])
    report_path = out_dir / (report_name or cfg["output"]["report"])
    write_trace(res.trace, trace_path)
    write_report(res, report_path, name)
    r = res.report
    log.info(
        "%s: %d rows in %.2fs; t_e=%s t_delta=%s t_z=%s (bound %s)",
        name, len(res.trace), res.wall_time, r.t_e_detected, r.t_delta_detected, r.t_z_detected, r.t_z_bound,
    )
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        cfg = _effective_config(args.scenario, args.set, args.full_rate)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return _run_one(cfg, _output_dir(args.out_dir), args.scenario, args.trace, args.report)


def _parse_grid(specs: list[str]) -> list[tuple[str, list]]:
    grid = []
    for spec in specs:
        if "=" not in spec:
            raise ConfigError(f"grid entry '{spec}' is not of the form key.path=v1,v2,...")
        key, vals = spec.split("=", 1)
        grid.append((key, [yaml.safe_load(v) for v in vals.split(",")]))
    return grid


def cmd_sweep(args) -> int:
    try:
        base = _effective_config(args.scenario, args.set)
        grid = _parse_grid(args.grid or [])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = _output_dir(args.out_dir)
    keys = [k for k, _ in grid]
    combos = list(itertools.product(*[v for _, v in grid])) or [()]
    jobs = []
    for idx, combo in enumerate(combos):
        cfg = copy.deepcopy(base)
        try:
            for k, v in zip(keys, combo):
                apply_override(cfg, f"{k}={yaml.safe_dump(v, default_flow_style=True).strip().removesuffix('...').strip()}")
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        jobs.append((idx, combo, cfg))

    def work(job):
        idx, combo, cfg = job
        return idx, combo, _run_one(cfg, out_dir, f"{args.scenario}#{idx}", f"trace_{idx:03d}.csv", f"report_{idx:03d}.json")

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = sorted(pool.map(work, jobs))
    with open(out_dir / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", *keys, "exit_code", "trace", "report"])
        for idx, combo, code in results:
            w.writerow([idx, *combo, code, f"trace_{idx:03d}.csv", f"report_{idx:03d}.json"])
    return max(code for _, _, code in results)


def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} properties passed")
    return EXIT_OK if not failed else EXIT_VERIFY


def cmd_dump_config(args) -> int:
    try:
        cfg = _effective_config(args.scenario, args.set, args.full_rate)
        to_scenario(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = dump_config(cfg)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log run summaries")
    p = argparse.ArgumentParser(prog="adaptive-sta", description="Adaptive-gain super-twisting simulations.")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_args(sp):
        sp.add_argument("scenario", help="preset (fig2, pure-sta, lowpass-baseline) or YAML scenario file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override, e.g. sim.t_end=2")

    run = sub.add_parser("run", parents=[common], help="simulate one scenario, write trace CSV and JSON report")
    scenario_args(run)
    run.add_argument("--out-dir", help=f"output directory (env {OUTPUT_ENV} takes precedence)")
    run.add_argument("--trace", help="trace file name (default from output.trace)")
    run.add_argument("--report", help="report file name (default from output.report)")
    run.add_argument("--full-rate", action="store_true", help="record every step (decimation 1)")
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", parents=[common], help="run a cartesian grid of overrides in parallel")
    scenario_args(sw)
    sw.add_argument("--grid", action="append", metavar="KEY=V1,V2,...")
    sw.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sw.add_argument("--out-dir")
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", parents=[common], help="run property suites")
    ver.add_argument("suite", choices=["implicit-oracle", "ellipse", "certificate", "all"])
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)

    dc = sub.add_parser("dump-config", parents=[common], help="print the effective scenario as YAML")
    scenario_args(dc)
    dc.add_argument("--full-rate", action="store_true")
    dc.add_argument("-o", "--output")
    dc.set_defaults(func=cmd_dump_config)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
