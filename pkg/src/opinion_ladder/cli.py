"""Command line entry point: ``opinion-ladder {sequence,simulate,speeds,sweep,check}``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from .checks import FAIL, run_checks
from .config import RunConfig, load_config
from .frontlab import (InsufficientData, estimate_speed, intermediate_region, plateau_value,
                       track_fronts)
from .model import check_h1, validate_params
from .sequences import RootFindingError, build_sequences, sweep_s0
from .solver import CFLViolation, ConfigurationError, run
from .tables import (PLATEAU_HEADER, SPEED_HEADER, read_snapshot_set, write_invariants,
                     write_ladder, write_rows, write_snapshot_set, write_sweep)

log = logging.getLogger("opinion_ladder")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class ValidationFailed(Exception):
    pass


def _model_ok(cfg: RunConfig) -> None:
    report = validate_params(cfg.model)
    for note in report.notes:
        print(f"note: {note}")
    if not report.ok:
        for v in report.violations:
            print(f"invalid: {v}", file=sys.stderr)
        raise ValidationFailed()


def cmd_sequence(cfg: RunConfig) -> int:
    _model_ok(cfg)
    seq = build_sequences(cfg.model)
    write_ladder(cfg.output_dir / "ladder.csv", seq)
    if seq.truncated:
        print(f"N* >= {seq.depth} (truncated)")
    else:
        print(f"N* = {seq.n_star}")
    h1 = check_h1(seq)
    print("speed ordering: c_n strictly decreasing" if h1.ok
          else f"speed ordering: violated at c_{h1.first_violation}")
    total = math.fsum(seq.daggers)
    print(f"dagger sum = {total!r} (S*_0 = {cfg.model.s0_star!r})")
    for k, r in enumerate(seq.repro, start=1):
        if abs(r - 1) < 1e-9:
            print(f"warning: R_{k} = {r!r} is within 1e-9 of the threshold")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, force: bool = False) -> int:
    _model_ok(cfg)
    seq = build_sequences(cfg.model)
    solver_cfg = cfg.solver(seq.depth + 1)
    res = run(solver_cfg, cfg.model, force=force, standoff=cfg.standoff)
    write_snapshot_set(cfg.output_dir, res.snapshots, res.grid)
    write_invariants(cfg.output_dir / "invariants.csv", res.log.records)
    drift = max(rec["mass_drift"] for rec in res.log.records)
    print(f"{len(res.snapshots)} snapshot(s), dt = {res.dt!r}, max mass drift = {drift:.3g}")
    return EXIT_OK


def cmd_speeds(cfg: RunConfig) -> int:
    _model_ok(cfg)
    seq = build_sequences(cfg.model)
    grid, snaps = read_snapshot_set(cfg.output_dir)
    if len(snaps) < 2:
        raise InsufficientData("need at least two snapshots")
    a = cfg.analysis
    n_sim = snaps[0].n_sim
    speed_rows = []
    for n in range(1, min(seq.depth, n_sim) + 1):
        level = a.level_fraction * seq.plateaus[n]
        try:
            est = estimate_speed(track_fronts(snaps, grid, n, level), a.window_fraction)
        except InsufficientData as exc:
            print(f"opinion {n}: skipped ({exc})")
            continue
        c = seq.speeds[n - 1]
        speed_rows.append((n, est.speed, est.stderr, c, abs(est.speed - c) / c))
        print(f"opinion {n}: speed {est.speed:.5g} vs c_{n} = {c:.5g}")
    write_rows(cfg.output_dir / "speeds.csv", SPEED_HEADER, speed_rows)

    last = snaps[-1]
    plateau_rows = []
    targets = []
    for n in range(1, min(seq.depth, n_sim)):
        region = intermediate_region(seq.speeds[n - 1], seq.speeds[n], last.t, a.plateau_inset)
        targets.append((n, region, seq.plateaus[n]))
    if seq.speeds:
        reach = (1 - a.plateau_inset) * seq.speeds[-1] * last.t
        targets.append((0, (a.dagger_delta, reach), seq.daggers[0]))
    for n, region, target in targets:
        try:
            pv = plateau_value(last, grid, n, region)
        except ValueError as exc:
            print(f"plateau {n}: skipped ({exc})")
            continue
        plateau_rows.append((n, region[0], region[1], pv.mean, target,
                             abs(pv.mean - target) / target))
    write_rows(cfg.output_dir / "plateaus.csv", PLATEAU_HEADER, plateau_rows)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    _model_ok(cfg)
    table = sweep_s0(cfg.sweep_values(), cfg.template(), cfg.model.cap)
    write_sweep(cfg.output_dir / "sweep.csv", table)
    steps, prev = [], None
    for s0, n in table.n_stars.items():
        if n != prev:
            steps.append(f"{s0:g}:{n}")
            prev = n
    print(f"N* steps (S*_0:N*): {', '.join(steps)}")
    return EXIT_OK


def cmd_check(cfg: RunConfig, seed: int = 0) -> int:
    results = run_checks(cfg.model, seed=seed, pairs=cfg.analysis.check_pairs)
    for res in results:
        print(res.line())
    if results[0].status == FAIL:
        return EXIT_VALIDATION
    return EXIT_NUMERICAL if any(r.status == FAIL for r in results) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opinion-ladder", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sequence", "simulate", "speeds", "sweep", "check"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", default=Path("out"), type=Path)
        sp.add_argument("--force", action="store_true",
                        help="run even if the speeds are not decreasing or the domain is too small")
        sp.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.out)
        if args.command == "sequence":
            return cmd_sequence(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.force)
        if args.command == "speeds":
            return cmd_speeds(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_check(cfg, args.seed)
    except (ValidationFailed, ConfigurationError) as exc:
        if str(exc):
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (RootFindingError, CFLViolation, InsufficientData, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
