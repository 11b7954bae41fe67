"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
written through the terminal reporter so they show without ``-s``.
"""

import math
import time

import numpy as np
import pytest

from opinion_ladder import (AT_LEAST_CAP, ModelParams, OpinionParams, asymptotic_ratio,
                            bracket_n_star, build_sequences, estimate_speed, monotonicity_scan,
                            plateau_value, sweep_s0, track_fronts, u_sequence, vanishing_check)
from opinion_ladder.frontlab import intermediate_region
from opinion_ladder.sequences import random_ordered_pairs
from opinion_ladder.solver import reference_config, run

from oracles import bisection_ladder, mp_u_sequence

SEED = 20240601


@pytest.fixture
def verdict(request):
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    lines = []

    def emit(label, ok, detail):
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    yield emit
    for line in lines:
        if reporter is not None:
            reporter.write_line("\n" + line)
        else:
            print(line)


def _best_time(fn, repeat=20):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def test_criterion_01_ladder(verdict):
    p = ModelParams.constant(2.0, 1.0, 1.0, 1.0, 10)
    elapsed, seq = _best_time(lambda: build_sequences(p))
    oracle = bisection_ladder(2.0, 1.0)
    listed = (2.0, 1.59362, 1.01757, 0.03490)
    err_oracle = max(abs(a - b) for a, b in zip(seq.plateaus, oracle))
    err_listed = max(abs(a - b) for a, b in zip(seq.plateaus, listed))
    dsum = math.fsum(seq.daggers)
    ok = (seq.n_star == 3 and len(oracle) == 4 and err_oracle <= 1e-4 and err_listed <= 1e-4
          and abs(dsum - 2.0) <= 1e-9 and elapsed < 1e-3)
    verdict("1 ladder", ok, f"N*={seq.n_star}, max|S*-oracle|={err_oracle:.2g}, "
                            f"dagger sum={dsum!r}, {elapsed * 1e3:.3f} ms")
    assert ok


def _random_constant_instances(count=200):
    rng = np.random.default_rng(SEED)
    out = []
    for _ in range(count):
        lam = math.exp(rng.uniform(math.log(0.2), math.log(5.0)))
        r0 = rng.uniform(0.1, 20.0)
        out.append((r0 / lam, lam))
    return out


CAP_DUAL = 500


def test_criterion_02_dual_characterization(verdict):
    inst = _random_constant_instances()
    t0 = time.perf_counter()
    pairs = [(build_sequences(ModelParams.constant(s0, 1.0, lam, 1.0, CAP_DUAL)).n_star,
              bracket_n_star(s0, lam, CAP_DUAL)) for s0, lam in inst]
    elapsed = time.perf_counter() - t0
    bad = sum(a != b for a, b in pairs)
    truncated = sum(a == AT_LEAST_CAP for a, _ in pairs)
    ok = bad == 0 and elapsed < 1.0
    verdict("2 dual characterization", ok,
            f"{bad} disagreements over {len(pairs)} instances ({truncated} at-least-cap, "
            f"cap={CAP_DUAL}), {elapsed:.3f} s")
    assert ok


def test_criterion_03_bracket(verdict):
    bad = []
    for s0, lam in _random_constant_instances():
        n = build_sequences(ModelParams.constant(s0, 1.0, lam, 1.0, CAP_DUAL)).n_star
        if n == AT_LEAST_CAP:
            u = u_sequence(lam, CAP_DUAL - 1)
            if not u[-1] < s0:
                bad.append((s0, lam, n))
            continue
        u = u_sequence(lam, n)
        tol = 1e-12 * max(1.0, s0)
        lower_ok = n == 0 or u[n - 1] <= s0 + tol
        if not (lower_ok and s0 <= u[n] + tol):
            bad.append((s0, lam, n))
    # spot check the iteration itself against extended precision
    u_ref = mp_u_sequence(1.3, 40)
    u_err = max(abs(a - b) / b for a, b in zip(u_sequence(1.3, 40), u_ref))
    ok = not bad and u_err <= 1e-12
    verdict("3 bracket", ok, f"{len(bad)} bracket failures, u-iteration rel err {u_err:.2g}")
    assert ok


def test_criterion_04_monotonicity(verdict):
    pairs = random_ordered_pairs(np.random.default_rng(SEED), 150, cap=100)
    t0 = time.perf_counter()
    rep = monotonicity_scan(pairs)
    elapsed = time.perf_counter() - t0
    ok = rep.checked >= 100 and not rep.violations and elapsed < 1.0
    verdict("4 monotonicity", ok, f"{rep.checked} pairs checked, {len(rep.skipped)} skipped, "
                                  f"{len(rep.violations)} violations, {elapsed:.3f} s")
    assert ok


def test_criterion_05_infinite_complexity(verdict):
    p = ModelParams.from_lists(2.0, 1.0, [2.0 ** (k + 1) for k in range(1, 51)], 1.0)
    elapsed, seq = _best_time(lambda: build_sequences(p))
    ok = seq.n_star == AT_LEAST_CAP and seq.plateaus[50] >= 1.5 and elapsed < 10e-3
    verdict("5 infinite-complexity family", ok,
            f"n_star={seq.n_star}, S*_50={seq.plateaus[50]:.6f}, {elapsed * 1e3:.3f} ms")
    assert ok


def test_criterion_06_asymptotics(verdict):
    t0 = time.perf_counter()
    ratios = {}
    for s0 in (4.0, 6.0, 8.0, 10.0):
        n = build_sequences(ModelParams.constant(s0, 1.0, 1.0, 1.0, 5000)).n_star
        ratios[s0] = n * s0 / math.exp(s0)
    elapsed = time.perf_counter() - t0
    agree = all(abs(asymptotic_ratio(s0, 1.0) - r) < 1e-12 for s0, r in ratios.items())
    dev = [abs(r - 1) for r in ratios.values()]
    monotone = all(b <= a for a, b in zip(dev, dev[1:]))
    in_range = 1.0 <= ratios[10.0] <= 1.3
    ok = monotone and in_range and agree and elapsed < 5.0
    verdict("6 asymptotics", ok,
            "ratios " + ", ".join(f"{s:g}:{r:.4f}" for s, r in ratios.items())
            + f"; |ratio-1| non-increasing: {monotone}; ratio(10) in [1, 1.3]: {in_range}; "
            f"{elapsed:.2f} s")
    assert ok


def test_criterion_07_front_speeds(verdict, reference_run, unit_ladder):
    snaps, grid = reference_run.snapshots, reference_run.grid
    est = {}
    for n in (1, 2):
        trace = track_fronts(snaps, grid, n, unit_ladder.plateaus[n] / 2)
        est[n] = estimate_speed(trace, 0.5).speed
    c1, c2 = unit_ladder.speeds[:2]
    e1, e2 = abs(est[1] - c1) / c1, abs(est[2] - c2) / c2
    ok = e1 <= 0.10 and e2 <= 0.15
    verdict("7 front speeds", ok, f"opinion 1 {est[1]:.4f} vs {c1:.4f} ({e1:.1%}); "
                                  f"opinion 2 {est[2]:.4f} vs {c2:.4f} ({e2:.1%})")
    assert ok


def test_criterion_08_plateaus(verdict, reference_run, unit_ladder):
    last, grid = reference_run.snapshots[-1], reference_run.grid
    c = unit_ladder.speeds
    region = intermediate_region(c[0], c[1], last.t, 0.15)
    s1 = plateau_value(last, grid, 1, region)
    e1 = abs(s1.mean - unit_ladder.plateaus[1]) / unit_ladder.plateaus[1]
    s0 = plateau_value(last, grid, 0, (5.0, 0.85 * c[2] * last.t))
    e0 = abs(s0.mean - unit_ladder.daggers[0]) / unit_ladder.daggers[0]
    ok = e1 <= 0.05 and e0 <= 0.10
    verdict("8 plateaus", ok,
            f"s_1 over ({region[0]:.1f}, {region[1]:.1f}) mean {s1.mean:.4f} vs "
            f"{unit_ladder.plateaus[1]:.5f} ({e1:.1%}); s_0 mean {s0.mean:.5f} vs "
            f"{unit_ladder.daggers[0]:.5f} ({e0:.2%})")
    assert ok


def test_criterion_09_vanishing(verdict, reference_run):
    sup = vanishing_check(reference_run.snapshots, reference_run.grid, 4, 30.0)
    ok = sup <= 1e-3
    verdict("9 vanishing above N*", ok, f"sup s_4 over |x|>30 = {sup:.3g}")
    assert ok


def test_criterion_10_s0_law(verdict, reference_run, unit_params):
    resid = {}
    dts = {}
    for dx in (0.1, 0.05):
        res = run(reference_config(unit_params, n_sim=4, half_length=30.0, dx=dx, t_end=5.0),
                  unit_params)
        resid[dx] = res.log.column("s0_identity_residual").max()
        dts[dx] = res.dt
    factor = resid[0.1] / resid[0.05]
    sandwich = reference_run.log.column("sandwich_violation").max()
    quartered = math.isclose(dts[0.05], dts[0.1] / 4, rel_tol=1e-12)
    ok = factor >= 3.0 and quartered and sandwich == 0
    verdict("10 exact S_0 law", ok,
            f"residual {resid[0.1]:.3g} -> {resid[0.05]:.3g} (x{factor:.2f}), "
            f"dt quartered: {quartered}, sandwich excess on full run {sandwich:.3g}")
    assert ok


def test_criterion_11_conservation(verdict, reference_run):
    log = reference_run.log
    drift = log.column("mass_drift").max()
    clamp = log.total_clamped / log.initial_mass
    ok = drift <= 1e-8 and clamp <= 1e-8
    verdict("11 conservation", ok, f"max mass drift {drift:.3g}, clamp fraction {clamp:.3g}")
    assert ok


def test_proportion_sweep(verdict):
    values = [round(0.5 + 0.05 * k, 12) for k in range(151)]
    t0 = time.perf_counter()
    table = sweep_s0(values, OpinionParams(1.0, 1.0, 1.0), cap=1000)
    elapsed = time.perf_counter() - t0
    sums = {}
    for s0, _, f in table.rows:
        sums[s0] = sums.get(s0, 0.0) + f
    worst = max(abs(v - 1) for v in sums.values())
    stairs = table.n_star_column()
    finite = all(n != AT_LEAST_CAP for n in stairs)
    monotone = finite and all(b >= a for a, b in zip(stairs, stairs[1:]))
    ok = len(sums) == len(values) and worst <= 1e-9 and monotone
    verdict("proportion sweep", ok,
            f"{len(values)} values of S*_0, worst column-sum error {worst:.2g}, "
            f"N* from {stairs[0]} to {stairs[-1]} non-decreasing: {monotone}, {elapsed:.2f} s")
    assert ok
