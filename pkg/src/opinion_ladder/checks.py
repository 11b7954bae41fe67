"""Self-check suite run by ``opinion-ladder check``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import AT_LEAST_CAP, ModelParams, validate_params
from .sequences import (big_phi, bracket_n_star, build_sequences, monotonicity_scan,
                        phi_integrand, random_ordered_pairs)
from .solver import reference_config, run

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str = ""

    def line(self) -> str:
        return f"{self.status:4s}  {self.name}: {self.detail or 'ok'}"


def bisect_plateau(s_prev: float, lam: float, iters: int = 200) -> float:
    """Plain bisection on ``s_prev*(1 - exp(-lam*s)) - s`` over ``(0, s_prev]``."""
    lo, hi = 0.0, s_prev
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if s_prev * (1.0 - math.exp(-lam * mid)) - mid > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _ladder_vs_bisection(p: ModelParams) -> CheckResult:
    seq = build_sequences(p)
    worst = 0.0
    for n in range(1, len(seq.plateaus)):
        ref = bisect_plateau(seq.plateaus[n - 1], p.opinions[n - 1].lam)
        worst = max(worst, abs(ref - seq.plateaus[n]))
    status = PASS if worst <= 1e-10 else FAIL
    return CheckResult("ladder vs bisection", status, f"max |diff| = {worst:.3g}")


def _telescoping(p: ModelParams) -> CheckResult:
    seq = build_sequences(p)
    total = math.fsum(seq.daggers)
    err = abs(total - p.s0_star) / max(p.s0_star, 1e-300)
    return CheckResult("dagger telescoping", PASS if err <= 1e-9 else FAIL,
                       f"sum = {total!r}, rel err {err:.3g}")


def _u_bracket(p: ModelParams) -> CheckResult:
    if not p.is_constant:
        return CheckResult("u-bracket agreement", SKIP, "parameters depend on n")
    if p.s0_star <= 0:
        return CheckResult("u-bracket agreement", SKIP, "s0_star = 0")
    lam = p.opinions[0].lam
    k = bracket_n_star(p.s0_star, lam, p.cap)
    seq = build_sequences(p)
    if k == AT_LEAST_CAP:
        return CheckResult("u-bracket agreement", SKIP,
                           f"u-bracket reports {AT_LEAST_CAP} (cap={p.cap})")
    ok = seq.n_star == k
    return CheckResult("u-bracket agreement", PASS if ok else FAIL,
                       f"ladder N* = {seq.n_star}, u-bracket N* = {k}")


def _monotonicity(seed: int, count: int) -> CheckResult:
    pairs = random_ordered_pairs(np.random.default_rng(seed), count, cap=100)
    rep = monotonicity_scan(pairs)
    return CheckResult("monotonicity of N*", PASS if rep.ok else FAIL,
                       f"{rep.checked} pairs checked, {len(rep.violations)} violations "
                       f"(seed {seed})")


def _phi_additivity() -> CheckResult:
    from scipy import integrate
    a, b, lam = 0.7, 3.1, 1.3
    mid, _ = integrate.quad(phi_integrand, a, b, args=(lam,), epsabs=0, epsrel=1e-12)
    err = abs(big_phi(a, lam) + mid - big_phi(b, lam)) / big_phi(b, lam)
    return CheckResult("Phi additivity", PASS if err <= 1e-7 else FAIL, f"rel err {err:.3g}")


def _pde_invariants(p: ModelParams) -> list[CheckResult]:
    seq = build_sequences(p)
    # a handful of levels is enough to exercise every coupling term
    n_sim = min(seq.depth + 1, p.cap, 6)
    c1 = seq.speeds[0] if seq.speeds else 0.0
    t_end = 5.0
    L = max(30.0, c1 * t_end + 20.0)
    cfg = reference_config(p, n_sim=n_sim, half_length=L, dx=0.2, t_end=t_end)
    res = run(cfg, p, force=True)
    log = res.log
    tol_disc = 10 * (res.dt + res.grid.dx ** 2) * p.s0_star
    drift = log.column("mass_drift").max()
    clamp = log.total_clamped / log.initial_mass
    resid = log.column("s0_identity_residual").max()
    sandwich = log.column("sandwich_violation").max()
    r_mono = all((b.r >= a.r).all() for a, b in zip(res.snapshots, res.snapshots[1:]))
    positive = all(min(s.s0.min(), s.i.min(), s.s.min(), s.r.min()) >= 0 for s in res.snapshots)
    return [
        CheckResult("PDE mass conservation", PASS if drift <= 1e-8 else FAIL, f"drift {drift:.3g}"),
        CheckResult("PDE positivity", PASS if positive and clamp <= 1e-8 else FAIL,
                    f"clamped mass fraction {clamp:.3g}"),
        CheckResult("PDE S0 identity", PASS if resid <= tol_disc else FAIL,
                    f"residual {resid:.3g} (tol {tol_disc:.3g})"),
        CheckResult("PDE sandwich bounds", PASS if sandwich == 0 else FAIL,
                    f"excess {sandwich:.3g}"),
        CheckResult("PDE monotone accumulators", PASS if r_mono else FAIL, ""),
    ]


def run_checks(p: ModelParams, seed: int = 0, pairs: int = 100) -> list[CheckResult]:
    report = validate_params(p)
    if not report.ok:
        return [CheckResult("parameter validation", FAIL, "; ".join(report.violations))]
    results = [CheckResult("parameter validation", PASS, "; ".join(report.notes))]
    results.append(_ladder_vs_bisection(p))
    results.append(_telescoping(p))
    results.append(_u_bracket(p))
    results.append(_monotonicity(seed, pairs))
    results.append(_phi_additivity())
    if p.s0_star > 0:
        results.extend(_pde_invariants(p))
    else:
        results.append(CheckResult("PDE invariants", SKIP, "s0_star = 0"))
    return results
