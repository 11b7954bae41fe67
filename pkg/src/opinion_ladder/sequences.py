"""Plateau ladder, maximal complexity and the constant-parameter asymptotics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .model import (AT_LEAST_CAP, ModelParams, OpinionParams,
                    PropagationSequences, check_h1, validate_params)

DEFAULT_TOL = 1e-12


class RootFindingError(ArithmeticError):
    pass


class CapExceeded(RuntimeError):
    """The ladder or the u-sequence ran past the cap without terminating."""


def reproduction_number(s_prev: float, alpha: float, mu: float) -> float:
    return alpha * s_prev / mu


def solve_next_plateau(s_prev: float, alpha: float, mu: float,
                       tol: float = DEFAULT_TOL,
                       max_iter: int = 200) -> float | None:
    """Positive root of ``s_prev * (1 - exp(-lam*s)) = s``, ``lam = alpha/mu``.

    Returns None when ``lam * s_prev <= 1``: the ladder stops there.

    ``g(s) = s_prev*(1 - exp(-lam*s)) - s`` is strictly concave with
    ``g(0) = 0``, ``g'(0) > 0`` and ``g(s_prev) < 0``. Bisection shrinks the
    bracket to ``1e-3 * s_prev``; Newton then starts from the upper end,
    where the tangent of a concave function never overshoots the root.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    lam = alpha / mu
    if lam * s_prev <= 1.0:
        return None

    def g(s):
        return -s_prev * math.expm1(-lam * s) - s

    lo, hi = 0.0, s_prev
    width = 1e-3 * s_prev
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid

    x = hi
    for _ in range(max_iter):
        gx = g(x)
        if gx == 0.0:
            return x
        slope = lam * s_prev * math.exp(-lam * x) - 1.0
        if slope < 0:
            x_new = x - gx / slope
        else:
            x_new = 0.5 * (lo + hi)
        if not lo < x_new <= hi:
            x_new = 0.5 * (lo + hi)
        if g(x_new) > 0:
            lo = x_new
        else:
            hi = x_new
        step = abs(x_new - x)
        x = x_new
        if step <= tol:
            return x
    raise RootFindingError(
        f"plateau root did not converge in {max_iter} iterations "
        f"(s_prev={s_prev!r}, lam={lam!r}, tol={tol!r})")


def wave_speed(d: float, alpha: float, mu: float, s_prev: float) -> float:
    """Spreading speed ``2*sqrt(d*(alpha*s_prev - mu))``."""
    radicand = alpha * s_prev - mu
    if not radicand > 0:
        raise ValueError(
            f"no propagation: alpha*s_prev - mu = {radicand!r} is not positive")
    return 2.0 * math.sqrt(d * radicand)


def build_sequences(p: ModelParams, tol: float = DEFAULT_TOL) -> PropagationSequences:
    """Iterate the plateau equation from ``S*_0`` until ``R_{n+1} <= 1`` or the cap."""
    report = validate_params(p)
    if not report.ok:
        raise ValueError("invalid parameters: " + "; ".join(report.violations))
    plateaus = [float(p.s0_star)]
    speeds = []
    repro = []
    n_star = AT_LEAST_CAP
    for n in range(p.cap):
        op = p.opinions[n]
        s_prev = plateaus[-1]
        repro.append(reproduction_number(s_prev, op.alpha, op.mu))
        s_next = solve_next_plateau(s_prev, op.alpha, op.mu, tol)
        if s_next is None:
            n_star = n
            break
        speeds.append(wave_speed(op.d, op.alpha, op.mu, s_prev))
        plateaus.append(s_next)
    daggers = [a - b for a, b in zip(plateaus, plateaus[1:])]
    daggers.append(plateaus[-1])
    return PropagationSequences(tuple(plateaus), tuple(speeds), tuple(daggers),
                                tuple(repro), n_star)


def phi_map(x: float, lam: float) -> float:
    """``x / (1 - exp(-lam*x))``: maps ``S*_{n+1}`` back to ``S*_n``."""
    if x == 0:
        return 1.0 / lam
    return -x / math.expm1(-lam * x)


def u_sequence(lam: float, k: int) -> list[float]:
    """``u_0 = 1/lam``, ``u_{j+1} = phi(u_j)`` for ``j < k``."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    u = [1.0 / lam]
    for _ in range(k):
        u.append(phi_map(u[-1], lam))
    return u


def bracket_n_star(s0_star: float, lam: float, cap: int) -> int | str:
    """Smallest ``k < cap`` with ``u_k >= s0_star`` (constant parameters).

    This is N* for constant parameters, computed without solving a single
    plateau equation. Returns ``AT_LEAST_CAP`` when ``u_{cap-1} < s0_star``.
    """
    if not s0_star > 0:
        raise ValueError("s0_star must be positive")
    if not lam > 0:
        raise ValueError("lam must be positive")
    u = 1.0 / lam
    for k in range(cap):
        if u >= s0_star:
            return k
        u = phi_map(u, lam)
    return AT_LEAST_CAP


def phi_integrand(z: float, lam: float) -> float:
    """``(exp(lam*z) - 1)/z`` with its limit ``lam`` at ``z = 0``."""
    if z == 0:
        return lam
    return math.expm1(lam * z) / z


def big_phi(x: float, lam: float, rtol: float = 1e-8) -> float:
    """``int_0^x (exp(lam*z) - 1)/z dz`` by adaptive Gauss-Kronrod quadrature."""
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0:
        return 0.0
    val, _ = integrate.quad(phi_integrand, 0.0, x, args=(lam,),
                            epsabs=0.0, epsrel=rtol, limit=500)
    return val


def asymptotic_ratio(s0_star: float, lam: float, cap: int = 10**8) -> float:
    """``N* * lam*S*_0 / exp(lam*S*_0)``; tends to 1 as ``S*_0`` grows."""
    r0 = lam * s0_star
    if not r0 > 1:
        raise ValueError("requires lam * s0_star > 1")
    n = bracket_n_star(s0_star, lam, cap)
    if n == AT_LEAST_CAP:
        raise CapExceeded(f"N* >= cap={cap} for s0_star={s0_star!r}")
    return n * r0 / math.exp(r0)


# -- monotonicity in the parameters -------------------------------------

def is_ordered_pair(left: ModelParams, right: ModelParams) -> bool:
    """``left`` has no more initial mass, no more transmission and no less quieting."""
    if left.s0_star > right.s0_star:
        return False
    m = min(left.cap, right.cap)
    return all(a.alpha <= b.alpha and a.mu >= b.mu
               for a, b in zip(left.opinions[:m], right.opinions[:m]))


def _n_star_at_most(a: PropagationSequences, b: PropagationSequences) -> bool:
    if b.truncated:
        return True
    if a.truncated:
        return a.depth <= b.n_star
    return a.n_star <= b.n_star


@dataclass
class MonotonicityReport:
    checked: int = 0
    skipped: list[tuple[int, str]] = field(default_factory=list)
    violations: list[tuple[int, int | str, int | str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def monotonicity_scan(pairs: Iterable[tuple[ModelParams, ModelParams]],
                      tol: float = DEFAULT_TOL) -> MonotonicityReport:
    """Check ``N*(left) <= N*(right)`` on ordered pairs whose speeds both decrease."""
    report = MonotonicityReport()
    for idx, (left, right) in enumerate(pairs):
        if not is_ordered_pair(left, right):
            report.skipped.append((idx, "pair not ordered"))
            continue
        a = build_sequences(left, tol)
        b = build_sequences(right, tol)
        if not (check_h1(a).ok and check_h1(b).ok):
            report.skipped.append((idx, "speeds not decreasing"))
            continue
        report.checked += 1
        if not _n_star_at_most(a, b):
            report.violations.append((idx, a.n_star, b.n_star))
    return report


def random_ordered_pairs(rng: np.random.Generator, count: int,
                         cap: int = 200) -> list[tuple[ModelParams, ModelParams]]:
    """Random ordered pairs with strictly decreasing speeds.

    Even draws use constant parameters (the speed ordering then holds automatically); odd draws
    use per-opinion rates with steeply decreasing diffusivities, resampled
    until both members pass the ordering check.
    """
    pairs = []
    while len(pairs) < count:
        s0 = rng.uniform(0.2, 4.0)
        s0_right = s0 * rng.uniform(1.0, 1.5)
        if len(pairs) % 2 == 0:
            alpha, mu = rng.uniform(0.5, 2.0, size=2)
            left = ModelParams.constant(s0, 1.0, alpha, mu, cap)
            right = ModelParams.constant(s0_right, 1.0, alpha * rng.uniform(1.0, 1.3),
                                         mu * rng.uniform(0.7, 1.0), cap)
        else:
            alpha = rng.uniform(0.8, 1.6, size=cap)
            mu = rng.uniform(0.6, 1.2, size=cap)
            d = 0.5 ** np.arange(cap)
            left = ModelParams.from_lists(s0, d, alpha, mu, cap)
            right = ModelParams.from_lists(s0_right, d, alpha * rng.uniform(1.0, 1.3, size=cap),
                                           mu * rng.uniform(0.7, 1.0, size=cap), cap)
            if not (check_h1(build_sequences(left)).ok and check_h1(build_sequences(right)).ok):
                continue
        pairs.append((left, right))
    return pairs


# -- proportion sweep -----------------------------------------------------

@dataclass
class SweepTable:
    """Asymptotic proportions ``S†_n / S*_0`` on an ``(S*_0, n)`` grid.

    Every block is padded with zeros up to the deepest ladder in the sweep.
    """

    rows: list[tuple[float, int, float]]
    n_stars: dict[float, int | str]

    def block(self, s0_star: float) -> list[float]:
        return [f for s, _, f in self.rows if s == s0_star]

    def n_star_column(self) -> list[int | str]:
        return list(self.n_stars.values())


def sweep_s0(s0_values: Sequence[float], template: OpinionParams,
             cap: int = 1000, tol: float = DEFAULT_TOL) -> SweepTable:
    if any(not v > 0 for v in s0_values):
        raise ValueError("s0 values must be positive")
    if any(b < a for a, b in zip(s0_values, s0_values[1:])):
        raise ValueError("s0 values must be sorted ascending")
    ladders = []
    for s0 in s0_values:
        p = ModelParams.constant(s0, template.d, template.alpha, template.mu, cap)
        ladders.append(build_sequences(p, tol))
    height = max(seq.depth for seq in ladders) + 1
    rows = []
    for s0, seq in zip(s0_values, ladders):
        for n in range(height):
            frac = seq.daggers[n] / s0 if n < len(seq.daggers) else 0.0
            rows.append((float(s0), n, frac))
    return SweepTable(rows, {float(s0): seq.n_star for s0, seq in zip(s0_values, ladders)})
