"""Reading fronts, speeds and plateaus off simulated fields."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import FieldState, FrontTrace, Grid1D, ModelParams


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class SpeedEstimate:
    opinion: int
    speed: float
    stderr: float
    window: tuple[float, float]


@dataclass(frozen=True)
class PlateauReading:
    opinion: int
    region: tuple[float, float]
    mean: float
    spread: float


def front_position(field: np.ndarray, grid: Grid1D, level: float) -> float | None:
    """Rightmost point where ``field`` drops through ``level``.

    Linear interpolation between the last node at or above ``level`` and its
    right neighbour. None if the field never reaches ``level``.
    """
    if not level > 0:
        raise ValueError("level must be positive")
    above = np.flatnonzero(field >= level)
    if above.size == 0:
        return None
    j = above[-1]
    x = grid.x
    if j == grid.nx - 1:
        return float(x[-1])
    f0, f1 = field[j], field[j + 1]
    return float(x[j] + (f0 - level) / (f0 - f1) * grid.dx)


def track_fronts(snapshots: Sequence[FieldState], grid: Grid1D, opinion: int,
                 level: float) -> FrontTrace:
    """Front of the accumulator ``r_n`` in every snapshot where it is visible."""
    samples = []
    for snap in snapshots:
        pos = front_position(snap.r[opinion - 1], grid, level)
        if pos is not None:
            samples.append((snap.t, pos))
    if len(samples) < 2:
        raise InsufficientData(
            f"opinion {opinion}: {len(samples)} snapshot(s) with a crossing at level {level}")
    samples.sort()
    return FrontTrace(opinion, tuple(samples), level)


def estimate_speed(trace: FrontTrace, window_fraction: float = 0.5) -> SpeedEstimate:
    """Least-squares slope of ``x(t)`` over the trailing part of the trace."""
    t = trace.times
    x = trace.positions
    n = max(int(math.ceil(window_fraction * len(t))), 0)
    t, x = t[-n:], x[-n:]
    if n < 5:
        raise InsufficientData(f"need >= 5 samples in the window, got {n}")
    tc = t - t.mean()
    sxx = float(tc @ tc)
    if sxx == 0:
        raise InsufficientData("all samples in the window share one time")
    slope = float(tc @ (x - x.mean())) / sxx
    resid = x - x.mean() - slope * tc
    stderr = math.sqrt(float(resid @ resid) / (n - 2) / sxx)
    return SpeedEstimate(trace.opinion, slope, stderr, (float(t[0]), float(t[-1])))


def plateau_value(snapshot: FieldState, grid: Grid1D, opinion: int,
                  region: tuple[float, float]) -> PlateauReading:
    """Mean and max-min spread of ``S_n`` over ``region`` (``n = 0`` allowed)."""
    lo, hi = region
    if not lo < hi:
        raise ValueError(f"empty region ({lo}, {hi})")
    x = grid.x
    mask = (x >= lo) & (x <= hi)
    if not mask.any():
        raise ValueError(f"no grid node in ({lo}, {hi})")
    vals = snapshot.quiet(opinion)[mask]
    return PlateauReading(opinion, (float(lo), float(hi)), float(vals.mean()),
                          float(vals.max() - vals.min()))


def intermediate_region(c_n: float, c_next: float, t: float,
                        inset: float = 0.15) -> tuple[float, float]:
    """Positive-side band between the fronts moving at ``c_next < c_n``."""
    return between_fronts(c_next * t, c_n * t, inset)


def between_fronts(x_back: float, x_front: float, inset: float = 0.15) -> tuple[float, float]:
    """Band between two front positions, trimmed by ``inset`` of the gap at each end."""
    gap = x_front - x_back
    return (x_back + inset * gap, x_front - inset * gap)


def vanishing_check(snapshots: Sequence[FieldState], grid: Grid1D, opinion: int,
                    delta: float) -> float:
    """Largest value of ``S_n`` over ``|x| > delta`` across all snapshots."""
    mask = np.abs(grid.x) > delta
    if not mask.any():
        return 0.0
    return max(float(snap.quiet(opinion)[mask].max()) for snap in snapshots)


# -- pointwise identities used by the solver's invariant log --------------

def trapezoid_mass(state: FieldState, grid: Grid1D) -> float:
    total = state.s0 + state.i.sum(axis=0) + state.s.sum(axis=0)
    return float(np.trapezoid(total, dx=grid.dx))


def s0_identity_residual(state: FieldState, p: ModelParams) -> float:
    """``max |S_0 - S*_0 exp(-lam_1 R_1)|`` over the grid."""
    lam1 = p.opinions[0].lam
    return float(np.abs(state.s0 - p.s0_star * np.exp(-lam1 * state.r[0])).max())


def sandwich_violation(state: FieldState, p: ModelParams, tol: float = 0.0) -> float:
    """Largest excursion of ``S_n`` outside ``[R_n exp(-lam_{n+1} R_{n+1}), R_n]``.

    The top simulated level has no successor, so its band collapses to
    ``R_n``. Returns 0 when every node is inside the band widened by ``tol``.
    """
    worst = 0.0
    n_sim = state.n_sim
    for k in range(n_sim):
        s, r = state.s[k], state.r[k]
        if k + 1 < n_sim:
            lower = r * np.exp(-p.opinions[k + 1].lam * state.r[k + 1])
        else:
            lower = r
        worst = max(worst, float((s - r - tol).max()), float((lower - tol - s).max()))
    return max(worst, 0.0)
