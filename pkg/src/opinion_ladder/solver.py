"""Method-of-lines integration of the truncated opinion hierarchy on a 1-D grid."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .frontlab import s0_identity_residual, sandwich_violation, trapezoid_mass
from .model import FieldState, Grid1D, ModelParams, check_h1, validate_params
from .sequences import build_sequences


class ConfigurationError(ValueError):
    pass


class CFLViolation(ValueError):
    pass


@dataclass(frozen=True)
class BumpSpec:
    """Compactly supported parabolic bump ``height * max(0, 1 - ((x-c)/w)^2)``."""

    center: float = 0.0
    half_width: float = 2.0
    height: float = 0.02

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.height * np.maximum(0.0, 1.0 - ((x - self.center) / self.half_width) ** 2)

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.half_width, self.center + self.half_width


@dataclass(frozen=True)
class SolverConfig:
    grid: Grid1D
    t_end: float
    n_sim: int
    bumps: tuple[BumpSpec, ...]
    cfl_safety: float = 0.4
    snapshot_times: tuple[float, ...] = ()
    scheme: str = "euler"

    def __post_init__(self):
        object.__setattr__(self, "bumps", tuple(self.bumps))
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))

    @classmethod
    def default_bumps(cls, p: ModelParams, n_sim: int) -> tuple[BumpSpec, ...]:
        return (BumpSpec(0.0, 2.0, 0.01 * p.s0_star),) * n_sim

    def validate(self) -> None:
        if self.n_sim < 1:
            raise ConfigurationError("n_sim must be >= 1")
        if len(self.bumps) < self.n_sim:
            raise ConfigurationError(
                f"initial bump missing for opinion {len(self.bumps) + 1} (n_sim={self.n_sim})")
        if not 0 < self.cfl_safety <= 1:
            raise ConfigurationError("cfl_safety must lie in (0, 1]")
        if self.t_end < 0:
            raise ConfigurationError("t_end must be >= 0")
        if self.scheme not in ("euler", "heun"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        times = self.snapshot_times
        if any(b < a for a, b in zip(times, times[1:])):
            raise ConfigurationError("snapshot_times must be sorted")
        if times and (times[0] < 0 or times[-1] > self.t_end):
            raise ConfigurationError("snapshot_times must lie in [0, t_end]")
        L = self.grid.half_length
        for n, b in enumerate(self.bumps[:self.n_sim], start=1):
            if not (b.height > 0 and b.half_width > 0):
                raise ConfigurationError(f"bump {n} must have positive height and half_width")
            lo, hi = b.support
            if lo <= -L or hi >= L:
                raise ConfigurationError(f"bump {n} support [{lo}, {hi}] leaves the domain")


@dataclass
class InvariantLog:
    """One record per snapshot; ``total_clamped`` sums over every step."""

    records: list[dict] = field(default_factory=list)
    total_clamped: float = 0.0
    initial_mass: float = 0.0

    def column(self, name: str) -> np.ndarray:
        return np.array([rec[name] for rec in self.records])


@dataclass
class RunResult:
    snapshots: list[FieldState]
    log: InvariantLog
    grid: Grid1D
    dt: float


def cfl_dt(grid: Grid1D, p: ModelParams, safety: float = 0.4,
           n_sim: int | None = None) -> float:
    """Explicit time step bounded by diffusion and by the reaction rates."""
    if not 0 < safety <= 1:
        raise ValueError("safety must lie in (0, 1]")
    ops = p.opinions[:n_sim] if n_sim else p.opinions
    d_max = max(op.d for op in ops)
    rate = max(max(op.alpha for op in ops) * p.s0_star, max(op.mu for op in ops))
    bound = grid.dx ** 2 / (2 * d_max)
    if rate > 0:
        bound = min(bound, 0.1 / rate)
    return safety * bound


def initial_state(cfg: SolverConfig, p: ModelParams) -> FieldState:
    cfg.validate()
    x = cfg.grid.x
    nx = cfg.grid.nx
    i = np.stack([b(x) for b in cfg.bumps[:cfg.n_sim]])
    return FieldState(0.0, np.full(nx, float(p.s0_star)), i,
                      np.zeros((cfg.n_sim, nx)), np.zeros((cfg.n_sim, nx)))


def laplacian(u: np.ndarray, dx: float) -> np.ndarray:
    """Second difference along the last axis with mirror (zero-flux) ends."""
    out = np.empty_like(u)
    out[..., 1:-1] = u[..., 2:] - 2 * u[..., 1:-1] + u[..., :-2]
    out[..., 0] = 2 * (u[..., 1] - u[..., 0])
    out[..., -1] = 2 * (u[..., -2] - u[..., -1])
    out /= dx * dx
    return out


class _Rates:
    """Per-opinion coefficient columns for vectorized updates."""

    def __init__(self, p: ModelParams, n_sim: int):
        ops = p.opinions[:n_sim]
        self.d = np.array([op.d for op in ops])[:, None]
        self.alpha = np.array([op.alpha for op in ops])[:, None]
        self.mu = np.array([op.mu for op in ops])[:, None]
        # outflow from S_n uses alpha_{n+1}; nothing consumes S_{n_sim}
        self.alpha_next = np.zeros_like(self.alpha)
        self.alpha_next[:-1] = self.alpha[1:]

    def derivatives(self, s0, i, s, dx):
        donors = np.vstack([s0[None, :], s[:-1]])
        infect = self.alpha * donors * i
        quiet = self.mu * i
        di = self.d * laplacian(i, dx) + infect - quiet
        ds = quiet - self.alpha_next * s * np.vstack([i[1:], np.zeros_like(s0)[None, :]])
        ds0 = -infect[0]
        return ds0, di, ds, quiet


def _clamp(*arrays: np.ndarray) -> float:
    total = 0.0
    for a in arrays:
        neg = a < 0
        if neg.any():
            total += float(-a[neg].sum())
            a[neg] = 0.0
    return total


def step(state: FieldState, grid: Grid1D, p: ModelParams, dt: float,
         scheme: str = "euler", _rates: _Rates | None = None) -> FieldState:
    """Advance one explicit step; refuses steps beyond the stability bound."""
    if dt > cfl_dt(grid, p, 1.0, state.n_sim) * (1 + 1e-12):
        raise CFLViolation(f"dt={dt!r} exceeds the stability bound")
    rates = _rates or _Rates(p, state.n_sim)
    dx = grid.dx
    ds0, di, ds, dr = rates.derivatives(state.s0, state.i, state.s, dx)
    if scheme == "euler":
        s0 = state.s0 + dt * ds0
        i = state.i + dt * di
        s = state.s + dt * ds
        r = state.r + dt * dr
    elif scheme == "heun":
        s0p = state.s0 + dt * ds0
        ip = state.i + dt * di
        sp = state.s + dt * ds
        ds0b, dib, dsb, drb = rates.derivatives(s0p, ip, sp, dx)
        s0 = state.s0 + 0.5 * dt * (ds0 + ds0b)
        i = state.i + 0.5 * dt * (di + dib)
        s = state.s + 0.5 * dt * (ds + dsb)
        r = state.r + 0.5 * dt * (dr + drb)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    clamped = _clamp(s0, i, s, r)
    return FieldState(state.t + dt, s0, i, s, r, clamped)


def _record(state: FieldState, grid: Grid1D, p: ModelParams, log: InvariantLog,
            max_clamp: float, dt: float) -> None:
    mass = trapezoid_mass(state, grid)
    tol_disc = 10 * (dt + grid.dx ** 2) * max(p.s0_star, 1e-300)
    log.records.append(dict(
        t=state.t,
        mass=mass,
        mass_drift=abs(mass - log.initial_mass) / log.initial_mass,
        max_clamp=max_clamp,
        s0_identity_residual=s0_identity_residual(state, p),
        sandwich_violation=sandwich_violation(state, p, tol_disc),
    ))


def run(cfg: SolverConfig, p: ModelParams, force: bool = False,
        standoff: float = 10.0) -> RunResult:
    """Integrate to ``cfg.t_end`` and collect snapshots plus invariant records.

    Snapshots are taken at the first completed step at or after each
    requested time (``t = 0`` is the initial state). Refuses to run when
    the fastest front would come within ``standoff`` of the boundary, or
    when the ladder speeds are not strictly decreasing, unless ``force`` is set.
    """
    report = validate_params(p)
    if not report.ok:
        raise ConfigurationError("invalid parameters: " + "; ".join(report.violations))
    if cfg.n_sim > p.cap:
        raise ConfigurationError(f"n_sim={cfg.n_sim} exceeds cap={p.cap}")
    state = initial_state(cfg, p)
    grid = cfg.grid

    seq = build_sequences(p)
    if not check_h1(seq).ok:
        msg = "propagation speeds are not strictly decreasing"
        if not force:
            raise ConfigurationError(msg + "; pass force=True to run anyway")
        warnings.warn(msg)
    if seq.speeds:
        reach = seq.speeds[0] * cfg.t_end + max(abs(b.center) + b.half_width
                                                for b in cfg.bumps[:cfg.n_sim])
        if reach + standoff > grid.half_length and not force:
            raise ConfigurationError(
                f"front reaches |x| ~ {reach:.3g}; domain half-length {grid.half_length} "
                f"leaves less than {standoff} of standoff")

    dt = cfl_dt(grid, p, cfg.cfl_safety, cfg.n_sim)
    rates = _Rates(p, cfg.n_sim)
    log = InvariantLog(initial_mass=trapezoid_mass(state, grid))
    targets = list(cfg.snapshot_times) or [0.0, cfg.t_end]
    snapshots = []
    max_clamp = 0.0
    k = 0
    while k < len(targets) and targets[k] <= state.t:
        snapshots.append(state)
        _record(state, grid, p, log, max_clamp, dt)
        k += 1
    n_steps = int(math.ceil(cfg.t_end / dt - 1e-9)) if cfg.t_end > 0 else 0
    for _ in range(n_steps):
        h = min(dt, cfg.t_end - state.t)
        if h <= 0:
            break
        state = step(state, grid, p, h, cfg.scheme, rates)
        max_clamp = max(max_clamp, state.clamped)
        log.total_clamped += state.clamped
        while k < len(targets) and targets[k] <= state.t + 1e-9 * dt:
            snapshots.append(state)
            _record(state, grid, p, log, max_clamp, dt)
            k += 1
    while k < len(targets):
        snapshots.append(state)
        _record(state, grid, p, log, max_clamp, dt)
        k += 1
    return RunResult(snapshots, log, grid, dt)


def reference_config(p: ModelParams, n_sim: int = 4, half_length: float = 150.0,
                     dx: float = 0.1, t_end: float = 60.0,
                     snapshot_every: float = 1.0,
                     cfl_safety: float = 0.4) -> SolverConfig:
    """Desk-scale setup used throughout the demos and tests."""
    grid = Grid1D.from_spacing(half_length, dx)
    n_snap = int(round(t_end / snapshot_every))
    times = tuple(snapshot_every * k for k in range(n_snap + 1))
    return SolverConfig(grid, t_end, n_sim, SolverConfig.default_bumps(p, n_sim),
                        cfl_safety, times)
