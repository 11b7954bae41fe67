"""Parameter containers, validation and the decreasing-speed check.

Opinion indices are 1-based throughout (opinion ``n`` lives at
``opinions[n - 1]``); density index 0 is the basic opinion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

AT_LEAST_CAP = "at-least-cap"


@dataclass(frozen=True)
class OpinionParams:
    """Diffusivity, transmission rate and quieting rate of one opinion."""

    d: float
    alpha: float
    mu: float

    @property
    def lam(self) -> float:
        """Transmission-to-quieting ratio ``alpha / mu``."""
        return self.alpha / self.mu


@dataclass(frozen=True)
class ModelParams:
    s0_star: float
    opinions: tuple[OpinionParams, ...]
    cap: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "opinions", tuple(self.opinions))
        if self.cap is None:
            object.__setattr__(self, "cap", len(self.opinions))

    @classmethod
    def constant(cls, s0_star: float, d: float, alpha: float, mu: float,
                 cap: int) -> "ModelParams":
        """Same ``(d, alpha, mu)`` for every opinion ``1..cap``."""
        op = OpinionParams(d, alpha, mu)
        return cls(s0_star, (op,) * cap, cap)

    @classmethod
    def from_lists(cls, s0_star: float, d: Sequence[float] | float,
                   alpha: Sequence[float] | float,
                   mu: Sequence[float] | float,
                   cap: int | None = None) -> "ModelParams":
        """Build from per-opinion lists; scalars are broadcast to ``cap``."""
        lists = [d, alpha, mu]
        lengths = [len(v) for v in lists if not np.isscalar(v)]
        if cap is None:
            if not lengths:
                raise ValueError("cap is required when every parameter is scalar")
            cap = min(lengths)
        cols = []
        for v in lists:
            if np.isscalar(v):
                cols.append([float(v)] * cap)
            else:
                if len(v) < cap:
                    raise ValueError(f"parameter list of length {len(v)} is shorter than cap={cap}")
                cols.append([float(x) for x in v[:cap]])
        ops = tuple(OpinionParams(*t) for t in zip(*cols))
        return cls(float(s0_star), ops, cap)

    def opinion(self, n: int) -> OpinionParams:
        return self.opinions[n - 1]

    @property
    def is_constant(self) -> bool:
        return len(set(self.opinions[:self.cap])) == 1

    def replace(self, **changes) -> "ModelParams":
        kw = dict(s0_star=self.s0_star, opinions=self.opinions, cap=self.cap)
        kw.update(changes)
        return ModelParams(**kw)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class H1Report:
    ok: bool
    first_violation: int | None = None  # 1-based index k with c_k >= c_{k-1}


@dataclass(frozen=True)
class PropagationSequences:
    """The plateau / speed / residual ladder of one parameter set.

    When the ladder is cut by the cap, ``n_star`` is ``AT_LEAST_CAP`` and the
    last entry of ``daggers`` holds the mass that has not settled yet, so the
    daggers still telescope to ``plateaus[0]``.
    """

    plateaus: tuple[float, ...]
    speeds: tuple[float, ...]
    daggers: tuple[float, ...]
    repro: tuple[float, ...]
    n_star: int | str

    @property
    def truncated(self) -> bool:
        return self.n_star == AT_LEAST_CAP

    @property
    def depth(self) -> int:
        """Finite N*, or the certified lower bound when truncated."""
        return len(self.plateaus) - 1


@dataclass(frozen=True)
class Grid1D:
    half_length: float
    nx: int

    def __post_init__(self):
        if self.nx < 3:
            raise ValueError("nx must be >= 3")
        if not self.half_length > 0:
            raise ValueError("half_length must be positive")

    @classmethod
    def from_spacing(cls, half_length: float, dx: float) -> "Grid1D":
        nx = int(round(2 * half_length / dx)) + 1
        return cls(half_length, nx)

    @property
    def dx(self) -> float:
        return 2 * self.half_length / (self.nx - 1)

    @property
    def x(self) -> np.ndarray:
        return -self.half_length + self.dx * np.arange(self.nx)


@dataclass(frozen=True)
class FieldState:
    """Fields at time ``t``; ``i``, ``s`` and ``r`` have shape (n_sim, nx)."""

    t: float
    s0: np.ndarray
    i: np.ndarray
    s: np.ndarray
    r: np.ndarray
    clamped: float = field(default=0.0, compare=False)

    @property
    def n_sim(self) -> int:
        return self.i.shape[0]

    def quiet(self, n: int) -> np.ndarray:
        """Quiet density of opinion ``n`` (``n = 0`` is the basic opinion)."""
        return self.s0 if n == 0 else self.s[n - 1]


@dataclass(frozen=True)
class FrontTrace:
    opinion: int
    samples: tuple[tuple[float, float], ...]
    level: float

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def positions(self) -> np.ndarray:
        return np.array([x for _, x in self.samples])


def _positive(value) -> bool:
    return isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0


def validate_params(p: ModelParams) -> ValidationReport:
    """Collect every positivity problem in ``p`` without raising."""
    violations = []
    notes = []
    s0 = p.s0_star
    if not (isinstance(s0, (int, float, np.floating, np.integer)) and math.isfinite(s0) and s0 >= 0):
        violations.append("s0_star must be >= 0")
    elif s0 == 0:
        notes.append("N* will be 0")
    if not p.opinions:
        violations.append("at least one opinion is required")
    if not (isinstance(p.cap, (int, np.integer)) and p.cap >= 1):
        violations.append("cap must be a positive integer")
    elif len(p.opinions) < p.cap:
        violations.append(f"cap={p.cap} exceeds the {len(p.opinions)} opinions given")
    for n, op in enumerate(p.opinions, start=1):
        for name in ("d", "alpha", "mu"):
            if not _positive(getattr(op, name)):
                violations.append(f"{name}[{n}] must be > 0")
    return ValidationReport(tuple(violations), tuple(notes))


def check_h1(speeds: Sequence[float] | PropagationSequences) -> H1Report:
    """Check that the spreading speeds are strictly decreasing."""
    if isinstance(speeds, PropagationSequences):
        speeds = speeds.speeds
    for k in range(1, len(speeds)):
        if not speeds[k] < speeds[k - 1]:
            return H1Report(False, k + 1)
    return H1Report(True)
