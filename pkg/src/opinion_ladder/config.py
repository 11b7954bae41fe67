"""Flat ``key = value`` run configuration.

Lines starting with ``#`` are comments; list values are comma separated.
See ``docs/config.md`` for the recognised keys.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .model import Grid1D, ModelParams, OpinionParams
from .solver import BumpSpec, ConfigurationError, SolverConfig

_SECTION = "run"

MODEL_DEFAULTS = dict(cap="100", d="1", alpha="1", mu="1", alpha_growth="1")
SOLVER_DEFAULTS = dict(half_length="150", dx="0.1", t_end="60", cfl_safety="0.4",
                       snapshot_every="1", scheme="euler", standoff="10")
ANALYSIS_DEFAULTS = dict(window_fraction="0.5", level_fraction="0.5", plateau_inset="0.15",
                         vanish_delta="30", dagger_delta="5", check_pairs="100")


@dataclass
class AnalysisSettings:
    window_fraction: float = 0.5
    level_fraction: float = 0.5
    plateau_inset: float = 0.15
    vanish_delta: float = 30.0
    dagger_delta: float = 5.0
    check_pairs: int = 100


@dataclass
class RunConfig:
    model: ModelParams
    raw: dict[str, str] = field(default_factory=dict)
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)
    output_dir: Path = Path("out")

    def _get(self, key: str, defaults: dict[str, str]) -> str:
        return self.raw.get(key, defaults.get(key, ""))

    def solver(self, n_star_plus_one: int) -> SolverConfig:
        """Build the solver configuration; ``n_sim`` defaults to ``N* + 1``."""
        g = lambda k: self._get(k, SOLVER_DEFAULTS)
        half_length = float(g("half_length"))
        grid = (Grid1D(half_length, int(self.raw["nx"])) if "nx" in self.raw
                else Grid1D.from_spacing(half_length, float(g("dx"))))
        t_end = float(g("t_end"))
        n_sim = int(self.raw.get("n_sim", min(n_star_plus_one, self.model.cap)))
        if "snapshot_times" in self.raw:
            times = tuple(_floats(self.raw["snapshot_times"]))
        else:
            every = float(g("snapshot_every"))
            count = int(round(t_end / every)) if t_end > 0 else 0
            times = tuple(min(every * k, t_end) for k in range(count + 1))
        bumps = self._bumps(n_sim)
        return SolverConfig(grid, t_end, n_sim, bumps, float(g("cfl_safety")),
                            times, g("scheme"))

    @property
    def standoff(self) -> float:
        return float(self._get("standoff", SOLVER_DEFAULTS))

    def _bumps(self, n_sim: int) -> tuple[BumpSpec, ...]:
        fields = dict(center="0", half_width="2", height=repr(0.01 * self.model.s0_star))
        cols = {}
        for key, default in fields.items():
            vals = _floats(self.raw.get(f"bump_{key}", default))
            if len(vals) == 1:
                vals = vals * n_sim
            elif len(vals) < n_sim:
                raise ConfigurationError(
                    f"bump_{key} lists {len(vals)} value(s) but n_sim={n_sim}: "
                    f"initial bump missing for opinion {len(vals) + 1}")
            cols[key] = vals[:n_sim]
        return tuple(BumpSpec(c, w, h) for c, w, h in
                     zip(cols["center"], cols["half_width"], cols["height"]))

    def sweep_values(self) -> list[float]:
        if "sweep_s0" in self.raw:
            return _floats(self.raw["sweep_s0"])
        lo = float(self.raw.get("sweep_s0_min", "0.5"))
        hi = float(self.raw.get("sweep_s0_max", "8"))
        step = float(self.raw.get("sweep_s0_step", "0.05"))
        count = int(round((hi - lo) / step))
        return [round(lo + k * step, 12) for k in range(count + 1)]

    def template(self) -> OpinionParams:
        if not self.model.is_constant:
            raise ConfigurationError("sweep needs constant per-opinion parameters")
        return self.model.opinions[0]


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def parse_config(text: str, output_dir: str | Path = "out") -> RunConfig:
    parser = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                       delimiters=("=",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from exc
    raw = dict(parser[_SECTION])
    if "s0_star" not in raw:
        raise ConfigurationError("config must set s0_star")
    try:
        model = _model(raw)
        analysis = AnalysisSettings(
            **{k: type(getattr(AnalysisSettings, k))(raw.get(k, v))
               for k, v in ANALYSIS_DEFAULTS.items()})
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    return RunConfig(model, raw, analysis, Path(output_dir))


def load_config(path: str | Path, output_dir: str | Path = "out") -> RunConfig:
    return parse_config(Path(path).read_text(), output_dir)


def _model(raw: dict[str, str]) -> ModelParams:
    g = lambda k: raw.get(k, MODEL_DEFAULTS[k])
    cap = int(g("cap"))
    d, alpha, mu = (_floats(g(k)) for k in ("d", "alpha", "mu"))
    growth = float(g("alpha_growth"))
    if len(alpha) == 1 and growth != 1:
        alpha = [alpha[0] * growth ** k for k in range(cap)]
    cols = [v[0] if len(v) == 1 else v for v in (d, alpha, mu)]
    return ModelParams.from_lists(float(raw["s0_star"]), *cols, cap=cap)
