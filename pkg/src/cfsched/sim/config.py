"""Experiment configuration: defaults, flat ``key=value`` files and overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError

__all__ = ["EXPERIMENTS", "ExperimentConfig", "parse_grid", "parse_config_text", "load_config", "make_config"]

EXPERIMENTS = ("fig2", "fig4", "fig5", "fig6", "fig7", "fig8", "outage")

# per-experiment defaults; scalar probabilities get 1e4 trials, sessions a few hundred
_DEFAULTS = {
    "fig2": dict(L_grid=list(range(4, 41)), P_grid=[10.0], trials=10_000),
    "fig4": dict(L_grid=[5, 10, 20, 50], P_grid=[1.0, 10.0, 100.0], trials=2000),
    "fig5": dict(L_grid=[10, 20, 50, 100], M_grid=[2], P_grid=[10.0], trials=200),
    "fig6": dict(L_grid=[10, 20, 50, 100], M_grid=[2], P_grid=[10.0], trials=200, k_override=3),
    "fig7": dict(L_grid=[20, 50, 100, 200], P_grid=[1000.0], trials=200),
    "fig8": dict(L_grid=[150], M_grid=[1, 2, 3, 4], P_grid=[10.0], trials=100),
    "outage": dict(L_grid=[50, 100, 200], P_grid=[1.0], trials=500),
}

_MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment run.

    ``trials = 0`` is accepted and yields a header-only table.  ``rate`` is
    the target rate for sessions and outage (``None`` picks the per-L
    default of the outage study).  ``exhaustive_trials`` bounds how many
    sessions also get the exhaustive subset search (only for L <= 20).
    """

    experiment: str
    L_grid: list[int]
    P_grid: list[float]
    M_grid: list[int] = field(default_factory=lambda: [1])
    k_override: int | None = None
    trials: int = 200
    seed: int = 0
    out_path: str | None = None
    workers: int = 1
    rate: float | None = None
    exhaustive_trials: int = 0
    phase_window: int = 5
    phase_gain: float = 0.5
    slot_cap: int = 50
    n_max: int | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if not self.L_grid or not self.P_grid or not self.M_grid:
            raise ConfigError("L, P and M grids must be non-empty")
        if any(L < 1 for L in self.L_grid):
            raise ConfigError("every L must be a positive integer")
        if any(not (math.isfinite(P) and P > 0) for P in self.P_grid):
            raise ConfigError("every power must be positive and finite")
        if any(M < 1 for M in self.M_grid):
            raise ConfigError("relay count must be at least 1")
        if self.trials < 0:
            raise ConfigError("trials must be nonnegative")
        if not 0 <= self.seed <= _MAX_SEED:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.k_override is not None and self.k_override < 1:
            raise ConfigError("k must be at least 1")
        if self.rate is not None and not self.rate >= 0:
            raise ConfigError("rate must be nonnegative")
        if self.phase_window < 1 or not self.phase_gain > 0:
            raise ConfigError("phase_window must be >= 1 and phase_gain > 0")
        if self.slot_cap < 1 or self.exhaustive_trials < 0:
            raise ConfigError("slot_cap must be >= 1 and exhaustive_trials >= 0")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigError("n_max must be at least 1")

    @property
    def M(self) -> int:
        return self.M_grid[0]


def parse_grid(text: str, kind=int) -> list:
    """``"4,8,16"`` or inclusive ranges ``"4:40"`` / ``"10:100:10"``, mixed freely."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ":" in part:
                bits = [int(b) for b in part.split(":")]
                if len(bits) not in (2, 3) or (len(bits) == 3 and bits[2] <= 0):
                    raise ValueError
                step = bits[2] if len(bits) == 3 else 1
                out.extend(kind(v) for v in range(bits[0], bits[1] + 1, step))
            else:
                v = float(part) if kind is float else int(part)
                out.append(v)
        except ValueError:
            raise ConfigError(f"cannot parse grid entry {part!r}") from None
    if not out:
        raise ConfigError(f"empty grid {text!r}")
    return out


_ALIASES = {
    "l": "L_grid", "users": "L_grid", "l_grid": "L_grid",
    "m": "M_grid", "relays": "M_grid", "m_grid": "M_grid",
    "p": "P_grid", "power": "P_grid", "p_grid": "P_grid",
    "k": "k_override", "k_override": "k_override",
    "out": "out_path", "out_path": "out_path",
}


def _convert(key: str, value: str):
    try:
        if key == "L_grid" or key == "M_grid":
            return parse_grid(value, int)
        if key == "P_grid":
            return parse_grid(value, float)
        if key in ("k_override", "n_max"):
            return None if value.lower() in ("", "none") else int(value)
        if key == "rate":
            return None if value.lower() in ("", "none") else float(value)
        if key in ("trials", "seed", "workers", "exhaustive_trials", "phase_window", "slot_cap"):
            return int(value)
        if key == "phase_gain":
            return float(value)
        return value
    except ValueError:
        raise ConfigError(f"bad value {value!r} for {key}") from None


_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        name = _ALIASES.get(key.lower(), key)
        if name not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[name] = _convert(name, value)
    return values


def load_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


def make_config(experiment: str | None = None, file_values: dict | None = None, **overrides) -> ExperimentConfig:
    """Merge defaults, file values and explicit overrides (later wins).

    Overrides equal to ``None`` are ignored so unset CLI flags fall through.
    """
    values = dict(file_values or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    if experiment is not None:
        values["experiment"] = experiment
    name = values.get("experiment")
    if name is None:
        raise ConfigError("no experiment given")
    if name not in _DEFAULTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    merged = {**_DEFAULTS[name], **values}
    unknown = set(merged) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown settings: {', '.join(sorted(unknown))}")
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
