"""Flat key=value run configuration shared by all CLI subcommands.

A config file is plain text: one ``key=value`` per line, ``#`` comments and
blank lines ignored. Unknown keys are hard errors (catches typos instead of
silently running with defaults). CLI flags override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .errors import ConfigError, DataError, InvalidConfig
from .panel import Month
from .synth import DEFAULT_DIP_SCHEDULE, SynthConfig
from .training import TrainConfig


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_dip_schedule(text: str) -> tuple[tuple[Month, float], ...]:
    """Parse 'YYYY-MM:depth,YYYY-MM:depth,...'; empty string means no dips."""
    text = text.strip()
    if not text:
        return ()
    schedule = []
    for part in text.split(","):
        try:
            month_s, depth_s = part.strip().split(":")
            schedule.append((Month.parse(month_s), float(depth_s)))
        except (ValueError, ConfigError, DataError) as exc:
            raise ConfigError(
                f"bad dip schedule entry {part.strip()!r}, expected YYYY-MM:depth"
            ) from exc
    return tuple(schedule)


def format_dip_schedule(schedule: tuple[tuple[Month, float], ...]) -> str:
    return ",".join(f"{month}:{depth:g}" for month, depth in schedule)


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of the pipeline, with the documented defaults."""

    # generation
    seed: int = 5
    months: int = 122
    entities_per_region: int = 50
    lag_months: int = 3
    noise_std: float = 0.1
    event_emission_prob: float = 1.0
    dip_schedule: tuple[tuple[Month, float], ...] = DEFAULT_DIP_SCHEDULE
    # preprocessing
    lookback: int = 12
    train_fraction: float = 0.8
    winsor_k: float = 4.0
    # model / optimizer
    hidden_size: int = 32
    epochs: int = 200
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    grad_clip_norm: float = 5.0
    # lead-lag analysis
    max_lag: int = 12
    dip_window: int = 6
    dip_threshold: float = 0.25
    match_tolerance: int = 6
    # ingestion / output switches
    allow_early_dates: bool = False
    dump_dataset: bool = False

    def synth_config(self) -> SynthConfig:
        return SynthConfig(
            seed=self.seed,
            months=self.months,
            entities_per_region=self.entities_per_region,
            lag_months=self.lag_months,
            noise_std=self.noise_std,
            dip_schedule=self.dip_schedule,
            event_emission_prob=self.event_emission_prob,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            hidden_size=self.hidden_size,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            grad_clip_norm=self.grad_clip_norm,
            seed=self.seed,
        )


_PARSERS = {
    "seed": int,
    "months": int,
    "entities_per_region": int,
    "lag_months": int,
    "noise_std": float,
    "event_emission_prob": float,
    "dip_schedule": parse_dip_schedule,
    "lookback": int,
    "train_fraction": float,
    "winsor_k": float,
    "hidden_size": int,
    "epochs": int,
    "learning_rate": float,
    "beta1": float,
    "beta2": float,
    "epsilon": float,
    "grad_clip_norm": float,
    "max_lag": int,
    "dip_window": int,
    "dip_threshold": float,
    "match_tolerance": int,
    "allow_early_dates": _parse_bool,
    "dump_dataset": _parse_bool,
}

assert set(_PARSERS) == {f.name for f in fields(RunConfig)}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse key=value lines into a {field: parsed value} dict."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _PARSERS[key](value.strip())
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(
                f"{source}:{lineno}: bad value for {key}: {value.strip()!r}"
            ) from exc
    return values


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the config file, then CLI overrides; validate once."""
    values: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        values.update(parse_config_text(text, source=str(path)))
    if overrides:
        for key in overrides:
            if key not in _PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
        values.update(overrides)
    cfg = RunConfig(**values)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    """Cross-field checks; the sub-configs re-check their own fields."""
    cfg.synth_config()
    cfg.train_config()
    if cfg.lookback < 1:
        raise InvalidConfig("lookback must be >= 1")
    if not 0.0 < cfg.train_fraction < 1.0:
        raise InvalidConfig("train_fraction must be in (0, 1)")
    if cfg.winsor_k <= 0:
        raise InvalidConfig("winsor_k must be > 0")
    if cfg.max_lag < 1:
        raise InvalidConfig("max_lag must be >= 1")
    if cfg.dip_window < 2:
        raise InvalidConfig("dip_window must be >= 2")
    if cfg.dip_threshold <= 0:
        raise InvalidConfig("dip_threshold must be > 0")
    if cfg.match_tolerance < 0:
        raise InvalidConfig("match_tolerance must be >= 0")


def write_config(cfg: RunConfig, path) -> None:
    """Write a config file that round-trips through load_config."""
    lines = []
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        if f.name == "dip_schedule":
            rendered = format_dip_schedule(value)
        elif isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{f.name}={rendered}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def with_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    out = replace(cfg, **overrides)
    validate_config(out)
    return out
