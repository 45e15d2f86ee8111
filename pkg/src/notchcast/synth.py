"""Synthetic rating-event generator with known lag and dip structure.

A latent US credit driver follows an AR(1) with additive downward impulses
on a configurable dip schedule. Every US entity tracks the driver from a
random base grade; international entities track the same driver delayed by
``lag_months``. Events are emitted when an entity's rounded notch changes,
so the emitted CSV exercises the exact ingestion path of the real pipeline
while the true lag and dip months are known by construction.

Everything is a pure function of the config: one splitmix64 stream, with a
documented draw order (driver innovations; then per US entity base grade +
monthly noise; then the same for international entities; emission-filter
uniforms are only drawn when event_emission_prob < 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig
from .grades import notch_to_grade
from .panel import Month, RatingEvent
from .prng import Prng

#: First month of generated histories.
START_MONTH = Month(2010, 11)

#: Default dip schedule: the major US market shocks of 2010-2020.
DEFAULT_DIP_SCHEDULE: tuple[tuple[Month, float], ...] = (
    (Month(2011, 8), 1.0),
    (Month(2013, 8), 1.0),
    (Month(2013, 10), 1.0),
    (Month(2015, 8), 1.0),
    (Month(2018, 1), 1.0),
    (Month(2020, 3), 1.0),
)

_AR_COEFF = 0.8
_AR_INNOVATION_STD = 0.3
_BASE_NOTCH_LOW = 8
_BASE_NOTCH_HIGH = 21  # inclusive


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 5
    months: int = 122
    entities_per_region: int = 50
    lag_months: int = 3
    noise_std: float = 0.1
    dip_schedule: tuple[tuple[Month, float], ...] = DEFAULT_DIP_SCHEDULE
    event_emission_prob: float = 1.0

    def __post_init__(self):
        if self.months < 4:
            raise InvalidConfig(f"months must be >= 4, got {self.months}")
        if self.entities_per_region < 1:
            raise InvalidConfig("entities_per_region must be >= 1")
        if not 0 <= self.lag_months < self.months / 4:
            raise InvalidConfig(
                f"lag_months must satisfy 0 <= L < months/4, got {self.lag_months}"
            )
        if self.noise_std < 0:
            raise InvalidConfig("noise_std must be >= 0")
        if not 0.0 <= self.event_emission_prob <= 1.0:
            raise InvalidConfig("event_emission_prob must be in [0, 1]")
        for month, depth in self.dip_schedule:
            if depth <= 0:
                raise InvalidConfig(f"dip depth must be > 0, got {depth} at {month}")


@dataclass(frozen=True)
class GroundTruth:
    """What the generator knows; written beside the data, never read back."""

    true_lag: int
    dips: tuple[tuple[Month, float], ...]
    driver: np.ndarray

    def __post_init__(self):
        self.driver.setflags(write=False)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"true_lag={int(self.true_lag)}\n")
            for month, depth in self.dips:
                fh.write(f"dip={month},{float(depth)!r}\n")


def _round_half_up(x: float) -> int:
    """floor(x + 0.5): locale- and language-independent rounding."""
    return math.floor(x + 0.5)


def generate_panel(cfg: SynthConfig) -> tuple[list[RatingEvent], GroundTruth]:
    """Emit rating events for both regions plus the generator's ground truth."""
    rng = Prng(cfg.seed)
    months = [START_MONTH.plus(t) for t in range(cfg.months)]

    impulse = np.zeros(cfg.months)
    active_dips = []
    for month, depth in cfg.dip_schedule:
        offset = month.index() - START_MONTH.index()
        if 0 <= offset < cfg.months:
            impulse[offset] -= depth
            active_dips.append((month, depth))

    driver = np.empty(cfg.months)
    level = 0.0
    for t in range(cfg.months):
        level = _AR_COEFF * level + _AR_INNOVATION_STD * rng.gaussian() + impulse[t]
        driver[t] = level

    events: list[RatingEvent] = []
    for region, lag in (("US", 0), ("INTL", cfg.lag_months)):
        for entity_idx in range(cfg.entities_per_region):
            entity_id = f"{region}-{entity_idx:04d}"
            base = _BASE_NOTCH_LOW + int(
                rng.uniform() * (_BASE_NOTCH_HIGH - _BASE_NOTCH_LOW + 1)
            )
            noise = [cfg.noise_std * rng.gaussian() for _ in range(cfg.months)]
            previous = None
            for t in range(cfg.months):
                shifted = driver[t - lag] if t >= lag else 0.0
                path = base + _round_half_up(shifted) + noise[t]
                notch = _round_half_up(min(max(path, 0.0), 21.0))
                notch = min(max(notch, 0), 21)
                changed = previous is None or notch != previous
                if changed and previous is not None and cfg.event_emission_prob < 1.0:
                    if rng.uniform() >= cfg.event_emission_prob:
                        continue  # change goes unrecorded; level still moved
                if changed:
                    events.append(RatingEvent(
                        entity_id, region, months[t].first_day(), notch_to_grade(notch)
                    ))
                    previous = notch

    return events, GroundTruth(cfg.lag_months, tuple(active_dips), driver)
