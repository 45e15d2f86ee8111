"""From aligned region panels to a windowed, normalized supervised dataset.

Each sample pairs ``lookback`` consecutive normalized US change values with
the normalized international change of the month immediately after the
window (one-step-ahead). Winsorization and z-score statistics are fitted on
the training months only, so nothing in the test range can leak into them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSplit,
    InsufficientOverlap,
    LengthMismatch,
    SeriesTooShort,
    TooFewValues,
)
from .panel import Month, RegionPanel, TimeGrid

#: Lower bound applied to fitted standard deviations.
STD_FLOOR = 1e-8


@dataclass(frozen=True)
class NormalizationStats:
    mean: float
    std: float


@dataclass(frozen=True)
class WinsorizeResult:
    """Clamped series plus the reference stats, so re-application is exact."""

    values: np.ndarray
    stats: NormalizationStats
    k: float

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class WindowSample:
    """inputs = lookback US changes ending at t-1; target = INTL change at t.

    ``prev_target`` keeps the (normalized) INTL change at t-1 around for the
    persistence baseline.
    """

    inputs: np.ndarray
    target: float
    prev_target: float
    target_month: Month | None = None

    def __post_init__(self):
        self.inputs.setflags(write=False)


@dataclass(frozen=True)
class SupervisedDataset:
    samples: tuple[WindowSample, ...]
    us_stats: NormalizationStats
    intl_stats: NormalizationStats

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def lookback(self) -> int:
        return len(self.samples[0].inputs) if self.samples else 0

    def inputs(self) -> np.ndarray:
        return np.array([s.inputs for s in self.samples], dtype=np.float64)

    def targets(self) -> np.ndarray:
        return np.array([s.target for s in self.samples], dtype=np.float64)

    def prev_targets(self) -> np.ndarray:
        return np.array([s.prev_target for s in self.samples], dtype=np.float64)

    def target_months(self) -> tuple[Month | None, ...]:
        return tuple(s.target_month for s in self.samples)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0,1), got {self.train_fraction}")


def align_panels(us: RegionPanel, intl: RegionPanel,
                 min_months: int = 2) -> tuple[RegionPanel, RegionPanel]:
    """Truncate both panels to the intersection of their grids."""
    lo = max(us.grid.start, intl.grid.start, key=Month.index)
    hi = min(us.grid.end, intl.grid.end, key=Month.index)
    overlap = hi.index() - lo.index() + 1
    if overlap < min_months:
        raise InsufficientOverlap(
            f"panels overlap for {max(overlap, 0)} months, need {min_months}"
        )
    return _slice_panel(us, lo, hi), _slice_panel(intl, lo, hi)


def _slice_panel(panel: RegionPanel, lo: Month, hi: Month) -> RegionPanel:
    a = panel.grid.position(lo)
    b = panel.grid.position(hi) + 1
    if a == 0 and b == len(panel):
        return panel
    grid = TimeGrid(panel.grid.months[a:b])
    return RegionPanel.from_index(panel.region, grid, panel.index[a:b].copy(),
                                  panel.coverage[a:b].copy())


def fit_stats(values) -> NormalizationStats:
    """Mean and population standard deviation, std floored at 1e-8."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        raise TooFewValues(f"need at least 2 values to fit stats, got {arr.size}")
    return NormalizationStats(float(arr.mean()), max(float(arr.std()), STD_FLOOR))


def winsorize(values, k: float = 4.0,
              stats: NormalizationStats | None = None) -> WinsorizeResult:
    """Clamp values outside mean +/- k*std to the boundary.

    With ``stats`` omitted the bounds come from the input series itself;
    passing the stored stats back in makes re-application a no-op.
    """
    if k <= 0:
        raise ValueError(f"winsorization width k must be > 0, got {k}")
    arr = np.asarray(values, dtype=np.float64)
    if stats is None:
        stats = fit_stats(arr)
    clamped = np.clip(arr, stats.mean - k * stats.std, stats.mean + k * stats.std)
    return WinsorizeResult(clamped, stats, k)


def normalize(x, stats: NormalizationStats):
    return (np.asarray(x, dtype=np.float64) - stats.mean) / stats.std


def denormalize(z, stats: NormalizationStats):
    return np.asarray(z, dtype=np.float64) * stats.std + stats.mean


def make_windows(us_changes, intl_changes, lookback: int,
                 months: tuple[Month, ...] | None = None,
                 us_stats: NormalizationStats | None = None,
                 intl_stats: NormalizationStats | None = None) -> SupervisedDataset:
    """Slide a ``lookback``-wide window over aligned, normalized series.

    For each t in [lookback, T-1]: inputs = us[t-lookback .. t-1], target =
    intl[t]; sample count is T - lookback. ``months`` labels each sample
    with its target month when provided.
    """
    us = np.asarray(us_changes, dtype=np.float64)
    intl = np.asarray(intl_changes, dtype=np.float64)
    if us.shape != intl.shape:
        raise LengthMismatch(f"series lengths differ: {us.shape} vs {intl.shape}")
    if lookback < 1:
        raise ValueError(f"lookback must be >= 1, got {lookback}")
    total = len(us)
    if total < lookback + 1:
        raise SeriesTooShort(
            f"need at least lookback+1 = {lookback + 1} months, got {total}"
        )
    if months is not None and len(months) != total:
        raise LengthMismatch(f"got {len(months)} month labels for {total} rows")

    identity = NormalizationStats(0.0, 1.0)
    samples = []
    for t in range(lookback, total):
        samples.append(WindowSample(
            inputs=us[t - lookback:t].copy(),
            target=float(intl[t]),
            prev_target=float(intl[t - 1]),
            target_month=months[t] if months is not None else None,
        ))
    return SupervisedDataset(tuple(samples), us_stats or identity,
                             intl_stats or identity)


def temporal_split(dataset: SupervisedDataset,
                   spec: SplitSpec = SplitSpec()) -> tuple[SupervisedDataset, SupervisedDataset]:
    """First floor(f*N) samples train, the rest test. No shuffling."""
    n = len(dataset)
    if n < 5:
        raise DegenerateSplit(f"need at least 5 samples to split, got {n}")
    n_train = math.floor(spec.train_fraction * n)
    if n_train == 0 or n_train == n:
        raise DegenerateSplit(
            f"train_fraction {spec.train_fraction} leaves an empty side for N={n}"
        )
    train = SupervisedDataset(dataset.samples[:n_train], dataset.us_stats,
                              dataset.intl_stats)
    test = SupervisedDataset(dataset.samples[n_train:], dataset.us_stats,
                             dataset.intl_stats)
    return train, test


def build_supervised(us: RegionPanel, intl: RegionPanel, lookback: int = 12,
                     train_fraction: float = 0.8,
                     winsor_k: float = 4.0) -> tuple[SupervisedDataset, SupervisedDataset]:
    """Full leak-free pipeline: align, winsorize, normalize, window, split.

    All statistics (winsorization bounds and z-score stats) are fitted on
    the months up to and including the last training target; the same
    bounds/stats are then applied to the full series.
    """
    spec = SplitSpec(train_fraction)
    us_a, intl_a = align_panels(us, intl, min_months=lookback + 2)
    total = len(us_a)
    n_samples = total - lookback
    if n_samples < 5:
        raise DegenerateSplit(
            f"only {n_samples} windowed samples from {total} common months"
        )
    n_train = math.floor(train_fraction * n_samples)
    train_rows = lookback + n_train  # months strictly before the first test target

    us_w = winsorize(us_a.change, winsor_k, stats=fit_stats(us_a.change[:train_rows]))
    intl_w = winsorize(intl_a.change, winsor_k,
                       stats=fit_stats(intl_a.change[:train_rows]))
    us_stats = fit_stats(us_w.values[:train_rows])
    intl_stats = fit_stats(intl_w.values[:train_rows])

    dataset = make_windows(
        normalize(us_w.values, us_stats),
        normalize(intl_w.values, intl_stats),
        lookback,
        months=us_a.grid.months,
        us_stats=us_stats,
        intl_stats=intl_stats,
    )
    return temporal_split(dataset, spec)


def dump_dataset_csv(dataset: SupervisedDataset, path) -> None:
    """Debug dump: sample_idx,target_month,u_lag_1..u_lag_W,target.

    u_lag_k is the US change k months before the target month, so u_lag_1
    is the most recent input.
    """
    lookback = dataset.lookback
    header = ["sample_idx", "target_month"]
    header += [f"u_lag_{k}" for k in range(1, lookback + 1)]
    header += ["target"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for idx, sample in enumerate(dataset.samples):
            row = [idx, str(sample.target_month) if sample.target_month else ""]
            row += [repr(float(v)) for v in sample.inputs[::-1]]
            row += [repr(float(sample.target))]
            writer.writerow(row)
