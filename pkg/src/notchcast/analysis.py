"""Dip detection, US -> international lead-lag estimation, event matching.

A "dip" is a locally maximal forward drop of the rating index: at month t
the drop statistic is index[t] minus the minimum of the index over the next
``window`` months (window truncates at the series end). A dip is reported
where the statistic clears the threshold and is maximal within +/- window
months; on plateaus the latest month wins, so a clean step-drop is reported
at the last flat month before the fall.

The lag estimate maximizes the Pearson correlation between the US change
series and the international change series shifted by 0..max_lag months.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError, SeriesTooShort
from .panel import Month, RegionPanel

#: Qualitative response-timing flags for the bundled event calendar.
IMMEDIATE = "immediate"
NEXT_PERIOD = "next_period"


@dataclass(frozen=True)
class EventRecord:
    name: str
    anchor_month: Month
    response_timing: str | None = None


#: Major US market events of 2010-2020 with the month the shock landed.
#: The timing flag records how quickly international rating indices are
#: expected to echo the US move (not asserted quantitatively).
DEFAULT_EVENT_CALENDAR: tuple[EventRecord, ...] = (
    EventRecord("2011 stock market crash", Month(2011, 8), NEXT_PERIOD),
    EventRecord("2013 NASDAQ flash freeze", Month(2013, 8), NEXT_PERIOD),
    EventRecord("2013 federal government shutdown", Month(2013, 10), NEXT_PERIOD),
    EventRecord("2015-16 stock selloff", Month(2015, 8), IMMEDIATE),
    EventRecord("2018 cryptocurrency crash", Month(2018, 1), IMMEDIATE),
    EventRecord("2020 COVID shutdown", Month(2020, 3), IMMEDIATE),
)


@dataclass(frozen=True)
class DipReport:
    dip_month: Month
    magnitude: float
    matched_event: EventRecord | None = None
    match_distance_months: int | None = None


@dataclass(frozen=True)
class LagEstimate:
    best_lag_months: int
    correlation_at_best: float
    correlation_by_lag: np.ndarray  # index = lag in months

    def __post_init__(self):
        self.correlation_by_lag.setflags(write=False)


def drop_statistic(index: np.ndarray, window_months: int) -> np.ndarray:
    """index[t] - min(index[t .. t+window-1]), window truncated at the end."""
    total = len(index)
    stat = np.empty(total)
    for t in range(total):
        stat[t] = index[t] - index[t:t + window_months].min()
    return stat


def detect_dips(panel: RegionPanel, window_months: int = 6,
                threshold_notch: float = 0.25) -> list[DipReport]:
    """Report one dip per episode via non-maximum suppression.

    A month is reported when its drop statistic clears the threshold, no
    month within +/-window has a strictly larger statistic, and it is the
    last month of its contiguous run of equal statistics. The last-of-run
    rule pins a flat index followed by a step drop to the final flat month
    (the step example: flat then a drop at month m yields one dip at m-1);
    an equal statistic in a *separate* later episode does not suppress an
    earlier one.
    """
    if window_months < 1:
        raise ValueError(f"window_months must be >= 1, got {window_months}")
    if threshold_notch <= 0:
        raise ValueError(f"threshold_notch must be > 0, got {threshold_notch}")
    stat = drop_statistic(panel.index, window_months)
    total = len(stat)
    dips = []
    for t in range(total):
        if stat[t] < threshold_notch:
            continue
        lo = max(0, t - window_months)
        hi = min(total, t + window_months + 1)
        if stat[t] < stat[lo:hi].max():
            continue
        if t + 1 < total and stat[t + 1] == stat[t]:
            continue  # not yet the end of this plateau
        dips.append(DipReport(panel.grid.months[t], float(stat[t])))
    return dips


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; 0.0 when either slice has zero variance."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt((da @ da) * (db @ db))
    if denom == 0.0:
        return 0.0
    return float(da @ db / denom)


def cross_correlation_lag(us_change, intl_change, max_lag: int = 12) -> LagEstimate:
    """Correlate us[0..T-1-L] with intl[L..T-1] for each lag L in [0, max_lag].

    Best lag is the argmax of the profile; exact ties break toward the
    smaller lag.
    """
    us = np.asarray(us_change, dtype=np.float64)
    intl = np.asarray(intl_change, dtype=np.float64)
    if us.shape != intl.shape:
        raise DataError(f"series lengths differ: {us.shape} vs {intl.shape}")
    total = len(us)
    if max_lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {max_lag}")
    if total <= max_lag + 2:
        raise SeriesTooShort(f"need more than max_lag+2 = {max_lag + 2} points, got {total}")

    profile = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        if lag == 0:
            profile[lag] = pearson(us, intl)
        else:
            profile[lag] = pearson(us[:-lag], intl[lag:])
    best = int(np.argmax(profile))  # argmax returns the first (smallest) lag on ties
    return LagEstimate(best, float(profile[best]), profile)


def match_events(dips: list[DipReport], calendar: tuple[EventRecord, ...],
                 tolerance_months: int = 6) -> list[DipReport]:
    """Greedily pair dips with the nearest calendar anchors.

    Pairs are assigned in order of distance; each event matches at most one
    dip and vice versa. Equidistant candidates resolve to the earlier dip.
    Dips left unmatched are returned unchanged, in the original order.
    """
    if tolerance_months < 0:
        raise ValueError(f"tolerance_months must be >= 0, got {tolerance_months}")
    candidates = []
    for d_idx, dip in enumerate(dips):
        for e_idx, event in enumerate(calendar):
            distance = abs(dip.dip_month.index() - event.anchor_month.index())
            if distance <= tolerance_months:
                candidates.append((distance, dip.dip_month.index(), e_idx, d_idx))
    candidates.sort()

    matched: dict[int, tuple[EventRecord, int]] = {}
    used_events: set[int] = set()
    for distance, _, e_idx, d_idx in candidates:
        if d_idx in matched or e_idx in used_events:
            continue
        matched[d_idx] = (calendar[e_idx], distance)
        used_events.add(e_idx)

    out = []
    for d_idx, dip in enumerate(dips):
        if d_idx in matched:
            event, distance = matched[d_idx]
            out.append(replace(dip, matched_event=event, match_distance_months=distance))
        else:
            out.append(dip)
    return out


def read_event_calendar_csv(path) -> tuple[EventRecord, ...]:
    """Calendar override: name,anchor_month with an optional timing column."""
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["name", "anchor_month"]:
            raise DataError(f"{path}: expected header name,anchor_month")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) not in (2, 3):
                raise DataError(f"{path}:{lineno}: expected 2 or 3 fields")
            timing = row[2].strip() if len(row) == 3 and row[2].strip() else None
            if timing not in (None, IMMEDIATE, NEXT_PERIOD):
                raise DataError(f"{path}:{lineno}: bad timing flag {timing!r}")
            records.append(EventRecord(row[0].strip(), Month.parse(row[1]), timing))
    if not records:
        raise DataError(f"{path}: calendar has no events")
    return tuple(records)


def emit_trend_report(us: RegionPanel, intl: RegionPanel, dips: list[DipReport],
                      lag: LagEstimate, out_dir) -> None:
    """Write trend.csv, dips.csv and lag_profile.csv into ``out_dir``."""
    if us.grid != intl.grid:
        raise DataError("emit_trend_report needs panels on one aligned grid")

    with open(f"{out_dir}/trend.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "us_index", "intl_index", "us_change", "intl_change"])
        for t, month in enumerate(us.grid.months):
            writer.writerow([
                str(month),
                repr(float(us.index[t])),
                repr(float(intl.index[t])),
                repr(float(us.change[t])),
                repr(float(intl.change[t])),
            ])

    with open(f"{out_dir}/dips.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dip_month", "magnitude", "matched_event", "match_distance_months"])
        for dip in dips:
            writer.writerow([
                str(dip.dip_month),
                repr(dip.magnitude),
                dip.matched_event.name if dip.matched_event else "",
                dip.match_distance_months if dip.match_distance_months is not None else "",
            ])

    with open(f"{out_dir}/lag_profile.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag_months", "correlation"])
        for lag_months, corr in enumerate(lag.correlation_by_lag):
            writer.writerow([lag_months, repr(float(corr))])
