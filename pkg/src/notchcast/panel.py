"""Monthly rating panels built from irregular per-entity rating events.

Rating actions arrive on arbitrary dates; analysis wants aligned monthly
series. The flow is: ingest events -> build a monthly grid spanning them ->
forward-fill each entity onto the grid (a rating persists until changed) ->
aggregate entities into one mean-notch index per region.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import DataError, EmptyInput, LengthMismatch, MixedEntity, NoData
from .grades import grade_to_notch, parse_rating

REGIONS = ("US", "INTL")

#: Earliest event date accepted by ingestion unless explicitly overridden.
MIN_EVENT_DATE = dt.date(2010, 11, 1)

EVENTS_CSV_HEADER = ["entity_id", "region", "date", "rating"]
PANEL_CSV_HEADER = ["month", "region", "index", "change", "coverage"]


@dataclass(frozen=True, order=True)
class Month:
    """A calendar month (year, month), totally ordered, 1-based month."""

    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")

    @classmethod
    def from_date(cls, d: dt.date) -> "Month":
        return cls(d.year, d.month)

    @classmethod
    def parse(cls, text: str) -> "Month":
        """Parse 'YYYY-MM'."""
        try:
            year_s, month_s = text.strip().split("-")
            return cls(int(year_s), int(month_s))
        except (ValueError, TypeError):
            raise DataError(f"bad month {text!r}, expected YYYY-MM") from None

    @classmethod
    def from_index(cls, index: int) -> "Month":
        return cls(index // 12, index % 12 + 1)

    def index(self) -> int:
        """Months since year 0; consecutive months differ by exactly 1."""
        return self.year * 12 + self.month - 1

    def plus(self, n: int) -> "Month":
        return Month.from_index(self.index() + n)

    def first_day(self) -> dt.date:
        return dt.date(self.year, self.month, 1)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class TimeGrid:
    """Inclusive run of consecutive months."""

    months: tuple[Month, ...]

    def __post_init__(self):
        if not self.months:
            raise EmptyInput("time grid needs at least one month")
        for prev, cur in zip(self.months, self.months[1:]):
            if cur.index() != prev.index() + 1:
                raise ValueError(f"grid months not consecutive: {prev} -> {cur}")

    @classmethod
    def span(cls, start: Month, end: Month) -> "TimeGrid":
        if end < start:
            raise ValueError(f"grid end {end} precedes start {start}")
        count = end.index() - start.index() + 1
        return cls(tuple(start.plus(k) for k in range(count)))

    @property
    def start(self) -> Month:
        return self.months[0]

    @property
    def end(self) -> Month:
        return self.months[-1]

    def __len__(self) -> int:
        return len(self.months)

    def position(self, month: Month) -> int:
        """Index of ``month`` within the grid."""
        offset = month.index() - self.start.index()
        if not 0 <= offset < len(self.months):
            raise KeyError(f"{month} not on grid {self.start}..{self.end}")
        return offset


@dataclass(frozen=True)
class RatingEvent:
    """One dated rating assignment for one entity in one region."""

    entity_id: str
    region: str
    date: dt.date
    grade: str

    def __post_init__(self):
        if self.region not in REGIONS:
            raise DataError(f"region must be one of {REGIONS}, got {self.region!r}")
        grade_to_notch(self.grade)  # validates the symbol

    @property
    def notch(self) -> int:
        return grade_to_notch(self.grade)


@dataclass(frozen=True)
class EntitySeries:
    """One entity's notch level per grid month; NaN before its first event."""

    entity_id: str
    region: str
    values: np.ndarray  # float64, NaN = missing

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class RegionPanel:
    """Aggregated mean-notch index for one region on a monthly grid.

    ``change`` is the first difference of ``index`` with change[0] = 0;
    ``coverage`` counts the entities contributing at each month.
    """

    region: str
    grid: TimeGrid
    index: np.ndarray
    change: np.ndarray
    coverage: np.ndarray

    def __post_init__(self):
        for arr in (self.index, self.change, self.coverage):
            arr.setflags(write=False)

    @classmethod
    def from_index(cls, region: str, grid: TimeGrid, index: np.ndarray,
                   coverage: np.ndarray) -> "RegionPanel":
        index = np.asarray(index, dtype=np.float64)
        coverage = np.asarray(coverage, dtype=np.int64)
        if not (len(index) == len(coverage) == len(grid)):
            raise LengthMismatch(
                f"index ({len(index)}), coverage ({len(coverage)}) and grid "
                f"({len(grid)}) lengths differ"
            )
        change = np.empty_like(index)
        change[0] = 0.0
        change[1:] = index[1:] - index[:-1]
        return cls(region, grid, index, change, coverage)

    def __len__(self) -> int:
        return len(self.grid)


def build_time_grid(events: list[RatingEvent]) -> TimeGrid:
    """Monthly grid from the earliest to the latest event month, inclusive."""
    if not events:
        raise EmptyInput("cannot build a time grid from zero events")
    months = [Month.from_date(e.date) for e in events]
    return TimeGrid.span(min(months), max(months))


def forward_fill_entity(events: list[RatingEvent], grid: TimeGrid) -> EntitySeries:
    """Project one entity's events onto the grid, carrying ratings forward.

    The value at month m is the notch of the latest event dated on or before
    the last day of m (so two events in the same month resolve to the later
    one); months before the first event stay NaN.
    """
    if not events:
        raise EmptyInput("forward fill needs at least one event")
    entity_ids = {e.entity_id for e in events}
    regions = {e.region for e in events}
    if len(entity_ids) > 1 or len(regions) > 1:
        raise MixedEntity(
            f"events span entities {sorted(entity_ids)} / regions {sorted(regions)}"
        )
    ordered = sorted(events, key=lambda e: e.date)

    values = np.full(len(grid), np.nan)
    pos = 0
    current = np.nan
    for t, month in enumerate(grid.months):
        while pos < len(ordered) and Month.from_date(ordered[pos].date) <= month:
            current = float(ordered[pos].notch)
            pos += 1
        values[t] = current
    return EntitySeries(ordered[0].entity_id, ordered[0].region, values)


def aggregate_region(series: list[EntitySeries], grid: TimeGrid, region: str) -> RegionPanel:
    """Unweighted mean notch across entities with data at each month.

    Leading months where no entity has data yet are trimmed from the panel;
    forward filling guarantees coverage never drops back to zero afterwards.
    """
    if not series:
        raise NoData(f"no entity series for region {region}")
    for s in series:
        if s.region != region:
            raise MixedEntity(f"series for {s.entity_id} is {s.region}, expected {region}")

    matrix = np.vstack([s.values for s in series])
    present = ~np.isnan(matrix)
    coverage = present.sum(axis=0)
    covered = np.flatnonzero(coverage > 0)
    if covered.size == 0:
        raise NoData(f"every point is missing for region {region}")
    first = int(covered[0])

    with np.errstate(invalid="ignore"):
        index = np.nanmean(matrix[:, first:], axis=0)
    trimmed = TimeGrid(grid.months[first:])
    return RegionPanel.from_index(region, trimmed, index, coverage[first:])


def build_panels(events: list[RatingEvent]) -> tuple[RegionPanel, RegionPanel]:
    """events -> (US panel, INTL panel) on a shared anchor timeline."""
    grid = build_time_grid(events)
    panels = {}
    for region in REGIONS:
        by_entity: dict[str, list[RatingEvent]] = {}
        for e in events:
            if e.region == region:
                by_entity.setdefault(e.entity_id, []).append(e)
        if not by_entity:
            raise NoData(f"no events for region {region}")
        series = [forward_fill_entity(evs, grid) for evs in by_entity.values()]
        panels[region] = aggregate_region(series, grid, region)
    return panels["US"], panels["INTL"]


def read_events_csv(path, allow_early_dates: bool = False) -> list[RatingEvent]:
    """Ingest the rating-event CSV.

    Exact duplicate (entity_id, date) rows keep the last occurrence in file
    order. Dates before 2010-11-01 are rejected unless ``allow_early_dates``.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: missing header row") from None
        if [h.strip() for h in header] != EVENTS_CSV_HEADER:
            raise DataError(
                f"{path}: expected header {','.join(EVENTS_CSV_HEADER)}, "
                f"got {','.join(header)}"
            )
        deduped: dict[tuple[str, dt.date], RatingEvent] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            entity_id, region, date_s, rating = (f.strip() for f in row)
            try:
                date = dt.date.fromisoformat(date_s)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad date {date_s!r}") from None
            if date < MIN_EVENT_DATE and not allow_early_dates:
                raise DataError(
                    f"{path}:{lineno}: date {date} precedes {MIN_EVENT_DATE}; "
                    "pass allow_early_dates to accept it"
                )
            try:
                event = RatingEvent(entity_id, region.upper(), date, parse_rating(rating))
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            deduped[(entity_id, date)] = event
    return list(deduped.values())


def write_events_csv(events: list[RatingEvent], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENTS_CSV_HEADER)
        for e in events:
            writer.writerow([e.entity_id, e.region, e.date.isoformat(), e.grade])


def write_panel_csv(panel: RegionPanel, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PANEL_CSV_HEADER)
        for t, month in enumerate(panel.grid.months):
            writer.writerow([
                str(month),
                panel.region,
                repr(float(panel.index[t])),
                repr(float(panel.change[t])),
                int(panel.coverage[t]),
            ])
