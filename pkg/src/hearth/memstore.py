"""Fixed-budget telemetry stores.

Every store holds one device's history inside a hard memory budget,
accounted in abstract cost units (a platform-independent proxy for RAM
bytes on a 10 kB-class device). Nine retention strategies cover the
interval-tier matrix:

* ``CIRCULAR_BUFFER`` / ``EXTENDED_BUFFER`` -- preallocated ring of raw
  samples, overwriting the oldest when full. The extended variant is the
  double-capacity form of its base; since both size themselves to the
  budget, at a fixed budget the extension shows up as doubled time
  coverage at the doubled measurement interval.
* ``ROLLING_AVERAGE`` -- raw samples are buffered until the window fills,
  then replaced by one mean point.
* ``TREND_ANALYSIS`` -- each full window collapses to a least-squares line
  segment (slope, intercept at window start).
* ``SUMMARIZED_DATA`` -- each full window collapses to a
  min/max/mean/first/last/count/delta digest.
* ``BASIC_LOG`` / ``EXTENDED_LOG`` -- bounded event logs, pruning oldest.
* ``AGGREGATED_LOG`` -- consecutive identical events within a coalescing
  window merge into one counted entry.
* ``SUMMARIZED_LOG`` -- each window of entries collapses to one digest
  entry.

The budget invariant is absolute: ``bytes_used() <= budget_units`` after
every operation, enforced by evicting oldest data before any insertion.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    BudgetTooSmall,
    InvalidTier,
    NonMonotoneTimestamp,
    TooFewSamples,
)

# Abstract unit costs per stored item. Exact and deterministic by design.
SAMPLE_COST = 16
TREND_SEGMENT_COST = 40
SUMMARY_RECORD_COST = 64
LOG_ENTRY_BASE_COST = 32

DEFAULT_BUDGET_UNITS = 10240

# Legal measurement intervals, seconds.
TIERS = (15, 30, 60, 120, 300)

ROLLING_WINDOW = 5
TREND_WINDOW = 10
SUMMARY_WINDOW = 20
BASIC_LOG_MAX_ENTRIES = 128
EXTENDED_LOG_MAX_ENTRIES = 256
SUMMARIZED_LOG_WINDOW = 20


class StrategyKind(str, Enum):
    CIRCULAR_BUFFER = "circular_buffer"
    EXTENDED_BUFFER = "extended_buffer"
    ROLLING_AVERAGE = "rolling_average"
    TREND_ANALYSIS = "trend_analysis"
    SUMMARIZED_DATA = "summarized_data"
    BASIC_LOG = "basic_log"
    EXTENDED_LOG = "extended_log"
    AGGREGATED_LOG = "aggregated_log"
    SUMMARIZED_LOG = "summarized_log"


SAMPLE_STRATEGIES = frozenset(
    {
        StrategyKind.CIRCULAR_BUFFER,
        StrategyKind.EXTENDED_BUFFER,
        StrategyKind.ROLLING_AVERAGE,
        StrategyKind.TREND_ANALYSIS,
        StrategyKind.SUMMARIZED_DATA,
    }
)
LOG_STRATEGIES = frozenset(
    {
        StrategyKind.BASIC_LOG,
        StrategyKind.EXTENDED_LOG,
        StrategyKind.AGGREGATED_LOG,
        StrategyKind.SUMMARIZED_LOG,
    }
)


class ScenarioKind(str, Enum):
    LIGHTING_TEMPERATURE = "lighting_temperature"
    MANUAL_TESTING = "manual_testing"
    MORNING_SCENE = "morning_scene"
    EVENING_SCENE = "evening_scene"
    COMPLEX_ROOM = "complex_room"


# Scenario row x interval tier -> strategy. One cell per combination.
STRATEGY_TABLE: dict[ScenarioKind, dict[int, StrategyKind]] = {
    ScenarioKind.LIGHTING_TEMPERATURE: {
        15: StrategyKind.CIRCULAR_BUFFER,
        30: StrategyKind.EXTENDED_BUFFER,
        60: StrategyKind.ROLLING_AVERAGE,
        120: StrategyKind.TREND_ANALYSIS,
        300: StrategyKind.SUMMARIZED_DATA,
    },
    ScenarioKind.MANUAL_TESTING: {
        15: StrategyKind.BASIC_LOG,
        30: StrategyKind.EXTENDED_LOG,
        60: StrategyKind.AGGREGATED_LOG,
        120: StrategyKind.AGGREGATED_LOG,
        300: StrategyKind.SUMMARIZED_LOG,
    },
    ScenarioKind.MORNING_SCENE: {
        15: StrategyKind.CIRCULAR_BUFFER,
        30: StrategyKind.EXTENDED_BUFFER,
        60: StrategyKind.ROLLING_AVERAGE,
        120: StrategyKind.ROLLING_AVERAGE,
        300: StrategyKind.SUMMARIZED_DATA,
    },
    ScenarioKind.EVENING_SCENE: {
        15: StrategyKind.BASIC_LOG,
        30: StrategyKind.EXTENDED_LOG,
        60: StrategyKind.AGGREGATED_LOG,
        120: StrategyKind.AGGREGATED_LOG,
        300: StrategyKind.SUMMARIZED_LOG,
    },
    ScenarioKind.COMPLEX_ROOM: {
        15: StrategyKind.CIRCULAR_BUFFER,
        30: StrategyKind.EXTENDED_BUFFER,
        60: StrategyKind.ROLLING_AVERAGE,
        120: StrategyKind.TREND_ANALYSIS,
        300: StrategyKind.SUMMARIZED_DATA,
    },
}


def select_strategy(scenario: ScenarioKind, interval_s: int) -> StrategyKind:
    """Strategy for one (scenario, tier) cell of the interval matrix."""
    if interval_s not in TIERS:
        raise InvalidTier(f"interval {interval_s}s not in {TIERS}")
    return STRATEGY_TABLE[ScenarioKind(scenario)][interval_s]


# --- record types ----------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    """One telemetry point: seconds since epoch, finite value."""

    t: float
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.value)):
            raise ValueError(f"sample fields must be finite: ({self.t}, {self.value})")


@dataclass
class LogEntry:
    """One logged event; ``count`` grows past 1 only through coalescing."""

    t: float
    event_type: str
    entity: str
    detail: str
    count: int = 1


@dataclass(frozen=True)
class TrendSegment:
    """Least-squares line over one window; ``intercept`` is the fitted
    value at ``t_start``, so ``value(t) = intercept + slope * (t - t_start)``."""

    t_start: float
    t_end: float
    slope: float
    intercept: float
    n: int


def segment_value(segment: TrendSegment, t: float) -> float:
    return segment.intercept + segment.slope * (t - segment.t_start)


@dataclass(frozen=True)
class SummaryRecord:
    t_start: float
    t_end: float
    min: float
    max: float
    mean: float
    first: float
    last: float
    count: int
    delta: float


Record = Sample | LogEntry | TrendSegment | SummaryRecord


def record_cost(item: Record) -> int:
    """Exact unit cost of one stored item."""
    if isinstance(item, Sample):
        return SAMPLE_COST
    if isinstance(item, TrendSegment):
        return TREND_SEGMENT_COST
    if isinstance(item, SummaryRecord):
        return SUMMARY_RECORD_COST
    if isinstance(item, LogEntry):
        return LOG_ENTRY_BASE_COST + len(item.detail.encode("utf-8"))
    raise TypeError(f"unknown record type {type(item).__name__}")


def fold_window(samples: list[Sample], kind: StrategyKind) -> Record:
    """Collapse one raw window into its folded record.

    * rolling average -> one mean :class:`Sample` at the window midpoint
    * trend analysis  -> one :class:`TrendSegment` (ordinary least squares)
    * summarized data -> one :class:`SummaryRecord`

    Raises:
        TooFewSamples: empty input, or a trend window with fewer than two
            samples or zero time span.
    """
    if not samples:
        raise TooFewSamples("cannot fold an empty window")
    values = [s.value for s in samples]
    first, last = samples[0], samples[-1]

    if kind is StrategyKind.ROLLING_AVERAGE:
        mean = math.fsum(values) / len(values)
        return Sample(t=(first.t + last.t) / 2.0, value=mean)

    if kind is StrategyKind.TREND_ANALYSIS:
        if len(samples) < 2:
            raise TooFewSamples("trend fit needs at least 2 samples")
        if last.t == first.t:
            raise TooFewSamples("trend window spans zero time")
        n = len(samples)
        t_mean = math.fsum(s.t for s in samples) / n
        v_mean = math.fsum(values) / n
        sxx = math.fsum((s.t - t_mean) ** 2 for s in samples)
        sxv = math.fsum((s.t - t_mean) * (s.value - v_mean) for s in samples)
        slope = sxv / sxx if sxx else 0.0
        intercept = v_mean + slope * (first.t - t_mean)
        return TrendSegment(first.t, last.t, slope, intercept, n)

    if kind is StrategyKind.SUMMARIZED_DATA:
        mean = math.fsum(values) / len(values)
        return SummaryRecord(
            t_start=first.t,
            t_end=last.t,
            min=min(values),
            max=max(values),
            mean=mean,
            first=first.value,
            last=last.value,
            count=len(values),
            delta=last.value - first.value,
        )

    raise TypeError(f"{kind.value} is not a window-folding strategy")


# --- stores ----------------------------------------------------------------


class Store:
    """Base container: budget accounting, peak tracking, monotone clock."""

    #: minimum budget: cost of one item of the strategy's record type
    MIN_ITEM_COST = SAMPLE_COST

    def __init__(self, strategy: StrategyKind, interval_s: int, budget_units: int):
        if interval_s not in TIERS:
            raise InvalidTier(f"interval {interval_s}s not in {TIERS}")
        if budget_units < self.MIN_ITEM_COST:
            raise BudgetTooSmall(
                f"{strategy.value}: budget {budget_units} cannot hold one "
                f"{self.MIN_ITEM_COST}-unit record"
            )
        self.strategy = strategy
        self.interval_s = interval_s
        self.budget_units = budget_units
        self._bytes = 0
        self._peak = 0
        self._last_t = -math.inf

    # -- accounting --------------------------------------------------------

    def bytes_used(self) -> int:
        return self._bytes

    @property
    def peak_units(self) -> int:
        return self._peak

    def point_count(self) -> int:
        raise NotImplementedError

    def _add(self, delta: int) -> None:
        self._bytes += delta
        if self._bytes > self._peak:
            self._peak = self._bytes

    def _check_time(self, t: float) -> None:
        if t < self._last_t:
            raise NonMonotoneTimestamp(f"t={t} after t={self._last_t}")
        self._last_t = t

    # -- interface ----------------------------------------------------------

    def record(self, item: Record) -> None:
        raise NotImplementedError

    def query(self, t_from: float, t_to: float) -> list[Record]:
        raise NotImplementedError

    def metrics(self, store_id: str) -> dict:
        return {
            "store_id": store_id,
            "strategy": self.strategy.value,
            "interval_s": self.interval_s,
            "bytes_used": self.bytes_used(),
            "peak_units": self.peak_units,
            "point_count": self.point_count(),
            "budget_units": self.budget_units,
        }


class BufferStore(Store):
    """Ring of raw samples, preallocated to full capacity at creation.

    Capacity is whatever the budget affords; when full, the oldest sample
    is overwritten (static allocation discipline: the region never grows).
    """

    def __init__(self, strategy: StrategyKind, interval_s: int, budget_units: int):
        super().__init__(strategy, interval_s, budget_units)
        self.capacity = budget_units // SAMPLE_COST
        self._slots: list[Sample | None] = [None] * self.capacity
        self._head = 0  # next write position
        self._count = 0

    def point_count(self) -> int:
        return self._count

    def record(self, item: Record) -> None:
        if not isinstance(item, Sample):
            raise TypeError(f"{self.strategy.value} stores samples, got {type(item).__name__}")
        self._check_time(item.t)
        if self._count < self.capacity:
            self._count += 1
            self._add(SAMPLE_COST)
        self._slots[self._head] = item
        self._head = (self._head + 1) % self.capacity

    def contents(self) -> list[Sample]:
        """Retained samples, oldest first."""
        start = (self._head - self._count) % self.capacity
        out = []
        for i in range(self._count):
            sample = self._slots[(start + i) % self.capacity]
            assert sample is not None
            out.append(sample)
        return out

    def query(self, t_from: float, t_to: float) -> list[Record]:
        return [s for s in self.contents() if t_from <= s.t <= t_to]


class FoldingStore(Store):
    """Raw window buffer plus a bounded list of folded records.

    Samples accumulate in a pending window; a full window folds into one
    record and the raws are discarded. Folded records are evicted oldest
    first when the budget demands room. A not-yet-full window counts
    against the budget and is reported raw by queries.
    """

    _WINDOWS = {
        StrategyKind.ROLLING_AVERAGE: ROLLING_WINDOW,
        StrategyKind.TREND_ANALYSIS: TREND_WINDOW,
        StrategyKind.SUMMARIZED_DATA: SUMMARY_WINDOW,
    }
    _FOLDED_COST = {
        StrategyKind.ROLLING_AVERAGE: SAMPLE_COST,
        StrategyKind.TREND_ANALYSIS: TREND_SEGMENT_COST,
        StrategyKind.SUMMARIZED_DATA: SUMMARY_RECORD_COST,
    }

    def __init__(self, strategy: StrategyKind, interval_s: int, budget_units: int):
        self.MIN_ITEM_COST = self._FOLDED_COST[strategy]
        super().__init__(strategy, interval_s, budget_units)
        self.window = self._WINDOWS[strategy]
        self._pending: list[Sample] = []
        self._folded: deque[Record] = deque()

    def point_count(self) -> int:
        return len(self._folded) + len(self._pending)

    def _make_room(self, cost: int) -> None:
        while self._bytes + cost > self.budget_units:
            if self._folded:
                self._add(-record_cost(self._folded.popleft()))
            elif self._pending:
                self._add(-SAMPLE_COST)
                del self._pending[0]
            else:  # pragma: no cover - excluded by the budget precondition
                raise BudgetTooSmall(f"record of cost {cost} cannot fit")

    def record(self, item: Record) -> None:
        if not isinstance(item, Sample):
            raise TypeError(f"{self.strategy.value} stores samples, got {type(item).__name__}")
        self._check_time(item.t)
        self._make_room(SAMPLE_COST)
        self._pending.append(item)
        self._add(SAMPLE_COST)
        if len(self._pending) == self.window:
            folded = fold_window(self._pending, self.strategy)
            self._add(-SAMPLE_COST * len(self._pending))
            self._pending.clear()
            cost = record_cost(folded)
            self._make_room(cost)
            self._folded.append(folded)
            self._add(cost)

    def folded_records(self) -> list[Record]:
        return list(self._folded)

    def pending_samples(self) -> list[Sample]:
        return list(self._pending)

    def query(self, t_from: float, t_to: float) -> list[Record]:
        out: list[Record] = []
        for rec in self._folded:
            if isinstance(rec, Sample):
                if t_from <= rec.t <= t_to:
                    out.append(rec)
            elif isinstance(rec, TrendSegment):
                if rec.t_start <= t_to and rec.t_end >= t_from:
                    # Reconstruct endpoint values of the overlap; never
                    # fabricate points outside the retained window.
                    lo = max(t_from, rec.t_start)
                    hi = min(t_to, rec.t_end)
                    out.append(Sample(lo, segment_value(rec, lo)))
                    if hi > lo:
                        out.append(Sample(hi, segment_value(rec, hi)))
            elif isinstance(rec, SummaryRecord):
                if rec.t_start <= t_to and rec.t_end >= t_from:
                    out.append(rec)
        out.extend(s for s in self._pending if t_from <= s.t <= t_to)
        return out


class LogStore(Store):
    """Append-only event log, pruned oldest-first past its entry cap or budget."""

    MIN_ITEM_COST = LOG_ENTRY_BASE_COST

    def __init__(self, strategy: StrategyKind, interval_s: int, budget_units: int):
        super().__init__(strategy, interval_s, budget_units)
        self.max_entries = (
            EXTENDED_LOG_MAX_ENTRIES
            if strategy is StrategyKind.EXTENDED_LOG
            else BASIC_LOG_MAX_ENTRIES
        )
        self._entries: deque[LogEntry] = deque()

    def point_count(self) -> int:
        return len(self._entries)

    def _append_pruning(self, entry: LogEntry, cost: int) -> None:
        while self._entries and (
            self._bytes + cost > self.budget_units or len(self._entries) >= self.max_entries
        ):
            self._add(-record_cost(self._entries.popleft()))
        if self._bytes + cost > self.budget_units:
            raise BudgetTooSmall(f"entry of cost {cost} exceeds budget {self.budget_units}")
        self._entries.append(entry)
        self._add(cost)

    def record(self, item: Record) -> None:
        if not isinstance(item, LogEntry):
            raise TypeError(f"{self.strategy.value} stores log entries, got {type(item).__name__}")
        self._check_time(item.t)
        self._append_pruning(item, record_cost(item))

    def entries(self) -> list[LogEntry]:
        return list(self._entries)

    def query(self, t_from: float, t_to: float) -> list[Record]:
        return [e for e in self._entries if t_from <= e.t <= t_to]


class AggregatedLogStore(LogStore):
    """Log that coalesces repeats of the tail entry within a time window.

    A new event with the tail's event_type and entity, arriving within
    ``coalesce_window_s`` of the tail's timestamp, increments the tail's
    count instead of appending. The window is anchored at the tail entry,
    so a long burst collapses into a chain of counted entries.
    """

    def __init__(self, strategy: StrategyKind, interval_s: int, budget_units: int):
        super().__init__(strategy, interval_s, budget_units)
        self.max_entries = 10**9  # aggregation bounds entries; budget is the cap
        self.coalesce_window_s = 2 * interval_s

    def record(self, item: Record) -> None:
        if not isinstance(item, LogEntry):
            raise TypeError(f"{self.strategy.value} stores log entries, got {type(item).__name__}")
        self._check_time(item.t)
        if self._entries:
            tail = self._entries[-1]
            if (
                tail.event_type == item.event_type
                and tail.entity == item.entity
                and item.t - tail.t <= self.coalesce_window_s
            ):
                tail.count += item.count
                return
        self._append_pruning(item, record_cost(item))


class SummarizedLogStore(Store):
    """Log folded per window: every 20 entries collapse into one digest entry."""

    MIN_ITEM_COST = LOG_ENTRY_BASE_COST

    def __init__(self, strategy: StrategyKind, interval_s: int, budget_units: int):
        super().__init__(strategy, interval_s, budget_units)
        self.window = SUMMARIZED_LOG_WINDOW
        self._pending: list[LogEntry] = []
        self._digests: deque[LogEntry] = deque()

    def point_count(self) -> int:
        return len(self._digests) + len(self._pending)

    def _make_room(self, cost: int) -> None:
        while self._bytes + cost > self.budget_units:
            if self._digests:
                self._add(-record_cost(self._digests.popleft()))
            elif self._pending:
                self._add(-record_cost(self._pending.pop(0)))
            else:
                raise BudgetTooSmall(f"entry of cost {cost} exceeds budget {self.budget_units}")

    def record(self, item: Record) -> None:
        if not isinstance(item, LogEntry):
            raise TypeError(f"{self.strategy.value} stores log entries, got {type(item).__name__}")
        self._check_time(item.t)
        cost = record_cost(item)
        self._make_room(cost)
        self._pending.append(item)
        self._add(cost)
        if len(self._pending) == self.window:
            digest = self._digest(self._pending)
            self._add(-sum(record_cost(e) for e in self._pending))
            self._pending.clear()
            dcost = record_cost(digest)
            self._make_room(dcost)
            self._digests.append(digest)
            self._add(dcost)

    @staticmethod
    def _digest(entries: list[LogEntry]) -> LogEntry:
        total = sum(e.count for e in entries)
        kinds = sorted({e.event_type for e in entries})
        detail = f"{total} events [{','.join(kinds)}] t={entries[0].t:.0f}..{entries[-1].t:.0f}"
        return LogEntry(
            t=entries[-1].t,
            event_type="log_summary",
            entity=entries[0].entity,
            detail=detail,
            count=total,
        )

    def entries(self) -> list[LogEntry]:
        return list(self._digests) + list(self._pending)

    def query(self, t_from: float, t_to: float) -> list[Record]:
        return [e for e in self.entries() if t_from <= e.t <= t_to]


_STORE_CLASSES: dict[StrategyKind, type[Store]] = {
    StrategyKind.CIRCULAR_BUFFER: BufferStore,
    StrategyKind.EXTENDED_BUFFER: BufferStore,
    StrategyKind.ROLLING_AVERAGE: FoldingStore,
    StrategyKind.TREND_ANALYSIS: FoldingStore,
    StrategyKind.SUMMARIZED_DATA: FoldingStore,
    StrategyKind.BASIC_LOG: LogStore,
    StrategyKind.EXTENDED_LOG: LogStore,
    StrategyKind.AGGREGATED_LOG: AggregatedLogStore,
    StrategyKind.SUMMARIZED_LOG: SummarizedLogStore,
}


def new_store(
    strategy: StrategyKind,
    interval_s: int,
    budget_units: int = DEFAULT_BUDGET_UNITS,
) -> Store:
    """Create an empty store with parameters derived from strategy and budget.

    Raises:
        InvalidTier: interval outside the tier set.
        BudgetTooSmall: budget below the cost of one record.
    """
    return _STORE_CLASSES[StrategyKind(strategy)](StrategyKind(strategy), interval_s, budget_units)
