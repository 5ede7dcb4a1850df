"""Telemetry store tests: oracles first, then strategy behavior."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hearth.errors import BudgetTooSmall, InvalidTier, NonMonotoneTimestamp, TooFewSamples
from hearth.memstore import (
    DEFAULT_BUDGET_UNITS,
    TIERS,
    LogEntry,
    Sample,
    ScenarioKind,
    StrategyKind,
    SummaryRecord,
    TrendSegment,
    fold_window,
    new_store,
    record_cost,
    segment_value,
    select_strategy,
)

# --- independent oracles (brute force, numpy) -------------------------------


def oracle_mean(values: list[float]) -> float:
    return float(np.mean(np.asarray(values, dtype=np.float64)))


def oracle_lstsq(ts: list[float], vs: list[float]) -> tuple[float, float]:
    """Least squares via numpy's SVD solver on a shifted design matrix.

    Returns (slope, value at ts[0]). Shifting by ts[0] keeps the oracle
    well conditioned for windows far from t=0.
    """
    t = np.asarray(ts, dtype=np.float64) - ts[0]
    v = np.asarray(vs, dtype=np.float64)
    design = np.stack([np.ones_like(t), t], axis=1)
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    return float(coef[1]), float(coef[0])


def oracle_summary(ts: list[float], vs: list[float]) -> dict:
    arr = np.asarray(vs, dtype=np.float64)
    return {
        "min": float(arr.min()),
        "max": float(arr.max()),
        "mean": float(arr.mean()),
        "first": vs[0],
        "last": vs[-1],
        "count": len(vs),
        "delta": vs[-1] - vs[0],
    }


def close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


def random_window(rng: random.Random, n: int) -> list[Sample]:
    t = rng.uniform(0, 1e6)
    samples = []
    for _ in range(n):
        samples.append(Sample(t, rng.uniform(-50.0, 50.0)))
        t += rng.uniform(0.5, 300.0)
    return samples


# --- fold_window -----------------------------------------------------------


def test_mean_of_one_to_five_is_three():
    samples = [Sample(float(i), float(v)) for i, v in enumerate([1, 2, 3, 4, 5])]
    folded = fold_window(samples, StrategyKind.ROLLING_AVERAGE)
    assert folded.value == 3.0
    assert folded.t == 2.0  # midpoint of window


def test_exact_linear_fit():
    samples = [Sample(0.0, 20.0), Sample(60.0, 21.0), Sample(120.0, 22.0)]
    seg = fold_window(samples, StrategyKind.TREND_ANALYSIS)
    assert close(seg.slope, 1.0 / 60.0)
    assert close(seg.intercept, 20.0)
    assert seg.t_start == 0.0 and seg.t_end == 120.0 and seg.n == 3


def test_fold_against_oracles_on_random_windows():
    rng = random.Random(1234)
    for _ in range(1000):
        samples = random_window(rng, 10)
        ts = [s.t for s in samples]
        vs = [s.value for s in samples]

        mean = fold_window(samples, StrategyKind.ROLLING_AVERAGE)
        assert close(mean.value, oracle_mean(vs))

        seg = fold_window(samples, StrategyKind.TREND_ANALYSIS)
        slope, at_start = oracle_lstsq(ts, vs)
        assert close(seg.slope, slope)
        assert close(seg.intercept, at_start)

        summary = fold_window(samples, StrategyKind.SUMMARIZED_DATA)
        want = oracle_summary(ts, vs)
        assert close(summary.min, want["min"])
        assert close(summary.max, want["max"])
        assert close(summary.mean, want["mean"])
        assert summary.first == want["first"] and summary.last == want["last"]
        assert summary.count == want["count"]
        assert close(summary.delta, want["delta"])


def test_fold_rejects_empty_and_tiny_trend_windows():
    with pytest.raises(TooFewSamples):
        fold_window([], StrategyKind.ROLLING_AVERAGE)
    with pytest.raises(TooFewSamples):
        fold_window([Sample(0.0, 1.0)], StrategyKind.TREND_ANALYSIS)


@settings(max_examples=200)
@given(
    st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        min_size=1,
        max_size=40,
    )
)
def test_summary_sanity(values):
    samples = [Sample(float(i) * 5.0, v) for i, v in enumerate(values)]
    summary = fold_window(samples, StrategyKind.SUMMARIZED_DATA)
    assert summary.min <= summary.mean + 1e-9
    assert summary.mean <= summary.max + 1e-9
    assert summary.count == len(values)
    assert close(summary.delta, values[-1] - values[0])


# --- strategy table ------------------------------------------------------------


def test_strategy_table_cells():
    assert select_strategy(ScenarioKind.LIGHTING_TEMPERATURE, 15) is StrategyKind.CIRCULAR_BUFFER
    assert select_strategy(ScenarioKind.COMPLEX_ROOM, 120) is StrategyKind.TREND_ANALYSIS
    assert select_strategy(ScenarioKind.MANUAL_TESTING, 60) is StrategyKind.AGGREGATED_LOG
    assert select_strategy(ScenarioKind.MORNING_SCENE, 120) is StrategyKind.ROLLING_AVERAGE
    assert select_strategy(ScenarioKind.EVENING_SCENE, 300) is StrategyKind.SUMMARIZED_LOG


def test_strategy_table_rejects_bad_tier():
    with pytest.raises(InvalidTier):
        select_strategy(ScenarioKind.COMPLEX_ROOM, 45)


# --- stores ------------------------------------------------------------------------


def test_circular_buffer_overwrites_oldest():
    store = new_store(StrategyKind.CIRCULAR_BUFFER, 15, budget_units=64)  # capacity 4
    assert store.capacity == 4
    for i in range(1, 7):
        store.record(Sample(float(i), float(i)))
    assert [s.value for s in store.contents()] == [3.0, 4.0, 5.0, 6.0]
    assert store.bytes_used() == 64
    assert store.point_count() == 4


def test_circular_retention_matches_last_capacity_samples():
    rng = random.Random(7)
    store = new_store(StrategyKind.CIRCULAR_BUFFER, 15, budget_units=16 * 16)
    fed = []
    for i in range(100):
        s = Sample(float(i), rng.uniform(0, 10))
        fed.append(s)
        store.record(s)
    assert store.contents() == fed[-store.capacity :]


def test_bytes_arithmetic():
    store = new_store(StrategyKind.CIRCULAR_BUFFER, 15, budget_units=1024)
    assert store.bytes_used() == 0
    for i in range(64):
        store.record(Sample(float(i), 1.0))
    assert store.bytes_used() == 64 * 16 == 1024
    assert record_cost(SummaryRecord(0, 1, 0, 0, 0, 0, 0, 1, 0)) * 3 == 192


def test_empty_store_queries_empty():
    store = new_store(StrategyKind.SUMMARIZED_DATA, 300)
    assert store.query(0, 1e9) == []
    assert store.bytes_used() == 0


def test_rolling_average_folds_five_to_one():
    store = new_store(StrategyKind.ROLLING_AVERAGE, 60)
    for i in range(5):
        store.record(Sample(float(i * 60), float(i)))
    assert store.point_count() == 1
    (folded,) = store.folded_records()
    assert folded.value == 2.0
    assert store.bytes_used() == 16


def test_trend_reconstruction_at_window_end():
    store = new_store(StrategyKind.TREND_ANALYSIS, 120)
    for i in range(10):
        store.record(Sample(i * (120.0 / 9.0) * 1.0, 20.0 + i * (2.0 / 9.0)))
    # one exact linear window from t=0..120, 20.0 -> 22.0
    (seg,) = store.folded_records()
    assert close(segment_value(seg, 120.0), 22.0)
    points = store.query(120.0, 120.0)
    assert len(points) == 1 and close(points[0].value, 22.0)


def test_partial_windows_reported_raw():
    store = new_store(StrategyKind.SUMMARIZED_DATA, 300)
    for i in range(23):
        store.record(Sample(float(i * 300), float(i)))
    records = store.query(0, 1e9)
    assert sum(isinstance(r, SummaryRecord) for r in records) == 1
    assert sum(isinstance(r, Sample) for r in records) == 3
    assert store.bytes_used() == 64 + 3 * 16


def test_basic_log_prunes_oldest():
    store = new_store(StrategyKind.BASIC_LOG, 15)
    for i in range(1, 201):
        store.record(LogEntry(float(i), "evt", "switch.wall_1", f"e{i:03d}"))
    entries = store.entries()
    assert len(entries) == 128
    assert entries[0].detail == "e073"
    assert entries[-1].detail == "e200"


def test_extended_log_doubles_capacity():
    basic = new_store(StrategyKind.BASIC_LOG, 15)
    extended = new_store(StrategyKind.EXTENDED_LOG, 30)
    assert extended.max_entries == 2 * basic.max_entries == 256


def test_aggregated_log_coalesces_identical_events():
    store = new_store(StrategyKind.AGGREGATED_LOG, 15)  # window 30 s
    for i in range(5):
        store.record(LogEntry(float(i * 5), "motion", "binary_sensor.motion", "m"))
    assert store.point_count() == 1
    (entry,) = store.entries()
    assert entry.count == 5


def test_aggregated_log_breaks_chain_outside_window():
    store = new_store(StrategyKind.AGGREGATED_LOG, 15)
    store.record(LogEntry(0.0, "motion", "binary_sensor.motion", "m"))
    store.record(LogEntry(31.0, "motion", "binary_sensor.motion", "m"))  # > 30 s after tail
    assert store.point_count() == 2


def test_summarized_log_digests_windows():
    store = new_store(StrategyKind.SUMMARIZED_LOG, 300)
    for i in range(45):
        store.record(LogEntry(float(i * 300), "state_changed", "binary_sensor.door", "d" * 10))
    # 45 entries -> 2 digests + 5 pending
    assert store.point_count() == 7
    digests = [e for e in store.entries() if e.event_type == "log_summary"]
    assert len(digests) == 2
    assert all(d.count == 20 for d in digests)


def test_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        new_store(StrategyKind.BASIC_LOG, 15, budget_units=16)
    with pytest.raises(BudgetTooSmall):
        new_store(StrategyKind.SUMMARIZED_DATA, 300, budget_units=63)


def test_non_monotone_timestamp_rejected():
    store = new_store(StrategyKind.CIRCULAR_BUFFER, 15)
    store.record(Sample(10.0, 1.0))
    with pytest.raises(NonMonotoneTimestamp):
        store.record(Sample(9.0, 1.0))
    store.record(Sample(10.0, 2.0))  # equal timestamps are allowed


def test_wrong_record_type_rejected():
    buffer = new_store(StrategyKind.CIRCULAR_BUFFER, 15)
    log = new_store(StrategyKind.BASIC_LOG, 15)
    with pytest.raises(TypeError):
        buffer.record(LogEntry(0.0, "evt", "x.y", ""))
    with pytest.raises(TypeError):
        log.record(Sample(0.0, 1.0))


def _feed(store, strategy: StrategyKind, n: int, seed: int, budget: int) -> None:
    rng = random.Random(seed)
    t = 0.0
    for i in range(n):
        t += rng.uniform(0.0, 30.0)
        if strategy in (
            StrategyKind.BASIC_LOG,
            StrategyKind.EXTENDED_LOG,
            StrategyKind.AGGREGATED_LOG,
            StrategyKind.SUMMARIZED_LOG,
        ):
            store.record(
                LogEntry(t, f"evt_{i % 3}", f"dom.obj_{i % 5}", "x" * rng.randrange(0, 60))
            )
        else:
            store.record(Sample(t, rng.uniform(-100, 100)))
        used = store.bytes_used()
        assert used <= budget, f"{strategy}: {used} > {budget} after record {i}"
    assert store.peak_units <= budget


@pytest.mark.parametrize("strategy", list(StrategyKind))
def test_budget_safety_fuzz_small(strategy):
    budget = DEFAULT_BUDGET_UNITS
    store = new_store(strategy, 15, budget)
    _feed(store, strategy, 5_000, seed=42, budget=budget)


@pytest.mark.parametrize("strategy", list(StrategyKind))
def test_budget_safety_tiny_budget(strategy):
    # A budget barely above one record still never overflows.
    budget = 200
    store = new_store(strategy, 15, budget)
    _feed(store, strategy, 2_000, seed=9, budget=budget)


def test_determinism_identical_streams():
    def run():
        store = new_store(StrategyKind.TREND_ANALYSIS, 120, 2048)
        rng = random.Random(5)
        t = 0.0
        for _ in range(500):
            t += rng.uniform(1, 10)
            store.record(Sample(t, rng.uniform(-5, 5)))
        return store.folded_records(), store.bytes_used(), store.peak_units

    assert run() == run()


def test_buffer_capacity_scales_with_budget():
    assert new_store(StrategyKind.CIRCULAR_BUFFER, 15, 10240).capacity == 640
    assert new_store(StrategyKind.CIRCULAR_BUFFER, 15, 160).capacity == 10
    assert new_store(StrategyKind.EXTENDED_BUFFER, 30, 10240).capacity == 640


def test_all_tiers_accepted_and_others_rejected():
    for tier in TIERS:
        new_store(StrategyKind.CIRCULAR_BUFFER, tier)
    with pytest.raises(InvalidTier):
        new_store(StrategyKind.CIRCULAR_BUFFER, 45)
