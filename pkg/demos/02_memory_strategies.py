"""The nine retention strategies under one fixed budget.

Feeds every strategy a day of 15-second telemetry and shows what each one
keeps and what it costs. The budget never moves; the strategies trade
fidelity for footprint.

    PYTHONPATH=src python3 demos/02_memory_strategies.py
"""

from hearth.devices import temperature_at
from hearth.memstore import (
    DEFAULT_BUDGET_UNITS,
    LogEntry,
    Sample,
    StrategyKind,
    new_store,
)

DAY_S = 86_400
CADENCE_S = 15


def main() -> None:
    n = DAY_S // CADENCE_S
    print(f"feeding {n} records (one day at {CADENCE_S} s) into each strategy,")
    print(f"budget {DEFAULT_BUDGET_UNITS} units everywhere\n")
    print(f"{'strategy':18s} {'kept':>6s} {'bytes':>7s} {'peak':>7s}  note")
    for strategy in StrategyKind:
        store = new_store(strategy, CADENCE_S, DEFAULT_BUDGET_UNITS)
        log_family = strategy.value.endswith("log")
        for k in range(1, n + 1):
            t = k * CADENCE_S
            if log_family:
                store.record(LogEntry(t, "state_changed", "binary_sensor.motion", f"check #{k % 7}"))
            else:
                store.record(Sample(t, temperature_at(t, seed=3)))
        note = {
            StrategyKind.CIRCULAR_BUFFER: "raw ring, oldest overwritten",
            StrategyKind.EXTENDED_BUFFER: "same ring, doubled coverage at its tier",
            StrategyKind.ROLLING_AVERAGE: "5 samples -> 1 mean point",
            StrategyKind.TREND_ANALYSIS: "10 samples -> slope+intercept",
            StrategyKind.SUMMARIZED_DATA: "20 samples -> min/max/mean/...",
            StrategyKind.BASIC_LOG: "last 128 entries",
            StrategyKind.EXTENDED_LOG: "last 256 entries",
            StrategyKind.AGGREGATED_LOG: "repeats coalesce into counts",
            StrategyKind.SUMMARIZED_LOG: "20 entries -> 1 digest",
        }[strategy]
        print(
            f"{strategy.value:18s} {store.point_count():>6d} {store.bytes_used():>7d}"
            f" {store.peak_units:>7d}  {note}"
        )

    print("\na trend segment reconstructs values anywhere inside its window:")
    store = new_store(StrategyKind.TREND_ANALYSIS, 120)
    for i in range(10):
        store.record(Sample(i * 120.0, 20.0 + i * 0.1))
    (segment,) = store.folded_records()
    for t in (0.0, 540.0, 1080.0):
        (point,) = store.query(t, t)
        print(f"  value({t:>6.0f}) = {point.value:.3f}")
    print(f"  one {type(segment).__name__} replaced 10 raw samples")


if __name__ == "__main__":
    main()
