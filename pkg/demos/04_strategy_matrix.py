"""The full scenario x interval matrix over a simulated day.

Shows the memory story: fine tiers fill their whole budget with raw
history; coarser tiers keep less by folding, aggregating, and summarizing.
Within every scenario row the steady footprint never increases as the
interval coarsens.

    PYTHONPATH=src python3 demos/04_strategy_matrix.py
"""

from hearth.harness import run_matrix
from hearth.memstore import TIERS


def main() -> None:
    print("running 25 cells x 24 simulated hours (seed 7)...")
    reports = run_matrix(duration_s=86_400, seed=7)
    rows: dict[str, dict[int, object]] = {}
    for r in reports:
        rows.setdefault(r.scenario, {})[r.interval_s] = r

    header = f"{'scenario':22s}" + "".join(f"{t:>21d}s" for t in TIERS)
    print("\nsteady-state footprint (units) and strategy per cell")
    print(header)
    print("-" * len(header))
    for scenario, cells in rows.items():
        line = f"{scenario:22s}"
        for tier in TIERS:
            r = cells[tier]
            line += f"{r.final_units:>8d} {r.strategy[:12]:<13s}"
        print(line)
        finals = [cells[t].final_units for t in TIERS]
        assert all(a >= b for a, b in zip(finals, finals[1:])), "row must be non-increasing"

    print("\npoints retained per cell (folding and coalescing at work)")
    print(header)
    print("-" * len(header))
    for scenario, cells in rows.items():
        print(f"{scenario:22s}" + "".join(f"{cells[t].point_count:>22d}" for t in TIERS))


if __name__ == "__main__":
    main()
