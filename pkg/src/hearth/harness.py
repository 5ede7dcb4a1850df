"""Scenario runner: executes the tested scenarios across interval tiers.

Each run builds a fresh world from the shipped sample home, wires the
scenario's automation and one telemetry store sized by the strategy
matrix, drives the virtual clock for the requested duration, and returns
a metrics report. Runs are pure functions of (scenario, tier, duration,
seed): identical inputs serialize to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .automation import ActivateScene, Automation
from .config import ValidatedConfig, load
from .core import Binary, Event
from .devices import (
    DOOR_ENTITY,
    MOTION_ENTITY,
    TEMPERATURE_ENTITY,
    DeviceKind,
    ScenarioScript,
    ScriptEvent,
    build_fleet,
)
from .errors import BudgetExceeded, InvalidTier
from .home import BoundStore, Home
from .memstore import (
    DEFAULT_BUDGET_UNITS,
    TIERS,
    ScenarioKind,
    StrategyKind,
    new_store,
    select_strategy,
)

DAY_S = 86_400

CSV_COLUMNS = (
    "scenario",
    "interval_s",
    "strategy",
    "peak_units",
    "final_units",
    "point_count",
    "automations_fired",
)


def sample_config_text() -> str:
    return resources.files("hearth").joinpath("data/sample_config.yaml").read_text("utf-8")


def sample_config() -> ValidatedConfig:
    return load(sample_config_text())


@dataclass
class MetricsReport:
    """Per-run record of memory footprints, point counts, and firings."""

    scenario: str
    interval_s: int
    strategy: str
    seed: int
    duration_s: int
    store_id: str
    peak_units: int
    final_units: int
    point_count: int
    automations_fired: int
    events_published: int
    event_breakdown: dict[str, int] = field(default_factory=dict)
    series: list[tuple[float, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "interval_s": self.interval_s,
            "strategy": self.strategy,
            "seed": self.seed,
            "duration_s": self.duration_s,
            "store_id": self.store_id,
            "peak_units": self.peak_units,
            "final_units": self.final_units,
            "point_count": self.point_count,
            "automations_fired": self.automations_fired,
            "events_published": self.events_published,
            "event_breakdown": self.event_breakdown,
            "series": [[t, b] for t, b in self.series],
        }


def report_to_json(report: MetricsReport | list[MetricsReport] | dict) -> str:
    """Canonical JSON: fixed key order, compact, one trailing newline."""
    if isinstance(report, MetricsReport):
        payload = report.to_dict()
    elif isinstance(report, list):
        payload = [r.to_dict() for r in report]
    else:
        payload = report
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False) + "\n"


def reports_to_csv(reports: list[MetricsReport]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in reports:
        lines.append(
            f"{r.scenario},{r.interval_s},{r.strategy},{r.peak_units},"
            f"{r.final_units},{r.point_count},{r.automations_fired}"
        )
    return "\n".join(lines) + "\n"


# --- scenario feeds -------------------------------------------------------------

# Which entity's history each scenario records, and how.
SCENARIO_FEED_ENTITY = {
    ScenarioKind.LIGHTING_TEMPERATURE: TEMPERATURE_ENTITY,
    ScenarioKind.MANUAL_TESTING: "switch.wall_1",
    ScenarioKind.MORNING_SCENE: TEMPERATURE_ENTITY,
    ScenarioKind.EVENING_SCENE: DOOR_ENTITY,
    ScenarioKind.COMPLEX_ROOM: TEMPERATURE_ENTITY,
}
_LOG_FED = {ScenarioKind.MANUAL_TESTING, ScenarioKind.EVENING_SCENE}


def _toggle_events(entity: str, cadence_s: int, duration_s: int) -> list[ScriptEvent]:
    """Alternating on/off state sets at every cadence boundary."""
    out = []
    flag = True
    for k in range(1, duration_s // cadence_s + 1):
        out.append(ScriptEvent(at_ms=k * cadence_s * 1000, kind="set_state", entity=entity, state=Binary(flag)))
        flag = not flag
    return out


def _motion_blip_events(hours: list[int], minute: int = 30) -> list[ScriptEvent]:
    """Motion on at hh:minute, off one minute later, for each listed hour."""
    out = []
    for h in hours:
        on_ms = ((h * 60 + minute) * 60) * 1000
        out.append(ScriptEvent(at_ms=on_ms, kind="set_state", entity=MOTION_ENTITY, state=Binary(True)))
        out.append(ScriptEvent(at_ms=on_ms + 60_000, kind="set_state", entity=MOTION_ENTITY, state=Binary(False)))
    return out


def _scenario_script(scenario: ScenarioKind, interval_s: int, duration_s: int, seed: int) -> ScenarioScript:
    events: list[ScriptEvent] = []
    if scenario is ScenarioKind.MANUAL_TESTING:
        events += _toggle_events("switch.wall_1", interval_s, duration_s)
        # Hourly user-initiated test triggers.
        for h in range(1, max(1, duration_s // 3600)):
            events.append(
                ScriptEvent(at_ms=h * 3_600_000, kind="publish", event_type="manual_test_requested")
            )
    elif scenario is ScenarioKind.EVENING_SCENE:
        events += _toggle_events(DOOR_ENTITY, interval_s, duration_s)
        events += [e for e in _motion_blip_events([18, 19, 20, 21, 22]) if e.at_ms <= duration_s * 1000]
    elif scenario is ScenarioKind.COMPLEX_ROOM:
        events += [e for e in _motion_blip_events([9, 11, 13, 15, 17]) if e.at_ms <= duration_s * 1000]
    return ScenarioScript(scenario.value, seed, events, duration_s * 1000)


def _scenario_automations(cfg: ValidatedConfig, scenario: ScenarioKind) -> list[Automation]:
    return [a for a in cfg.automations if a.scenario_kind is scenario]


def _build_scenario_home(
    scenario: ScenarioKind, interval_s: int, duration_s: int, seed: int
) -> tuple[Home, BoundStore]:
    cfg = sample_config()
    home = Home(seed)
    sims = build_fleet()
    for sim in sims:
        if sim.kind is DeviceKind.TEMPERATURE_SENSOR:
            # Sample-fed scenarios measure at their own tier; log-fed
            # scenarios are driven purely by the script.
            if scenario in _LOG_FED:
                sim.cadence_s = None
                sim.generator = None
            else:
                sim.cadence_s = interval_s
    script = _scenario_script(scenario, interval_s, duration_s, seed)
    home.register_sims(sims, script)
    home.install_standard_services()
    automations = _scenario_automations(cfg, scenario)
    scene_ids = {
        a.scene_id
        for auto in automations
        for a in auto.actions
        if isinstance(a, ActivateScene)
    }
    for scene in cfg.scenes:
        if scene.id in scene_ids:
            home.engine.add_scene(scene)
    for automation in automations:
        home.engine.add_automation(automation)
    strategy = select_strategy(scenario, interval_s)
    store = new_store(strategy, interval_s, DEFAULT_BUDGET_UNITS)
    bound = home.attach_store(
        f"{scenario.value}_{interval_s}s", store, SCENARIO_FEED_ENTITY[scenario]
    )
    home.start_engine()
    return home, bound


def run_scenario(
    scenario: ScenarioKind,
    interval_s: int,
    duration_s: int = DAY_S,
    seed: int = 7,
) -> MetricsReport:
    """Execute one (scenario, tier) cell and report its memory behavior."""
    scenario = ScenarioKind(scenario)
    if interval_s not in TIERS:
        raise InvalidTier(f"interval {interval_s}s not in allowed set {TIERS}")
    if duration_s < interval_s:
        raise ValueError("duration must cover at least one interval")
    home, bound = _build_scenario_home(scenario, interval_s, duration_s, seed)
    # Everything in a scenario happens on tier boundaries, so the tier is
    # an exact stepping quantum.
    home.run_for(duration_s, interval_s)
    return _report_for(home, bound, scenario, interval_s, duration_s, seed)


def _report_for(
    home: Home,
    bound: BoundStore,
    scenario: ScenarioKind,
    interval_s: int,
    duration_s: int,
    seed: int,
) -> MetricsReport:
    store = bound.store
    if store.peak_units > store.budget_units:
        raise BudgetExceeded(
            f"store {bound.store_id} peaked at {store.peak_units} over {store.budget_units}"
        )
    totals = home.event_totals()
    return MetricsReport(
        scenario=scenario.value,
        interval_s=interval_s,
        strategy=store.strategy.value,
        seed=seed,
        duration_s=duration_s,
        store_id=bound.store_id,
        peak_units=store.peak_units,
        final_units=store.bytes_used(),
        point_count=store.point_count(),
        automations_fired=home.engine.fired_count,
        events_published=totals["events_published"],
        event_breakdown=totals,
        series=list(bound.series),
    )


def run_matrix(duration_s: int = DAY_S, seed: int = 7) -> list[MetricsReport]:
    """One report per (scenario, tier) cell of the strategy matrix."""
    reports = []
    for scenario in ScenarioKind:
        for tier in TIERS:
            reports.append(run_scenario(scenario, tier, duration_s, seed))
    return reports


# --- 24-hour monitoring bundle -----------------------------------------------------


@dataclass
class ElderlyBundle:
    """Five phase-bound store reports plus one whole-run summary."""

    phases: list[MetricsReport]
    overall: dict

    def to_dict(self) -> dict:
        return {"phases": [p.to_dict() for p in self.phases], "overall": self.overall}


# (store id, strategy, tier, entity filter, event alignment, phase window)
_ELDERLY_PHASES: list[tuple[str, StrategyKind, int, tuple[str, ...] | None, tuple[float, float]]] = [
    ("night_watch", StrategyKind.BASIC_LOG, 15, (MOTION_ENTITY, "light.bulb_2"), (0, 21_600)),
    ("morning_comfort", StrategyKind.EXTENDED_BUFFER, 30, (TEMPERATURE_ENTITY,), (21_600, 32_400)),
    (
        "daytime_devices",
        StrategyKind.AGGREGATED_LOG,
        60,
        ("switch.wall_1", "switch.wall_2", "switch.wall_3", "switch.outlet"),
        (32_400, 64_800),
    ),
    ("evening_trends", StrategyKind.TREND_ANALYSIS, 120, (TEMPERATURE_ENTITY,), (64_800, 86_400)),
    ("all_day_summary", StrategyKind.SUMMARIZED_LOG, 300, None, (0, 86_400)),
]


def _elderly_script(seed: int) -> ScenarioScript:
    events: list[ScriptEvent] = []
    # Night (00:00-06:00): motion and lighting checks every 15 seconds.
    flag = True
    for k in range(1, 21_600 // 15):
        events.append(
            ScriptEvent(at_ms=k * 15_000, kind="set_state", entity=MOTION_ENTITY, state=Binary(flag))
        )
        flag = not flag
    # Daytime (09:00-18:00): manual device activity every minute, rotating.
    devices = ["switch.wall_1", "switch.wall_1", "switch.wall_2", "switch.wall_3"]
    state = {d: False for d in devices}
    for i, k in enumerate(range(32_400 // 60 + 1, 64_800 // 60)):
        device = devices[i % len(devices)]
        state[device] = not state[device]
        events.append(
            ScriptEvent(
                at_ms=k * 60_000, kind="set_state", entity=device, state=Binary(state[device])
            )
        )
    # Evening (18:00-24:00): hourly door checks.
    for h in (18, 19, 20, 21, 22, 23):
        at = h * 3_600_000 + 900_000
        events.append(ScriptEvent(at_ms=at, kind="set_state", entity=DOOR_ENTITY, state=Binary(True)))
        events.append(
            ScriptEvent(at_ms=at + 60_000, kind="set_state", entity=DOOR_ENTITY, state=Binary(False))
        )
    return ScenarioScript("elderly_24h", seed, events, DAY_S * 1000)


def run_24h_elderly(seed: int = 11) -> ElderlyBundle:
    """24-hour monitoring of a resident living alone, five stores at once."""
    cfg = sample_config()
    home = Home(seed)
    sims = build_fleet()
    for sim in sims:
        if sim.kind is DeviceKind.TEMPERATURE_SENSOR:
            sim.cadence_s = 30  # finest temperature tier used by any phase
    home.register_sims(sims, _elderly_script(seed))
    home.install_standard_services()
    for scene in cfg.scenes:
        home.engine.add_scene(scene)
    for automation in _five_scenario_automations(cfg):
        home.engine.add_automation(automation)
    bounds = []
    for store_id, strategy, tier, entities, window in _ELDERLY_PHASES:
        store = new_store(strategy, tier, DEFAULT_BUDGET_UNITS)
        bounds.append(
            home.attach_store(store_id, store, entities, align_s=tier, window_s=window)
        )
    home.start_engine()
    home.run_for(DAY_S, 15)

    phases = []
    for bound in bounds:
        store = bound.store
        if store.peak_units > store.budget_units:
            raise BudgetExceeded(f"store {bound.store_id} exceeded its budget")
        phases.append(
            MetricsReport(
                scenario="elderly_24h",
                interval_s=store.interval_s,
                strategy=store.strategy.value,
                seed=seed,
                duration_s=DAY_S,
                store_id=bound.store_id,
                peak_units=store.peak_units,
                final_units=store.bytes_used(),
                point_count=store.point_count(),
                automations_fired=home.engine.fired_count,
                events_published=home.bus.published_total,
                event_breakdown={},
                series=list(bound.series),
            )
        )
    overall = {
        "seed": seed,
        "duration_s": DAY_S,
        "stores": len(bounds),
        **home.event_totals(),
    }
    return ElderlyBundle(phases, overall)


def _five_scenario_automations(cfg: ValidatedConfig) -> list[Automation]:
    designated = {
        "warm_room_dims_lights",
        "manual_test_bulb",
        "morning_scene_at_seven",
        "evening_lockdown",
        "complex_presence_comfort",
    }
    return [a for a in cfg.automations if a.id in designated]
