"""Assembles a running home: bus, registries, engine, fleet, and stores.

A :class:`Home` owns one world. All mutation happens on whichever single
thread steps it (the harness loop or the gateway's event loop); reads hand
out plain-data snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automation import AutomationEngine
from .config import ValidatedConfig
from .core import (
    NUMERIC_KINDS,
    STATE_CHANGED,
    Binary,
    DeviceKind,
    Entity,
    EntityRegistry,
    Event,
    EventBus,
    Numeric,
    ServiceDescriptor,
    ServiceRegistry,
    domain_of,
    initial_state_for,
    state_from_payload,
)
from .devices import (
    DeviceFleet,
    DeviceSim,
    ScenarioScript,
    VirtualClock,
    temperature_at,
)
from .errors import BudgetExceeded
from .memstore import (
    LOG_STRATEGIES,
    LogEntry,
    Sample,
    Store,
    select_strategy,
    new_store,
)

# Fixed-width log details: one entry costs 32 + 48 = 80 units, so the
# default 10240-unit budget holds exactly 128 entries, the basic log's cap.
LOG_DETAIL_WIDTH = 48


def format_log_detail(event: Event) -> str:
    """Render an event as a fixed-width log line."""
    payload = event.payload or {}
    if event.event_type == STATE_CHANGED and "new" in payload:
        state = state_from_payload(payload["new"])
        if isinstance(state, Binary):
            summary = "on" if state.flag else "off"
        elif isinstance(state, Numeric):
            summary = f"{state.value:.2f}"
        else:
            summary = "unavailable"
    else:
        summary = event.event_type
    line = f"{event.event_type} {event.origin} -> {summary}"
    return line[:LOG_DETAIL_WIDTH].ljust(LOG_DETAIL_WIDTH)


@dataclass
class BoundStore:
    """A telemetry store wired to the bus.

    Records matching events into the store and tracks the bytes_used
    series after every record (exact high-water sampling). ``entity``
    of None matches any origin; ``align_s`` keeps only events on that
    cadence; the window bounds restrict to a phase of the day.
    """

    store_id: str
    store: Store
    entity: str | tuple[str, ...] | None = None
    event_types: tuple[str, ...] = (STATE_CHANGED,)
    align_s: int | None = None
    window_from_s: float | None = None
    window_to_s: float | None = None
    series: list[tuple[float, int]] = field(default_factory=list)
    records: int = 0

    def matches(self, event: Event) -> bool:
        if event.event_type not in self.event_types:
            return False
        if isinstance(self.entity, str):
            if event.origin != self.entity:
                return False
        elif self.entity is not None and event.origin not in self.entity:
            return False
        t_s = event.timestamp / 1000.0
        if self.window_from_s is not None and t_s < self.window_from_s:
            return False
        if self.window_to_s is not None and t_s > self.window_to_s:
            return False
        if self.align_s is not None and event.timestamp % (self.align_s * 1000) != 0:
            return False
        return True

    def offer(self, event: Event) -> None:
        if not self.matches(event):
            return
        t_s = event.timestamp / 1000.0
        if self.store.strategy in LOG_STRATEGIES:
            item = LogEntry(t_s, event.event_type, event.origin, format_log_detail(event))
        else:
            payload = event.payload or {}
            state = state_from_payload(payload["new"]) if "new" in payload else None
            if not isinstance(state, Numeric):
                return  # sample stores keep measurements only
            item = Sample(t_s, state.value)
        self.store.record(item)
        self.records += 1
        if self.store.bytes_used() > self.store.budget_units:  # pragma: no cover
            raise BudgetExceeded(f"store {self.store_id} exceeded its budget")
        if self.series and self.series[-1][0] == t_s:
            self.series[-1] = (t_s, self.store.bytes_used())
        else:
            self.series.append((t_s, self.store.bytes_used()))


class Home:
    """One fully wired world on a virtual clock."""

    def __init__(self, seed: int = 0, speed: float = 1.0):
        self.seed = seed
        self.clock = VirtualClock(speed)
        self.bus = EventBus()
        self.entities = EntityRegistry(self.bus)
        self.services = ServiceRegistry(self.bus, self.entities)
        self.engine = AutomationEngine(self.bus, self.entities, self.services)
        self.fleet: DeviceFleet | None = None
        self.stores: dict[str, BoundStore] = {}

    # -- wiring ------------------------------------------------------------

    def register_sims(
        self,
        sims: list[DeviceSim],
        script: ScenarioScript | None = None,
        initials: dict[str, object] | None = None,
    ) -> None:
        """Register the simulated devices as entities and attach the fleet."""
        initials = initials or {}
        for sim in sims:
            state = initials.get(sim.entity_id, initial_state_for(sim.kind))
            self.entities.register(Entity(sim.entity_id, sim.kind, sim.name, state))
        self.fleet = DeviceFleet(self.clock, self.bus, self.entities, sims, self.seed, script)

    def install_standard_services(self) -> None:
        """turn_on / turn_off / set_value handlers for every present domain."""
        binary_domains = sorted(
            {
                domain_of(e.id)
                for e in self.entities.enumerate()
                if e.kind not in NUMERIC_KINDS
            }
        )
        numeric_domains = sorted(
            {
                domain_of(e.id)
                for e in self.entities.enumerate()
                if e.kind in NUMERIC_KINDS
            }
        )

        def make_setter(flag: bool):
            def handler(target: str, data: dict):
                self.entities.set_state(target, Binary(flag), self.clock.now_ms, data)
                return None

            return handler

        def set_value(target: str, data: dict):
            value = float(data.pop("value"))
            unit = data.pop("unit", None)
            self.entities.set_state(target, Numeric(value, unit), self.clock.now_ms, data)
            return None

        for domain in binary_domains:
            if not self.services.has(domain, "turn_on"):
                self.services.register(ServiceDescriptor(domain, "turn_on", make_setter(True)))
                self.services.register(ServiceDescriptor(domain, "turn_off", make_setter(False)))
        for domain in numeric_domains:
            if not self.services.has(domain, "set_value"):
                self.services.register(ServiceDescriptor(domain, "set_value", set_value))

    def attach_store(
        self,
        store_id: str,
        store: Store,
        entity: str | tuple[str, ...] | None,
        event_types: tuple[str, ...] = (STATE_CHANGED,),
        align_s: int | None = None,
        window_s: tuple[float | None, float | None] = (None, None),
    ) -> BoundStore:
        bound = BoundStore(
            store_id,
            store,
            entity,
            event_types,
            align_s,
            window_s[0],
            window_s[1],
        )
        self.stores[store_id] = bound
        for event_type in event_types:
            self.bus.subscribe(event_type, bound.offer)
        return bound

    def start_engine(self) -> None:
        self.engine.attach_to_bus()

    # -- stepping -------------------------------------------------------------

    def step(self, dt_ms: int) -> None:
        """Advance the world: devices emit, then time triggers fire."""
        prev = self.clock.now_ms
        if self.fleet is not None:
            self.fleet.tick(dt_ms)
        else:
            self.clock.advance(dt_ms)
        self.engine.advance_time(prev, self.clock.now_ms)

    def run_for(self, duration_s: float, step_s: float) -> None:
        """Step the clock in fixed increments until duration has elapsed."""
        steps = int(round(duration_s / step_s))
        dt_ms = int(round(step_s * 1000))
        for _ in range(steps):
            self.step(dt_ms)

    # -- reporting ---------------------------------------------------------------

    def metrics(self) -> list[dict]:
        return [bound.store.metrics(sid) for sid, bound in self.stores.items()]

    def event_totals(self) -> dict[str, int]:
        """Independent per-source tallies; their sum equals bus publishes."""
        injected = self.fleet.injections if self.fleet else 0
        emissions = self.fleet.emissions if self.fleet else 0
        return {
            "events_published": self.bus.published_total,
            "state_changed": self.entities.changes_published,
            "service_executed": self.services.calls_published,
            "automation_fired": self.engine.fired_count,
            "injected": injected,
            "device_emissions": emissions,  # informational subset of state_changed
        }


def build_home(
    cfg: ValidatedConfig,
    seed: int = 0,
    speed: float = 1.0,
    extra_sims: bool = True,
) -> Home:
    """Construct a Home from a validated config document.

    Entities come from the config; temperature sensors get the diurnal
    signal generator when ``extra_sims`` is on. Stores are created via the
    scenario/interval strategy matrix and bound to their entities.
    """
    home = Home(seed=seed, speed=speed)
    sims = []
    for e in cfg.entities:
        sim = DeviceSim(e.id, e.kind, e.name)
        if extra_sims and e.kind is DeviceKind.TEMPERATURE_SENSOR:
            sim.cadence_s = 15
            sim.generator = lambda t_s, s: Numeric(temperature_at(t_s, s), "°C")
        sims.append(sim)
    script = ScenarioScript("config", seed, list(cfg.script)) if cfg.script else None
    initials = {e.id: e.initial for e in cfg.entities if e.initial is not None}
    home.register_sims(sims, script, initials)
    home.install_standard_services()
    for scene in cfg.scenes:
        home.engine.add_scene(scene)
    for automation in cfg.automations:
        home.engine.add_automation(automation)
    for sd in cfg.stores:
        strategy = select_strategy(sd.scenario, sd.interval_s)
        store = new_store(strategy, sd.interval_s, sd.budget_units)
        home.attach_store(sd.id, store, sd.entity)
    home.start_engine()
    return home
