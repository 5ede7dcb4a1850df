"""Deterministic simulated device fleet driven by a virtual clock.

The fleet mirrors a small apartment: two light bulbs, a spotlight, a
motion sensor, three wall switches, smoke / carbon-monoxide / flood
sensors, a panic button, a door sensor, an electrical outlet, plus a
room temperature sensor. Sensors emit on fixed cadences; everything else
is driven by scripted timelines or user injection.

Reproducibility contract: (seed, script, duration) fully determine the
emitted event sequence. There is no wall-clock dependence anywhere; time
only moves when someone calls ``advance``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable

from .core import (
    STATE_CHANGED,
    Binary,
    DeviceKind,
    Entity,
    EntityRegistry,
    Event,
    EventBus,
    Numeric,
    StateValue,
    initial_state_for,
    state_to_payload,
)

SECONDS_PER_DAY = 86_400

TEMPERATURE_ENTITY = "sensor.temperature"
MOTION_ENTITY = "binary_sensor.motion"
DOOR_ENTITY = "binary_sensor.door"
PANIC_ENTITY = "button.panic"


class VirtualClock:
    """Simulated milliseconds since the scenario epoch; never goes back."""

    def __init__(self, speed: float = 1.0):
        self.now_ms = 0
        self.speed = speed  # acceleration factor, used only by live serving

    @property
    def now_s(self) -> float:
        return self.now_ms / 1000.0

    def advance(self, dt_ms: int) -> int:
        if dt_ms < 0:
            raise ValueError("clock cannot move backwards")
        self.now_ms += dt_ms
        return self.now_ms


@dataclass
class DeviceSim:
    """One simulated device: optional cadence and signal generator."""

    entity_id: str
    kind: DeviceKind
    name: str
    cadence_s: int | None = None
    generator: Callable[[int, int], StateValue] | None = None  # (t_s, seed) -> state


@dataclass(frozen=True)
class ScriptEvent:
    """One scripted stimulus: either a state set or a raw published event."""

    at_ms: int
    kind: str  # "set_state" | "publish"
    entity: str = ""
    state: StateValue | None = None
    event_type: str = ""
    payload: tuple[tuple[str, object], ...] = ()


@dataclass
class ScenarioScript:
    name: str
    seed: int
    timeline: list[ScriptEvent] = field(default_factory=list)
    duration_ms: int = SECONDS_PER_DAY * 1000

    def __post_init__(self):
        self.timeline.sort(key=lambda e: e.at_ms)


def temperature_at(t_s: float, seed: int, noise: bool = True) -> float:
    """Room temperature model: diurnal sinusoid 21 +/- 4 degC plus bounded noise.

    Stateless and deterministic: the same (t_s, seed) always yields the
    same value, so replays and accelerated runs agree exactly.
    """
    base = 21.0 + 4.0 * math.sin(2.0 * math.pi * t_s / SECONDS_PER_DAY)
    if not noise:
        return base
    rng = random.Random(seed * 1_000_003 + int(t_s * 1000))
    return base + rng.uniform(-0.2, 0.2)


def activity_at(t_s: float, seed: int) -> float:
    """Synthetic occupant-activity level in [0, 1], peaking mid-day."""
    base = 0.5 + 0.5 * math.sin(2.0 * math.pi * (t_s - 21_600) / SECONDS_PER_DAY)
    rng = random.Random(seed * 9_176_471 + int(t_s * 1000))
    return min(1.0, max(0.0, base + rng.uniform(-0.05, 0.05)))


def build_fleet() -> list[DeviceSim]:
    """The managed device fleet: 13 home devices plus the temperature sensor."""
    sims = [
        DeviceSim("light.bulb_1", DeviceKind.BULB, "Living room bulb"),
        DeviceSim("light.bulb_2", DeviceKind.BULB, "Bedroom bulb"),
        DeviceSim("light.spotlight", DeviceKind.SPOTLIGHT, "Red spotlight"),
        DeviceSim(MOTION_ENTITY, DeviceKind.MOTION_SENSOR, "Motion sensor"),
        DeviceSim("switch.wall_1", DeviceKind.SWITCH, "Wall switch 1"),
        DeviceSim("switch.wall_2", DeviceKind.SWITCH, "Wall switch 2"),
        DeviceSim("switch.wall_3", DeviceKind.SWITCH, "Wall switch 3"),
        DeviceSim("binary_sensor.smoke", DeviceKind.SMOKE_SENSOR, "Smoke sensor"),
        DeviceSim("binary_sensor.carbon_monoxide", DeviceKind.CO_SENSOR, "CO sensor"),
        DeviceSim("binary_sensor.flood", DeviceKind.FLOOD_SENSOR, "Flood sensor"),
        DeviceSim(PANIC_ENTITY, DeviceKind.PANIC_BUTTON, "Panic button"),
        DeviceSim(DOOR_ENTITY, DeviceKind.DOOR_SENSOR, "Door sensor"),
        DeviceSim("switch.outlet", DeviceKind.OUTLET, "Electrical outlet"),
        DeviceSim(
            TEMPERATURE_ENTITY,
            DeviceKind.TEMPERATURE_SENSOR,
            "Room temperature",
            cadence_s=15,
            generator=lambda t_s, seed: Numeric(temperature_at(t_s, seed), "°C"),
        ),
    ]
    return sims


def fleet_entities(sims: list[DeviceSim]) -> list[Entity]:
    return [
        Entity(sim.entity_id, sim.kind, sim.name, initial_state_for(sim.kind))
        for sim in sims
    ]


class DeviceFleet:
    """Steps the simulated devices against a virtual clock.

    Emission order within one tick is (time, entity id) lexicographic, so
    two runs of the same scenario produce identical event sequences.
    """

    def __init__(
        self,
        clock: VirtualClock,
        bus: EventBus,
        entities: EntityRegistry,
        sims: list[DeviceSim],
        seed: int = 0,
        script: ScenarioScript | None = None,
    ):
        self.clock = clock
        self.bus = bus
        self.entities = entities
        self.sims = sorted(sims, key=lambda s: s.entity_id)
        self.seed = seed
        self.script = script
        self._script_pos = 0
        self.emissions = 0  # cadence-driven state sets
        self.injections = 0  # raw events published (panic presses etc.)

    def tick(self, dt_ms: int) -> list[Event]:
        """Advance the clock, emitting every cadence and script event due.

        Returns the state_changed / injected events produced, in order.
        """
        if dt_ms < 0:
            raise ValueError("dt_ms must be >= 0")
        t0 = self.clock.now_ms
        t1 = self.clock.advance(dt_ms)
        due: list[tuple[int, str, int, object]] = []  # (t, entity, seq, action)
        seq = 0
        for sim in self.sims:
            if sim.cadence_s is None or sim.generator is None:
                continue
            period = sim.cadence_s * 1000
            b = (t0 // period + 1) * period
            while b <= t1:
                due.append((b, sim.entity_id, seq, sim))
                seq += 1
                b += period
        if self.script is not None:
            while (
                self._script_pos < len(self.script.timeline)
                and self.script.timeline[self._script_pos].at_ms <= t1
            ):
                ev = self.script.timeline[self._script_pos]
                if ev.at_ms > t0:
                    due.append((ev.at_ms, ev.entity or "system", seq, ev))
                    seq += 1
                self._script_pos += 1

        produced: list[Event] = []
        for t, entity_id, _seq, action in sorted(due, key=lambda d: (d[0], d[1], d[2])):
            if isinstance(action, DeviceSim):
                state = action.generator(t // 1000, self.seed)
                produced.append(self._set_state(action.entity_id, state, t))
                self.emissions += 1
            else:
                produced.append(self._apply_script_event(action, t))
        return produced

    def _set_state(self, entity_id: str, state: StateValue, t: int) -> Event:
        change = self.entities.set_state(entity_id, state, t)
        # Mirror of the state_changed event the registry just published.
        return Event(
            STATE_CHANGED,
            t,
            entity_id,
            {
                "entity_id": entity_id,
                "old": state_to_payload(change.old),
                "new": state_to_payload(change.new),
            },
        )

    def _apply_script_event(self, ev: ScriptEvent, t: int) -> Event:
        if ev.kind == "set_state":
            assert ev.state is not None
            event = self._set_state(ev.entity, ev.state, t)
            self.emissions += 1
            return event
        event = Event(ev.event_type, t, ev.entity or "system", dict(ev.payload))
        self.bus.publish(event)
        self.injections += 1
        return event

    def inject(self, event: Event) -> None:
        """Deliver a user-initiated event to the bus at the current sim time."""
        stamped = Event(event.event_type, self.clock.now_ms, event.origin, event.payload)
        self.bus.publish(stamped)
        self.injections += 1

    def press_panic(self) -> None:
        self.inject(Event("panic_pressed", self.clock.now_ms, PANIC_ENTITY))

    def open_door(self) -> None:
        self.entities.set_state(DOOR_ENTITY, Binary(True), self.clock.now_ms)
        self.emissions += 1
