"""Event bus, entity registry, state machine, and service registry.

This is the backbone the rest of the package plugs into. Devices,
automations, stores, and the gateway communicate exclusively through
published events and registered services, so no component ever holds a
reference to another; they only need to know the bus.

Delivery is synchronous and in-order per subscriber. All mutation happens
on a single owning thread (the harness loop or the gateway's event loop);
events and state values are plain immutable data, safe to hand across
threads whole.
"""

from __future__ import annotations

import logging
import math
import re
from collections import deque
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .errors import (
    DuplicateId,
    DuplicateService,
    HandlerFailure,
    MalformedId,
    TypeMismatch,
    UnknownEntity,
    UnknownService,
)

logger = logging.getLogger(__name__)

Scalar = bool | int | float | str | None

# Well-known event types. Anything else (panic_pressed, manual_test, ...)
# is an injected application event.
STATE_CHANGED = "state_changed"
SERVICE_EXECUTED = "service_executed"
AUTOMATION_FIRED = "automation_fired"
WILDCARD = "*"

_ENTITY_ID_RE = re.compile(r"^[a-z0-9_]+\.[a-z0-9_]+$")


def validate_entity_id(value: str) -> str:
    """Check ``<domain>.<object_id>`` shape and return the id unchanged.

    Raises:
        MalformedId: if the id is not lowercase letters, digits, and
            underscores split by exactly one dot.
    """
    if not isinstance(value, str) or not _ENTITY_ID_RE.match(value):
        raise MalformedId(f"bad entity id {value!r}; expected <domain>.<object_id>")
    return value


def domain_of(entity_id: str) -> str:
    """Domain part of an entity id (``light.bulb_1`` -> ``light``)."""
    return entity_id.split(".", 1)[0]


# --- state values ---------------------------------------------------------


@dataclass(frozen=True)
class Binary:
    """On/off style state."""

    flag: bool


@dataclass(frozen=True)
class Numeric:
    """Measured value, optionally with a unit. Must be finite."""

    value: float
    unit: str | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"numeric state must be finite, got {self.value!r}")


@dataclass(frozen=True)
class Unavailable:
    """Sensor has not reported yet (or dropped out)."""


UNAVAILABLE = Unavailable()

StateValue = Binary | Numeric | Unavailable


def state_to_payload(state: StateValue) -> dict[str, Any]:
    """Serialize a state value into a plain-scalar mapping."""
    if isinstance(state, Binary):
        return {"type": "binary", "value": state.flag}
    if isinstance(state, Numeric):
        out: dict[str, Any] = {"type": "numeric", "value": state.value}
        if state.unit is not None:
            out["unit"] = state.unit
        return out
    return {"type": "unavailable"}


def state_from_payload(raw: Mapping[str, Any]) -> StateValue:
    """Inverse of :func:`state_to_payload`."""
    kind = raw.get("type")
    if kind == "binary":
        return Binary(bool(raw["value"]))
    if kind == "numeric":
        return Numeric(float(raw["value"]), raw.get("unit"))
    if kind == "unavailable":
        return UNAVAILABLE
    raise ValueError(f"bad state payload {raw!r}")


class DeviceKind(str, Enum):
    BULB = "bulb"
    SPOTLIGHT = "spotlight"
    MOTION_SENSOR = "motion_sensor"
    SWITCH = "switch"
    SMOKE_SENSOR = "smoke_sensor"
    CO_SENSOR = "co_sensor"
    FLOOD_SENSOR = "flood_sensor"
    PANIC_BUTTON = "panic_button"
    DOOR_SENSOR = "door_sensor"
    OUTLET = "outlet"
    TEMPERATURE_SENSOR = "temperature_sensor"


# Kinds whose state is a measurement rather than a flag.
NUMERIC_KINDS = frozenset({DeviceKind.TEMPERATURE_SENSOR})

# Sensors whose active state should alarm on the dashboard.
ALARM_KINDS = frozenset(
    {
        DeviceKind.DOOR_SENSOR,
        DeviceKind.SMOKE_SENSOR,
        DeviceKind.CO_SENSOR,
        DeviceKind.FLOOD_SENSOR,
        DeviceKind.PANIC_BUTTON,
    }
)


def initial_state_for(kind: DeviceKind) -> StateValue:
    """Binary kinds start off; measurement kinds start unavailable."""
    return UNAVAILABLE if kind in NUMERIC_KINDS else Binary(False)


def state_compatible(kind: DeviceKind, value: StateValue) -> bool:
    """Unavailable is always legal; otherwise the variant must match the kind."""
    if isinstance(value, Unavailable):
        return True
    if kind in NUMERIC_KINDS:
        return isinstance(value, Numeric)
    return isinstance(value, Binary)


@dataclass
class Entity:
    """One registered device facet. Kind is fixed after registration."""

    id: str
    kind: DeviceKind
    name: str
    state: StateValue
    attributes: dict[str, Scalar] = field(default_factory=dict)
    last_changed_ms: int = 0


@dataclass(frozen=True)
class Event:
    """Typed, timestamped message on the bus.

    ``timestamp`` is simulated milliseconds since the scenario epoch;
    ``origin`` is an entity id or ``"system"``.
    """

    event_type: str
    timestamp: int
    origin: str
    payload: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class StateChange:
    entity_id: str
    old: StateValue
    new: StateValue
    timestamp: int


@dataclass(frozen=True)
class SubscriptionHandle:
    token: int
    event_type: str


Listener = Callable[[Event], None]


class EventBus:
    """Synchronous in-process publish-subscribe channel.

    Publishing never fails: with zero subscribers it simply reports zero
    deliveries. Each subscriber sees events of its type in publish order.
    Listener exceptions are logged and swallowed so one consumer can never
    break a producer.
    """

    def __init__(self):
        self._subscribers: dict[str, list[tuple[int, Listener]]] = {}
        self._next_token = 1
        self._published = 0
        self._queue: deque[tuple[Event, list[tuple[int, Listener]]]] = deque()
        self._delivering = False

    @property
    def published_total(self) -> int:
        return self._published

    def subscribe(self, event_type: str, listener: Listener) -> SubscriptionHandle:
        """Receive every subsequent event of ``event_type`` (``"*"`` for all)."""
        if not event_type:
            raise ValueError("event_type must be non-empty")
        handle = SubscriptionHandle(self._next_token, event_type)
        self._next_token += 1
        self._subscribers.setdefault(event_type, []).append((handle.token, listener))
        return handle

    def unsubscribe(self, handle: SubscriptionHandle) -> None:
        listeners = self._subscribers.get(handle.event_type, [])
        self._subscribers[handle.event_type] = [
            entry for entry in listeners if entry[0] != handle.token
        ]

    def publish(self, event: Event) -> int:
        """Deliver to all matching subscribers; returns how many received it.

        Delivery is queued FIFO: an event published from inside a listener
        is delivered after the current event finishes, so every subscriber
        observes the same global order.
        """
        if not event.event_type:
            raise ValueError("event must carry a type")
        self._published += 1
        # Snapshot targets now: a listener subscribing mid-delivery does not
        # see this event.
        targets = list(self._subscribers.get(event.event_type, ()))
        if event.event_type != WILDCARD:
            targets += list(self._subscribers.get(WILDCARD, ()))
        self._queue.append((event, targets))
        delivered = len(targets)
        if self._delivering:
            return delivered
        self._delivering = True
        try:
            while self._queue:
                queued, queued_targets = self._queue.popleft()
                for _token, listener in queued_targets:
                    try:
                        listener(queued)
                    except Exception:
                        logger.exception("listener failed on %r", queued.event_type)
        finally:
            self._delivering = False
        return delivered


class EntityRegistry:
    """Authoritative store of entities and their current states.

    Every accepted state transition publishes exactly one ``state_changed``
    event carrying the old and new values, even when they are equal; edge
    detection is the automation layer's job.
    """

    def __init__(self, bus: EventBus):
        self._bus = bus
        self._entities: dict[str, Entity] = {}
        self.changes_published = 0

    def __len__(self) -> int:
        return len(self._entities)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._entities

    def register(self, entity: Entity) -> str:
        validate_entity_id(entity.id)
        if entity.id in self._entities:
            raise DuplicateId(f"entity {entity.id!r} already registered")
        if not state_compatible(entity.kind, entity.state):
            raise TypeMismatch(
                f"initial state {entity.state!r} incompatible with kind {entity.kind.value}"
            )
        self._entities[entity.id] = entity
        return entity.id

    def get(self, entity_id: str) -> Entity:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise UnknownEntity(f"no entity {entity_id!r}") from None

    def get_state(self, entity_id: str) -> StateValue:
        return self.get(entity_id).state

    def enumerate(self) -> list[Entity]:
        """All entities in registration order."""
        return list(self._entities.values())

    def snapshot(self) -> dict[str, StateValue]:
        """Immutable view of current states, safe to hand to rule evaluation."""
        return {eid: e.state for eid, e in self._entities.items()}

    def set_state(
        self,
        entity_id: str,
        value: StateValue,
        t_ms: int,
        attributes: Mapping[str, Scalar] | None = None,
    ) -> StateChange:
        entity = self.get(entity_id)
        if not state_compatible(entity.kind, value):
            raise TypeMismatch(
                f"{entity_id}: {type(value).__name__} state not valid for {entity.kind.value}"
            )
        old = entity.state
        entity.state = value
        entity.last_changed_ms = t_ms
        if attributes:
            entity.attributes.update(attributes)
        change = StateChange(entity_id, old, value, t_ms)
        self.changes_published += 1
        self._bus.publish(
            Event(
                STATE_CHANGED,
                t_ms,
                entity_id,
                {
                    "entity_id": entity_id,
                    "old": state_to_payload(old),
                    "new": state_to_payload(value),
                },
            )
        )
        return change


@dataclass
class ServiceResult:
    ok: bool = True
    message: str = ""


# Handler contract: (target entity id, call data) -> result, or None for plain ok.
ServiceHandler = Callable[[str, dict], "ServiceResult | None"]


@dataclass(frozen=True)
class ServiceDescriptor:
    domain: str
    name: str
    handler: ServiceHandler


class ServiceRegistry:
    """Catalog of callable device-control operations keyed by (domain, name)."""

    def __init__(self, bus: EventBus, entities: EntityRegistry):
        self._bus = bus
        self._entities = entities
        self._services: dict[tuple[str, str], ServiceDescriptor] = {}
        self.calls_published = 0

    def register(self, desc: ServiceDescriptor) -> None:
        key = (desc.domain, desc.name)
        if key in self._services:
            raise DuplicateService(f"service {desc.domain}.{desc.name} already registered")
        self._services[key] = desc

    def has(self, domain: str, name: str) -> bool:
        return (domain, name) in self._services

    def list_services(self) -> list[tuple[str, str]]:
        return sorted(self._services)

    def call(
        self,
        domain: str,
        name: str,
        target: str,
        data: Mapping[str, Scalar] | None = None,
        t_ms: int = 0,
    ) -> ServiceResult:
        """Run the handler, then publish one ``service_executed`` event.

        Raises:
            UnknownService: no such (domain, name).
            UnknownEntity: target not registered.
            HandlerFailure: the handler raised; carries its message.
        """
        desc = self._services.get((domain, name))
        if desc is None:
            raise UnknownService(f"no service {domain}.{name}")
        self._entities.get(target)  # raises UnknownEntity
        try:
            result = desc.handler(target, dict(data or {}))
        except Exception as exc:
            raise HandlerFailure(f"{domain}.{name} on {target}: {exc}") from exc
        if result is None:
            result = ServiceResult()
        self.calls_published += 1
        self._bus.publish(
            Event(
                SERVICE_EXECUTED,
                t_ms,
                target,
                {"domain": domain, "service": name, "target": target},
            )
        )
        return result
