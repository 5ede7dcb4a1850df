"""Trigger-condition-action rule engine and scene manager.

An automation fires when any of its triggers matches a stimulus (triggers
are OR-ed), all of its conditions hold against the current world snapshot
(AND-ed), and then runs its actions in order, fail-soft: one failing
action is recorded and the rest still run.

Numeric state triggers fire on threshold *crossings*, not levels: the
previous value must be on-or-below the threshold and the new value
strictly above it (symmetric for ``below``). This keeps a hovering sensor
from firing on every sample.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

from .core import (
    AUTOMATION_FIRED,
    STATE_CHANGED,
    Binary,
    EntityRegistry,
    Event,
    EventBus,
    Numeric,
    Scalar,
    ServiceRegistry,
    StateValue,
    domain_of,
    state_from_payload,
)
from .errors import AutomationDisabled, UnknownAutomation, UnknownEntity, UnknownScene
from .memstore import ScenarioKind

logger = logging.getLogger(__name__)

MS_PER_DAY = 86_400_000

# Synthetic stimulus types the engine feeds to evaluate_trigger. Not bus events.
TIME_BOUNDARY = "time_boundary"
MANUAL_STIMULUS = "manual"


# --- triggers ---------------------------------------------------------------


@dataclass(frozen=True)
class StateTrigger:
    """Fires on state_changed edges of one entity.

    At least one of ``above``, ``below``, ``to`` must be set.
    """

    entity: str
    above: float | None = None
    below: float | None = None
    to: StateValue | None = None

    def __post_init__(self):
        if self.above is None and self.below is None and self.to is None:
            raise ValueError("state trigger needs at least one of above/below/to")


@dataclass(frozen=True)
class TimeTrigger:
    """Fires at a time of day (``at_ms``) or on a period (``every_ms``)."""

    at_ms: int | None = None
    every_ms: int | None = None

    def __post_init__(self):
        if (self.at_ms is None) == (self.every_ms is None):
            raise ValueError("time trigger needs exactly one of at/every")


@dataclass(frozen=True)
class EventTrigger:
    event_type: str


Trigger = StateTrigger | TimeTrigger | EventTrigger


def _as_number(value: StateValue | None) -> float | None:
    return value.value if isinstance(value, Numeric) else None


def evaluate_trigger(trigger: Trigger, stimulus: Event, prev: StateValue | None) -> bool:
    """True iff the trigger fires on this stimulus.

    A stimulus of the wrong family never fires. ``prev`` is the entity
    state before the stimulus (used for edge detection); an unknown or
    unavailable previous value cannot establish a crossing.
    """
    if isinstance(trigger, StateTrigger):
        if stimulus.event_type != STATE_CHANGED:
            return False
        if stimulus.payload.get("entity_id") != trigger.entity:
            return False
        new = state_from_payload(stimulus.payload["new"])
        if trigger.to is not None and new == trigger.to and prev != new:
            return True
        new_num = _as_number(new)
        prev_num = _as_number(prev)
        if new_num is None or prev_num is None:
            return False
        if trigger.above is not None and prev_num <= trigger.above < new_num:
            return True
        if trigger.below is not None and prev_num >= trigger.below > new_num:
            return True
        return False

    if isinstance(trigger, TimeTrigger):
        if stimulus.event_type != TIME_BOUNDARY:
            return False
        boundary = int(stimulus.payload["boundary_ms"])
        if trigger.at_ms is not None:
            return boundary % MS_PER_DAY == trigger.at_ms
        return boundary % trigger.every_ms == 0 and boundary > 0

    if isinstance(trigger, EventTrigger):
        return stimulus.event_type == trigger.event_type

    return False


# --- conditions --------------------------------------------------------------


@dataclass(frozen=True)
class NumericState:
    entity: str
    above: float | None = None
    below: float | None = None


@dataclass(frozen=True)
class BinaryState:
    entity: str
    equals: bool


@dataclass(frozen=True)
class TimeWindow:
    """ms-of-day window; ``after > before`` wraps past midnight."""

    after_ms: int
    before_ms: int


@dataclass(frozen=True)
class All:
    items: tuple

    def __post_init__(self):
        if not self.items:
            raise ValueError("All requires at least one condition")


@dataclass(frozen=True)
class AnyOf:
    items: tuple

    def __post_init__(self):
        if not self.items:
            raise ValueError("Any requires at least one condition")


@dataclass(frozen=True)
class Not:
    inner: "Condition"


Condition = NumericState | BinaryState | TimeWindow | All | AnyOf | Not


def evaluate_condition(
    cond: Condition, snapshot: dict[str, StateValue], now_ms: int
) -> bool:
    """Evaluate one condition against a state snapshot at a moment in time."""
    if isinstance(cond, NumericState):
        if cond.entity not in snapshot:
            raise UnknownEntity(f"condition references unknown entity {cond.entity!r}")
        value = _as_number(snapshot[cond.entity])
        if value is None:
            return False
        if cond.above is not None and not value > cond.above:
            return False
        if cond.below is not None and not value < cond.below:
            return False
        return True
    if isinstance(cond, BinaryState):
        if cond.entity not in snapshot:
            raise UnknownEntity(f"condition references unknown entity {cond.entity!r}")
        state = snapshot[cond.entity]
        return isinstance(state, Binary) and state.flag == cond.equals
    if isinstance(cond, TimeWindow):
        m = now_ms % MS_PER_DAY
        if cond.after_ms <= cond.before_ms:
            return cond.after_ms <= m < cond.before_ms
        return m >= cond.after_ms or m < cond.before_ms
    if isinstance(cond, All):
        return all(evaluate_condition(c, snapshot, now_ms) for c in cond.items)
    if isinstance(cond, AnyOf):
        return any(evaluate_condition(c, snapshot, now_ms) for c in cond.items)
    if isinstance(cond, Not):
        return not evaluate_condition(cond.inner, snapshot, now_ms)
    raise TypeError(f"unknown condition {type(cond).__name__}")


# --- actions, automations, scenes ---------------------------------------------


@dataclass(frozen=True)
class CallService:
    domain: str
    name: str
    target: str
    data: tuple[tuple[str, Scalar], ...] = ()

    def data_dict(self) -> dict[str, Scalar]:
        return dict(self.data)


@dataclass(frozen=True)
class ActivateScene:
    scene_id: str


Action = CallService | ActivateScene


@dataclass(frozen=True)
class SceneTarget:
    entity: str
    state: StateValue
    attributes: tuple[tuple[str, Scalar], ...] = ()


@dataclass(frozen=True)
class Scene:
    """Named bundle of desired entity states, applied in declaration order."""

    id: str
    name: str
    targets: tuple[SceneTarget, ...]

    def __post_init__(self):
        if not self.targets:
            raise ValueError(f"scene {self.id!r} has no targets")


@dataclass(frozen=True)
class Automation:
    id: str
    triggers: tuple[Trigger, ...]
    conditions: tuple[Condition, ...]  # implicit All
    actions: tuple[Action, ...]
    enabled: bool = True
    scenario_kind: ScenarioKind = ScenarioKind.COMPLEX_ROOM

    def __post_init__(self):
        if not self.triggers or not self.actions:
            raise ValueError(f"automation {self.id!r} needs >=1 trigger and >=1 action")


class FireStatus(str, Enum):
    EXECUTED = "executed"
    SKIPPED = "skipped"


@dataclass
class ActionResult:
    action: Action
    ok: bool
    error: str = ""


@dataclass
class FireOutcome:
    automation_id: str
    status: FireStatus
    t_ms: int
    action_results: list[ActionResult] = field(default_factory=list)

    @property
    def errors(self) -> list[str]:
        return [r.error for r in self.action_results if not r.ok]


@dataclass
class SceneOutcome:
    scene_id: str
    applied: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


class AutomationEngine:
    """Evaluates rules against bus stimuli and executes their actions.

    The engine never acts spontaneously: it only runs inside
    :meth:`handle_event` (wired to the bus) and :meth:`advance_time`
    (called by whoever steps the clock).
    """

    def __init__(self, bus: EventBus, entities: EntityRegistry, services: ServiceRegistry):
        self._bus = bus
        self._entities = entities
        self._services = services
        self._automations: dict[str, Automation] = {}
        self._scenes: dict[str, Scene] = {}
        self._enabled: dict[str, bool] = {}
        self._now_ms = 0
        self.fired_count = 0
        self._depth = 0

    # -- loading -------------------------------------------------------------

    def add_automation(self, automation: Automation) -> None:
        self._automations[automation.id] = automation
        self._enabled[automation.id] = automation.enabled

    def add_scene(self, scene: Scene) -> None:
        self._scenes[scene.id] = scene

    def automations(self) -> list[Automation]:
        return list(self._automations.values())

    def scenes(self) -> list[Scene]:
        return list(self._scenes.values())

    def get_automation(self, automation_id: str) -> Automation:
        try:
            return self._automations[automation_id]
        except KeyError:
            raise UnknownAutomation(f"no automation {automation_id!r}") from None

    def is_enabled(self, automation_id: str) -> bool:
        self.get_automation(automation_id)
        return self._enabled[automation_id]

    def set_enabled(self, automation_id: str, enabled: bool) -> None:
        self.get_automation(automation_id)
        self._enabled[automation_id] = enabled

    # -- clock ----------------------------------------------------------------

    def attach_to_bus(self) -> None:
        """Start reacting to every published event."""
        self._bus.subscribe("*", self.handle_event)

    def advance_time(self, prev_ms: int, now_ms: int) -> list[FireOutcome]:
        """Fire time triggers whose boundaries lie in ``(prev_ms, now_ms]``."""
        self._now_ms = now_ms
        boundaries: list[tuple[int, str, Automation]] = []
        for automation in self._automations.values():
            if not self._enabled[automation.id]:
                continue
            for trigger in automation.triggers:
                if not isinstance(trigger, TimeTrigger):
                    continue
                for b in _boundaries_between(trigger, prev_ms, now_ms):
                    boundaries.append((b, automation.id, automation))
        outcomes = []
        for b, _aid, automation in sorted(boundaries, key=lambda x: (x[0], x[1])):
            stimulus = Event(TIME_BOUNDARY, b, "system", {"boundary_ms": b})
            outcomes.append(self.fire(automation, stimulus))
        return outcomes

    # -- firing ----------------------------------------------------------------

    def handle_event(self, event: Event) -> None:
        """Bus listener: route a stimulus through every enabled automation."""
        if event.event_type == AUTOMATION_FIRED:
            return  # firing is a report, not a stimulus; avoids trivial loops
        self._now_ms = max(self._now_ms, event.timestamp)
        prev: StateValue | None = None
        if event.event_type == STATE_CHANGED:
            prev = state_from_payload(event.payload["old"])
        for automation in list(self._automations.values()):
            if not self._enabled[automation.id]:
                continue
            if any(evaluate_trigger(t, event, prev) for t in automation.triggers):
                self.fire(automation, event)

    def fire(self, automation: Automation, stimulus: Event) -> FireOutcome:
        """Check conditions, then run actions in order (fail-soft)."""
        t = max(stimulus.timestamp, self._now_ms)
        snapshot = self._entities.snapshot()
        try:
            conditions_hold = all(
                evaluate_condition(c, snapshot, t) for c in automation.conditions
            )
        except UnknownEntity as exc:
            logger.warning("automation %s condition error: %s", automation.id, exc)
            conditions_hold = False
        if not conditions_hold:
            return FireOutcome(automation.id, FireStatus.SKIPPED, t)
        return self._execute(automation, t)

    def manual_trigger(self, automation_id: str, skip_conditions: bool = False) -> FireOutcome:
        """User-initiated run for testing: bypasses trigger matching.

        Raises:
            UnknownAutomation: id not loaded.
            AutomationDisabled: automation is disabled.
        """
        automation = self.get_automation(automation_id)
        if not self._enabled[automation_id]:
            raise AutomationDisabled(f"automation {automation_id!r} is disabled")
        if skip_conditions:
            return self._execute(automation, self._now_ms)
        return self.fire(automation, Event(MANUAL_STIMULUS, self._now_ms, "system"))

    def _execute(self, automation: Automation, t: int) -> FireOutcome:
        outcome = FireOutcome(automation.id, FireStatus.EXECUTED, t)
        self._depth += 1
        try:
            if self._depth > 16:
                raise RecursionError(f"automation cascade too deep at {automation.id!r}")
            for action in automation.actions:
                try:
                    self._run_action(action, t)
                    outcome.action_results.append(ActionResult(action, True))
                except Exception as exc:
                    outcome.action_results.append(ActionResult(action, False, str(exc)))
        finally:
            self._depth -= 1
        self.fired_count += 1
        self._bus.publish(
            Event(
                AUTOMATION_FIRED,
                t,
                "system",
                {"automation_id": automation.id, "status": outcome.status.value},
            )
        )
        return outcome

    def _run_action(self, action: Action, t: int) -> None:
        if isinstance(action, CallService):
            self._services.call(action.domain, action.name, action.target, action.data_dict(), t)
        elif isinstance(action, ActivateScene):
            outcome = self.activate_scene(action.scene_id)
            if outcome.errors:
                raise RuntimeError("; ".join(outcome.errors))
        else:
            raise TypeError(f"unknown action {type(action).__name__}")

    # -- scenes -----------------------------------------------------------------

    def activate_scene(self, scene_id: str) -> SceneOutcome:
        """Apply every target state via service calls, in declaration order.

        Idempotent: targets are absolute states, so re-activation lands on
        the same snapshot. Per-target errors are recorded and the rest of
        the targets are still applied.
        """
        scene = self._scenes.get(scene_id)
        if scene is None:
            raise UnknownScene(f"no scene {scene_id!r}")
        outcome = SceneOutcome(scene_id)
        for target in scene.targets:
            try:
                self._apply_target(target)
                outcome.applied.append(target.entity)
            except Exception as exc:
                outcome.errors.append(f"{target.entity}: {exc}")
        return outcome

    def _apply_target(self, target: SceneTarget) -> None:
        domain = domain_of(target.entity)
        data = dict(target.attributes)
        if isinstance(target.state, Binary):
            service = "turn_on" if target.state.flag else "turn_off"
        elif isinstance(target.state, Numeric):
            service = "set_value"
            data["value"] = target.state.value
            if target.state.unit is not None:
                data["unit"] = target.state.unit
        else:
            raise ValueError(f"scene target {target.entity} has no actionable state")
        self._services.call(domain, service, target.entity, data, self._now_ms)


def _boundaries_between(trigger: TimeTrigger, prev_ms: int, now_ms: int) -> list[int]:
    """All trigger boundaries in the half-open window (prev_ms, now_ms]."""
    out = []
    if trigger.every_ms is not None:
        period = trigger.every_ms
        first = (prev_ms // period + 1) * period
        b = first
        while b <= now_ms:
            if b > 0:
                out.append(b)
            b += period
    else:
        at = trigger.at_ms
        day = prev_ms // MS_PER_DAY
        while True:
            b = day * MS_PER_DAY + at
            if b > now_ms:
                break
            if b > prev_ms:
                out.append(b)
            day += 1
    return out
