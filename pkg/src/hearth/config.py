"""Parse, validate, and canonically emit the runtime's YAML configuration.

Document layout (all sections optional, unknown keys rejected)::

    entities:
      - id: light.bulb_1
        kind: bulb
        name: Living room bulb
        initial: {binary: false}          # or {numeric: 21.0, unit: "°C"} or unavailable
    stores:
      - id: temperature_history
        entity: sensor.temperature
        scenario: lighting_temperature
        interval_s: 15
        budget_units: 10240
    scenes:
      - id: good_morning
        name: Good morning
        targets:
          - entity: light.bulb_1
            state: {binary: true}
            attributes: {brightness: 254}
    automations:
      - id: warm_room_dims_lights
        scenario: lighting_temperature
        enabled: true
        triggers:
          - {type: state, entity: sensor.temperature, above: 25.0}
          - {type: time, at: "07:00"}    # or {type: time, every: 900}
          - {type: event, event_type: panic_pressed}
        conditions:
          - {type: numeric_state, entity: sensor.temperature, above: 20.0}
          - {type: binary_state, entity: binary_sensor.motion, equals: true}
          - {type: time_window, after: "08:00", before: "20:00"}
          - {type: not, item: {type: binary_state, entity: binary_sensor.door, equals: true}}
        actions:
          - {type: call_service, domain: light, name: turn_on,
             target: light.spotlight, data: {brightness: 80}}
          - {type: activate_scene, scene: good_morning}
    script:                               # scenario-script extension
      - {at: "10:00", type: set_state, entity: binary_sensor.door,
         state: {binary: true}}
      - {at: "10:05", type: publish, event_type: panic_pressed, origin: button.panic}

Times of day accept ``"HH:MM"`` / ``"HH:MM:SS"`` or integer milliseconds;
``every`` is in seconds. The canonical emitted form uses milliseconds, so
``parse(canonical_emit(c))`` round-trips structurally.

Validation never partially loads a document: the first problem raises a
diagnostic carrying its document path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import yaml

from .automation import (
    ActivateScene,
    Action,
    All,
    AnyOf,
    Automation,
    BinaryState,
    CallService,
    Condition,
    EventTrigger,
    Not,
    NumericState,
    Scene,
    SceneTarget,
    StateTrigger,
    TimeTrigger,
    TimeWindow,
    Trigger,
)
from .core import (
    Binary,
    DeviceKind,
    Numeric,
    StateValue,
    UNAVAILABLE,
    Unavailable,
    validate_entity_id,
)
from .devices import ScenarioScript, ScriptEvent
from .errors import (
    ConfigSyntaxError,
    DanglingReference,
    DuplicateId,
    InvalidTier,
    MalformedId,
    UnknownKey,
    WrongType,
)
from .memstore import DEFAULT_BUDGET_UNITS, TIERS, ScenarioKind

MS_PER_DAY = 86_400_000


@dataclass(frozen=True)
class EntityDef:
    id: str
    kind: DeviceKind
    name: str
    initial: StateValue | None = None


@dataclass(frozen=True)
class StoreDef:
    id: str
    entity: str
    scenario: ScenarioKind
    interval_s: int
    budget_units: int = DEFAULT_BUDGET_UNITS


@dataclass
class ConfigDocument:
    """Structurally-typed document, before cross-reference validation."""

    entities: list[EntityDef]
    stores: list[StoreDef]
    scenes: list[Scene]
    automations: list[Automation]
    script: list[ScriptEvent]


@dataclass(frozen=True)
class ValidatedConfig:
    """Frozen, cross-checked configuration the runtime can load directly."""

    entities: tuple[EntityDef, ...]
    stores: tuple[StoreDef, ...]
    scenes: tuple[Scene, ...]
    automations: tuple[Automation, ...]
    script: tuple[ScriptEvent, ...]


# --- low-level shape checks ---------------------------------------------------


def _require_map(value: Any, path: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise WrongType(f"expected a mapping, got {type(value).__name__}", path)
    for key in value:
        if key not in allowed:
            raise UnknownKey(f"unknown key {key!r} (allowed: {sorted(allowed)})", f"{path}.{key}")
    return value


def _require_list(value: Any, path: str) -> list:
    if value is None:
        return []
    if not isinstance(value, list):
        raise WrongType(f"expected a sequence, got {type(value).__name__}", path)
    return value


def _get_str(m: dict, key: str, path: str, default: str | None = None) -> str:
    if key not in m:
        if default is not None:
            return default
        raise WrongType(f"missing required key {key!r}", path)
    v = m[key]
    if not isinstance(v, str):
        raise WrongType(f"{key} must be a string, got {type(v).__name__}", f"{path}.{key}")
    return v


def _get_number(m: dict, key: str, path: str) -> float | None:
    if key not in m or m[key] is None:
        return None
    v = m[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise WrongType(f"{key} must be a number, got {type(v).__name__}", f"{path}.{key}")
    return float(v)


def _get_int(m: dict, key: str, path: str, default: int | None = None) -> int:
    if key not in m:
        if default is not None:
            return default
        raise WrongType(f"missing required key {key!r}", path)
    v = m[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise WrongType(f"{key} must be an integer, got {type(v).__name__}", f"{path}.{key}")
    return v

def _get_bool(m: dict, key: str, path: str, default: bool) -> bool:
    if key not in m:
        return default
    v = m[key]
    if not isinstance(v, bool):
        raise WrongType(f"{key} must be a boolean, got {type(v).__name__}", f"{path}.{key}")
    return v


def _entity_ref(m: dict, key: str, path: str) -> str:
    raw = _get_str(m, key, path)
    try:
        return validate_entity_id(raw)
    except MalformedId as exc:
        raise WrongType(str(exc), f"{path}.{key}") from None


def _parse_state(value: Any, path: str) -> StateValue:
    if value == "unavailable":
        return UNAVAILABLE
    m = _require_map(value, path, {"binary", "numeric", "unit"})
    if "binary" in m:
        if "numeric" in m or "unit" in m:
            raise WrongType("binary state takes no other keys", path)
        if not isinstance(m["binary"], bool):
            raise WrongType("binary must be true or false", f"{path}.binary")
        return Binary(m["binary"])
    if "numeric" in m:
        v = m["numeric"]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise WrongType("numeric must be a number", f"{path}.numeric")
        unit = m.get("unit")
        if unit is not None and not isinstance(unit, str):
            raise WrongType("unit must be a string", f"{path}.unit")
        return Numeric(float(v), unit)
    raise WrongType("state must be {binary: ...}, {numeric: ...}, or unavailable", path)


def _parse_time_of_day(value: Any, path: str) -> int:
    """``"HH:MM[:SS]"`` or integer milliseconds -> ms of day."""
    if isinstance(value, bool):
        raise WrongType("time of day must be HH:MM or milliseconds", path)
    if isinstance(value, int):
        if not 0 <= value < MS_PER_DAY:
            raise WrongType(f"ms-of-day {value} outside [0, {MS_PER_DAY})", path)
        return value
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) in (2, 3) and all(p.isdigit() for p in parts):
            h, m = int(parts[0]), int(parts[1])
            s = int(parts[2]) if len(parts) == 3 else 0
            if h < 24 and m < 60 and s < 60:
                return ((h * 60 + m) * 60 + s) * 1000
    raise WrongType(f"cannot read time of day from {value!r}", path)


def _parse_scalar_map(value: Any, path: str) -> tuple[tuple[str, Any], ...]:
    if value is None:
        return ()
    if not isinstance(value, dict):
        raise WrongType("expected a mapping of scalars", path)
    out = []
    for k, v in value.items():
        if not isinstance(k, str):
            raise WrongType(f"key {k!r} must be a string", path)
        if v is not None and not isinstance(v, (bool, int, float, str)):
            raise WrongType(f"{k} must be a scalar", f"{path}.{k}")
        out.append((k, v))
    return tuple(out)


# --- section parsers -----------------------------------------------------------


def _parse_entity(m: Any, path: str) -> EntityDef:
    m = _require_map(m, path, {"id", "kind", "name", "initial"})
    entity_id = _entity_ref(m, "id", path)
    kind_raw = _get_str(m, "kind", path)
    try:
        kind = DeviceKind(kind_raw)
    except ValueError:
        raise WrongType(
            f"unknown device kind {kind_raw!r} (known: {[k.value for k in DeviceKind]})",
            f"{path}.kind",
        ) from None
    name = _get_str(m, "name", path, default=entity_id)
    initial = _parse_state(m["initial"], f"{path}.initial") if "initial" in m else None
    return EntityDef(entity_id, kind, name, initial)


def _parse_store(m: Any, path: str) -> StoreDef:
    m = _require_map(m, path, {"id", "entity", "scenario", "interval_s", "budget_units"})
    scenario_raw = _get_str(m, "scenario", path, default=ScenarioKind.COMPLEX_ROOM.value)
    try:
        scenario = ScenarioKind(scenario_raw)
    except ValueError:
        raise WrongType(
            f"unknown scenario {scenario_raw!r} (known: {[s.value for s in ScenarioKind]})",
            f"{path}.scenario",
        ) from None
    return StoreDef(
        id=_get_str(m, "id", path),
        entity=_entity_ref(m, "entity", path),
        scenario=scenario,
        interval_s=_get_int(m, "interval_s", path),
        budget_units=_get_int(m, "budget_units", path, default=DEFAULT_BUDGET_UNITS),
    )


def _parse_trigger(m: Any, path: str) -> Trigger:
    if not isinstance(m, dict):
        raise WrongType("trigger must be a mapping", path)
    kind = m.get("type")
    if kind == "state":
        m = _require_map(m, path, {"type", "entity", "above", "below", "to"})
        to = _parse_state(m["to"], f"{path}.to") if "to" in m else None
        try:
            return StateTrigger(
                entity=_entity_ref(m, "entity", path),
                above=_get_number(m, "above", path),
                below=_get_number(m, "below", path),
                to=to,
            )
        except ValueError as exc:
            raise WrongType(str(exc), path) from None
    if kind == "time":
        m = _require_map(m, path, {"type", "at", "every"})
        if ("at" in m) == ("every" in m):
            raise WrongType("time trigger needs exactly one of at/every", path)
        if "at" in m:
            return TimeTrigger(at_ms=_parse_time_of_day(m["at"], f"{path}.at"))
        every_s = _get_int(m, "every", path)
        if every_s <= 0:
            raise WrongType("every must be a positive number of seconds", f"{path}.every")
        return TimeTrigger(every_ms=every_s * 1000)
    if kind == "event":
        m = _require_map(m, path, {"type", "event_type"})
        return EventTrigger(_get_str(m, "event_type", path))
    raise WrongType(f"unknown trigger type {kind!r} (state, time, event)", f"{path}.type")


def _parse_condition(m: Any, path: str) -> Condition:
    if not isinstance(m, dict):
        raise WrongType("condition must be a mapping", path)
    kind = m.get("type")
    if kind == "numeric_state":
        m = _require_map(m, path, {"type", "entity", "above", "below"})
        above = _get_number(m, "above", path)
        below = _get_number(m, "below", path)
        if above is None and below is None:
            raise WrongType("numeric_state needs above and/or below", path)
        return NumericState(_entity_ref(m, "entity", path), above, below)
    if kind == "binary_state":
        m = _require_map(m, path, {"type", "entity", "equals"})
        return BinaryState(_entity_ref(m, "entity", path), _get_bool(m, "equals", path, True))
    if kind == "time_window":
        m = _require_map(m, path, {"type", "after", "before"})
        if "after" not in m or "before" not in m:
            raise WrongType("time_window needs after and before", path)
        return TimeWindow(
            _parse_time_of_day(m["after"], f"{path}.after"),
            _parse_time_of_day(m["before"], f"{path}.before"),
        )
    if kind in ("all", "any"):
        m = _require_map(m, path, {"type", "items"})
        items = _require_list(m.get("items"), f"{path}.items")
        if not items:
            raise WrongType(f"{kind} requires a non-empty items list", f"{path}.items")
        parsed = tuple(
            _parse_condition(c, f"{path}.items[{i}]") for i, c in enumerate(items)
        )
        return All(parsed) if kind == "all" else AnyOf(parsed)
    if kind == "not":
        m = _require_map(m, path, {"type", "item"})
        if "item" not in m:
            raise WrongType("not requires an item", path)
        return Not(_parse_condition(m["item"], f"{path}.item"))
    raise WrongType(
        f"unknown condition type {kind!r} "
        "(numeric_state, binary_state, time_window, all, any, not)",
        f"{path}.type",
    )


def _parse_action(m: Any, path: str) -> Action:
    if not isinstance(m, dict):
        raise WrongType("action must be a mapping", path)
    kind = m.get("type")
    if kind == "call_service":
        m = _require_map(m, path, {"type", "domain", "name", "target", "data"})
        return CallService(
            domain=_get_str(m, "domain", path),
            name=_get_str(m, "name", path),
            target=_entity_ref(m, "target", path),
            data=_parse_scalar_map(m.get("data"), f"{path}.data"),
        )
    if kind == "activate_scene":
        m = _require_map(m, path, {"type", "scene"})
        return ActivateScene(_get_str(m, "scene", path))
    raise WrongType(f"unknown action type {kind!r} (call_service, activate_scene)", f"{path}.type")


def _parse_scene(m: Any, path: str) -> Scene:
    m = _require_map(m, path, {"id", "name", "targets"})
    scene_id = _get_str(m, "id", path)
    targets_raw = _require_list(m.get("targets"), f"{path}.targets")
    if not targets_raw:
        raise WrongType("scene needs at least one target", f"{path}.targets")
    targets = []
    for i, t in enumerate(targets_raw):
        tpath = f"{path}.targets[{i}]"
        t = _require_map(t, tpath, {"entity", "state", "attributes"})
        if "state" not in t:
            raise WrongType("target needs a state", tpath)
        targets.append(
            SceneTarget(
                entity=_entity_ref(t, "entity", tpath),
                state=_parse_state(t["state"], f"{tpath}.state"),
                attributes=_parse_scalar_map(t.get("attributes"), f"{tpath}.attributes"),
            )
        )
    return Scene(scene_id, _get_str(m, "name", path, default=scene_id), tuple(targets))


def _parse_automation(m: Any, path: str) -> Automation:
    m = _require_map(
        m, path, {"id", "scenario", "enabled", "triggers", "conditions", "actions"}
    )
    auto_id = _get_str(m, "id", path)
    scenario_raw = _get_str(m, "scenario", path, default=ScenarioKind.COMPLEX_ROOM.value)
    try:
        scenario = ScenarioKind(scenario_raw)
    except ValueError:
        raise WrongType(f"unknown scenario {scenario_raw!r}", f"{path}.scenario") from None
    triggers_raw = _require_list(m.get("triggers"), f"{path}.triggers")
    actions_raw = _require_list(m.get("actions"), f"{path}.actions")
    if not triggers_raw:
        raise WrongType("automation needs at least one trigger", f"{path}.triggers")
    if not actions_raw:
        raise WrongType("automation needs at least one action", f"{path}.actions")
    return Automation(
        id=auto_id,
        triggers=tuple(
            _parse_trigger(t, f"{path}.triggers[{i}]") for i, t in enumerate(triggers_raw)
        ),
        conditions=tuple(
            _parse_condition(c, f"{path}.conditions[{i}]")
            for i, c in enumerate(_require_list(m.get("conditions"), f"{path}.conditions"))
        ),
        actions=tuple(
            _parse_action(a, f"{path}.actions[{i}]") for i, a in enumerate(actions_raw)
        ),
        enabled=_get_bool(m, "enabled", path, True),
        scenario_kind=scenario,
    )


def _parse_script_event(m: Any, path: str) -> ScriptEvent:
    if not isinstance(m, dict):
        raise WrongType("script event must be a mapping", path)
    kind = m.get("type")
    if "at" not in m:
        raise WrongType("script event needs an at time", path)
    at_ms = _parse_time_of_day(m["at"], f"{path}.at")
    if kind == "set_state":
        m = _require_map(m, path, {"at", "type", "entity", "state"})
        if "state" not in m:
            raise WrongType("set_state needs a state", path)
        return ScriptEvent(
            at_ms=at_ms,
            kind="set_state",
            entity=_entity_ref(m, "entity", path),
            state=_parse_state(m["state"], f"{path}.state"),
        )
    if kind == "publish":
        m = _require_map(m, path, {"at", "type", "event_type", "origin", "payload"})
        return ScriptEvent(
            at_ms=at_ms,
            kind="publish",
            entity=_get_str(m, "origin", path, default=""),
            event_type=_get_str(m, "event_type", path),
            payload=_parse_scalar_map(m.get("payload"), f"{path}.payload"),
        )
    raise WrongType(f"unknown script event type {kind!r} (set_state, publish)", f"{path}.type")


# --- public operations -----------------------------------------------------------


_ROOT_KEYS = {"entities", "stores", "scenes", "automations", "script"}


def parse(text: str) -> ConfigDocument:
    """Parse a YAML document into a structurally-typed configuration.

    Raises:
        ConfigSyntaxError: document is not valid YAML (carries line/column).
        UnknownKey / WrongType: structural problems, with a document path.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ConfigSyntaxError(str(exc.problem or exc), mark.line + 1, mark.column + 1) from None
        raise ConfigSyntaxError(str(exc)) from None
    if raw is None:
        raw = {}
    raw = _require_map(raw, "$", _ROOT_KEYS)
    return ConfigDocument(
        entities=[
            _parse_entity(e, f"entities[{i}]")
            for i, e in enumerate(_require_list(raw.get("entities"), "entities"))
        ],
        stores=[
            _parse_store(s, f"stores[{i}]")
            for i, s in enumerate(_require_list(raw.get("stores"), "stores"))
        ],
        scenes=[
            _parse_scene(s, f"scenes[{i}]")
            for i, s in enumerate(_require_list(raw.get("scenes"), "scenes"))
        ],
        automations=[
            _parse_automation(a, f"automations[{i}]")
            for i, a in enumerate(_require_list(raw.get("automations"), "automations"))
        ],
        script=[
            _parse_script_event(s, f"script[{i}]")
            for i, s in enumerate(_require_list(raw.get("script"), "script"))
        ],
    )


def _check_unique(ids: list[str], section: str) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            raise DuplicateId(f"duplicate id {i!r} in {section}")
        seen.add(i)


def _condition_refs(cond: Condition) -> list[str]:
    if isinstance(cond, (NumericState, BinaryState)):
        return [cond.entity]
    if isinstance(cond, (All, AnyOf)):
        return [r for c in cond.items for r in _condition_refs(c)]
    if isinstance(cond, Not):
        return _condition_refs(cond.inner)
    return []


def validate(doc: ConfigDocument) -> ValidatedConfig:
    """Cross-check references and tiers; returns a frozen, loadable config.

    Raises:
        DuplicateId: an id repeats within its section.
        DanglingReference: a referenced entity or scene is not defined.
        InvalidTier: a store interval outside the tier set.
    """
    _check_unique([e.id for e in doc.entities], "entities")
    _check_unique([s.id for s in doc.stores], "stores")
    _check_unique([s.id for s in doc.scenes], "scenes")
    _check_unique([a.id for a in doc.automations], "automations")

    known = {e.id for e in doc.entities}
    scene_ids = {s.id for s in doc.scenes}

    def check_ref(entity_id: str, referrer: str) -> None:
        if entity_id not in known:
            raise DanglingReference(entity_id, referrer)

    for store in doc.stores:
        check_ref(store.entity, f"store {store.id!r}")
        if store.interval_s not in TIERS:
            raise InvalidTier(
                f"store {store.id!r}: interval {store.interval_s}s not in allowed set {TIERS}"
            )
    for scene in doc.scenes:
        for target in scene.targets:
            check_ref(target.entity, f"scene {scene.id!r}")
    for auto in doc.automations:
        referrer = f"automation {auto.id!r}"
        for trig in auto.triggers:
            if isinstance(trig, StateTrigger):
                check_ref(trig.entity, referrer)
        for cond in auto.conditions:
            for ref in _condition_refs(cond):
                check_ref(ref, referrer)
        for action in auto.actions:
            if isinstance(action, CallService):
                check_ref(action.target, referrer)
            elif isinstance(action, ActivateScene) and action.scene_id not in scene_ids:
                raise DanglingReference(action.scene_id, referrer)
    for i, ev in enumerate(doc.script):
        if ev.kind == "set_state":
            check_ref(ev.entity, f"script[{i}]")

    return ValidatedConfig(
        entities=tuple(doc.entities),
        stores=tuple(doc.stores),
        scenes=tuple(doc.scenes),
        automations=tuple(doc.automations),
        script=tuple(doc.script),
    )


# --- canonical emission ------------------------------------------------------------


def _emit_state(state: StateValue) -> Any:
    if isinstance(state, Binary):
        return {"binary": state.flag}
    if isinstance(state, Numeric):
        out: dict[str, Any] = {"numeric": state.value}
        if state.unit is not None:
            out["unit"] = state.unit
        return out
    if isinstance(state, Unavailable):
        return "unavailable"
    raise TypeError(f"bad state {state!r}")


def _emit_trigger(t: Trigger) -> dict:
    if isinstance(t, StateTrigger):
        out: dict[str, Any] = {"type": "state", "entity": t.entity}
        if t.above is not None:
            out["above"] = t.above
        if t.below is not None:
            out["below"] = t.below
        if t.to is not None:
            out["to"] = _emit_state(t.to)
        return out
    if isinstance(t, TimeTrigger):
        if t.at_ms is not None:
            return {"type": "time", "at": t.at_ms}
        return {"type": "time", "every": t.every_ms // 1000}
    return {"type": "event", "event_type": t.event_type}


def _emit_condition(c: Condition) -> dict:
    if isinstance(c, NumericState):
        out: dict[str, Any] = {"type": "numeric_state", "entity": c.entity}
        if c.above is not None:
            out["above"] = c.above
        if c.below is not None:
            out["below"] = c.below
        return out
    if isinstance(c, BinaryState):
        return {"type": "binary_state", "entity": c.entity, "equals": c.equals}
    if isinstance(c, TimeWindow):
        return {"type": "time_window", "after": c.after_ms, "before": c.before_ms}
    if isinstance(c, All):
        return {"type": "all", "items": [_emit_condition(i) for i in c.items]}
    if isinstance(c, AnyOf):
        return {"type": "any", "items": [_emit_condition(i) for i in c.items]}
    return {"type": "not", "item": _emit_condition(c.inner)}


def _emit_action(a: Action) -> dict:
    if isinstance(a, CallService):
        out: dict[str, Any] = {
            "type": "call_service",
            "domain": a.domain,
            "name": a.name,
            "target": a.target,
        }
        if a.data:
            out["data"] = dict(a.data)
        return out
    return {"type": "activate_scene", "scene": a.scene_id}


def canonical_emit(config: ValidatedConfig) -> str:
    """Emit the canonical YAML form: fixed key order, deterministic bytes.

    ``validate(parse(canonical_emit(c)))`` equals ``c`` for every valid
    config, and emitting twice yields byte-identical output.
    """
    doc: dict[str, Any] = {
        "entities": [
            {
                "id": e.id,
                "kind": e.kind.value,
                "name": e.name,
                **({"initial": _emit_state(e.initial)} if e.initial is not None else {}),
            }
            for e in config.entities
        ],
        "stores": [
            {
                "id": s.id,
                "entity": s.entity,
                "scenario": s.scenario.value,
                "interval_s": s.interval_s,
                "budget_units": s.budget_units,
            }
            for s in config.stores
        ],
        "scenes": [
            {
                "id": s.id,
                "name": s.name,
                "targets": [
                    {
                        "entity": t.entity,
                        "state": _emit_state(t.state),
                        **({"attributes": dict(t.attributes)} if t.attributes else {}),
                    }
                    for t in s.targets
                ],
            }
            for s in config.scenes
        ],
        "automations": [
            {
                "id": a.id,
                "scenario": a.scenario_kind.value,
                "enabled": a.enabled,
                "triggers": [_emit_trigger(t) for t in a.triggers],
                **(
                    {"conditions": [_emit_condition(c) for c in a.conditions]}
                    if a.conditions
                    else {}
                ),
                "actions": [_emit_action(x) for x in a.actions],
            }
            for a in config.automations
        ],
    }
    if config.script:
        doc["script"] = [
            {
                "at": ev.at_ms,
                "type": ev.kind,
                **(
                    {"entity": ev.entity, "state": _emit_state(ev.state)}
                    if ev.kind == "set_state"
                    else {
                        "event_type": ev.event_type,
                        **({"origin": ev.entity} if ev.entity else {}),
                        **({"payload": dict(ev.payload)} if ev.payload else {}),
                    }
                ),
            }
            for ev in config.script
        ]
    return yaml.safe_dump(
        doc, sort_keys=False, default_flow_style=False, allow_unicode=True, width=100
    )


def load(text: str) -> ValidatedConfig:
    """Parse then validate in one step."""
    return validate(parse(text))
