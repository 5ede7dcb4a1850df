"""Rule engine tests: edge semantics, conditions, scenes, manual runs."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hearth.automation import (
    ActivateScene,
    All,
    AnyOf,
    Automation,
    AutomationEngine,
    BinaryState,
    CallService,
    EventTrigger,
    FireStatus,
    Not,
    NumericState,
    Scene,
    SceneTarget,
    StateTrigger,
    TimeTrigger,
    TimeWindow,
    evaluate_condition,
    evaluate_trigger,
)
from hearth.core import (
    STATE_CHANGED,
    Binary,
    Event,
    Numeric,
    UNAVAILABLE,
    state_to_payload,
)
from hearth.devices import TEMPERATURE_ENTITY, build_fleet
from hearth.errors import AutomationDisabled, UnknownAutomation, UnknownEntity, UnknownScene
from hearth.home import Home
from hearth.memstore import ScenarioKind

HOUR_MS = 3_600_000


def state_changed(entity, old, new, t=0):
    return Event(
        STATE_CHANGED,
        t,
        entity,
        {"entity_id": entity, "old": state_to_payload(old), "new": state_to_payload(new)},
    )


def make_home() -> Home:
    home = Home(seed=3)
    home.register_sims(build_fleet())
    home.install_standard_services()
    return home


# --- trigger edge semantics ------------------------------------------------


def test_above_fires_on_upward_crossing_only():
    trig = StateTrigger(TEMPERATURE_ENTITY, above=25.0)
    ev = state_changed(TEMPERATURE_ENTITY, Numeric(24.0), Numeric(26.0))
    assert evaluate_trigger(trig, ev, Numeric(24.0))
    ev = state_changed(TEMPERATURE_ENTITY, Numeric(26.0), Numeric(27.0))
    assert not evaluate_trigger(trig, ev, Numeric(26.0))


def test_above_boundary_is_on_or_below_to_strictly_above():
    trig = StateTrigger(TEMPERATURE_ENTITY, above=25.0)
    assert evaluate_trigger(
        trig, state_changed(TEMPERATURE_ENTITY, Numeric(25.0), Numeric(25.1)), Numeric(25.0)
    )
    assert not evaluate_trigger(
        trig, state_changed(TEMPERATURE_ENTITY, Numeric(24.0), Numeric(25.0)), Numeric(24.0)
    )


def test_below_is_symmetric():
    trig = StateTrigger(TEMPERATURE_ENTITY, below=18.0)
    assert evaluate_trigger(
        trig, state_changed(TEMPERATURE_ENTITY, Numeric(18.0), Numeric(17.5)), Numeric(18.0)
    )
    assert not evaluate_trigger(
        trig, state_changed(TEMPERATURE_ENTITY, Numeric(17.0), Numeric(16.0)), Numeric(17.0)
    )


def test_unavailable_prev_cannot_cross():
    trig = StateTrigger(TEMPERATURE_ENTITY, above=25.0)
    ev = state_changed(TEMPERATURE_ENTITY, UNAVAILABLE, Numeric(30.0))
    assert not evaluate_trigger(trig, ev, UNAVAILABLE)


def test_to_trigger_fires_on_edge_only():
    trig = StateTrigger("binary_sensor.door", to=Binary(True))
    opening = state_changed("binary_sensor.door", Binary(False), Binary(True))
    assert evaluate_trigger(trig, opening, Binary(False))
    still_open = state_changed("binary_sensor.door", Binary(True), Binary(True))
    assert not evaluate_trigger(trig, still_open, Binary(True))


def test_event_trigger_matches_type():
    trig = EventTrigger("panic_pressed")
    assert evaluate_trigger(trig, Event("panic_pressed", 0, "button.panic"), None)
    assert not evaluate_trigger(trig, Event("door_opened", 0, "binary_sensor.door"), None)


def test_mismatched_stimulus_family_is_false():
    assert not evaluate_trigger(
        StateTrigger(TEMPERATURE_ENTITY, above=1.0), Event("panic_pressed", 0, "x.y"), None
    )
    assert not evaluate_trigger(TimeTrigger(at_ms=0), Event("panic_pressed", 0, "x.y"), None)


def test_state_trigger_requires_some_threshold():
    with pytest.raises(ValueError):
        StateTrigger(TEMPERATURE_ENTITY)


def test_crossing_count_matches_brute_force_oracle():
    rng = random.Random(41)
    threshold = 25.0
    for _ in range(50):
        series = [rng.uniform(20.0, 30.0) for _ in range(200)]
        expected = sum(
            1
            for prev, new in zip(series, series[1:])
            if prev <= threshold < new
        )
        trig = StateTrigger(TEMPERATURE_ENTITY, above=threshold)
        fired = 0
        for prev, new in zip(series, series[1:]):
            ev = state_changed(TEMPERATURE_ENTITY, Numeric(prev), Numeric(new))
            if evaluate_trigger(trig, ev, Numeric(prev)):
                fired += 1
        assert fired == expected


# --- conditions ---------------------------------------------------------------


def snapshot(**states):
    return dict(states)


def test_numeric_condition():
    snap = snapshot(**{TEMPERATURE_ENTITY: Numeric(26.0)})
    assert evaluate_condition(NumericState(TEMPERATURE_ENTITY, above=25.0), snap, 0)
    assert not evaluate_condition(NumericState(TEMPERATURE_ENTITY, above=26.5), snap, 0)
    assert evaluate_condition(NumericState(TEMPERATURE_ENTITY, above=25.0, below=27.0), snap, 0)
    assert not evaluate_condition(NumericState(TEMPERATURE_ENTITY, below=26.0), snap, 0)


def test_numeric_condition_on_unavailable_is_false():
    snap = snapshot(**{TEMPERATURE_ENTITY: UNAVAILABLE})
    assert not evaluate_condition(NumericState(TEMPERATURE_ENTITY, above=0.0), snap, 0)


def test_condition_unknown_entity_raises():
    with pytest.raises(UnknownEntity):
        evaluate_condition(NumericState("sensor.ghost", above=0.0), {}, 0)


def test_time_window_overnight_wrap():
    cond = TimeWindow(after_ms=22 * HOUR_MS, before_ms=6 * HOUR_MS)
    assert evaluate_condition(cond, {}, 23 * HOUR_MS + 30 * 60_000)  # 23:30
    assert evaluate_condition(cond, {}, 3 * HOUR_MS)
    assert not evaluate_condition(cond, {}, 12 * HOUR_MS)


def test_time_window_plain():
    cond = TimeWindow(after_ms=8 * HOUR_MS, before_ms=20 * HOUR_MS)
    assert evaluate_condition(cond, {}, 12 * HOUR_MS)
    assert not evaluate_condition(cond, {}, 21 * HOUR_MS)
    # next day, 12:00 again
    assert evaluate_condition(cond, {}, 86_400_000 + 12 * HOUR_MS)


def test_boolean_connectives():
    snap = snapshot(**{"binary_sensor.motion": Binary(True)})
    yes = BinaryState("binary_sensor.motion", equals=True)
    no = BinaryState("binary_sensor.motion", equals=False)
    assert not evaluate_condition(All((yes, no)), snap, 0)
    assert evaluate_condition(AnyOf((yes, no)), snap, 0)
    assert evaluate_condition(Not(no), snap, 0)


# Random condition trees over a tiny world, for the algebra laws.
_ENTITIES = ["sensor.temperature", "binary_sensor.motion", "binary_sensor.door"]


def _leaf_conditions():
    return st.one_of(
        st.builds(
            NumericState,
            entity=st.just("sensor.temperature"),
            above=st.floats(min_value=-10, max_value=40, allow_nan=False),
        ),
        st.builds(
            BinaryState,
            entity=st.sampled_from(_ENTITIES[1:]),
            equals=st.booleans(),
        ),
        st.builds(
            TimeWindow,
            after_ms=st.integers(min_value=0, max_value=86_399_999),
            before_ms=st.integers(min_value=0, max_value=86_399_999),
        ),
    )


def _conditions():
    return st.recursive(
        _leaf_conditions(),
        lambda inner: st.one_of(
            st.builds(Not, inner=inner),
            st.builds(All, items=st.lists(inner, min_size=1, max_size=3).map(tuple)),
            st.builds(AnyOf, items=st.lists(inner, min_size=1, max_size=3).map(tuple)),
        ),
        max_leaves=8,
    )


def _snapshots():
    return st.fixed_dictionaries(
        {
            "sensor.temperature": st.floats(min_value=-10, max_value=40, allow_nan=False).map(
                Numeric
            ),
            "binary_sensor.motion": st.booleans().map(Binary),
            "binary_sensor.door": st.booleans().map(Binary),
        }
    )


@settings(max_examples=300)
@given(cond=_conditions(), snap=_snapshots(), now=st.integers(min_value=0, max_value=2 * 86_400_000))
def test_condition_algebra(cond, snap, now):
    value = evaluate_condition(cond, snap, now)
    assert evaluate_condition(Not(Not(cond)), snap, now) == value
    assert evaluate_condition(All((cond,)), snap, now) == value
    assert evaluate_condition(AnyOf((cond,)), snap, now) == value


# --- engine: fire, manual, scenes ----------------------------------------------


def turn_on(target, **data):
    return CallService("light", "turn_on", target, tuple(data.items()))


def test_fire_skips_when_conditions_fail():
    home = make_home()
    auto = Automation(
        id="dim_when_warm",
        triggers=(StateTrigger(TEMPERATURE_ENTITY, above=25.0),),
        conditions=(BinaryState("binary_sensor.motion", equals=True),),  # motion is off
        actions=(turn_on("light.bulb_1"),),
    )
    home.engine.add_automation(auto)
    home.start_engine()
    home.entities.set_state(TEMPERATURE_ENTITY, Numeric(24.0), 0)
    home.entities.set_state(TEMPERATURE_ENTITY, Numeric(26.0), 15_000)
    assert home.entities.get_state("light.bulb_1") == Binary(False)
    assert home.engine.fired_count == 0
    assert home.services.calls_published == 0


def test_temperature_crossing_dims_spotlight():
    home = make_home()
    auto = Automation(
        id="dim_when_warm",
        triggers=(StateTrigger(TEMPERATURE_ENTITY, above=25.0),),
        conditions=(),
        actions=(turn_on("light.spotlight", brightness=80),),
    )
    home.engine.add_automation(auto)
    home.start_engine()
    fired = []
    home.bus.subscribe("automation_fired", fired.append)
    home.entities.set_state(TEMPERATURE_ENTITY, Numeric(24.0), 0)
    home.entities.set_state(TEMPERATURE_ENTITY, Numeric(26.0), 15_000)
    assert home.entities.get_state("light.spotlight") == Binary(True)
    assert home.entities.get("light.spotlight").attributes["brightness"] == 80
    assert len(fired) == 1
    # hovering above the threshold must not fire again
    home.entities.set_state(TEMPERATURE_ENTITY, Numeric(27.0), 30_000)
    assert len(fired) == 1


def test_engine_crossing_count_matches_oracle():
    rng = random.Random(17)
    series = [rng.uniform(20.0, 30.0) for _ in range(300)]
    expected = sum(1 for p, n in zip(series, series[1:]) if p <= 25.0 < n)

    home = make_home()
    home.engine.add_automation(
        Automation(
            id="counter",
            triggers=(StateTrigger(TEMPERATURE_ENTITY, above=25.0),),
            conditions=(),
            actions=(turn_on("light.bulb_1"),),
        )
    )
    home.start_engine()
    for i, v in enumerate(series):
        home.entities.set_state(TEMPERATURE_ENTITY, Numeric(v), i * 1000)
    assert home.engine.fired_count == expected


def test_fail_soft_actions():
    home = make_home()
    auto = Automation(
        id="two_actions",
        triggers=(EventTrigger("go"),),
        conditions=(),
        actions=(
            CallService("light", "levitate", "light.bulb_1"),  # no such service
            turn_on("light.bulb_2"),
        ),
    )
    home.engine.add_automation(auto)
    home.start_engine()
    outcome = home.engine.manual_trigger("two_actions")
    assert outcome.status is FireStatus.EXECUTED
    assert len(outcome.errors) == 1
    assert home.entities.get_state("light.bulb_2") == Binary(True)


def test_manual_trigger_honors_and_bypasses_conditions():
    home = make_home()
    auto = Automation(
        id="guarded",
        triggers=(EventTrigger("go"),),
        conditions=(BinaryState("binary_sensor.motion", equals=True),),
        actions=(turn_on("light.bulb_1"),),
    )
    home.engine.add_automation(auto)
    home.start_engine()
    outcome = home.engine.manual_trigger("guarded")
    assert outcome.status is FireStatus.SKIPPED
    assert home.entities.get_state("light.bulb_1") == Binary(False)
    outcome = home.engine.manual_trigger("guarded", skip_conditions=True)
    assert outcome.status is FireStatus.EXECUTED
    assert home.entities.get_state("light.bulb_1") == Binary(True)


def test_manual_trigger_errors():
    home = make_home()
    auto = Automation(
        id="sleepy",
        triggers=(EventTrigger("go"),),
        conditions=(),
        actions=(turn_on("light.bulb_1"),),
        enabled=False,
    )
    home.engine.add_automation(auto)
    with pytest.raises(UnknownAutomation):
        home.engine.manual_trigger("missing")
    with pytest.raises(AutomationDisabled):
        home.engine.manual_trigger("sleepy")


def test_time_trigger_fires_between_steps():
    home = make_home()
    home.engine.add_automation(
        Automation(
            id="seven_am",
            triggers=(TimeTrigger(at_ms=7 * HOUR_MS),),
            conditions=(),
            actions=(turn_on("light.bulb_1"),),
        )
    )
    home.start_engine()
    home.step(6 * HOUR_MS)
    assert home.engine.fired_count == 0
    home.step(2 * HOUR_MS)  # crosses 07:00
    assert home.engine.fired_count == 1
    home.step(20 * HOUR_MS)  # same day: no second firing
    assert home.engine.fired_count == 1
    home.step(24 * HOUR_MS)  # next day 09:00: crossed 07:00 again
    assert home.engine.fired_count == 2


def test_periodic_trigger_counts_boundaries():
    home = make_home()
    home.engine.add_automation(
        Automation(
            id="every_hour",
            triggers=(TimeTrigger(every_ms=HOUR_MS),),
            conditions=(),
            actions=(turn_on("light.bulb_1"),),
        )
    )
    home.start_engine()
    home.step(4 * HOUR_MS + 1)
    assert home.engine.fired_count == 4


def test_no_spontaneous_firing():
    home = make_home()
    home.engine.add_automation(
        Automation(
            id="anything",
            triggers=(EventTrigger("go"), TimeTrigger(every_ms=1000)),
            conditions=(),
            actions=(turn_on("light.bulb_1"),),
        )
    )
    home.start_engine()
    assert home.engine.fired_count == 0  # no events, no time advancement


# --- scenes -------------------------------------------------------------------


def good_morning():
    return Scene(
        "good_morning",
        "Good morning",
        (
            SceneTarget("light.bulb_1", Binary(True), (("brightness", 254),)),
            SceneTarget("light.bulb_2", Binary(True), (("brightness", 254),)),
        ),
    )


def test_scene_activation_turns_on_both_bulbs():
    home = make_home()
    home.engine.add_scene(good_morning())
    outcome = home.engine.activate_scene("good_morning")
    assert outcome.applied == ["light.bulb_1", "light.bulb_2"]
    assert outcome.errors == []
    assert home.entities.get_state("light.bulb_1") == Binary(True)
    assert home.entities.get_state("light.bulb_2") == Binary(True)


def test_scene_idempotence():
    home = make_home()
    home.engine.add_scene(good_morning())
    home.engine.activate_scene("good_morning")
    snap_one = home.entities.snapshot()
    attrs_one = {e.id: dict(e.attributes) for e in home.entities.enumerate()}
    home.engine.activate_scene("good_morning")
    assert home.entities.snapshot() == snap_one
    assert {e.id: dict(e.attributes) for e in home.entities.enumerate()} == attrs_one


def test_unknown_scene():
    home = make_home()
    with pytest.raises(UnknownScene):
        home.engine.activate_scene("missing")


def test_scene_partial_errors_apply_rest():
    home = make_home()
    scene = Scene(
        "mixed",
        "Mixed",
        (
            SceneTarget("sensor.temperature", UNAVAILABLE),  # no actionable state
            SceneTarget("light.bulb_1", Binary(True)),
        ),
    )
    home.engine.add_scene(scene)
    outcome = home.engine.activate_scene("mixed")
    assert len(outcome.errors) == 1
    assert outcome.applied == ["light.bulb_1"]
    assert home.entities.get_state("light.bulb_1") == Binary(True)


def test_scene_action_from_automation():
    home = make_home()
    home.engine.add_scene(good_morning())
    home.engine.add_automation(
        Automation(
            id="wake",
            triggers=(EventTrigger("sunrise"),),
            conditions=(),
            actions=(ActivateScene("good_morning"),),
            scenario_kind=ScenarioKind.MORNING_SCENE,
        )
    )
    home.start_engine()
    home.bus.publish(Event("sunrise", 0, "system"))
    assert home.entities.get_state("light.bulb_1") == Binary(True)
