"""Configuration parsing, validation, and canonical round-trip tests."""

from __future__ import annotations

import pytest
from hypothesis import given, settings

from hearth.config import canonical_emit, load, parse, validate
from hearth.core import DeviceKind
from hearth.errors import (
    ConfigSyntaxError,
    DanglingReference,
    DuplicateId,
    InvalidTier,
    UnknownKey,
    WrongType,
)

MINIMAL = """
entities:
  - id: light.bulb_1
    kind: bulb
    name: A bulb
"""


def test_minimal_document():
    doc = parse(MINIMAL)
    assert len(doc.entities) == 1
    assert doc.entities[0].kind is DeviceKind.BULB
    assert doc.scenes == [] and doc.automations == []


def test_empty_document_is_four_empty_sections():
    doc = parse("")
    assert doc.entities == [] and doc.stores == []
    assert doc.scenes == [] and doc.automations == []
    emitted = canonical_emit(validate(doc))
    assert emitted == "entities: []\nstores: []\nscenes: []\nautomations: []\n"


def test_misindented_document_reports_line():
    bad = "entities:\n  - id: light.bulb_1\n   kind: bulb\n"
    with pytest.raises(ConfigSyntaxError) as err:
        parse(bad)
    assert err.value.line is not None


def test_unknown_device_kind_names_field():
    text = MINIMAL.replace("kind: bulb", "kind: toaster")
    with pytest.raises(WrongType, match=r"entities\[0\].kind"):
        parse(text)


def test_unknown_key_rejected():
    text = MINIMAL + "    wattage: 60\n"
    with pytest.raises(UnknownKey, match="wattage"):
        parse(text)
    with pytest.raises(UnknownKey):
        parse("gadgets: []\n")


def test_malformed_entity_id_rejected():
    with pytest.raises(WrongType, match="id"):
        parse("entities:\n  - id: Bulb.One\n    kind: bulb\n    name: x\n")


def test_dangling_scene_target():
    text = (
        MINIMAL
        + """
scenes:
  - id: ghost_scene
    name: Ghost
    targets:
      - entity: light.ghost
        state: {binary: true}
"""
    )
    with pytest.raises(DanglingReference, match="light.ghost"):
        validate(parse(text))


def test_invalid_store_tier():
    text = (
        MINIMAL
        + """
stores:
  - id: s1
    entity: light.bulb_1
    interval_s: 45
"""
    )
    with pytest.raises(InvalidTier, match=r"\(15, 30, 60, 120, 300\)"):
        validate(parse(text))


def test_duplicate_automation_id():
    text = (
        MINIMAL
        + """
automations:
  - id: a1
    triggers: [{type: event, event_type: go}]
    actions: [{type: call_service, domain: light, name: turn_on, target: light.bulb_1}]
  - id: a1
    triggers: [{type: event, event_type: go}]
    actions: [{type: call_service, domain: light, name: turn_on, target: light.bulb_1}]
"""
    )
    with pytest.raises(DuplicateId, match="a1"):
        validate(parse(text))


def test_dangling_action_target_and_scene():
    base = MINIMAL + """
automations:
  - id: a1
    triggers: [{type: event, event_type: go}]
    actions: [{type: call_service, domain: light, name: turn_on, target: light.ghost}]
"""
    with pytest.raises(DanglingReference, match="light.ghost"):
        validate(parse(base))
    base = MINIMAL + """
automations:
  - id: a1
    triggers: [{type: event, event_type: go}]
    actions: [{type: activate_scene, scene: nope}]
"""
    with pytest.raises(DanglingReference, match="nope"):
        validate(parse(base))


def test_automation_needs_triggers_and_actions():
    text = MINIMAL + """
automations:
  - id: a1
    triggers: []
    actions: [{type: call_service, domain: light, name: turn_on, target: light.bulb_1}]
"""
    with pytest.raises(WrongType, match="trigger"):
        parse(text)


def test_time_fields_accept_clock_strings():
    text = (
        MINIMAL
        + """
automations:
  - id: a1
    triggers: [{type: time, at: "07:30"}]
    conditions: [{type: time_window, after: "22:00", before: "06:00"}]
    actions: [{type: call_service, domain: light, name: turn_on, target: light.bulb_1}]
"""
    )
    auto = parse(text).automations[0]
    assert auto.triggers[0].at_ms == ((7 * 60 + 30) * 60) * 1000
    assert auto.conditions[0].after_ms == 22 * 3_600_000


def test_wrong_scalar_type_reported():
    with pytest.raises(WrongType, match="interval_s"):
        parse(
            MINIMAL
            + "stores:\n  - id: s\n    entity: light.bulb_1\n    interval_s: soon\n"
        )


# --- round trip -----------------------------------------------------------------

from genconfig import configs as _configs  # noqa: E402


@settings(max_examples=150, deadline=None)
@given(_configs())
def test_round_trip_law(cfg):
    emitted = canonical_emit(cfg)
    assert validate(parse(emitted)) == cfg
    assert canonical_emit(cfg) == emitted  # determinism


def test_sample_config_round_trips():
    from hearth.harness import sample_config

    cfg = sample_config()
    assert validate(parse(canonical_emit(cfg))) == cfg


def test_emit_is_byte_deterministic():
    from hearth.harness import sample_config_text

    cfg = load(sample_config_text())
    assert canonical_emit(cfg) == canonical_emit(cfg)


def test_store_defaults():
    text = MINIMAL + "stores:\n  - id: s\n    entity: light.bulb_1\n    interval_s: 60\n"
    store = parse(text).stores[0]
    assert store.budget_units == 10240
    assert store.scenario.value == "complex_room"


SCRIPTED = (
    MINIMAL
    + """
script:
  - {at: "10:00", type: set_state, entity: light.bulb_1, state: {binary: true}}
  - {at: "10:05", type: publish, event_type: panic_pressed, origin: light.bulb_1,
     payload: {floor: 2}}
"""
)


def test_script_section_round_trips_and_drives_a_home():
    cfg = load(SCRIPTED)
    assert len(cfg.script) == 2
    assert cfg.script[0].at_ms == 36_000_000
    assert validate(parse(canonical_emit(cfg))) == cfg

    from hearth.home import build_home

    home = build_home(cfg, seed=1)
    panics = []
    home.bus.subscribe("panic_pressed", panics.append)
    home.step(11 * 3_600_000)
    from hearth.core import Binary

    assert home.entities.get_state("light.bulb_1") == Binary(True)
    assert len(panics) == 1
    assert panics[0].payload == {"floor": 2}
