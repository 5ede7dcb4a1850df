"""Automations and scenes: edges, conditions, manual runs, idempotence.

    PYTHONPATH=src python3 demos/03_automations_and_scenes.py
"""

from hearth import Binary, Numeric
from hearth.devices import TEMPERATURE_ENTITY, build_fleet
from hearth.harness import sample_config
from hearth.home import Home


def main() -> None:
    cfg = sample_config()
    home = Home(seed=2)
    home.register_sims(build_fleet())
    home.install_standard_services()
    for scene in cfg.scenes:
        home.engine.add_scene(scene)
    for automation in cfg.automations:
        home.engine.add_automation(automation)
    home.start_engine()

    print("== numeric triggers fire on crossings, not levels ==")
    series = [24.0, 26.0, 27.0, 24.0, 26.0]
    for i, v in enumerate(series):
        home.entities.set_state(TEMPERATURE_ENTITY, Numeric(v, "°C"), i * 15_000)
        print(f"  t={i*15:>3d}s temp={v:4.1f}  fired so far: {home.engine.fired_count}")
    print("  (two upward crossings of 25.0 -> the dimming rule ran twice)")

    print("\n== manual trigger honors conditions unless bypassed ==")
    home.entities.set_state("switch.wall_3", Binary(True), 100_000)  # condition now fails
    outcome = home.engine.manual_trigger("manual_test_bulb")
    print(f"  honored:  {outcome.status.value}")
    outcome = home.engine.manual_trigger("manual_test_bulb", skip_conditions=True)
    print(f"  bypassed: {outcome.status.value}")

    print("\n== scenes apply absolute states, so re-activation is a no-op ==")
    home.engine.activate_scene("good_morning")
    first = {e.id: e.state for e in home.entities.enumerate()}
    home.engine.activate_scene("good_morning")
    second = {e.id: e.state for e in home.entities.enumerate()}
    print(f"  good_morning twice, snapshots equal: {first == second}")
    print(f"  bulbs: {home.entities.get_state('light.bulb_1')}, {home.entities.get_state('light.bulb_2')}")

    print("\n== the morning scene also runs by itself at 07:00 ==")
    fired_before = home.engine.fired_count
    home.step(7 * 3_600_000)  # jump past 07:00
    print(f"  time triggers fired in the jump: {home.engine.fired_count - fired_before}")


if __name__ == "__main__":
    main()
