"""Tour of the runtime backbone: entities, states, events, services.

Run from the repository root:

    PYTHONPATH=src python3 demos/01_event_bus_tour.py
"""

from hearth import Binary, DeviceKind, Entity, Event, Numeric
from hearth.devices import build_fleet
from hearth.home import Home


def main() -> None:
    home = Home(seed=1)
    home.register_sims(build_fleet())
    home.install_standard_services()

    print("== the managed fleet ==")
    for entity in home.entities.enumerate():
        print(f"  {entity.id:32s} {entity.kind.value:20s} {entity.state}")

    print("\n== subscriptions are decoupled from publishers ==")
    feed = []
    home.bus.subscribe("*", feed.append)
    delivered = home.bus.publish(Event("nobody_listens_for_this", 0, "system"))
    print(f"  publish with only the wildcard listening delivered to {delivered} subscriber(s)")

    print("\n== every state change is exactly one event ==")
    home.entities.set_state("binary_sensor.door", Binary(True), t_ms=1_000)
    home.entities.set_state("sensor.temperature", Numeric(21.5, "°C"), t_ms=2_000)
    for event in feed[-2:]:
        print(f"  {event.timestamp:>6} ms  {event.event_type:14s} {event.origin:24s} -> {event.payload['new']}")

    print("\n== services drive devices, and the call itself is an event ==")
    home.services.call("light", "turn_on", "light.bulb_1", {"brightness": 254}, t_ms=3_000)
    bulb = home.entities.get("light.bulb_1")
    print(f"  light.bulb_1 state={bulb.state} attributes={bulb.attributes}")
    print(f"  bus saw {len(feed)} events total: {[e.event_type for e in feed]}")


if __name__ == "__main__":
    main()
