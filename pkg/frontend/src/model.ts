// Dashboard view-model: pure state, no DOM. The rendering layer draws
// whatever lives here; tests drive this directly.

import type { EntityState, EventFrame, StatePayload } from "./types.js";

// Sensors whose active state is an alarm, rendered in warning colors.
const ALARM_KINDS = new Set([
  "door_sensor",
  "smoke_sensor",
  "co_sensor",
  "flood_sensor",
  "panic_button",
]);

// Entities the user can act on from a tile.
const ACTIONABLE_KINDS = new Set(["bulb", "spotlight", "switch", "outlet", "panic_button"]);

export interface TileViewModel {
  entityId: string;
  kind: string;
  display: string;
  actionable: boolean;
  alert: boolean;
  /** current binary state, when the entity is binary */
  isOn?: boolean;
}

function describe(state: StatePayload): string {
  switch (state.type) {
    case "binary":
      return state.value ? "on" : "off";
    case "numeric":
      return state.unit ? `${state.value.toFixed(1)} ${state.unit}` : state.value.toFixed(1);
    case "unavailable":
      return "unavailable";
  }
}

export function tileFromEntity(entity: EntityState): TileViewModel {
  const isOn = entity.state.type === "binary" ? entity.state.value : undefined;
  return {
    entityId: entity.entity_id,
    kind: entity.kind,
    display: describe(entity.state),
    actionable: ACTIONABLE_KINDS.has(entity.kind),
    alert: ALARM_KINDS.has(entity.kind) && isOn === true,
  ...(isOn === undefined ? {} : { isOn }),
  };
}

const FEED_LIMIT = 200;

export class DashboardModel {
  tiles = new Map<string, TileViewModel>();
  feed: EventFrame[] = [];

  loadStates(entities: EntityState[]): void {
    this.tiles = new Map(entities.map((e) => [e.entity_id, tileFromEntity(e)]));
  }

  /**
   * Apply one stream frame. Only state_changed frames move tiles; the
   * frame's new value is authoritative (state fidelity: a tile always
   * shows the last frame received for its entity, never a local guess).
   * Returns the changed entity id, or null.
   */
  applyFrame(frame: EventFrame): string | null {
    this.feed.unshift(frame);
    if (this.feed.length > FEED_LIMIT) {
      this.feed.pop();
    }
    if (frame.event_type !== "state_changed") {
      return null;
    }
    const tile = this.tiles.get(frame.origin);
    const next = frame.payload["new"] as StatePayload | undefined;
    if (tile === undefined || next === undefined) {
      return null;
    }
    const updated = tileFromEntity({
      entity_id: tile.entityId,
      kind: tile.kind,
      state: next,
      attributes: {},
      last_changed: frame.timestamp,
    });
    this.tiles.set(tile.entityId, updated);
    return tile.entityId;
  }
}

// -- user actions -----------------------------------------------------------

export interface ServiceResponse {
  ok: boolean;
  status: number;
  code?: string;
  message?: string;
}

export interface ActionClient {
  callService(
    domain: string,
    service: string,
    entityId: string,
    data?: Record<string, unknown>,
  ): Promise<ServiceResponse>;
  activateScene(sceneId: string): Promise<ServiceResponse>;
  triggerAutomation(
    automationId: string,
    skipConditions: boolean,
  ): Promise<ServiceResponse & { outcome?: string }>;
}

/**
 * Turns user gestures into gateway calls. Never touches the model: tiles
 * move only when the resulting frame comes back over the stream, and a
 * failed POST therefore leaves every tile exactly where it was.
 */
export class ActionController {
  constructor(
    private client: ActionClient,
    private model: DashboardModel,
    private toast: (message: string) => void,
  ) {}

  private domainOf(entityId: string): string {
    return entityId.split(".", 1)[0];
  }

  async toggle(entityId: string): Promise<void> {
    const tile = this.model.tiles.get(entityId);
    if (tile === undefined || !tile.actionable) {
      return;
    }
    const service = tile.isOn ? "turn_off" : "turn_on";
    const response = await this.client.callService(this.domainOf(entityId), service, entityId);
    if (!response.ok) {
      this.toast(`${response.code ?? response.status}: ${response.message ?? "request failed"}`);
    }
  }

  async pressPanic(entityId = "button.panic"): Promise<void> {
    const response = await this.client.callService("button", "turn_on", entityId);
    if (!response.ok) {
      this.toast(`${response.code ?? response.status}: ${response.message ?? "request failed"}`);
    }
  }

  async activateScene(sceneId: string): Promise<void> {
    const response = await this.client.activateScene(sceneId);
    if (!response.ok) {
      this.toast(`${response.code ?? response.status}: ${response.message ?? "request failed"}`);
    }
  }

  async triggerAutomation(automationId: string, skipConditions = false): Promise<void> {
    const response = await this.client.triggerAutomation(automationId, skipConditions);
    if (!response.ok) {
      this.toast(`${response.code ?? response.status}: ${response.message ?? "request failed"}`);
    } else if (response.outcome === "skipped") {
      this.toast(`${automationId}: skipped (conditions not met)`);
    }
  }
}
