// Wire types for the gateway API.

export type StatePayload =
  | { type: "binary"; value: boolean }
  | { type: "numeric"; value: number; unit?: string }
  | { type: "unavailable" };

export interface EntityState {
  entity_id: string;
  kind: string;
  state: StatePayload;
  attributes: Record<string, unknown>;
  last_changed: number;
}

export interface EventFrame {
  event_type: string;
  timestamp: number;
  origin: string;
  payload: Record<string, unknown>;
}

export interface MetricsRow {
  store_id: string;
  strategy: string;
  interval_s: number;
  bytes_used: number;
  peak_units: number;
  point_count: number;
  budget_units: number;
}

export interface ApiError {
  status: number;
  code: string;
  message: string;
}

export interface SceneInfo {
  scene_id: string;
  name: string;
  targets: string[];
}

export interface AutomationInfo {
  automation_id: string;
  scenario: string;
  enabled: boolean;
}

export interface TriggerOutcome {
  automation_id: string;
  status: "executed" | "skipped";
  actions: { ok: boolean; error?: string }[];
}
