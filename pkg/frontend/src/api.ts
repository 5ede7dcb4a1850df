// Gateway client: thin fetch wrappers plus the reconnecting event stream.

import type {
  AutomationInfo,
  EntityState,
  EventFrame,
  MetricsRow,
  SceneInfo,
  TriggerOutcome,
} from "./types.js";
import type { ActionClient, ServiceResponse } from "./model.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function toServiceResponse(resp: Response): Promise<ServiceResponse> {
  if (resp.ok) {
    return { ok: true, status: resp.status };
  }
  try {
    const body = (await resp.json()) as { code?: string; message?: string };
    return { ok: false, status: resp.status, code: body.code, message: body.message };
  } catch {
    return { ok: false, status: resp.status };
  }
}

export class GatewayClient implements ActionClient {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.base}${path}`);
    if (!resp.ok) {
      throw new Error(`GET ${path} -> ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  states(): Promise<EntityState[]> {
    return this.getJson("/api/states");
  }

  metrics(): Promise<MetricsRow[]> {
    return this.getJson("/api/memstore/metrics");
  }

  scenes(): Promise<SceneInfo[]> {
    return this.getJson("/api/scenes");
  }

  automations(): Promise<AutomationInfo[]> {
    return this.getJson("/api/automations");
  }

  async callService(
    domain: string,
    service: string,
    entityId: string,
    data?: Record<string, unknown>,
  ): Promise<ServiceResponse> {
    const resp = await this.fetchFn(`${this.base}/api/services/${domain}/${service}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ entity_id: entityId, data: data ?? {} }),
    });
    return toServiceResponse(resp);
  }

  async activateScene(sceneId: string): Promise<ServiceResponse> {
    const resp = await this.fetchFn(`${this.base}/api/scenes/${sceneId}/activate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: "{}",
    });
    return toServiceResponse(resp);
  }

  async triggerAutomation(
    automationId: string,
    skipConditions: boolean,
  ): Promise<ServiceResponse & { outcome?: string }> {
    const resp = await this.fetchFn(`${this.base}/api/automations/${automationId}/trigger`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ skip_conditions: skipConditions }),
    });
    const base = await toServiceResponse(resp);
    if (!resp.ok) {
      return base;
    }
    const body = (await resp.json()) as TriggerOutcome;
    return { ...base, outcome: body.status };
  }
}

// -- event stream -------------------------------------------------------------

export interface StreamSocket {
  onmessage: ((event: { data: string }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => StreamSocket;

export interface StreamHandle {
  close(): void;
}

/**
 * Connect to /api/stream and deliver each frame in arrival order.
 * Reconnects with exponential backoff; onStatus reports connectivity so
 * the UI can show a banner and pause charts while offline.
 */
export function connectStream(
  base: string,
  onFrame: (frame: EventFrame) => void,
  onStatus: (connected: boolean) => void,
  factory?: SocketFactory,
  schedule: (fn: () => void, ms: number) => unknown = (fn, ms) => setTimeout(fn, ms),
): StreamHandle {
  const makeSocket: SocketFactory =
    factory ??
    ((url) => new WebSocket(url) as unknown as StreamSocket);
  let closed = false;
  let attempts = 0;
  let socket: StreamSocket | null = null;

  const url = () => {
    if (base.startsWith("http")) {
      return `${base.replace(/^http/, "ws")}/api/stream`;
    }
    const scheme = location.protocol === "https:" ? "wss" : "ws";
    return `${scheme}://${location.host}/api/stream`;
  };

  const open = () => {
    if (closed) {
      return;
    }
    socket = makeSocket(url());
    socket.onopen = () => {
      attempts = 0;
      onStatus(true);
    };
    socket.onmessage = (event) => {
      onFrame(JSON.parse(event.data) as EventFrame);
    };
    socket.onclose = () => {
      onStatus(false);
      if (!closed) {
        const backoff = Math.min(1000 * 2 ** attempts, 15000);
        attempts += 1;
        schedule(open, backoff);
      }
    };
  };
  open();

  return {
    close() {
      closed = true;
      socket?.close();
    },
  };
}
