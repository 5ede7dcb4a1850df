// DOM layer: renders the view-model and wires gestures to the controller.

import { GatewayClient, connectStream, type StreamHandle } from "./api.js";
import { MetricsHistory, drawChart } from "./chart.js";
import { ActionController, DashboardModel, type TileViewModel } from "./model.js";
import type { EventFrame } from "./types.js";

const KIND_ICONS: Record<string, string> = {
  bulb: "💡",
  spotlight: "🔦",
  motion_sensor: "🚶",
  switch: "🎚",
  smoke_sensor: "🔥",
  co_sensor: "☁",
  flood_sensor: "💧",
  panic_button: "🆘",
  door_sensor: "🚪",
  outlet: "🔌",
  temperature_sensor: "🌡",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export class App {
  private model = new DashboardModel();
  private metrics = new MetricsHistory();
  private client = new GatewayClient();
  private controller: ActionController;
  private stream: StreamHandle | null = null;
  private selectedStore: string | null = null;
  private connected = false;

  private tilesRoot = document.getElementById("tiles") as HTMLElement;
  private feedRoot = document.getElementById("feed") as HTMLElement;
  private scenesRoot = document.getElementById("scenes") as HTMLElement;
  private automationsRoot = document.getElementById("automations") as HTMLElement;
  private banner = document.getElementById("banner") as HTMLElement;
  private toasts = document.getElementById("toasts") as HTMLElement;
  private storeSelect = document.getElementById("store-select") as HTMLSelectElement;
  private canvas = document.getElementById("memory-chart") as HTMLCanvasElement;

  constructor() {
    this.controller = new ActionController(this.client, this.model, (m) => this.toast(m));
  }

  async start(): Promise<void> {
    try {
      this.model.loadStates(await this.client.states());
      this.renderTiles();
      await this.renderScenes();
      await this.renderAutomations();
      this.setConnected(true);
    } catch {
      this.setConnected(false);
    }
    this.stream = connectStream(
      "",
      (frame) => this.onFrame(frame),
      (up) => this.setConnected(up),
    );
    this.storeSelect.addEventListener("change", () => {
      this.selectedStore = this.storeSelect.value || null;
      this.renderChart();
    });
    setInterval(() => void this.pollMetrics(), 1000);
  }

  stop(): void {
    this.stream?.close();
  }

  private setConnected(up: boolean): void {
    this.connected = up;
    this.banner.hidden = up;
  }

  private toast(message: string): void {
    const node = el("div", "toast", message);
    this.toasts.appendChild(node);
    setTimeout(() => node.remove(), 4000);
  }

  private onFrame(frame: EventFrame): void {
    const changed = this.model.applyFrame(frame);
    this.renderFeedEntry(frame);
    if (changed !== null) {
      const tile = this.model.tiles.get(changed);
      const node = this.tilesRoot.querySelector(`[data-entity="${changed}"]`);
      if (tile && node instanceof HTMLElement) {
        this.paintTile(node, tile);
      }
    }
  }

  private renderTiles(): void {
    this.tilesRoot.replaceChildren();
    for (const tile of this.model.tiles.values()) {
      const node = el("div", "tile");
      node.dataset.entity = tile.entityId;
      node.append(
        el("div", "tile-icon", KIND_ICONS[tile.kind] ?? "▫"),
        el("div", "tile-name", tile.entityId),
        el("div", "tile-state"),
      );
      if (tile.actionable) {
        node.classList.add("actionable");
        node.addEventListener("click", () => {
          if (tile.kind === "panic_button") {
            void this.controller.pressPanic(tile.entityId);
          } else {
            void this.controller.toggle(tile.entityId);
          }
        });
      }
      this.paintTile(node, tile);
      this.tilesRoot.appendChild(node);
    }
  }

  private paintTile(node: HTMLElement, tile: TileViewModel): void {
    node.classList.toggle("alert", tile.alert);
    node.classList.toggle("on", tile.isOn === true);
    const state = node.querySelector(".tile-state");
    if (state) {
      state.textContent = tile.display;
    }
  }

  private renderFeedEntry(frame: EventFrame): void {
    const t = (frame.timestamp / 1000).toFixed(0).padStart(6, " ");
    const line = el("div", "feed-line", `${t}s  ${frame.event_type}  ${frame.origin}`);
    this.feedRoot.prepend(line);
    while (this.feedRoot.childElementCount > 50) {
      this.feedRoot.lastElementChild?.remove();
    }
  }

  private async renderScenes(): Promise<void> {
    const scenes = await this.client.scenes();
    this.scenesRoot.replaceChildren();
    for (const scene of scenes) {
      const button = el("button", "chip", scene.name);
      button.addEventListener("click", () => void this.controller.activateScene(scene.scene_id));
      this.scenesRoot.appendChild(button);
    }
  }

  private async renderAutomations(): Promise<void> {
    const automations = await this.client.automations();
    this.automationsRoot.replaceChildren();
    for (const automation of automations) {
      const row = el("div", "automation-row");
      const skip = el("input") as HTMLInputElement;
      skip.type = "checkbox";
      skip.title = "skip conditions";
      const button = el("button", "chip", automation.automation_id);
      button.disabled = !automation.enabled;
      button.addEventListener("click", () =>
        void this.controller.triggerAutomation(automation.automation_id, skip.checked),
      );
      row.append(button, skip);
      this.automationsRoot.appendChild(row);
    }
  }

  private async pollMetrics(): Promise<void> {
    if (!this.connected) {
      return; // chart pauses while offline, resumes on reconnect
    }
    try {
      const rows = await this.client.metrics();
      this.metrics.record(rows, Date.now());
      if (this.selectedStore === null && rows.length > 0) {
        this.selectedStore = rows[0].store_id;
      }
      if (this.storeSelect.childElementCount !== rows.length) {
        this.storeSelect.replaceChildren(
          ...rows.map((row) => {
            const option = el("option", undefined, row.store_id);
            option.value = row.store_id;
            return option;
          }),
        );
        if (this.selectedStore !== null) {
          this.storeSelect.value = this.selectedStore;
        }
      }
      this.renderChart();
    } catch {
      // connection loss is reported by the stream handler
    }
  }

  private renderChart(): void {
    if (this.selectedStore === null) {
      return;
    }
    const points = this.metrics.series.get(this.selectedStore) ?? [];
    const budget = this.metrics.budgets.get(this.selectedStore) ?? 10240;
    const peak = this.metrics.peaks.get(this.selectedStore) ?? null;
    drawChart(this.canvas, points, budget, peak);
  }
}
