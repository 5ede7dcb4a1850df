// Memory chart: per-store bytes_used history with the budget line.
// The scale math is pure and exported so tests can pin the guarantee
// that no plotted point ever sits above the budget line.

import type { MetricsRow } from "./types.js";

export interface SeriesPoint {
  t: number;
  bytes: number;
}

const HISTORY_LIMIT = 600; // ~10 minutes at 1 Hz

export class MetricsHistory {
  series = new Map<string, SeriesPoint[]>();
  budgets = new Map<string, number>();
  peaks = new Map<string, number>();

  record(rows: MetricsRow[], t: number): void {
    for (const row of rows) {
      const points = this.series.get(row.store_id) ?? [];
      points.push({ t, bytes: row.bytes_used });
      if (points.length > HISTORY_LIMIT) {
        points.shift();
      }
      this.series.set(row.store_id, points);
      this.budgets.set(row.store_id, row.budget_units);
      this.peaks.set(row.store_id, row.peak_units);
    }
  }

  storeIds(): string[] {
    return [...this.series.keys()];
  }
}

export interface PlottedPoint {
  x: number;
  y: number;
}

export interface ChartLayout {
  width: number;
  height: number;
  budgetY: number;
  peakY: number | null;
  points: PlottedPoint[];
}

/** Pixel y for a value on a 0..yMax axis growing downward. */
function yFor(value: number, yMax: number, height: number): number {
  return height - (value / yMax) * height;
}

/**
 * Lay the series out in pixel space. The y axis tops out 15% above the
 * budget so the budget line is always visible, and values are clamped to
 * the budget before plotting: a point can touch the line, never cross it.
 */
export function layoutChart(
  points: SeriesPoint[],
  budget: number,
  peak: number | null,
  width: number,
  height: number,
): ChartLayout {
  const yMax = budget * 1.15;
  const n = points.length;
  const plotted = points.map((p, i) => ({
    x: n > 1 ? (i / (n - 1)) * width : 0,
    y: yFor(Math.min(p.bytes, budget), yMax, height),
  }));
  return {
    width,
    height,
    budgetY: yFor(budget, yMax, height),
    peakY: peak === null ? null : yFor(Math.min(peak, budget), yMax, height),
    points: plotted,
  };
}

export function drawChart(
  canvas: HTMLCanvasElement,
  points: SeriesPoint[],
  budget: number,
  peak: number | null,
): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    return;
  }
  const { width, height } = canvas;
  const layout = layoutChart(points, budget, peak, width, height);
  ctx.clearRect(0, 0, width, height);

  ctx.strokeStyle = "#e0533d";
  ctx.setLineDash([6, 4]);
  ctx.beginPath();
  ctx.moveTo(0, layout.budgetY);
  ctx.lineTo(width, layout.budgetY);
  ctx.stroke();
  ctx.setLineDash([]);

  if (layout.peakY !== null) {
    ctx.strokeStyle = "#e0a53d";
    ctx.beginPath();
    ctx.moveTo(0, layout.peakY);
    ctx.lineTo(width, layout.peakY);
    ctx.stroke();
  }

  if (layout.points.length > 0) {
    ctx.strokeStyle = "#3d7be0";
    ctx.lineWidth = 2;
    ctx.beginPath();
    layout.points.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
    ctx.stroke();
    ctx.lineWidth = 1;
  }
}
