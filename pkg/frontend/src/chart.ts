/** Accuracy-per-round line chart over the session history. */

import type { HistoryRecord } from "./api.js";
import { polyline, type Canvas2D } from "./canvas.js";

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(count - 1, 1);
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const norm = rawStep / mag;
  const step = (norm <= 1 ? 1 : norm <= 2 ? 2 : norm <= 2.5 ? 2.5 : norm <= 5 ? 5 : 10) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step / 2; v += step) {
    ticks.push(Number(v.toFixed(12)));
  }
  return ticks;
}

export interface ChartLayout {
  /** Canvas-space vertices for rounds that have a test accuracy. */
  line: [number, number][];
  xTicks: { value: number; px: number }[];
  yTicks: { value: number; px: number }[];
  toX(labeled: number): number;
  toY(accuracy: number): number;
}

/** Accuracy (fixed 0..1 axis) against labels spent.  Rounds without a test
 * split are skipped, not drawn as zero. */
export function chartLayout(
  records: readonly HistoryRecord[],
  width: number,
  height: number,
  pad = 28,
): ChartLayout {
  const xs = records.map((r) => r.labeled_count);
  const xLo = 0;
  const xHi = Math.max(1, ...xs);
  const toX = (v: number) => pad + ((v - xLo) / (xHi - xLo)) * (width - 2 * pad);
  const toY = (v: number) => height - pad - v * (height - 2 * pad);
  const line: [number, number][] = [];
  for (const r of records) {
    if (r.test_accuracy !== null) {
      line.push([toX(r.labeled_count), toY(r.test_accuracy)]);
    }
  }
  return {
    line,
    xTicks: niceTicks(xLo, xHi, 6).map((value) => ({ value, px: toX(value) })),
    yTicks: [0, 0.25, 0.5, 0.75, 1].map((value) => ({ value, px: toY(value) })),
    toX,
    toY,
  };
}

export function drawChart(
  ctx: Canvas2D,
  records: readonly HistoryRecord[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const layout = chartLayout(records, width, height);
  ctx.globalAlpha = 1;
  ctx.strokeStyle = "#3a4150";
  ctx.lineWidth = 1;
  ctx.fillStyle = "#9aa3b2";
  ctx.font = "10px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "top";
  for (const t of layout.xTicks) {
    ctx.beginPath();
    ctx.moveTo(t.px, height - 28);
    ctx.lineTo(t.px, 28);
    ctx.stroke();
    ctx.fillText(String(t.value), t.px, height - 24);
  }
  ctx.textAlign = "right";
  ctx.textBaseline = "middle";
  for (const t of layout.yTicks) {
    ctx.beginPath();
    ctx.moveTo(28, t.px);
    ctx.lineTo(width - 28, t.px);
    ctx.stroke();
    ctx.fillText(t.value.toFixed(2), 26, t.px);
  }
  if (layout.line.length === 0) return;
  ctx.strokeStyle = "#4cc2ff";
  ctx.lineWidth = 2;
  polyline(ctx, layout.line);
  ctx.fillStyle = "#4cc2ff";
  for (const [x, y] of layout.line) {
    ctx.beginPath();
    ctx.arc(x, y, 3, 0, Math.PI * 2);
    ctx.fill();
  }
}
