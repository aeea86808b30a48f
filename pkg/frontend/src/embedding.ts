/** Latent-space scatter: layout, per-point styling, picking, drawing.
 *
 * Queried samples (the open batch) must stand out, so they get a larger
 * radius plus a bright ring; labeled points take their class color and the
 * rest stay muted gray.
 */

import type { EmbeddingView } from "./api.js";
import { circle, type Canvas2D } from "./canvas.js";
import { fitTransform, project, type Fit } from "./playback.js";

export interface ScatterPoint {
  id: string;
  x: number;
  y: number;
  cluster: number;
  labeled: boolean;
  label: number | null;
  queried: boolean;
}

export const CLASS_COLORS = [
  "#4cc2ff",
  "#ff9f43",
  "#2ecc71",
  "#e74c8b",
  "#b388ff",
  "#ffd166",
  "#00bfa5",
  "#ff6b6b",
  "#8d99ae",
  "#a3e635",
] as const;

export function classColor(index: number): string {
  return CLASS_COLORS[((index % CLASS_COLORS.length) + CLASS_COLORS.length) % CLASS_COLORS.length]!;
}

/** Zip the service's parallel arrays into one record per sample. */
export function scatterPoints(view: EmbeddingView): ScatterPoint[] {
  return view.ids.map((id, i) => ({
    id,
    x: view.points[i]?.[0] ?? 0,
    y: view.points[i]?.[1] ?? 0,
    cluster: view.cluster[i] ?? 0,
    labeled: view.labeled[i] ?? false,
    label: view.label[i] ?? null,
    queried: view.queried[i] ?? false,
  }));
}

export function scatterFit(points: readonly ScatterPoint[], width: number, height: number, pad = 18): Fit {
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  for (const p of points) {
    if (p.x < minX) minX = p.x;
    if (p.x > maxX) maxX = p.x;
    if (p.y < minY) minY = p.y;
    if (p.y > maxY) maxY = p.y;
  }
  if (minX > maxX) { minX = 0; minY = 0; maxX = 1; maxY = 1; }
  return fitTransform({ minX, minY, maxX, maxY }, width, height, pad);
}

export interface PointStyle {
  radius: number;
  fill: string;
  ring: boolean; // bright outline marking the open batch
  alpha: number;
}

export function pointStyle(p: ScatterPoint, selectedId: string | null = null): PointStyle {
  const fill = p.label !== null ? classColor(p.label) : "#9aa3b2";
  if (p.queried) {
    return {
      radius: p.id === selectedId ? 9 : 7,
      fill,
      ring: true,
      alpha: 1,
    };
  }
  return {
    radius: 4,
    fill,
    ring: false,
    alpha: p.labeled ? 0.95 : 0.45,
  };
}

/** Pixel-space hit test; undefined when nothing lies within maxDist. */
export function nearestPoint(
  points: readonly ScatterPoint[],
  fit: Fit,
  px: number,
  py: number,
  maxDist = 12,
): ScatterPoint | undefined {
  let best: ScatterPoint | undefined;
  let bestD = maxDist * maxDist;
  for (const p of points) {
    const [sx, sy] = project(fit, p.x, p.y);
    const d = (sx - px) ** 2 + (sy - py) ** 2;
    if (d <= bestD) {
      bestD = d;
      best = p;
    }
  }
  return best;
}

export function drawScatter(
  ctx: Canvas2D,
  points: readonly ScatterPoint[],
  fit: Fit,
  selectedId: string | null = null,
): void {
  ctx.clearRect(0, 0, fit.width, fit.height);
  // plain points underneath, queried markers on top
  const plain = points.filter((p) => !p.queried);
  const hot = points.filter((p) => p.queried);
  for (const p of [...plain, ...hot]) {
    const style = pointStyle(p, selectedId);
    const [x, y] = project(fit, p.x, p.y);
    ctx.globalAlpha = style.alpha;
    ctx.fillStyle = style.fill;
    circle(ctx, x, y, style.radius);
    ctx.fill();
    if (style.ring) {
      ctx.strokeStyle = p.id === selectedId ? "#ffffff" : "#ffd166";
      ctx.lineWidth = 2;
      circle(ctx, x, y, style.radius + 2);
      ctx.stroke();
    }
  }
  ctx.globalAlpha = 1;
}
