/** Clip playback: fitting keypoint frames to a canvas, interpolating between
 * frames, and a small wall-clock-driven player. */

import { circle, polyline, type Canvas2D } from "./canvas.js";

export interface Box {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

/** Bounding box over every frame and keypoint of a [T][N][2] clip. */
export function frameBounds(frames: readonly number[][][]): Box {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const frame of frames) {
    for (const pt of frame) {
      const x = pt[0] ?? 0;
      const y = pt[1] ?? 0;
      if (x < minX) minX = x;
      if (x > maxX) maxX = x;
      if (y < minY) minY = y;
      if (y > maxY) maxY = y;
    }
  }
  if (minX > maxX) return { minX: 0, minY: 0, maxX: 1, maxY: 1 };
  return { minX, minY, maxX, maxY };
}

export interface Fit {
  scale: number;
  cx: number;
  cy: number;
  width: number;
  height: number;
}

/** Uniform-scale transform centering `box` in a width x height canvas. */
export function fitTransform(box: Box, width: number, height: number, pad = 24): Fit {
  const w = Math.max(box.maxX - box.minX, 1e-9);
  const h = Math.max(box.maxY - box.minY, 1e-9);
  const scale = Math.min((width - 2 * pad) / w, (height - 2 * pad) / h);
  return {
    scale,
    cx: (box.minX + box.maxX) / 2,
    cy: (box.minY + box.maxY) / 2,
    width,
    height,
  };
}

/** Data coordinates to canvas pixels; y points up in data, down on canvas. */
export function project(fit: Fit, x: number, y: number): [number, number] {
  return [
    fit.width / 2 + (x - fit.cx) * fit.scale,
    fit.height / 2 - (y - fit.cy) * fit.scale,
  ];
}

/** Linear interpolation at fractional frame time t, wrapping past the end. */
export function frameAt(frames: readonly number[][][], t: number): number[][] {
  const T = frames.length;
  if (T === 0) return [];
  const base = ((Math.floor(t) % T) + T) % T;
  const frac = t - Math.floor(t);
  const a = frames[base]!;
  if (frac === 0) return a.map((pt) => pt.slice());
  const b = frames[(base + 1) % T]!;
  return a.map((pt, i) => {
    const q = b[i] ?? pt;
    return pt.map((v, d) => v + ((q[d] ?? v) - v) * frac);
  });
}

/** Accumulates playback time; `advance` is fed real elapsed seconds. */
export class PlayerClock {
  t = 0;
  playing = true;

  constructor(
    public frames: number,
    public fps = 12,
  ) {}

  advance(dtSeconds: number): void {
    if (!this.playing || this.frames <= 0) return;
    this.t = (this.t + dtSeconds * this.fps) % this.frames;
  }

  frameIndex(): number {
    return this.frames > 0 ? Math.floor(this.t) % this.frames : 0;
  }

  scrub(delta: number): void {
    if (this.frames <= 0) return;
    this.playing = false;
    this.t = (((Math.round(this.t) + delta) % this.frames) + this.frames) % this.frames;
  }

  toggle(): void {
    this.playing = !this.playing;
  }

  reset(frames: number): void {
    this.frames = frames;
    this.t = 0;
    this.playing = true;
  }
}

export interface DrawOptions {
  color?: string;
  jointRadius?: number;
  trail?: readonly number[][][]; // earlier frames, oldest first
}

export function drawFrame(
  ctx: Canvas2D,
  frame: readonly number[][],
  fit: Fit,
  opts: DrawOptions = {},
): void {
  const color = opts.color ?? "#4cc2ff";
  const radius = opts.jointRadius ?? 4;
  const trail = opts.trail ?? [];
  // ghost trail first so the live frame draws on top
  trail.forEach((past, i) => {
    ctx.globalAlpha = (0.25 * (i + 1)) / (trail.length + 1);
    ctx.strokeStyle = color;
    ctx.lineWidth = 1;
    polyline(ctx, past.map((pt) => project(fit, pt[0] ?? 0, pt[1] ?? 0)));
  });
  ctx.globalAlpha = 1;
  const pts = frame.map((pt) => project(fit, pt[0] ?? 0, pt[1] ?? 0));
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  polyline(ctx, pts);
  ctx.fillStyle = color;
  for (const [x, y] of pts) {
    circle(ctx, x, y, radius);
    ctx.fill();
  }
}
