/** Minimal structural slice of CanvasRenderingContext2D.
 *
 * Draw code takes this interface instead of the DOM type so unit tests can
 * pass a recording stub; a real 2d context satisfies it as-is.
 */

export interface Canvas2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  textAlign: string;
  textBaseline: string;
}

export function circle(ctx: Canvas2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, Math.PI * 2);
}

export function line(ctx: Canvas2D, x0: number, y0: number, x1: number, y1: number): void {
  ctx.beginPath();
  ctx.moveTo(x0, y0);
  ctx.lineTo(x1, y1);
  ctx.stroke();
}

export function polyline(ctx: Canvas2D, pts: readonly [number, number][]): void {
  if (pts.length < 2) return;
  ctx.beginPath();
  const [x0, y0] = pts[0]!;
  ctx.moveTo(x0, y0);
  for (let i = 1; i < pts.length; i++) {
    const [x, y] = pts[i]!;
    ctx.lineTo(x, y);
  }
  ctx.stroke();
}
