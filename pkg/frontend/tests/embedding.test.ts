import { describe, expect, it } from "vitest";

import type { EmbeddingView } from "../src/api.js";
import {
  classColor,
  drawScatter,
  nearestPoint,
  pointStyle,
  scatterFit,
  scatterPoints,
} from "../src/embedding.js";
import { project } from "../src/playback.js";
import { recordingContext } from "./stubs.js";

const VIEW: EmbeddingView = {
  ids: ["p", "q", "r"],
  points: [[0, 0], [1, 0], [0, 1]],
  cluster: [0, 1, 1],
  labeled: [true, false, false],
  label: [2, null, null],
  max_prob: [0.9, 0.4, 0.5],
  entropy: [0.3, 1.0, 0.9],
  queried: [false, false, true],
};

describe("scatterPoints", () => {
  it("zips the parallel arrays by index", () => {
    const pts = scatterPoints(VIEW);
    expect(pts).toHaveLength(3);
    expect(pts[1]).toEqual({
      id: "q",
      x: 1,
      y: 0,
      cluster: 1,
      labeled: false,
      label: null,
      queried: false,
    });
    expect(pts[0]?.label).toBe(2);
    expect(pts[2]?.queried).toBe(true);
  });
});

describe("pointStyle", () => {
  const pts = scatterPoints(VIEW);

  it("emphasizes queried points over everything else", () => {
    const queried = pointStyle(pts[2]!);
    const labeled = pointStyle(pts[0]!);
    const plain = pointStyle(pts[1]!);
    expect(queried.ring).toBe(true);
    expect(queried.radius).toBeGreaterThan(labeled.radius);
    expect(queried.radius).toBeGreaterThan(plain.radius);
    expect(labeled.ring).toBe(false);
    expect(plain.ring).toBe(false);
  });

  it("grows the queried point under the cursor a bit more", () => {
    const normal = pointStyle(pts[2]!, null);
    const selected = pointStyle(pts[2]!, "r");
    expect(selected.radius).toBeGreaterThan(normal.radius);
  });

  it("colors by class once labeled, muted gray otherwise", () => {
    expect(pointStyle(pts[0]!).fill).toBe(classColor(2));
    expect(pointStyle(pts[1]!).fill).toBe("#9aa3b2");
    expect(pointStyle(pts[1]!).alpha).toBeLessThan(pointStyle(pts[0]!).alpha);
  });
});

describe("classColor", () => {
  it("wraps past the palette", () => {
    expect(classColor(0)).toBe(classColor(10));
    expect(classColor(3)).not.toBe(classColor(4));
  });
});

describe("nearestPoint", () => {
  const pts = scatterPoints(VIEW);
  const fit = scatterFit(pts, 200, 200);

  it("picks the point under the cursor", () => {
    const [px, py] = project(fit, 1, 0);
    expect(nearestPoint(pts, fit, px + 3, py - 2)?.id).toBe("q");
  });

  it("returns undefined beyond the pick radius", () => {
    const [px, py] = project(fit, 1, 0);
    expect(nearestPoint(pts, fit, px + 40, py)).toBeUndefined();
  });
});

describe("drawScatter", () => {
  it("draws queried markers after the crowd so they sit on top", () => {
    const ctx = recordingContext();
    const pts = scatterPoints(VIEW);
    drawScatter(ctx, pts, scatterFit(pts, 200, 200), "r");
    const fills = ctx.calls.filter((c) => c.op === "fill").length;
    const strokes = ctx.calls.filter((c) => c.op === "stroke").length;
    expect(fills).toBe(3); // one disc per point
    expect(strokes).toBe(1); // one ring, on the queried point
    // the ring is the final shape drawn
    const lastShape = [...ctx.calls].reverse().find((c) => c.op === "fill" || c.op === "stroke");
    expect(lastShape?.op).toBe("stroke");
  });
});
