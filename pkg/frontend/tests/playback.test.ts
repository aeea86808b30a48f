import { describe, expect, it } from "vitest";

import {
  frameAt,
  frameBounds,
  fitTransform,
  PlayerClock,
  project,
} from "../src/playback.js";

const CLIP = [
  [[0, 0], [1, 2]],
  [[2, 0], [3, 2]],
  [[4, 0], [5, 2]],
];

describe("frameBounds", () => {
  it("spans every frame and joint", () => {
    expect(frameBounds(CLIP)).toEqual({ minX: 0, minY: 0, maxX: 5, maxY: 2 });
  });

  it("falls back to a unit box on empty input", () => {
    expect(frameBounds([])).toEqual({ minX: 0, minY: 0, maxX: 1, maxY: 1 });
  });
});

describe("fitTransform / project", () => {
  const box = { minX: -1, minY: -2, maxX: 3, maxY: 2 };

  it("centers the box", () => {
    const fit = fitTransform(box, 200, 100, 10);
    expect(project(fit, 1, 0)).toEqual([100, 50]);
  });

  it("uses one scale for both axes and respects padding", () => {
    const fit = fitTransform(box, 200, 100, 10);
    // height is the binding constraint: 80 px for 4 units
    expect(fit.scale).toBeCloseTo(20);
    const [left] = project(fit, box.minX, 0);
    const [right] = project(fit, box.maxX, 0);
    expect(right - left).toBeCloseTo(4 * fit.scale);
    expect(left).toBeGreaterThanOrEqual(10);
    expect(right).toBeLessThanOrEqual(190);
  });

  it("flips y so larger data-y draws higher on the canvas", () => {
    const fit = fitTransform(box, 200, 100, 10);
    const [, top] = project(fit, 0, 2);
    const [, bottom] = project(fit, 0, -2);
    expect(top).toBeLessThan(bottom);
  });

  it("survives a degenerate box", () => {
    const fit = fitTransform({ minX: 1, minY: 1, maxX: 1, maxY: 1 }, 100, 100);
    const [x, y] = project(fit, 1, 1);
    expect(x).toBeCloseTo(50);
    expect(y).toBeCloseTo(50);
  });
});

describe("frameAt", () => {
  it("returns exact frames at integer times", () => {
    expect(frameAt(CLIP, 0)).toEqual(CLIP[0]);
    expect(frameAt(CLIP, 2)).toEqual(CLIP[2]);
  });

  it("interpolates midway", () => {
    expect(frameAt(CLIP, 0.5)).toEqual([[1, 0], [2, 2]]);
  });

  it("wraps from the last frame back to the first", () => {
    expect(frameAt(CLIP, 2.5)).toEqual([[2, 0], [3, 2]]);
  });

  it("copies rather than aliasing the source frame", () => {
    const frame = frameAt(CLIP, 1);
    frame[0]![0] = 99;
    expect(CLIP[1]![0]![0]).toBe(2);
  });
});

describe("PlayerClock", () => {
  it("advances by fps * dt and wraps", () => {
    const clock = new PlayerClock(10, 5);
    clock.advance(1);
    expect(clock.t).toBeCloseTo(5);
    expect(clock.frameIndex()).toBe(5);
    clock.advance(1.2);
    expect(clock.t).toBeCloseTo(1); // 11 mod 10
  });

  it("holds still while paused", () => {
    const clock = new PlayerClock(10);
    clock.toggle();
    clock.advance(3);
    expect(clock.t).toBe(0);
    clock.toggle();
    clock.advance(0.5);
    expect(clock.t).toBeGreaterThan(0);
  });

  it("scrub pauses and steps with wraparound", () => {
    const clock = new PlayerClock(4);
    clock.scrub(-1);
    expect(clock.playing).toBe(false);
    expect(clock.frameIndex()).toBe(3);
    clock.scrub(2);
    expect(clock.frameIndex()).toBe(1);
  });

  it("tolerates an empty clip", () => {
    const clock = new PlayerClock(0);
    clock.advance(1);
    clock.scrub(1);
    expect(clock.frameIndex()).toBe(0);
  });
});
