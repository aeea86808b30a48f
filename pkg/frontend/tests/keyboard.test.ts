import { describe, expect, it } from "vitest";

import { keyAction } from "../src/keyboard.js";

describe("keyAction", () => {
  it("maps digits to class indices inside the class count", () => {
    expect(keyAction("1", 4)).toEqual({ kind: "label", classIndex: 0 });
    expect(keyAction("4", 4)).toEqual({ kind: "label", classIndex: 3 });
    expect(keyAction("5", 4)).toBeNull(); // only 4 classes
    expect(keyAction("9", 12)).toEqual({ kind: "label", classIndex: 8 });
    expect(keyAction("0", 12)).toBeNull(); // no tenth key
  });

  it("navigates with all four arrows", () => {
    expect(keyAction("ArrowRight", 2)).toEqual({ kind: "move", delta: 1 });
    expect(keyAction("ArrowDown", 2)).toEqual({ kind: "move", delta: 1 });
    expect(keyAction("ArrowLeft", 2)).toEqual({ kind: "move", delta: -1 });
    expect(keyAction("ArrowUp", 2)).toEqual({ kind: "move", delta: -1 });
  });

  it("covers transport and submit keys", () => {
    expect(keyAction(" ", 2)).toEqual({ kind: "toggle-play" });
    expect(keyAction(".", 2)).toEqual({ kind: "scrub", delta: 1 });
    expect(keyAction(",", 2)).toEqual({ kind: "scrub", delta: -1 });
    expect(keyAction("Enter", 2)).toEqual({ kind: "submit" });
    expect(keyAction("Backspace", 2)).toEqual({ kind: "clear" });
    expect(keyAction("Delete", 2)).toEqual({ kind: "clear" });
  });

  it("ignores everything else", () => {
    for (const key of ["a", "Escape", "Tab", "F5", "?"]) {
      expect(keyAction(key, 9)).toBeNull();
    }
  });
});
