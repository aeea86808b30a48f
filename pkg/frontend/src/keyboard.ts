/** Keyboard mapping for the labeling workflow.
 *
 *   1..9        stage class 0..8 on the current sample
 *   arrows      previous / next queried sample
 *   , .         scrub one frame back / forward
 *   space       play / pause
 *   enter       submit when the batch is complete
 *   backspace   clear the staged label on the current sample
 */

export type KeyAction =
  | { kind: "label"; classIndex: number }
  | { kind: "move"; delta: number }
  | { kind: "scrub"; delta: number }
  | { kind: "toggle-play" }
  | { kind: "submit" }
  | { kind: "clear" };

export function keyAction(key: string, numClasses: number): KeyAction | null {
  if (key >= "1" && key <= "9") {
    const classIndex = key.charCodeAt(0) - "1".charCodeAt(0);
    return classIndex < numClasses ? { kind: "label", classIndex } : null;
  }
  switch (key) {
    case "ArrowRight":
    case "ArrowDown":
      return { kind: "move", delta: 1 };
    case "ArrowLeft":
    case "ArrowUp":
      return { kind: "move", delta: -1 };
    case ".":
      return { kind: "scrub", delta: 1 };
    case ",":
      return { kind: "scrub", delta: -1 };
    case " ":
      return { kind: "toggle-play" };
    case "Enter":
      return { kind: "submit" };
    case "Backspace":
    case "Delete":
      return { kind: "clear" };
    default:
      return null;
  }
}
