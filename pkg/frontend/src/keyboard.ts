// Keyboard-first review flow: move along tokens, cycle tags, submit.

export type EditorAction =
  | { kind: "next-token" }
  | { kind: "prev-token" }
  | { kind: "cycle-tag"; step: 1 | -1 }
  | { kind: "clear-tag" }
  | { kind: "submit" }
  | { kind: "toggle-confidences" }
  | { kind: "close" };

export function actionForKey(key: string, shift: boolean): EditorAction | null {
  switch (key) {
    case "ArrowRight":
    case "l":
      return { kind: "next-token" };
    case "ArrowLeft":
    case "h":
      return { kind: "prev-token" };
    case "ArrowDown":
    case "j":
      return { kind: "cycle-tag", step: 1 };
    case "ArrowUp":
    case "k":
      return { kind: "cycle-tag", step: -1 };
    case " ":
      return { kind: "cycle-tag", step: shift ? -1 : 1 };
    case "o":
      return { kind: "clear-tag" };
    case "Enter":
      return { kind: "submit" };
    case "c":
      return { kind: "toggle-confidences" };
    case "Escape":
      return { kind: "close" };
    default:
      return null;
  }
}
