import { ReviewApi } from "./api.js";
import { actionForKey } from "./keyboard.js";
import { ReviewModel } from "./model.js";

declare global {
  interface Window {
    HCOAL_BASE_URL?: string;
  }
}

const baseUrl = window.HCOAL_BASE_URL ?? "";
const model = new ReviewModel(new ReviewApi(baseUrl));

const app = document.getElementById("app") as HTMLElement;

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function render(): void {
  app.replaceChildren();
  renderBanner();
  renderToolbar();
  const main = el("div", "columns");
  main.append(renderQueue(), renderEditor());
  app.append(main);
}

function renderBanner(): void {
  if (!model.banner) return;
  const banner = el("div", `banner banner-${model.banner.kind}`);
  banner.append(el("span", "", model.banner.message));
  const retry = el("button", "", "Retry") as HTMLButtonElement;
  retry.addEventListener("click", () => void model.retry().then(render));
  banner.append(retry);
  app.append(banner);
}

function renderToolbar(): void {
  const bar = el("div", "toolbar");
  const total = model.progress.reviewed + model.progress.pending;
  bar.append(el("span", "progress",
    `Reviewed ${model.progress.reviewed} / ${total}`));

  const toggle = el("button", "", model.showConfidences
    ? "Hide confidences" : "Show confidences") as HTMLButtonElement;
  toggle.addEventListener("click", () => {
    model.toggleConfidences();
    render();
  });

  const exportButton = el("button", "primary", "Export corpus") as HTMLButtonElement;
  exportButton.addEventListener("click", () => {
    void model.exportCorpus()
      .then((result) => window.alert(
        `Exported to ${result.path} (${result.reviewed} reviewed, ` +
        `${result.pending} pending)`))
      .catch((err) => window.alert(String(err)));
  });

  bar.append(toggle, exportButton);
  app.append(bar);
}

function renderQueue(): HTMLElement {
  const panel = el("section", "queue");
  panel.append(el("h2", "", "Review queue"));
  if (model.queue.length === 0) {
    panel.append(el("p", "empty", "Nothing to review."));
    return panel;
  }
  const list = el("ul");
  for (const item of model.queue) {
    const row = el("li", item.status === "REVIEWED" ? "reviewed" : "pending");
    if (model.active?.exampleId === item.example_id) row.classList.add("active");
    const link = el("a", "", `#${item.example_id}`) as HTMLAnchorElement;
    link.href = "#";
    link.addEventListener("click", (event) => {
      event.preventDefault();
      void model.open(item.example_id).then(render);
    });
    row.append(link,
      el("span", "score", item.score.toFixed(3)),
      el("span", "badge", item.status));
    list.append(row);
  }
  panel.append(list);
  return panel;
}

function renderEditor(): HTMLElement {
  const panel = el("section", "editor");
  const active = model.active;
  if (!active) {
    panel.append(el("p", "empty", "Select a queue item to review."));
    return panel;
  }
  panel.append(el("h2", "", `Example ${active.exampleId} (${active.status})`));

  const strip = el("div", "tokens");
  active.tokens.forEach((token, i) => {
    const chip = el("div", "token");
    if (i === active.cursor) chip.classList.add("cursor");
    if (model.isLowConfidence(token)) chip.classList.add("low-confidence");
    if (active.validationError?.tokenIndex === i) chip.classList.add("invalid");
    if (active.tags[i] !== active.serverTags[i]) chip.classList.add("edited");
    chip.append(el("span", "text", token.text));
    if (model.showConfidences) {
      chip.append(el("span", "confidence", token.confidence.toFixed(2)));
    }

    const picker = document.createElement("select");
    for (const option of model.options) {
      const entry = document.createElement("option");
      entry.value = option;
      entry.textContent = option;
      entry.selected = option === active.tags[i];
      picker.append(entry);
    }
    picker.addEventListener("change", () => {
      model.setTagAt(i, picker.value);
      active.cursor = i;
      render();
    });
    chip.append(picker);
    chip.addEventListener("click", () => {
      active.cursor = i;
      render();
    });
    strip.append(chip);
  });
  panel.append(strip);

  if (active.validationError) {
    panel.append(el("p", "validation-error",
      `Rejected: ${active.validationError.message}`));
  }

  const submit = el(
    "button", "primary",
    model.isDirty() ? "Submit correction" : "Accept labels as-is",
  ) as HTMLButtonElement;
  submit.addEventListener("click", () => void submitActive());
  panel.append(submit);
  panel.append(el("p", "hint",
    "arrows/hjkl: move + cycle tag, space: cycle, o: clear, enter: submit, " +
    "c: confidences, esc: close"));
  return panel;
}

async function submitActive(): Promise<void> {
  if (model.needsConfirmation() &&
      !window.confirm("No edits made. Accept the machine labels as-is?")) {
    return;
  }
  await model.submit(true);
  render();
}

document.addEventListener("keydown", (event) => {
  const target = event.target as HTMLElement;
  if (["INPUT", "TEXTAREA", "SELECT"].includes(target.tagName)) return;
  const action = actionForKey(event.key, event.shiftKey);
  if (!action || !model.active) return;
  event.preventDefault();
  switch (action.kind) {
    case "next-token":
      model.moveCursor(1);
      break;
    case "prev-token":
      model.moveCursor(-1);
      break;
    case "cycle-tag":
      model.cycleTagAt(model.active.cursor, action.step);
      break;
    case "clear-tag":
      model.setTagAt(model.active.cursor, "O");
      break;
    case "submit":
      void submitActive();
      return;
    case "toggle-confidences":
      model.toggleConfidences();
      break;
    case "close":
      model.close();
      break;
  }
  render();
});

void model.init().then(render);
