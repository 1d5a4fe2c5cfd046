// DOM wiring. All behavior lives in the controller; this file only renders
// state and forwards events.

import { HttpApiClient } from "./api.js";
import { AnnotationController } from "./controller.js";
import { relevantSentences } from "./state.js";
import { Vocabulary } from "./types.js";

function el<T extends HTMLElement = HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function annotatorId(): string {
  const params = new URLSearchParams(window.location.search);
  const fromUrl = params.get("annotator");
  if (fromUrl) {
    window.localStorage.setItem("annotator", fromUrl);
    return fromUrl;
  }
  let stored = window.localStorage.getItem("annotator");
  if (!stored) {
    stored = window.prompt("Annotator id:", "") || `anon-${Date.now()}`;
    window.localStorage.setItem("annotator", stored);
  }
  return stored;
}

const api = new HttpApiClient("");
const controller = new AnnotationController(api, annotatorId());
let vocab: { knowledge: Vocabulary; reasoning: Vocabulary } | null = null;
let activeTab: "search" | "relevant" = "search";

function render(): void {
  const state = controller.state;
  el("annotator").textContent = controller.annotator;

  const banner = el("error");
  banner.hidden = !state.error;
  banner.querySelector("span")!.textContent = state.error ?? "";
  (el("retry") as HTMLButtonElement).hidden = !state.pendingRetry;

  const done = el("done");
  const workspace = el("workspace");
  if (!state.question) {
    done.hidden = false;
    workspace.hidden = true;
    return;
  }
  done.hidden = true;
  workspace.hidden = false;

  el("stem").textContent = state.question.question.stem;
  const options = el("options");
  options.innerHTML = "";
  for (const choice of state.question.question.choices) {
    const row = document.createElement("label");
    row.className = "option";
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = "answer";
    radio.checked = state.selectedAnswer === choice.label;
    radio.addEventListener("change", () => {
      void controller.clickOption(choice.label).then(render);
    });
    row.appendChild(radio);
    const text = document.createElement("span");
    text.textContent = `(${choice.label}) ${choice.text}`;
    row.appendChild(text);
    options.appendChild(row);
  }

  (el("query") as HTMLInputElement).value = state.queryText;

  el("tab-search").classList.toggle("active", activeTab === "search");
  el("tab-relevant").classList.toggle("active", activeTab === "relevant");
  const results = el("results");
  results.innerHTML = "";
  const rows =
    activeTab === "search"
      ? state.hits.map((h) => ({ sentence_id: h.sentence_id, text: h.text }))
      : relevantSentences(state);
  if (rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = activeTab === "search" ? "No results." : "Nothing marked relevant yet.";
    results.appendChild(empty);
  }
  for (const row of rows) {
    const item = document.createElement("div");
    item.className = "hit";
    const text = document.createElement("span");
    text.textContent = row.text;
    item.appendChild(text);
    const toggle = document.createElement("button");
    const marked = state.relevant.get(row.sentence_id) === true;
    toggle.textContent = marked ? "relevant ✓" : "irrelevant";
    toggle.className = marked ? "relevant" : "irrelevant";
    toggle.addEventListener("click", () => {
      void controller.toggleRelevance(row.sentence_id).then(render);
    });
    item.appendChild(toggle);
    results.appendChild(item);
  }

  renderPicker("knowledge");
  renderPicker("reasoning");

  (el("quality") as HTMLSelectElement).value = state.quality ?? "";
  (el("notes") as HTMLTextAreaElement).value = state.notes;
  (el("submit") as HTMLButtonElement).disabled = !controller.submitEnabled;
}

function renderPicker(kind: "knowledge" | "reasoning"): void {
  if (!vocab) {
    return;
  }
  const picked = kind === "knowledge" ? controller.state.knowledgeLabels : controller.state.reasoningLabels;
  const box = el(`${kind}-labels`);
  box.innerHTML = "";
  for (const entry of vocab[kind].labels) {
    const button = document.createElement("button");
    const position = picked.indexOf(entry.label);
    button.className = position >= 0 ? "label picked" : "label";
    button.title = entry.instructions;
    // visible position number shows the importance order
    button.textContent = position >= 0 ? `${position + 1}. ${entry.title}` : entry.title;
    button.addEventListener("click", () => {
      controller.clickLabel(kind, entry.label);
      render();
    });
    box.appendChild(button);
  }
}

async function boot(): Promise<void> {
  const [knowledge, reasoning] = await Promise.all([
    api.vocabulary("knowledge"),
    api.vocabulary("reasoning"),
  ]);
  vocab = { knowledge, reasoning };
  el("knowledge-preamble").textContent = knowledge.preamble;
  el("reasoning-preamble").textContent = reasoning.preamble;
  const quality = el("quality") as HTMLSelectElement;
  for (const level of knowledge.quality_levels) {
    const option = document.createElement("option");
    option.value = level;
    option.textContent = level;
    quality.appendChild(option);
  }

  el("search-form").addEventListener("submit", (event) => {
    event.preventDefault();
    controller.state.queryText = (el("query") as HTMLInputElement).value;
    void controller.runSearch().then(render);
  });
  el("query").addEventListener("input", () => {
    controller.state.queryText = (el("query") as HTMLInputElement).value;
  });
  el("tab-search").addEventListener("click", () => {
    activeTab = "search";
    render();
  });
  el("tab-relevant").addEventListener("click", () => {
    activeTab = "relevant";
    render();
  });
  el("quality").addEventListener("change", () => {
    controller.state.quality = (el("quality") as HTMLSelectElement).value || null;
  });
  el("notes").addEventListener("input", () => {
    controller.state.notes = (el("notes") as HTMLTextAreaElement).value;
  });
  el("submit").addEventListener("click", () => {
    void controller.submit().then(render);
  });
  el("skip").addEventListener("click", () => {
    void controller.skip().then(render);
  });
  el("retry").addEventListener("click", () => {
    void controller.retry().then(render);
  });

  await controller.loadNext();
  render();
}

void boot();
