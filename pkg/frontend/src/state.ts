// Pure view state and its transitions. Nothing here talks to the network or
// the DOM, and nothing here is authoritative: a reload loses at most the
// unsubmitted form below.

import { QuestionRecord, SearchHit } from "./types.js";

export interface ViewState {
  question: QuestionRecord | null;
  selectedAnswer: string | null; // radio buttons start unselected
  queryText: string;
  hits: SearchHit[];
  relevant: Map<number, boolean>; // sentence_id -> latest toggle state
  sentenceTexts: Map<number, string>; // texts seen in hits or server marks
  knowledgeLabels: string[]; // click order, position 0 = most important
  reasoningLabels: string[];
  quality: string | null;
  notes: string;
  error: string | null;
  pendingRetry: (() => Promise<void>) | null; // last failed network action
}

export function emptyState(): ViewState {
  return {
    question: null,
    selectedAnswer: null,
    queryText: "",
    hits: [],
    relevant: new Map(),
    sentenceTexts: new Map(),
    knowledgeLabels: [],
    reasoningLabels: [],
    quality: null,
    notes: "",
    error: null,
    pendingRetry: null,
  };
}

export function resetForQuestion(state: ViewState, question: QuestionRecord | null): void {
  const fresh = emptyState();
  fresh.question = question;
  Object.assign(state, fresh);
}

// Click-order label picking: first click selects (appends), clicking a
// selected label deselects it; selecting it again puts it at the end.
export function toggleLabel(labels: string[], label: string): string[] {
  if (labels.includes(label)) {
    return labels.filter((l) => l !== label);
  }
  return [...labels, label];
}

export function labelsOf(state: ViewState, kind: "knowledge" | "reasoning"): string[] {
  return kind === "knowledge" ? state.knowledgeLabels : state.reasoningLabels;
}

export function setLabels(state: ViewState, kind: "knowledge" | "reasoning", labels: string[]): void {
  if (kind === "knowledge") {
    state.knowledgeLabels = labels;
  } else {
    state.reasoningLabels = labels;
  }
}

// Submit stays disabled until both ordered lists are non-empty.
export function canSubmit(state: ViewState): boolean {
  return (
    state.question !== null &&
    state.knowledgeLabels.length > 0 &&
    state.reasoningLabels.length > 0
  );
}

export function rememberHits(state: ViewState, hits: SearchHit[]): void {
  state.hits = hits;
  for (const hit of hits) {
    state.sentenceTexts.set(hit.sentence_id, hit.text);
  }
}

// Contents of the "Relevant Results" tab: everything currently toggled
// relevant for this question, in sentence order, independent of which search
// produced it.
export function relevantSentences(state: ViewState): { sentence_id: number; text: string }[] {
  const out: { sentence_id: number; text: string }[] = [];
  for (const [sentenceId, relevant] of state.relevant) {
    if (relevant) {
      out.push({ sentence_id: sentenceId, text: state.sentenceTexts.get(sentenceId) ?? "" });
    }
  }
  return out.sort((a, b) => a.sentence_id - b.sentence_id);
}
