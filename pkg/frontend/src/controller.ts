// Orchestration between view state and the API, kept DOM-free so the whole
// annotator workflow is testable against a fake server.

import { ApiClient } from "./api.js";
import { defaultQuery } from "./defaultQuery.js";
import {
  ViewState,
  canSubmit,
  emptyState,
  labelsOf,
  rememberHits,
  resetForQuestion,
  setLabels,
  toggleLabel,
} from "./state.js";

export class AnnotationController {
  state: ViewState = emptyState();

  constructor(
    private api: ApiClient,
    public annotator: string,
    private topK: number = 10,
  ) {}

  // Network failures keep all form state and park a retry closure instead of
  // clearing anything.
  private async guarded(label: string, action: () => Promise<void>): Promise<void> {
    try {
      await action();
      this.state.error = null;
      this.state.pendingRetry = null;
    } catch (err) {
      this.state.error = `${label} failed: ${err instanceof Error ? err.message : String(err)}`;
      this.state.pendingRetry = action;
    }
  }

  async retry(): Promise<void> {
    const pending = this.state.pendingRetry;
    if (pending) {
      await this.guarded("retry", pending);
    }
  }

  async loadNext(): Promise<void> {
    await this.guarded("loading the next question", async () => {
      const question = await this.api.nextQuestion(this.annotator);
      resetForQuestion(this.state, question);
      if (question) {
        await this.reloadRelevance();
      }
    });
  }

  // Restore server-backed relevance marks (e.g. after a page reload).
  async reloadRelevance(): Promise<void> {
    if (!this.state.question) {
      return;
    }
    const marks = await this.api.relevanceState(this.state.question.id, this.annotator);
    for (const mark of marks) {
      this.state.relevant.set(mark.sentence_id, mark.relevant);
      if (mark.text) {
        this.state.sentenceTexts.set(mark.sentence_id, mark.text);
      }
    }
  }

  // Clicking an answer option: tick the radio, fill the query box with the
  // click query (still editable), and run it. The server logs the query.
  async clickOption(label: string): Promise<void> {
    const question = this.state.question;
    if (!question) {
      return;
    }
    const choice = question.question.choices.find((c) => c.label === label);
    if (!choice) {
      return;
    }
    this.state.selectedAnswer = label;
    this.state.queryText = defaultQuery(question.question.stem, choice.text);
    await this.runSearch();
  }

  // Free-text searches from the query box go through the same path, so they
  // are logged too.
  async runSearch(): Promise<void> {
    const question = this.state.question;
    const query = this.state.queryText.trim();
    if (!question || !query) {
      return;
    }
    await this.guarded("search", async () => {
      const hits = await this.api.search(query, this.topK, question.id, this.annotator);
      rememberHits(this.state, hits);
    });
  }

  async toggleRelevance(sentenceId: number): Promise<void> {
    const question = this.state.question;
    if (!question) {
      return;
    }
    const next = !(this.state.relevant.get(sentenceId) === true);
    await this.guarded("saving the relevance mark", async () => {
      await this.api.markRelevance(this.annotator, question.id, sentenceId, next);
      this.state.relevant.set(sentenceId, next); // last write wins, also server-side
    });
  }

  clickLabel(kind: "knowledge" | "reasoning", label: string): void {
    setLabels(this.state, kind, toggleLabel(labelsOf(this.state, kind), label));
  }

  get submitEnabled(): boolean {
    return canSubmit(this.state);
  }

  async submit(): Promise<void> {
    const question = this.state.question;
    if (!question) {
      return;
    }
    if (!this.submitEnabled) {
      this.state.error = "pick at least one knowledge label and one reasoning label";
      return;
    }
    let advanced = false;
    await this.guarded("submitting the annotation", async () => {
      await this.api.submitAnnotation({
        question_id: question.id,
        annotator_id: this.annotator,
        knowledge_labels: [...this.state.knowledgeLabels],
        reasoning_labels: [...this.state.reasoningLabels],
        selected_answer: this.state.selectedAnswer,
        quality: this.state.quality,
        notes: this.state.notes || null,
      });
      advanced = true;
    });
    if (advanced) {
      await this.loadNext(); // ack advances; a validation failure stays put
    }
  }

  async skip(): Promise<void> {
    const question = this.state.question;
    if (!question) {
      return;
    }
    let skipped = false;
    await this.guarded("skipping", async () => {
      await this.api.skip(this.annotator, question.id);
      skipped = true;
    });
    if (skipped) {
      await this.loadNext();
    }
  }
}
