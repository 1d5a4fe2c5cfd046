// Thin typed client for the annotation service. The server is the only
// authority: every mutation goes straight to it and reads come back fresh.

import {
  AnnotationPayload,
  QuestionRecord,
  RelevanceState,
  SearchHit,
  Vocabulary,
} from "./types.js";

export interface ApiClient {
  nextQuestion(annotator: string): Promise<QuestionRecord | null>;
  search(query: string, k: number, questionId: string, annotator: string): Promise<SearchHit[]>;
  submitAnnotation(payload: AnnotationPayload): Promise<void>;
  skip(annotator: string, questionId: string): Promise<void>;
  markRelevance(annotator: string, questionId: string, sentenceId: number, relevant: boolean): Promise<void>;
  relevanceState(questionId: string, annotator: string): Promise<RelevanceState[]>;
  vocabulary(kind: "knowledge" | "reasoning"): Promise<Vocabulary>;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function parseOrThrow(response: Response): Promise<any> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(response.status, body.detail ?? response.statusText);
  }
  return body;
}

export class HttpApiClient implements ApiClient {
  constructor(private base: string = "") {}

  private url(path: string, params?: Record<string, string>): string {
    const query = params ? "?" + new URLSearchParams(params).toString() : "";
    return `${this.base}${path}${query}`;
  }

  async nextQuestion(annotator: string): Promise<QuestionRecord | null> {
    const body = await parseOrThrow(await fetch(this.url("/api/next", { annotator })));
    return body.done ? null : (body.question as QuestionRecord);
  }

  async search(query: string, k: number, questionId: string, annotator: string): Promise<SearchHit[]> {
    const body = await parseOrThrow(
      await fetch(
        this.url("/api/search", {
          q: query,
          k: String(k),
          question_id: questionId,
          annotator,
        }),
      ),
    );
    return body.hits as SearchHit[];
  }

  async submitAnnotation(payload: AnnotationPayload): Promise<void> {
    await parseOrThrow(
      await fetch(this.url("/api/annotations"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      }),
    );
  }

  async skip(annotator: string, questionId: string): Promise<void> {
    await parseOrThrow(
      await fetch(this.url("/api/skip"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ annotator_id: annotator, question_id: questionId }),
      }),
    );
  }

  async markRelevance(
    annotator: string,
    questionId: string,
    sentenceId: number,
    relevant: boolean,
  ): Promise<void> {
    await parseOrThrow(
      await fetch(this.url("/api/relevance"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          annotator_id: annotator,
          question_id: questionId,
          sentence_id: sentenceId,
          relevant,
        }),
      }),
    );
  }

  async relevanceState(questionId: string, annotator: string): Promise<RelevanceState[]> {
    const body = await parseOrThrow(
      await fetch(this.url(`/api/relevance/${encodeURIComponent(questionId)}`, { annotator })),
    );
    return body.marks as RelevanceState[];
  }

  async vocabulary(kind: "knowledge" | "reasoning"): Promise<Vocabulary> {
    return (await parseOrThrow(await fetch(this.url(`/api/vocab/${kind}`)))) as Vocabulary;
  }
}
