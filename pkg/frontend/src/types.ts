// Payload shapes of the annotation service API (schema_version 1 throughout).

export interface Choice {
  label: string;
  text: string;
}

export interface QuestionRecord {
  id: string;
  question: {
    stem: string;
    choices: Choice[];
  };
  answerKey?: string;
}

export interface SearchHit {
  sentence_id: number;
  score: number;
  text: string;
}

export interface VocabLabel {
  label: string;
  title: string;
  instructions: string;
  example_question_id: string;
}

export interface Vocabulary {
  kind: "knowledge" | "reasoning";
  preamble: string;
  quality_levels: string[];
  labels: VocabLabel[];
}

export interface RelevanceState {
  sentence_id: number;
  relevant: boolean;
  text: string;
}

export interface AnnotationPayload {
  question_id: string;
  annotator_id: string;
  knowledge_labels: string[];
  reasoning_labels: string[];
  selected_answer: string | null;
  quality: string | null;
  notes: string | null;
}
