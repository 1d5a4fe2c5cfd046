"""Solver evaluation partitioned by per-question consensus labels, plus the
retrieved-context vs relevant-context comparison protocol.

Solvers return the full argmax set of choices rather than breaking ties, and
scoring grants 1/k partial credit when the key is inside a k-way tie; that is
what makes tied selections meaningful in the report tables.
"""

from __future__ import annotations

import json
import math
import random
import select
import subprocess
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .agreement import Ranking, kemeny, record_labels
from .corpus import InvertedIndex, QuerySpec, default_query, search, tokenize
from .errors import DataError
from .questions import Question, label_enum
from .store import AnnotationRecord, RelevanceMark

Solver = Callable[[Question], "SolverAnswer"]


@dataclass(frozen=True)
class SolverAnswer:
    """The set of choices a solver selected; more than one means a tie."""

    selected: frozenset[str]


def score(answer: SolverAnswer, question: Question) -> float:
    """1/k partial credit when the key is inside a k-way selection, else 0."""
    if not answer.selected:
        raise ValueError("selected set must be non-empty")
    extra = answer.selected - set(question.choice_labels)
    if extra:
        raise ValueError(f"selected labels not among choices of {question.id}: {sorted(extra)}")
    if question.answer_key in answer.selected:
        return 1.0 / len(answer.selected)
    return 0.0


def _argmax_answer(option_scores: Mapping[str, float], tol: float = 1e-9) -> SolverAnswer:
    best = max(option_scores.values())
    return SolverAnswer(frozenset(l for l, s in option_scores.items() if s >= best - tol))


@dataclass(frozen=True)
class PartitionResult:
    buckets: dict[str, list[str]]  # consensus first label -> question ids
    excluded: tuple[str, ...]      # questions with no annotations


def partition_by_consensus(
    questions: Sequence[Question], annotations: Iterable[AnnotationRecord], kind: str
) -> PartitionResult:
    """Assign each annotated question to the first label of its Kemeny
    consensus; questions without annotations are excluded and reported."""
    universe = frozenset(m.value for m in label_enum(kind))
    grouped: dict[str, list[tuple[str, ...]]] = defaultdict(list)
    for record in annotations:
        grouped[record.question_id].append(record_labels(record, kind))
    buckets: dict[str, list[str]] = defaultdict(list)
    excluded: list[str] = []
    for question in questions:
        label_lists = grouped.get(question.id)
        if not label_lists:
            excluded.append(question.id)
            continue
        result = kemeny([Ranking(items, universe) for items in label_lists])
        buckets[result.consensus.items[0]].append(question.id)
    return PartitionResult(buckets=dict(buckets), excluded=tuple(excluded))


# -- solvers ----------------------------------------------------------------


def text_search_solver(
    question: Question,
    index: InvertedIndex,
    *,
    hits_per_option: int = 3,
    k1: float = 1.2,
    b: float = 0.75,
) -> SolverAnswer:
    """Score each option by the summed BM25 scores of the top hits for its
    click query (last stem sentence + option text); select the argmax set."""
    option_scores: dict[str, float] = {}
    for choice in question.choices:
        query = default_query(question, choice.label)
        try:
            hits = search(index, QuerySpec(text=query, top_k=hits_per_option), k1=k1, b=b)
        except ValueError:
            hits = []
        option_scores[choice.label] = sum(h.score for h in hits)
    return _argmax_answer(option_scores)


def overlap_solver(
    question: Question,
    index: InvertedIndex,
    *,
    pool_size: int = 5,
    k1: float = 1.2,
    b: float = 0.75,
) -> SolverAnswer:
    """Jaccard overlap between the token set of the stem's top retrieved
    sentences and each option's token set; select the argmax set."""
    try:
        hits = search(index, QuerySpec(text=question.stem, top_k=pool_size), k1=k1, b=b)
    except ValueError:
        hits = []
    context_tokens = {t for h in hits for t in tokenize(h.text)}
    option_scores: dict[str, float] = {}
    for choice in question.choices:
        choice_tokens = set(tokenize(choice.text))
        union = context_tokens | choice_tokens
        option_scores[choice.label] = len(context_tokens & choice_tokens) / len(union) if union else 0.0
    return _argmax_answer(option_scores)


def random_singleton_solver(question: Question, rng: random.Random) -> SolverAnswer:
    """Uniform single guess; the chance-calibration baseline."""
    return SolverAnswer(frozenset([rng.choice(question.choice_labels)]))


def load_embeddings(path) -> dict[str, np.ndarray]:
    """Plain-text embeddings, one ``word v1 v2 ...`` per line."""
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                vectors[parts[0]] = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"embeddings line {lineno}: {exc}") from exc
    if not vectors:
        raise DataError(f"no vectors found in {path}")
    dims = {v.shape for v in vectors.values()}
    if len(dims) != 1:
        raise DataError(f"inconsistent embedding dimensions: {sorted(dims)}")
    return vectors


def _mean_vector(tokens: Iterable[str], vectors: Mapping[str, np.ndarray]) -> Optional[np.ndarray]:
    known = [vectors[t] for t in tokens if t in vectors]
    if not known:
        return None
    return np.mean(known, axis=0)


def embedding_solver(
    question: Question,
    index: InvertedIndex,
    vectors: Mapping[str, np.ndarray],
    *,
    pool_size: int = 5,
    k1: float = 1.2,
    b: float = 0.75,
) -> SolverAnswer:
    """Cosine similarity between mean context vector and mean option vector."""
    try:
        hits = search(index, QuerySpec(text=question.stem, top_k=pool_size), k1=k1, b=b)
    except ValueError:
        hits = []
    context = _mean_vector((t for h in hits for t in tokenize(h.text)), vectors)
    option_scores: dict[str, float] = {}
    for choice in question.choices:
        option = _mean_vector(tokenize(choice.text), vectors)
        if context is None or option is None:
            option_scores[choice.label] = 0.0
            continue
        denom = float(np.linalg.norm(context) * np.linalg.norm(option))
        option_scores[choice.label] = float(context @ option) / denom if denom else 0.0
    return _argmax_answer(option_scores)


def span_to_choice(span: str, question: Question) -> SolverAnswer:
    """Choice(s) with maximal token overlap against an extractive answer span;
    an empty or disjoint span selects every choice."""
    span_tokens = set(tokenize(span))
    if not span_tokens:
        return SolverAnswer(frozenset(question.choice_labels))
    counts = {
        c.label: len(span_tokens & set(tokenize(c.text))) for c in question.choices
    }
    return _argmax_answer(counts, tol=0.0)


# -- readers ----------------------------------------------------------------


class ReaderError(Exception):
    """Transport failure of an external reader; scored as no-answer upstream."""


class OracleReader:
    """Testing stand-in for an extractive reader: answers with the correct
    choice text iff it appears verbatim in the context, else no answer."""

    identifier = "oracle"

    def __init__(self, questions: Sequence[Question]):
        self._by_id = {q.id: q for q in questions}

    def read_span(self, question_id: str, stem: str, context: Sequence[str]) -> str:
        question = self._by_id[question_id]
        answer_text = question.choice_text(question.answer_key)
        return answer_text if any(answer_text in sentence for sentence in context) else ""


class ProcessReader:
    """Bridge to an external reader process over line-delimited JSON.

    One request per line: {"question_id", "stem", "context": [...]}; one
    response per line: {"question_id", "span"}. A timeout or a dead process
    raises :class:`ReaderError`; the process restarts on the next request.
    """

    def __init__(self, command: Sequence[str], timeout: float = 10.0):
        self.identifier = " ".join(command)
        self.command = list(command)
        self.timeout = timeout
        self._proc: Optional[subprocess.Popen] = None

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def _fail(self, reason: str):
        if self._proc is not None:
            self._proc.kill()
            self._proc = None
        raise ReaderError(reason)

    def read_span(self, question_id: str, stem: str, context: Sequence[str]) -> str:
        request = {"question_id": question_id, "stem": stem, "context": list(context)}
        try:
            proc = self._ensure_proc()
            proc.stdin.write(json.dumps(request, ensure_ascii=False) + "\n")
            proc.stdin.flush()
        except (OSError, ValueError) as exc:
            self._fail(f"reader write failed: {exc}")
        ready, _, _ = select.select([proc.stdout], [], [], self.timeout)
        if not ready:
            self._fail(f"reader timed out after {self.timeout}s")
        line = proc.stdout.readline()
        if not line:
            self._fail("reader closed its output")
        try:
            response = json.loads(line)
        except json.JSONDecodeError:
            self._fail(f"reader sent invalid JSON: {line!r}")
        if response.get("question_id") != question_id:
            self._fail(f"reader answered the wrong question: {response!r}")
        return str(response.get("span") or "")

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=5)
            self._proc = None

    def __enter__(self) -> "ProcessReader":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


# -- context comparison -----------------------------------------------------


def retrieved_contexts(
    questions: Sequence[Question],
    index: InvertedIndex,
    *,
    top_k: int = 10,
    k1: float = 1.2,
    b: float = 0.75,
) -> dict[str, list[str]]:
    """Baseline context per question: pooled hits of the per-option click queries."""
    contexts: dict[str, list[str]] = {}
    for question in questions:
        seen: set[int] = set()
        sentences: list[str] = []
        for choice in question.choices:
            query = default_query(question, choice.label)
            try:
                hits = search(index, QuerySpec(text=query, top_k=top_k), k1=k1, b=b)
            except ValueError:
                continue
            for hit in hits:
                if hit.sentence_id not in seen:
                    seen.add(hit.sentence_id)
                    sentences.append(hit.text)
        contexts[question.id] = sentences
    return contexts


def relevant_contexts(
    questions: Sequence[Question],
    marks: Iterable[RelevanceMark],
    index: InvertedIndex,
) -> dict[str, list[str]]:
    """Human-marked context per question: union over annotators of the
    sentences whose latest mark is relevant, in sentence order."""
    latest: dict[tuple[str, str, int], RelevanceMark] = {}
    for mark in marks:
        latest[(mark.annotator_id, mark.question_id, mark.sentence_id)] = mark
    per_question: dict[str, set[int]] = defaultdict(set)
    for mark in latest.values():
        if mark.relevant:
            per_question[mark.question_id].add(mark.sentence_id)
    return {
        q.id: [index.texts[sid] for sid in sorted(per_question.get(q.id, ())) if sid in index.texts]
        for q in questions
    }


@dataclass(frozen=True)
class ContextComparison:
    n_questions: int
    accuracy_retrieved: float  # percent, 1/k partial credit
    accuracy_relevant: float
    strict_retrieved: float    # percent, correct singletons only
    strict_relevant: float
    reader_failures: int

    @property
    def delta(self) -> float:
        return self.accuracy_relevant - self.accuracy_retrieved


def compare_contexts(
    questions: Sequence[Question],
    reader,
    retrieved_context: Mapping[str, Sequence[str]],
    relevant_context: Mapping[str, Sequence[str]],
) -> ContextComparison:
    """Run the reader on both context sets, map spans to choices, and score.

    Reader transport failures score the question as a no-answer all-choice tie
    and are counted in the result.
    """
    if not questions:
        raise ValueError("no questions to compare")
    failures = 0
    partial = {"retrieved": 0.0, "relevant": 0.0}
    strict = {"retrieved": 0.0, "relevant": 0.0}
    for question in questions:
        for side, contexts in (("retrieved", retrieved_context), ("relevant", relevant_context)):
            sentences = list(contexts.get(question.id, ()))
            try:
                span = reader.read_span(question.id, question.stem, sentences)
            except ReaderError:
                failures += 1
                span = ""
            answer = span_to_choice(span, question)
            value = score(answer, question)
            partial[side] += value
            if value == 1.0:
                strict[side] += 1.0
    n = len(questions)
    return ContextComparison(
        n_questions=n,
        accuracy_retrieved=100.0 * partial["retrieved"] / n,
        accuracy_relevant=100.0 * partial["relevant"] / n,
        strict_retrieved=100.0 * strict["retrieved"] / n,
        strict_relevant=100.0 * strict["relevant"] / n,
        reader_failures=failures,
    )


# -- report -----------------------------------------------------------------


@dataclass(frozen=True)
class EvalRow:
    label: str
    n_questions: int
    accuracies: dict[str, float]  # solver name -> percent


@dataclass(frozen=True)
class EvalReport:
    kind: str
    solver_names: tuple[str, ...]
    rows: tuple[EvalRow, ...]
    overall: dict[str, float]
    n_questions: int
    excluded: tuple[str, ...]


def run_evaluation(
    questions: Sequence[Question],
    annotations: Iterable[AnnotationRecord],
    kind: str,
    solvers: Mapping[str, Solver],
) -> EvalReport:
    """Partition by consensus-first label, then mean partial-credit accuracy
    per (partition, solver). Rows are ordered by bucket size, largest first."""
    by_id = {q.id: q for q in questions}
    partition = partition_by_consensus(questions, annotations, kind)
    names = tuple(solvers)
    answers: dict[tuple[str, str], float] = {}
    for name, solver in solvers.items():
        for qid in (qid for bucket in partition.buckets.values() for qid in bucket):
            question = by_id[qid]
            answers[(name, qid)] = score(solver(question), question)
    rows = []
    for label, bucket in sorted(partition.buckets.items(), key=lambda kv: (-len(kv[1]), kv[0])):
        accuracies = {
            name: 100.0 * sum(answers[(name, qid)] for qid in bucket) / len(bucket) for name in names
        }
        rows.append(EvalRow(label=label, n_questions=len(bucket), accuracies=accuracies))
    total = sum(len(bucket) for bucket in partition.buckets.values())
    overall = {
        name: (
            100.0
            * sum(answers[(name, qid)] for bucket in partition.buckets.values() for qid in bucket)
            / total
            if total
            else 0.0
        )
        for name in names
    }
    return EvalReport(
        kind=kind,
        solver_names=names,
        rows=tuple(rows),
        overall=overall,
        n_questions=total,
        excluded=partition.excluded,
    )


def render_eval_report(report: EvalReport) -> str:
    """Fixed-width accuracy table: one row per partition label with its
    question count, one column per solver, and a final overall row."""
    label_width = max([len("overall")] + [len(f"{r.label} ({r.n_questions})") for r in report.rows])
    col_width = max([10] + [len(name) for name in report.solver_names])
    header = f"{'label':<{label_width}}  " + "  ".join(f"{n:>{col_width}}" for n in report.solver_names)
    lines = [header]
    for row in report.rows:
        cell = f"{row.label} ({row.n_questions})"
        values = "  ".join(f"{row.accuracies[n]:>{col_width}.1f}" for n in report.solver_names)
        lines.append(f"{cell:<{label_width}}  {values}")
    values = "  ".join(f"{report.overall[n]:>{col_width}.1f}" for n in report.solver_names)
    lines.append(f"{'overall':<{label_width}}  {values}")
    if report.excluded:
        lines.append(f"excluded (no annotations): {len(report.excluded)}")
    return "\n".join(lines)
