"""Durable annotation storage and per-annotator question scheduling.

Everything is an append-only JSONL log under one data directory; resubmission
supersedes at read time rather than rewriting history. Appends are flushed and
fsynced before the caller sees an ack, so a process kill after an ack never
loses the record. A torn final line from a killed writer (never acked) is
truncated away on the next open.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
from dataclasses import asdict, dataclass, fields, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .errors import DataError
from .questions import QUALITY_LEVELS, Question, label_enum


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _check_labels(kind: str, labels: Sequence[str]) -> tuple[str, ...]:
    valid = {m.value for m in label_enum(kind)}
    labels = tuple(labels)
    if not labels:
        raise DataError(f"{kind} label list must be non-empty")
    if len(set(labels)) != len(labels):
        raise DataError(f"duplicate {kind} labels: {list(labels)}")
    unknown = [l for l in labels if l not in valid]
    if unknown:
        raise DataError(f"unknown {kind} labels: {unknown}")
    return labels


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's ordered label lists (position 0 = most important) for one question."""

    question_id: str
    annotator_id: str
    knowledge_labels: tuple[str, ...]
    reasoning_labels: tuple[str, ...]
    selected_answer: Optional[str] = None
    quality: Optional[str] = None
    notes: Optional[str] = None
    timestamp: str = ""

    def __post_init__(self) -> None:
        if not self.question_id or not self.annotator_id:
            raise DataError("question_id and annotator_id must be non-empty")
        object.__setattr__(self, "knowledge_labels", _check_labels("knowledge", self.knowledge_labels))
        object.__setattr__(self, "reasoning_labels", _check_labels("reasoning", self.reasoning_labels))
        if self.quality is not None and self.quality not in QUALITY_LEVELS:
            raise DataError(f"quality must be one of {QUALITY_LEVELS}, got {self.quality!r}")


@dataclass(frozen=True)
class QueryLogEntry:
    annotator_id: str
    question_id: str
    query_text: str
    result_sentence_ids: tuple[int, ...]
    timestamp: str = ""

    def __post_init__(self) -> None:
        if not self.query_text.strip():
            raise DataError("query_text must be non-empty")
        object.__setattr__(self, "result_sentence_ids", tuple(int(i) for i in self.result_sentence_ids))


@dataclass(frozen=True)
class RelevanceMark:
    annotator_id: str
    question_id: str
    sentence_id: int
    relevant: bool
    timestamp: str = ""


@dataclass(frozen=True)
class SkipEvent:
    annotator_id: str
    question_id: str
    timestamp: str = ""


def record_to_dict(record) -> dict:
    data = asdict(record)
    for key, value in data.items():
        if isinstance(value, tuple):
            data[key] = list(value)
    return data


def record_from_dict(cls, data: dict):
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise DataError(f"unknown fields for {cls.__name__}: {sorted(unknown)}")
    kwargs = dict(data)
    for f in fields(cls):
        if f.name in kwargs and isinstance(kwargs[f.name], list):
            kwargs[f.name] = tuple(kwargs[f.name])
    return cls(**kwargs)


def _to_line(record) -> str:
    return json.dumps(record_to_dict(record), ensure_ascii=False) + "\n"


def load_records(cls, source: Union[str, Path, Iterable[str]]) -> list:
    """Parse an export (path or lines) back into records; inverse of export()."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        records.append(record_from_dict(cls, data))
    return records


def load_annotations(source) -> list[AnnotationRecord]:
    return load_records(AnnotationRecord, source)


def load_queries(source) -> list[QueryLogEntry]:
    return load_records(QueryLogEntry, source)


def load_relevance(source) -> list[RelevanceMark]:
    return load_records(RelevanceMark, source)


def _replay_log(path: Path) -> tuple[list[dict], int, bool]:
    """Parse a log file, tolerating a torn (unacked) final line.

    Returns (entries, valid_byte_length, ends_with_newline). Corruption
    anywhere before the final line raises DataError.
    """
    if not path.exists():
        return [], 0, True
    data = path.read_bytes()
    entries: list[dict] = []
    pos = 0
    while pos < len(data):
        nl = data.find(b"\n", pos)
        if nl == -1:
            try:
                entries.append(json.loads(data[pos:]))
            except json.JSONDecodeError:
                return entries, pos, True  # torn tail: truncate it away
            return entries, len(data), False  # record intact, newline lost
        try:
            entries.append(json.loads(data[pos:nl]))
        except json.JSONDecodeError as exc:
            raise DataError(f"{path.name}: corrupt record at byte {pos} ({exc.msg})") from exc
        pos = nl + 1
    return entries, pos, True


class _Log:
    """One append-only JSONL file with fsync-before-ack appends."""

    def __init__(self, path: Path, cls):
        self.path = path
        self.cls = cls
        entries, valid, terminated = _replay_log(path)
        self.records = [record_from_dict(cls, e) for e in entries]
        if path.exists() and valid < path.stat().st_size:
            with open(path, "r+b") as fh:
                fh.truncate(valid)
        self._fh = open(path, "a", encoding="utf-8")
        if not terminated:
            self._fh.write("\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def append(self, record) -> None:
        self._fh.write(_to_line(record))
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self.records.append(record)

    def close(self) -> None:
        self._fh.close()


def question_order(dataset_fingerprint: str, annotator_id: str, question_ids: Sequence[str]) -> list[str]:
    """Fixed pseudorandom order for one annotator: stable across restarts,
    generally different between annotators."""
    digest = hashlib.sha256(f"{dataset_fingerprint}\x00{annotator_id}".encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "big")
    order = list(question_ids)
    random.Random(seed).shuffle(order)
    return order


class AnnotationStore:
    """The stateful backbone: logs, live views, and the question scheduler.

    All writes funnel through one lock; readers see a state no older than the
    last ack they observed.
    """

    def __init__(
        self,
        data_dir: Union[str, Path],
        questions: Sequence[Question],
        corpus_ids: Optional[set[int]] = None,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.questions = list(questions)
        self._by_id = {q.id: q for q in self.questions}
        self.corpus_ids = corpus_ids
        ids = [q.id for q in self.questions]
        self.dataset_fingerprint = hashlib.sha256("\n".join(ids).encode("utf-8")).hexdigest()
        self._lock = threading.Lock()
        self._annotations = _Log(self.data_dir / "annotations.jsonl", AnnotationRecord)
        self._queries = _Log(self.data_dir / "queries.jsonl", QueryLogEntry)
        self._relevance = _Log(self.data_dir / "relevance.jsonl", RelevanceMark)
        self._skips = _Log(self.data_dir / "skips.jsonl", SkipEvent)

    def close(self) -> None:
        for log in (self._annotations, self._queries, self._relevance, self._skips):
            log.close()

    def __enter__(self) -> "AnnotationStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- questions ----------------------------------------------------------

    def question(self, question_id: str) -> Question:
        try:
            return self._by_id[question_id]
        except KeyError:
            raise DataError(f"unknown question id {question_id!r}") from None

    def has_question(self, question_id: str) -> bool:
        return question_id in self._by_id

    # -- writes -------------------------------------------------------------

    def _stamp(self, record):
        return replace(record, timestamp=utc_now()) if not record.timestamp else record

    def submit_annotation(self, record: AnnotationRecord) -> AnnotationRecord:
        """Durably append; resubmission by the same annotator replaces entirely."""
        self.question(record.question_id)
        if record.selected_answer is not None:
            if record.selected_answer not in self.question(record.question_id).choice_labels:
                raise DataError(
                    f"selected_answer {record.selected_answer!r} not among choices of {record.question_id}"
                )
        record = self._stamp(record)
        with self._lock:
            self._annotations.append(record)
        return record

    def log_query(self, entry: QueryLogEntry) -> QueryLogEntry:
        self.question(entry.question_id)
        if self.corpus_ids is not None:
            missing = [i for i in entry.result_sentence_ids if i not in self.corpus_ids]
            if missing:
                raise DataError(f"query log references unknown sentence ids {missing}")
        entry = self._stamp(entry)
        with self._lock:
            self._queries.append(entry)
        return entry

    def mark_relevance(self, mark: RelevanceMark) -> RelevanceMark:
        self.question(mark.question_id)
        if self.corpus_ids is not None and mark.sentence_id not in self.corpus_ids:
            raise DataError(f"relevance mark references unknown sentence id {mark.sentence_id}")
        mark = self._stamp(mark)
        with self._lock:
            self._relevance.append(mark)
        return mark

    def skip(self, annotator_id: str, question_id: str) -> None:
        self.question(question_id)
        with self._lock:
            self._skips.append(SkipEvent(annotator_id=annotator_id, question_id=question_id, timestamp=utc_now()))

    # -- live views ---------------------------------------------------------

    def live_annotations(self) -> list[AnnotationRecord]:
        """Latest record per (question, annotator), ordered by their final append."""
        latest: dict[tuple[str, str], int] = {}
        for i, record in enumerate(self._annotations.records):
            latest[(record.question_id, record.annotator_id)] = i
        keep = sorted(latest.values())
        return [self._annotations.records[i] for i in keep]

    def queries(self) -> list[QueryLogEntry]:
        return list(self._queries.records)

    def live_relevance(self) -> list[RelevanceMark]:
        """Latest mark per (annotator, question, sentence), ordered by final append."""
        latest: dict[tuple[str, str, int], int] = {}
        for i, mark in enumerate(self._relevance.records):
            latest[(mark.annotator_id, mark.question_id, mark.sentence_id)] = i
        keep = sorted(latest.values())
        return [self._relevance.records[i] for i in keep]

    def relevance_for(self, question_id: str, annotator_id: str) -> list[RelevanceMark]:
        return [
            m for m in self.live_relevance()
            if m.question_id == question_id and m.annotator_id == annotator_id
        ]

    def relevant_context(self, question_id: str) -> list[int]:
        """Sentence ids any annotator currently marks relevant, ascending."""
        self.question(question_id)
        ids = {m.sentence_id for m in self.live_relevance() if m.question_id == question_id and m.relevant}
        return sorted(ids)

    # -- scheduling ---------------------------------------------------------

    def order_for(self, annotator_id: str) -> list[str]:
        return question_order(self.dataset_fingerprint, annotator_id, [q.id for q in self.questions])

    def next_question(self, annotator_id: str) -> Optional[Question]:
        """First unannotated question in the annotator's fixed order; skipped
        questions re-queue at the end (in skip order) and None means done."""
        done = {r.question_id for r in self.live_annotations() if r.annotator_id == annotator_id}
        remaining = [qid for qid in self.order_for(annotator_id) if qid not in done]
        if not remaining:
            return None
        last_skip: dict[str, int] = {}
        for i, event in enumerate(self._skips.records):
            if event.annotator_id == annotator_id:
                last_skip[event.question_id] = i
        fresh = [qid for qid in remaining if qid not in last_skip]
        if fresh:
            return self._by_id[fresh[0]]
        skipped = sorted(remaining, key=lambda qid: last_skip[qid])
        return self._by_id[skipped[0]]

    # -- export -------------------------------------------------------------

    def export(self, kind: str) -> str:
        """Line-delimited dump; annotations and relevance are post-supersession."""
        if kind == "annotations":
            records: Iterable = self.live_annotations()
        elif kind == "queries":
            records = self.queries()
        elif kind == "relevance":
            records = self.live_relevance()
        else:
            raise ValueError(f"unknown export kind: {kind!r} (expected annotations|queries|relevance)")
        return "".join(_to_line(r) for r in records)
