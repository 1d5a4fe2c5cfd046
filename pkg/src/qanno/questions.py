"""Multiple-choice questions and the two fixed label vocabularies.

Questions travel as line-delimited JSON records in the common science-QA
release shape::

    {"id": "...", "question": {"stem": "...", "choices": [{"label": "A",
     "text": "..."}, ...]}, "answerKey": "B"}

A flat variant with ``stem``/``choices``/``answerKey`` at the top level is
accepted on input; export always emits the nested shape.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

from .errors import DataError

QUALITY_LEVELS = ("good", "mixed", "irrelevant")

_MAX_CHOICES = 5
_MIN_CHOICES = 2


class KnowledgeLabel(Enum):
    """Kinds of knowledge a question may require. Order matters: it is the display order."""

    DEFINITION = "definition"
    BASIC_FACTS = "basic_facts"
    CAUSES = "causes"
    PURPOSE = "purpose"
    ALGEBRAIC = "algebraic"
    EXPERIMENTS = "experiments"
    PHYSICAL = "physical"


class ReasoningLabel(Enum):
    """Kinds of reasoning a question may require. Order matters: it is the display order."""

    QN_LOGIC = "qn_logic"
    LINGUISTIC = "linguistic"
    EXPLANATION = "explanation"
    MULTIHOP = "multihop"
    HYPOTHETICAL = "hypothetical"
    COMPARISON = "comparison"
    ALGEBRAIC = "algebraic"
    PHYSICAL = "physical"
    ANALOGY = "analogy"


LABEL_KINDS = ("knowledge", "reasoning")


def label_enum(kind: str) -> type[Enum]:
    if kind == "knowledge":
        return KnowledgeLabel
    if kind == "reasoning":
        return ReasoningLabel
    raise ValueError(f"unknown label kind: {kind!r} (expected one of {LABEL_KINDS})")


@dataclass(frozen=True)
class Choice:
    label: str
    text: str


@dataclass(frozen=True)
class Question:
    """One multiple-choice item: stem, lettered choices, answer key."""

    id: str
    stem: str
    choices: tuple[Choice, ...]
    answer_key: str

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("question id must be non-empty")
        if not self.stem.strip():
            raise DataError(f"question {self.id}: stem must be non-empty")
        n = len(self.choices)
        if not _MIN_CHOICES <= n <= _MAX_CHOICES:
            raise DataError(f"question {self.id}: expected {_MIN_CHOICES}-{_MAX_CHOICES} choices, got {n}")
        expected = [chr(ord("A") + i) for i in range(n)]
        labels = [c.label for c in self.choices]
        if labels != expected:
            raise DataError(
                f"question {self.id}: choice labels must be consecutive letters {expected}, got {labels}"
            )
        for c in self.choices:
            if not c.text.strip():
                raise DataError(f"question {self.id}: choice {c.label} has empty text")
        if self.answer_key not in labels:
            raise DataError(f"question {self.id}: answer_key not among choices")

    @property
    def choice_labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.choices)

    def choice_text(self, label: str) -> str:
        for c in self.choices:
            if c.label == label:
                return c.text
        raise KeyError(f"question {self.id} has no choice {label!r}")


def _question_from_record(record: dict, where: str) -> Question:
    if not isinstance(record, dict):
        raise DataError(f"{where}: record is not an object")
    body = record.get("question", record)
    try:
        stem = body["stem"]
        raw_choices = body["choices"]
        qid = record["id"]
        key = record["answerKey"]
    except (KeyError, TypeError) as exc:
        raise DataError(f"{where}: missing field {exc}") from exc
    if not isinstance(raw_choices, list):
        raise DataError(f"{where}: choices must be a list")
    try:
        choices = tuple(Choice(label=c["label"], text=c["text"]) for c in raw_choices)
    except (KeyError, TypeError) as exc:
        raise DataError(f"{where}: malformed choice entry ({exc})") from exc
    return Question(id=str(qid), stem=str(stem), choices=choices, answer_key=str(key))


def parse_questions(source: Union[str, Path, Iterable[str]]) -> list[Question]:
    """Parse line-delimited question records, preserving input order.

    ``source`` may be a path or an iterable of lines. Blank lines are skipped.
    Malformed records and duplicate ids raise :class:`DataError` with the
    offending line number.
    """
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    questions: list[Question] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        where = f"line {lineno}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{where}: invalid JSON ({exc.msg})") from exc
        question = _question_from_record(record, where)
        if question.id in seen:
            raise DataError(f"{where}: duplicate question id {question.id!r}")
        seen.add(question.id)
        questions.append(question)
    return questions


def question_to_record(question: Question) -> dict:
    return {
        "id": question.id,
        "question": {
            "stem": question.stem,
            "choices": [{"label": c.label, "text": c.text} for c in question.choices],
        },
        "answerKey": question.answer_key,
    }


def serialize_questions(questions: Iterable[Question]) -> str:
    """Inverse of :func:`parse_questions`; emits the nested record shape."""
    return "".join(
        json.dumps(question_to_record(q), ensure_ascii=False) + "\n" for q in questions
    )


@dataclass(frozen=True)
class VocabEntry:
    """One pickable label with the guideline text shown to annotators."""

    label: str
    title: str
    instructions: str
    example_question_id: str


def _load_vocab_resource() -> dict:
    text = resources.files("qanno.resources").joinpath("label_vocab.json").read_text("utf-8")
    return json.loads(text)


def label_vocabulary(kind: str) -> list[VocabEntry]:
    """Ordered vocabulary entries for ``kind`` ("knowledge" or "reasoning")."""
    enum = label_enum(kind)
    data = _load_vocab_resource()[kind]
    entries = [VocabEntry(**item) for item in data["labels"]]
    # The resource file must stay aligned with the enum definitions.
    assert [e.label for e in entries] == [m.value for m in enum]
    return entries


def vocab_preamble(kind: str) -> str:
    """General labeling guidance shown above the ``kind`` picker."""
    label_enum(kind)
    return _load_vocab_resource()[kind]["preamble"]


def sample_questions() -> list[Question]:
    """The bundled exemplar questions referenced by the vocabulary entries."""
    text = resources.files("qanno.resources").joinpath("sample_questions.jsonl").read_text("utf-8")
    return parse_questions(text.splitlines())
