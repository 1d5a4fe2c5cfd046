"""Sentence corpus indexing and deterministic BM25 retrieval.

The corpus format is UTF-8 plain text, one sentence per line; blank lines are
skipped and ``sentence_id`` is the zero-based line number, so ids always map
back to the source file.
"""

from __future__ import annotations

import io
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import DataError
from .questions import Question

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)  # runs of Unicode letters/digits

# Small English stopword list, applied only when a config opts in.
STOPWORDS = frozenset(
    """a an and are as at be by for from has have in is it its of on or that the
    this to was were which will with""".split()
)

_INDEX_MAGIC = "qanno-index"
_INDEX_VERSION = 1

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


def tokenize(text: str, *, stopwords: bool = False, stemming: bool = False) -> list[str]:
    """Lowercased maximal runs of letters/digits, in order; no other filtering by default."""
    terms = _TOKEN_RE.findall(text.lower())
    if stopwords:
        terms = [t for t in terms if t not in STOPWORDS]
    if stemming:
        terms = [stem(t) for t in terms]
    return terms


def stem(term: str) -> str:
    """Light plural stemmer (s-stripping); enough to fold trivial variants."""
    if term.endswith("ies") and len(term) > 4:
        return term[:-3] + "y"
    if term.endswith("es") and len(term) > 3 and term.endswith(("sses", "shes", "ches", "xes", "zes")):
        return term[:-2]
    if term.endswith("s") and not term.endswith("ss") and len(term) > 3:
        return term[:-1]
    return term


@dataclass(frozen=True)
class SentenceRecord:
    sentence_id: int
    text: str

    def __post_init__(self) -> None:
        if self.sentence_id < 0:
            raise DataError(f"sentence_id must be non-negative, got {self.sentence_id}")
        if not self.text.strip():
            raise DataError(f"sentence {self.sentence_id}: text is empty")


@dataclass(frozen=True)
class QuerySpec:
    text: str
    top_k: int = 10

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(frozen=True)
class ScoredHit:
    sentence_id: int
    score: float
    text: str


@dataclass
class InvertedIndex:
    """Immutable-after-build term index over a sentence corpus.

    ``postings`` maps term -> list of (sentence_id, term frequency), each list
    sorted ascending by sentence_id. ``texts`` keeps the original sentences so
    hits can be returned verbatim and serialization round-trips losslessly.
    """

    postings: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    doc_lengths: dict[int, int] = field(default_factory=dict)
    texts: dict[int, str] = field(default_factory=dict)
    avg_doc_length: float = 0.0
    stopwords: bool = False
    stemming: bool = False

    @property
    def doc_count(self) -> int:
        return len(self.doc_lengths)


def load_corpus(path: Union[str, Path]) -> list[SentenceRecord]:
    """One sentence per line; blank lines are skipped but still consume line numbers."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            text = line.rstrip("\n")
            if not text.strip():
                continue
            records.append(SentenceRecord(sentence_id=lineno, text=text))
    return records


def build_index(
    corpus: Iterable[SentenceRecord], *, stopwords: bool = False, stemming: bool = False
) -> InvertedIndex:
    """Build the inverted index. Rebuilding from the same corpus is deterministic."""
    index = InvertedIndex(stopwords=stopwords, stemming=stemming)
    records = sorted(corpus, key=lambda r: r.sentence_id)  # keeps postings id-sorted
    for record in records:
        if record.sentence_id in index.doc_lengths:
            raise DataError(f"duplicate sentence_id {record.sentence_id}")
        terms = tokenize(record.text, stopwords=stopwords, stemming=stemming)
        index.doc_lengths[record.sentence_id] = len(terms)
        index.texts[record.sentence_id] = record.text
        for term, tf in sorted(Counter(terms).items()):
            index.postings.setdefault(term, []).append((record.sentence_id, tf))
    if index.doc_count:
        index.avg_doc_length = sum(index.doc_lengths.values()) / index.doc_count
    return index


def idf(index: InvertedIndex, term: str) -> float:
    df = len(index.postings.get(term, ()))
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def search(
    index: InvertedIndex,
    query: QuerySpec,
    *,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> list[ScoredHit]:
    """BM25-ranked hits for ``query``, at most ``top_k``, all with score > 0.

    Ties break by ascending sentence_id so identical inputs always produce
    identical hit lists.
    """
    terms = tokenize(query.text, stopwords=index.stopwords, stemming=index.stemming)
    if not terms:
        raise ValueError("empty query")
    seen: set[str] = set()
    unique_terms = [t for t in terms if not (t in seen or seen.add(t))]
    scores: dict[int, float] = {}
    for term in unique_terms:
        postings = index.postings.get(term)
        if not postings:
            continue
        term_idf = idf(index, term)
        for sentence_id, tf in postings:
            dl = index.doc_lengths[sentence_id]
            norm = k1 * (1.0 - b + b * dl / index.avg_doc_length)
            scores[sentence_id] = scores.get(sentence_id, 0.0) + term_idf * tf * (k1 + 1.0) / (tf + norm)
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [
        ScoredHit(sentence_id=sid, score=s, text=index.texts[sid])
        for sid, s in ranked[: query.top_k]
        if s > 0.0
    ]


_LAST_SENTENCE_RE = re.compile(r"[.?!](?=\s|$)")


def last_sentence(text: str) -> str:
    """Final sentence of ``text``, splitting on . ? ! followed by whitespace or
    end, keeping terminal punctuation. A trailing fragment without terminal
    punctuation counts as the last sentence."""
    stripped = text.strip()
    end = 0
    for match in _LAST_SENTENCE_RE.finditer(stripped):
        if match.end() == len(stripped):
            return stripped[end:].strip()
        end = match.end()
    return stripped[end:].strip()


def default_query(question: Question, choice_label: str) -> str:
    """The query issued when an annotator clicks a choice: last sentence of the
    stem, a single space, then the full choice text."""
    try:
        choice_text = question.choice_text(choice_label)
    except KeyError:
        raise DataError(f"question {question.id} has no choice {choice_label!r}") from None
    return f"{last_sentence(question.stem)} {choice_text}"


def dump_index(index: InvertedIndex) -> str:
    """Line-oriented serialization: a magic/version header, one line per
    document, one line per term (terms sorted). Deterministic for a given index."""
    buf = io.StringIO()
    header = {
        "magic": _INDEX_MAGIC,
        "version": _INDEX_VERSION,
        "doc_count": index.doc_count,
        "term_count": len(index.postings),
        "avg_doc_length": index.avg_doc_length,
        "stopwords": index.stopwords,
        "stemming": index.stemming,
    }
    buf.write(json.dumps(header, sort_keys=True, ensure_ascii=False) + "\n")
    for sid in sorted(index.doc_lengths):
        row = [sid, index.doc_lengths[sid], index.texts[sid]]
        buf.write(json.dumps({"doc": row}, ensure_ascii=False) + "\n")
    for term in sorted(index.postings):
        row = [term, [[sid, tf] for sid, tf in index.postings[term]]]
        buf.write(json.dumps({"term": row}, ensure_ascii=False) + "\n")
    return buf.getvalue()


def save_index(index: InvertedIndex, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_index(index), encoding="utf-8")


def load_index(source: Union[str, Path]) -> InvertedIndex:
    """Inverse of :func:`save_index`; rejects foreign or future-versioned files."""
    lines = Path(source).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataError("index file is empty")
    header = json.loads(lines[0])
    if header.get("magic") != _INDEX_MAGIC:
        raise DataError("not an index file (bad magic header)")
    if header.get("version") != _INDEX_VERSION:
        raise DataError(f"unsupported index format version {header.get('version')!r}")
    index = InvertedIndex(
        stopwords=bool(header.get("stopwords", False)),
        stemming=bool(header.get("stemming", False)),
        avg_doc_length=float(header.get("avg_doc_length", 0.0)),
    )
    for lineno, line in enumerate(lines[1:], start=2):
        entry = json.loads(line)
        if "doc" in entry:
            sid, length, text = entry["doc"]
            index.doc_lengths[int(sid)] = int(length)
            index.texts[int(sid)] = text
        elif "term" in entry:
            term, postings = entry["term"]
            index.postings[term] = [(int(sid), int(tf)) for sid, tf in postings]
        else:
            raise DataError(f"index line {lineno}: unknown entry")
    if index.doc_count != header["doc_count"] or len(index.postings) != header["term_count"]:
        raise DataError("index file truncated (counts do not match header)")
    return index
