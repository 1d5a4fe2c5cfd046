"""Agreement statistics over ordered label annotations.

The unit of aggregation is a :class:`Ranking`: an ordered list of distinct
labels, possibly covering only part of a fixed label universe. Annotators rank
only the labels they selected; selection is treated as a preference over every
unselected label, and unselected-vs-unselected pairs carry no signal. That
convention is what :func:`partial_tau` implements and everything else builds on.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InsufficientRatersError
from .questions import label_enum

# Exact enumeration is deliberate (correctness over speed); 10! permutations is
# where it stops being desk-scale.
_MAX_KEMENY_LABELS = 10


@dataclass(frozen=True)
class Ranking:
    """Ordered distinct labels drawn from a fixed universe."""

    items: tuple[str, ...]
    universe: frozenset[str]

    def __post_init__(self) -> None:
        if len(set(self.items)) != len(self.items):
            raise ValueError(f"ranking items must be distinct: {self.items}")
        extra = set(self.items) - self.universe
        if extra:
            raise ValueError(f"ranking items outside universe: {sorted(extra)}")

    @classmethod
    def of(cls, items: Iterable[str], universe: Iterable[str] | None = None) -> "Ranking":
        items = tuple(items)
        return cls(items, frozenset(universe) if universe is not None else frozenset(items))

    @property
    def is_full(self) -> bool:
        return len(self.items) == len(self.universe)

    def positions(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.items)}


def _require_same_universe(a: Ranking, b: Ranking) -> None:
    if a.universe != b.universe:
        raise ValueError("rankings have mismatched universes")


def kendall_tau(a: Ranking, b: Ranking) -> int:
    """Number of unordered label pairs ordered oppositely in two full rankings."""
    _require_same_universe(a, b)
    if not (a.is_full and b.is_full):
        raise ValueError("kendall_tau requires full rankings; see partial_tau")
    pos_b = b.positions()
    flips = 0
    for i, j in itertools.combinations(range(len(a.items)), 2):
        x, y = a.items[i], a.items[j]
        if pos_b[x] > pos_b[y]:
            flips += 1
    return flips


def partial_tau(full: Ranking, partial: Ranking) -> int:
    """Flip distance from a full ranking to a partial one.

    Counts (a) pairs of selected labels ordered oppositely, plus (b) pairs of
    one selected and one unselected label where ``full`` puts the unselected
    one higher. Unselected-vs-unselected pairs contribute nothing.
    """
    _require_same_universe(full, partial)
    if not full.is_full:
        raise ValueError("first argument must be a full ranking")
    pos_full = full.positions()
    pos_part = partial.positions()
    selected = set(partial.items)
    flips = 0
    for x, y in itertools.combinations(partial.items, 2):
        if (pos_full[x] > pos_full[y]) != (pos_part[x] > pos_part[y]):
            flips += 1
    for s in partial.items:
        for u in full.universe - selected:
            if pos_full[u] < pos_full[s]:
                flips += 1
    return flips


def _pair_preferences(rankings: Sequence[Ranking], labels: Sequence[str]) -> dict[tuple[str, str], int]:
    """prefs[(x, y)] = number of input rankings preferring x over y.

    A ranking prefers x over y when both are selected and x comes first, or
    when x is selected and y is not.
    """
    prefs: dict[tuple[str, str], int] = defaultdict(int)
    for ranking in rankings:
        pos = ranking.positions()
        for x, y in itertools.combinations(labels, 2):
            in_x, in_y = x in pos, y in pos
            if in_x and in_y:
                if pos[x] < pos[y]:
                    prefs[(x, y)] += 1
                else:
                    prefs[(y, x)] += 1
            elif in_x:
                prefs[(x, y)] += 1
            elif in_y:
                prefs[(y, x)] += 1
    return prefs


@dataclass(frozen=True)
class ConsensusResult:
    """A Kemeny consensus: one minimizer plus enough context to audit it."""

    consensus: Ranking
    total_score: int
    mean_score: float
    minimizer_count: int


def kemeny_minimizers(rankings: Sequence[Ranking]) -> tuple[list[tuple[str, ...]], int]:
    """All orderings minimizing the summed flip distance, and that minimum.

    The search space is restricted to labels appearing in at least one input:
    absent labels cannot affect any pairwise count. Minimizers come back in
    lexicographic order.
    """
    rankings = list(rankings)
    if not rankings:
        raise ValueError("kemeny requires at least one ranking")
    universe = rankings[0].universe
    for r in rankings[1:]:
        if r.universe != universe:
            raise ValueError("rankings have mismatched universes")
    present = sorted({label for r in rankings for label in r.items})
    if not present:
        raise ValueError("rankings contain no labels")
    if len(present) > _MAX_KEMENY_LABELS:
        raise ValueError(f"kemeny supports at most {_MAX_KEMENY_LABELS} distinct labels, got {len(present)}")
    prefs = _pair_preferences(rankings, present)
    best_score: int | None = None
    minimizers: list[tuple[str, ...]] = []
    for candidate in itertools.permutations(present):
        # Putting x before y costs one flip per ranking preferring y over x.
        score = 0
        for i, j in itertools.combinations(range(len(candidate)), 2):
            score += prefs.get((candidate[j], candidate[i]), 0)
        if best_score is None or score < best_score:
            best_score = score
            minimizers = [candidate]
        elif score == best_score:
            minimizers.append(candidate)
    assert best_score is not None
    return minimizers, best_score


def kemeny(rankings: Sequence[Ranking]) -> ConsensusResult:
    """Exact Kemeny consensus over ordered label lists.

    Ties between minimizers break lexicographically; ``minimizer_count``
    reports how many there were.
    """
    rankings = list(rankings)
    minimizers, total = kemeny_minimizers(rankings)
    winner = minimizers[0]
    return ConsensusResult(
        consensus=Ranking.of(winner),
        total_score=total,
        mean_score=total / len(rankings),
        minimizer_count=len(minimizers),
    )


def fleiss_kappa(assignments: Sequence[Sequence[str]]) -> float:
    """Fleiss' kappa over categorical assignments, one inner list per question.

    Rater counts may vary between questions; questions with fewer than two
    assignments are excluded. Raises :class:`InsufficientRatersError` when
    nothing remains.
    """
    rows = [tuple(row) for row in assignments if len(row) >= 2]
    if not rows:
        raise InsufficientRatersError("insufficient raters: no question has 2 or more assignments")
    categories = sorted({label for row in rows for label in row})
    counts = np.zeros((len(rows), len(categories)), dtype=np.float64)
    col = {c: i for i, c in enumerate(categories)}
    for i, row in enumerate(rows):
        for label in row:
            counts[i, col[label]] += 1.0
    n_i = counts.sum(axis=1)
    p_i = (counts * (counts - 1.0)).sum(axis=1) / (n_i * (n_i - 1.0))
    p_bar = float(p_i.mean())
    p_j = counts.sum(axis=0) / counts.sum()
    p_e = float((p_j**2).sum())
    if p_e >= 1.0:
        # Single category throughout: disagreement is impossible by construction.
        return 1.0
    return (p_bar - p_e) / (1.0 - p_e)


def record_labels(record, kind: str) -> tuple[str, ...]:
    """Ordered label list of one annotation record for the given kind."""
    if kind == "knowledge":
        return tuple(record.knowledge_labels)
    if kind == "reasoning":
        return tuple(record.reasoning_labels)
    raise ValueError(f"unknown label kind: {kind!r}")


def _by_question(annotations, kind: str) -> dict[str, list[tuple[str, ...]]]:
    grouped: dict[str, list[tuple[str, ...]]] = defaultdict(list)
    for record in annotations:
        grouped[record.question_id].append(record_labels(record, kind))
    return grouped


@dataclass(frozen=True)
class LabelRow:
    label: str
    appears: int
    majority: int
    consensus: int


@dataclass(frozen=True)
class AgreementReport:
    kind: str
    kappa: float
    rows: tuple[LabelRow, ...]
    n_questions: int
    n_annotations: int
    n_excluded_questions: int
    mean_labels_per_annotation: float


def consensus_table(annotations, kind: str) -> AgreementReport:
    """Per-label first-position statistics plus Fleiss' kappa.

    appears   = annotations whose first label is this one
    majority  = questions where it is the strict modal first label
    consensus = questions where every annotator put it first

    The kappa uses only the first (most important) label of each annotation;
    questions with a single annotator are excluded from it and reported.
    """
    grouped = _by_question(annotations, kind)
    appears: Counter[str] = Counter()
    majority: Counter[str] = Counter()
    consensus: Counter[str] = Counter()
    total_labels = 0
    n_annotations = 0
    for label_lists in grouped.values():
        firsts = [labels[0] for labels in label_lists]
        appears.update(firsts)
        n_annotations += len(label_lists)
        total_labels += sum(len(labels) for labels in label_lists)
        tally = Counter(firsts).most_common()
        if len(tally) == 1 or tally[0][1] > tally[1][1]:
            majority[tally[0][0]] += 1
        if len(tally) == 1:
            consensus[tally[0][0]] += 1
    first_labels = [[labels[0] for labels in lists] for lists in grouped.values()]
    kappa = fleiss_kappa([row for row in first_labels if len(row) >= 2])
    excluded = sum(1 for row in first_labels if len(row) < 2)
    rows = tuple(
        LabelRow(label=m.value, appears=appears[m.value], majority=majority[m.value], consensus=consensus[m.value])
        for m in label_enum(kind)
    )
    return AgreementReport(
        kind=kind,
        kappa=kappa,
        rows=rows,
        n_questions=len(grouped),
        n_annotations=n_annotations,
        n_excluded_questions=excluded,
        mean_labels_per_annotation=total_labels / n_annotations if n_annotations else 0.0,
    )


def histogram(annotations, kind: str, mode: str = "first") -> Counter:
    """Label histograms.

    ``first`` counts the first label of every annotation (keys are labels).
    ``first_and_second`` counts each annotation once, under the singleton
    {first} when no second label exists, else under the unordered pair
    {first, second}; keys are sorted label tuples.
    """
    if mode not in ("first", "first_and_second"):
        raise ValueError(f"unknown histogram mode: {mode!r}")
    counts: Counter = Counter()
    for record in annotations:
        labels = record_labels(record, kind)
        if mode == "first":
            counts[labels[0]] += 1
        else:
            counts[tuple(sorted(labels[:2]))] += 1
    return counts


def consensus_by_question(annotations, kind: str) -> list[tuple[str, ConsensusResult]]:
    """Per-question Kemeny consensus of the ordered label lists, sorted by question id."""
    universe = frozenset(m.value for m in label_enum(kind))
    results = []
    for question_id, label_lists in sorted(_by_question(annotations, kind).items()):
        rankings = [Ranking(items, universe) for items in label_lists]
        results.append((question_id, kemeny(rankings)))
    return results


def condorcet_noise_sample(
    truth: Ranking, p: float, rng_seed: Union[int, random.Random]
) -> Ranking:
    """One noisy observation of ``truth``: each pairwise order is flipped
    independently with probability ``p``, then the (possibly cyclic) tournament
    is repaired by sorting on descending pairwise win count, ties in truth order.
    """
    if not 0.0 <= p < 0.5:
        raise ValueError(f"flip probability must satisfy 0 <= p < 0.5, got {p}")
    if not truth.is_full:
        raise ValueError("truth must be a full ranking")
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    items = truth.items
    wins: Counter[str] = Counter({label: 0 for label in items})
    for x, y in itertools.combinations(items, 2):
        winner = x if rng.random() >= p else y  # x precedes y in truth
        wins[winner] += 1
    truth_pos = truth.positions()
    repaired = sorted(items, key=lambda label: (-wins[label], truth_pos[label]))
    return Ranking(tuple(repaired), truth.universe)


def format_kappa(kappa: float) -> str:
    return f"Fleiss' κ = {kappa:.3f}"


def render_agreement_report(report: AgreementReport) -> str:
    """Fixed-width table, one row per label, with a kappa footer and summary block."""
    width = max(len(row.label) for row in report.rows)
    lines = [f"{'label':<{width}}  {'appears':>7}  {'majority':>8}  {'consensus':>9}"]
    for row in report.rows:
        lines.append(f"{row.label:<{width}}  {row.appears:>7}  {row.majority:>8}  {row.consensus:>9}")
    lines.append(format_kappa(report.kappa))
    lines.append(
        f"n_questions={report.n_questions} n_annotations={report.n_annotations} "
        f"excluded_from_kappa={report.n_excluded_questions} "
        f"mean_labels_per_annotation={report.mean_labels_per_annotation:.2f}"
    )
    return "\n".join(lines)
