"""Independent oracles and fixture generators for the test suite.

Nothing in here calls into qanno's scoring/aggregation code paths: every
oracle is a direct, separate evaluation of the rule it checks.
"""

from __future__ import annotations

import itertools
import math
import random
import re


# -- retrieval oracle ---------------------------------------------------------


def oracle_tokenize(text):
    return re.findall(r"[^\W_]+", text.lower())


def bm25_oracle(docs, query, k1=1.2, b=0.75):
    """Direct evaluation of the BM25 formula over raw document strings.

    Returns one score per document (0.0 when nothing matches).
    """
    tokenized = [oracle_tokenize(d) for d in docs]
    n = len(docs)
    avgdl = sum(len(d) for d in tokenized) / n
    qterms = []
    for t in oracle_tokenize(query):
        if t not in qterms:
            qterms.append(t)
    scores = []
    for d in tokenized:
        s = 0.0
        for t in qterms:
            tf = d.count(t)
            if tf == 0:
                continue
            df = sum(1 for other in tokenized if t in other)
            idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            s += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len(d) / avgdl))
        scores.append(s)
    return scores


def independent_last_sentence(text):
    """Backwards-scanning splitter: last boundary (./?/! before space or end)
    that still has content after it starts the final sentence."""
    s = text.strip()
    boundary = -1
    for i, ch in enumerate(s):
        if ch in ".?!" and (i + 1 == len(s) or s[i + 1].isspace()):
            if i + 1 < len(s):
                boundary = i
    return s[boundary + 1 :].strip()


# -- rank aggregation oracle --------------------------------------------------


def pair_flip_distance(perm, items):
    """Flips between a full ordering ``perm`` and a partial selection ``items``:
    discordant selected pairs plus unselected-above-selected pairs."""
    pos = {label: i for i, label in enumerate(perm)}
    ppos = {label: i for i, label in enumerate(items)}
    selected = set(items)
    total = 0
    for x, y in itertools.combinations(perm, 2):
        if x in selected and y in selected:
            if (pos[x] > pos[y]) != (ppos[x] > ppos[y]):
                total += 1
        elif x in selected:
            if pos[y] < pos[x]:
                total += 1
        elif y in selected:
            if pos[x] < pos[y]:
                total += 1
    return total


def brute_force_kemeny(label_lists):
    """Minimum summed flip distance over every permutation of the labels that
    appear, plus all minimizing permutations in lexicographic order."""
    present = sorted({label for items in label_lists for label in items})
    best = None
    minimizers = []
    for perm in itertools.permutations(present):
        total = sum(pair_flip_distance(perm, items) for items in label_lists)
        if best is None or total < best:
            best = total
            minimizers = [perm]
        elif total == best:
            minimizers.append(perm)
    return best, minimizers


def random_partial_rankings(rng, labels, count):
    out = []
    for _ in range(count):
        size = rng.randint(1, len(labels))
        out.append(tuple(rng.sample(list(labels), size)))
    return out


# -- agreement oracle ---------------------------------------------------------


def fleiss_oracle(counts):
    """Textbook Fleiss' kappa from an item x category count matrix (pure Python)."""
    p_i = []
    for row in counts:
        n = sum(row)
        p_i.append(sum(c * (c - 1) for c in row) / (n * (n - 1)))
    total = sum(sum(row) for row in counts)
    n_categories = len(counts[0])
    p_j = [sum(row[j] for row in counts) / total for j in range(n_categories)]
    p_bar = sum(p_i) / len(p_i)
    p_e = sum(p * p for p in p_j)
    return (p_bar - p_e) / (1.0 - p_e)


def counts_to_assignments(counts, categories):
    """Expand a count matrix into per-question label lists."""
    out = []
    for row in counts:
        labels = []
        for count, category in zip(row, categories):
            labels.extend([category] * count)
        out.append(labels)
    return out


# -- synthetic fixtures -------------------------------------------------------


def synthetic_sentences(n, rng, vocab_size=2000, min_len=5, max_len=12):
    vocab = [f"term{i:04d}" for i in range(vocab_size)]
    sentences = []
    for _ in range(n):
        length = rng.randint(min_len, max_len)
        sentences.append(" ".join(rng.choice(vocab) for _ in range(length)))
    return sentences


def synthetic_question_record(i, nonce=""):
    """A four-choice question with a multi-sentence stem; choice texts are
    mutually disjoint token sets."""
    stem = (
        f"Background fact number {i} about topic{nonce}{i}. "
        f"It has several parts. Which option matches marker{nonce}{i}?"
    )
    choices = [
        {"label": "A", "text": f"alpha{nonce}{i} outcome"},
        {"label": "B", "text": f"bravo{nonce}{i} result"},
        {"label": "C", "text": f"charlie{nonce}{i} effect"},
        {"label": "D", "text": f"delta{nonce}{i} answer"},
    ]
    key = "ABCD"[i % 4]
    return {
        "id": f"q{nonce}{i:03d}",
        "question": {"stem": stem, "choices": choices},
        "answerKey": key,
    }
