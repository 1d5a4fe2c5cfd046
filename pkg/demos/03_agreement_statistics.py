"""Agreement statistics over simulated annotators.

Five annotators label the sample questions. Each has a private tendency to
disagree: their ordered label list is a noisy observation of a per-question
ground-truth ordering, so the Kemeny consensus should recover the truth most
of the time and Fleiss' kappa should sit well above chance.

Run from the repository root:  python3 demos/03_agreement_statistics.py
"""

import random

from qanno import (
    AnnotationRecord,
    KnowledgeLabel,
    Ranking,
    condorcet_noise_sample,
    consensus_by_question,
    consensus_table,
    histogram,
    sample_questions,
)
from qanno.agreement import render_agreement_report

FLIP_PROBABILITY = 0.15
N_ANNOTATORS = 5


def main():
    rng = random.Random(11)
    questions = sample_questions()
    knowledge = [m.value for m in KnowledgeLabel]

    records = []
    truths = {}
    for question in questions:
        truth_labels = rng.sample(knowledge, 3)
        truths[question.id] = truth_labels
        truth = Ranking.of(truth_labels)
        for a in range(N_ANNOTATORS):
            noisy = condorcet_noise_sample(truth, FLIP_PROBABILITY, rng)
            take = rng.randint(1, 3)  # annotators rarely rank everything
            records.append(
                AnnotationRecord(
                    question_id=question.id,
                    annotator_id=f"annotator-{a}",
                    knowledge_labels=tuple(noisy.items[:take]),
                    reasoning_labels=("linguistic",),
                )
            )

    print(f"{len(records)} annotations from {N_ANNOTATORS} simulated annotators\n")
    report = consensus_table(records, "knowledge")
    print(render_agreement_report(report))

    print("\nfirst-label histogram:")
    for label, count in histogram(records, "knowledge", mode="first").most_common():
        print(f"  {label:<12} {'#' * count}")

    print("\nper-question Kemeny consensus vs the hidden truth:")
    recovered = 0
    results = consensus_by_question(records, "knowledge")
    for qid, res in results:
        ok = list(res.consensus.items)[0] == truths[qid][0]
        recovered += ok
        marker = "=" if ok else "x"
        print(
            f"  {marker} {qid:<28} {' > '.join(res.consensus.items):<40}"
            f" mean score {res.mean_score:.2f}"
        )
    mean_score = sum(r.mean_score for _, r in results) / len(results)
    print(f"\nrecovered the true first label on {recovered}/{len(results)} questions")
    print(f"mean Kemeny score of the per-question consensus: {mean_score:.2f}")


if __name__ == "__main__":
    main()
