"""Partition questions by their consensus label and score the built-in solvers.

Run from the repository root:  python3 demos/04_solver_evaluation.py
"""

import random
from pathlib import Path

from qanno import (
    AnnotationRecord,
    KnowledgeLabel,
    build_index,
    load_corpus,
    overlap_solver,
    random_singleton_solver,
    run_evaluation,
    sample_questions,
    text_search_solver,
)
from qanno.evaluation import render_eval_report

HERE = Path(__file__).parent

# Rough by-hand labels for the bundled questions; three annotators who mostly
# agree on the first label but order the tails differently.
FIRST_LABELS = {
    "sample-definition": "definition",
    "sample-basic-facts": "basic_facts",
    "sample-causes": "causes",
    "sample-purpose": "purpose",
    "sample-algebraic": "algebraic",
    "sample-experiments": "experiments",
    "sample-physical-know": "physical",
    "sample-qn-logic": "basic_facts",
    "sample-linguistic": "definition",
    "sample-explanation": "causes",
    "sample-multihop": "basic_facts",
    "sample-hypothetical": "physical",
    "sample-comparison": "basic_facts",
    "sample-physical-reason": "physical",
    "sample-analogy": "purpose",
    "sample-energy-conversion": "causes",
}


def main():
    rng = random.Random(3)
    questions = sample_questions()
    index = build_index(load_corpus(HERE / "data" / "corpus.txt"))
    others = [m.value for m in KnowledgeLabel]

    records = []
    for question in questions:
        first = FIRST_LABELS[question.id]
        for a in range(3):
            tail = rng.sample([l for l in others if l != first], rng.randint(0, 2))
            records.append(
                AnnotationRecord(
                    question_id=question.id,
                    annotator_id=f"annotator-{a}",
                    knowledge_labels=(first, *tail),
                    reasoning_labels=("linguistic",),
                )
            )

    solvers = {
        "text_search": lambda q: text_search_solver(q, index),
        "overlap": lambda q: overlap_solver(q, index),
        "random": lambda q: random_singleton_solver(q, rng),
    }
    report = run_evaluation(questions, records, "knowledge", solvers)
    print("accuracy (%) with 1/k partial credit, partitioned by consensus first label:\n")
    print(render_eval_report(report))


if __name__ == "__main__":
    main()
