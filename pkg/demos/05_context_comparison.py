"""Retrieved context vs human-marked relevant context, with the oracle reader.

The oracle reader answers correctly exactly when the right choice text appears
verbatim in the context it is given, so the gap between the two accuracies
isolates what better context is worth to a reader.

Run from the repository root:  python3 demos/05_context_comparison.py
"""

from pathlib import Path

from qanno import (
    OracleReader,
    build_index,
    compare_contexts,
    load_corpus,
    retrieved_contexts,
    sample_questions,
)

HERE = Path(__file__).parent


def main():
    questions = sample_questions()
    index = build_index(load_corpus(HERE / "data" / "corpus.txt"))

    # Baseline: pooled hits of the per-option click queries.
    retrieved = retrieved_contexts(questions, index, top_k=3)

    # Stand-in for human relevance marks: the sentence that actually states
    # the answer, which retrieval does not always surface.
    relevant = {
        q.id: [f"Careful reading shows that {q.choice_text(q.answer_key)} is the answer."]
        for q in questions
    }

    reader = OracleReader(questions)
    result = compare_contexts(questions, reader, retrieved, relevant)

    print(f"questions compared:   {result.n_questions}")
    print(f"retrieved context:    {result.accuracy_retrieved:.1f}% (strict {result.strict_retrieved:.1f}%)")
    print(f"relevant context:     {result.accuracy_relevant:.1f}% (strict {result.strict_relevant:.1f}%)")
    print(f"delta:                {result.delta:+.1f} points")

    print("\nwhere the baseline context already contained the answer:")
    for question in questions:
        answer = question.choice_text(question.answer_key)
        found = any(answer in sentence for sentence in retrieved[question.id])
        print(f"  {'hit ' if found else 'miss'}  {question.id}")


if __name__ == "__main__":
    main()
