"""Walk one annotator through the labeling workflow against a local store.

Everything below also happens over HTTP when the service runs (see
``qanno serve``); the store is the same either way.

Run from the repository root:  python3 demos/02_annotation_workflow.py
"""

import tempfile
from pathlib import Path

from qanno import (
    AnnotationRecord,
    AnnotationStore,
    QuerySpec,
    QueryLogEntry,
    RelevanceMark,
    build_index,
    default_query,
    load_corpus,
    sample_questions,
    search,
)

HERE = Path(__file__).parent


def main():
    questions = sample_questions()
    index = build_index(load_corpus(HERE / "data" / "corpus.txt"))
    data_dir = Path(tempfile.mkdtemp(prefix="qanno-demo-")) / "data"

    with AnnotationStore(data_dir, questions, corpus_ids=set(index.doc_lengths)) as store:
        annotator = "demo-annotator"

        question = store.next_question(annotator)
        print(f"first question for {annotator}: {question.id}")
        print(f"  {question.stem}")

        print("skipping it; it re-queues at the end")
        store.skip(annotator, question.id)
        question = store.next_question(annotator)
        print(f"next question: {question.id}")

        # Clicking option B populates the search box with the default query.
        query = default_query(question, "B")
        hits = search(index, QuerySpec(query, top_k=5))
        store.log_query(
            QueryLogEntry(
                annotator_id=annotator,
                question_id=question.id,
                query_text=query,
                result_sentence_ids=tuple(h.sentence_id for h in hits),
            )
        )
        print(f"ran the click query for B: {query!r} ({len(hits)} hits)")
        if hits:
            store.mark_relevance(
                RelevanceMark(
                    annotator_id=annotator,
                    question_id=question.id,
                    sentence_id=hits[0].sentence_id,
                    relevant=True,
                )
            )
            print(f"marked sentence {hits[0].sentence_id} relevant: {hits[0].text!r}")

        store.submit_annotation(
            AnnotationRecord(
                question_id=question.id,
                annotator_id=annotator,
                knowledge_labels=("basic_facts", "causes"),
                reasoning_labels=("linguistic",),
                selected_answer="B",
                quality="good",
                notes="retrieval was on point",
            )
        )
        print("submitted an annotation (knowledge: basic_facts > causes)")

        print("\nexports:")
        for kind in ("annotations", "queries", "relevance"):
            lines = store.export(kind).splitlines()
            print(f"  {kind}: {len(lines)} record(s)")
        print(f"\nrelevant context for {question.id}: {store.relevant_context(question.id)}")
        print(f"log files live in {data_dir}")


if __name__ == "__main__":
    main()
