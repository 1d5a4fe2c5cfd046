"""Build a BM25 index over a sentence corpus and run a few searches.

Run from the repository root:  python3 demos/01_index_and_search.py
"""

from pathlib import Path

from qanno import (
    QuerySpec,
    build_index,
    default_query,
    load_corpus,
    sample_questions,
    search,
)

HERE = Path(__file__).parent


def show(index, query, top_k=3):
    print(f"\nquery: {query!r}")
    for hit in search(index, QuerySpec(query, top_k=top_k)):
        print(f"  [{hit.sentence_id:>2}] {hit.score:6.3f}  {hit.text}")


def main():
    records = load_corpus(HERE / "data" / "corpus.txt")
    index = build_index(records)
    print(f"indexed {index.doc_count} sentences, avg length {index.avg_doc_length:.2f} tokens")

    # Free-text queries, the kind annotators type into the search box.
    show(index, "metals are solid at room temperatures")
    show(index, "what makes up most of the air")

    # The click query: last sentence of the stem plus the clicked option.
    question = next(q for q in sample_questions() if q.id == "sample-energy-conversion")
    print(f"\nquestion: {question.stem}")
    for choice in question.choices:
        query = default_query(question, choice.label)
        hits = search(index, QuerySpec(query, top_k=1))
        top = f"[{hits[0].sentence_id}] {hits[0].text}" if hits else "(no hits)"
        print(f"  click {choice.label}: {query}")
        print(f"      -> {top}")


if __name__ == "__main__":
    main()
