import json

import pytest

from helpers import synthetic_question_record
from qanno import AnnotationRecord, RelevanceMark, load_index
from qanno.cli import main
from qanno.store import _to_line


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write_annotations(path, records):
    path.write_text("".join(_to_line(r) for r in records), encoding="utf-8")


def _unanimous_annotations(qid="q1"):
    return [
        AnnotationRecord(
            question_id=qid,
            annotator_id=a,
            knowledge_labels=("basic_facts",),
            reasoning_labels=("linguistic", "multihop"),
            timestamp="2026-01-01T00:00:00.000000Z",
        )
        for a in ("x", "y", "z")
    ]


# -- index command ----------------------------------------------------------------


def test_index_command(tmp_path, capsys, corpus_file):
    out = tmp_path / "corpus.idx"
    code, stdout, _ = run_cli(capsys, "index", "--corpus", str(corpus_file), "--out", str(out))
    assert code == 0
    assert "indexed 8 sentences" in stdout
    assert load_index(out).doc_count == 8


def test_index_rerun_is_identical(tmp_path, capsys, corpus_file):
    out1, out2 = tmp_path / "a.idx", tmp_path / "b.idx"
    assert run_cli(capsys, "index", "--corpus", str(corpus_file), "--out", str(out1))[0] == 0
    assert run_cli(capsys, "index", "--corpus", str(corpus_file), "--out", str(out2))[0] == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_index_missing_corpus_exits_2(tmp_path, capsys):
    code, _, err = run_cli(capsys, "index", "--corpus", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "o"))
    assert code == 2
    assert "nope.txt" in err


def test_usage_error_exits_1(capsys):
    code, _, err = run_cli(capsys, "index", "--no-such-flag")
    assert code == 1


def test_unknown_command_exits_1(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 1


# -- report command ----------------------------------------------------------------


def test_report_agreement_unanimous(tmp_path, capsys):
    path = tmp_path / "ann.jsonl"
    _write_annotations(path, _unanimous_annotations())
    code, stdout, _ = run_cli(capsys, "report", "agreement", str(path), "--label-kind", "knowledge")
    assert code == 0
    assert "Fleiss' κ = 1.000" in stdout
    assert "basic_facts" in stdout


def test_report_agreement_records_format(tmp_path, capsys):
    path = tmp_path / "ann.jsonl"
    _write_annotations(path, _unanimous_annotations())
    code, stdout, _ = run_cli(capsys, "report", "agreement", str(path), "--format", "records")
    assert code == 0
    lines = [json.loads(l) for l in stdout.splitlines()]
    assert lines[-1]["kappa"] == 1.0
    assert any(l.get("label") == "basic_facts" and l.get("appears") == 3 for l in lines)


def test_report_consensus_lists_mean_score(tmp_path, capsys):
    path = tmp_path / "ann.jsonl"
    _write_annotations(path, _unanimous_annotations())
    code, stdout, _ = run_cli(capsys, "report", "consensus", str(path), "--label-kind", "reasoning")
    assert code == 0
    assert "q1: linguistic > multihop" in stdout
    assert "mean Kemeny score" in stdout


def test_report_histogram_merged_mode(tmp_path, capsys):
    path = tmp_path / "ann.jsonl"
    _write_annotations(path, _unanimous_annotations())
    code, stdout, _ = run_cli(
        capsys, "report", "histogram", str(path), "--label-kind", "reasoning", "--mode", "first_and_second"
    )
    assert code == 0
    assert "linguistic+multihop" in stdout


def test_report_missing_file_exits_2(tmp_path, capsys):
    assert run_cli(capsys, "report", "agreement", str(tmp_path / "no.jsonl"))[0] == 2


def test_report_empty_file_exits_2(tmp_path, capsys):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    code, _, err = run_cli(capsys, "report", "agreement", str(path))
    assert code == 2
    assert "no annotations" in err


# -- eval command ------------------------------------------------------------------


def _synthetic_dataset(tmp_path, n=4):
    questions_path = tmp_path / "questions.jsonl"
    records = [synthetic_question_record(i) for i in range(n)]
    questions_path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    annotations = [
        AnnotationRecord(
            question_id=r["id"],
            annotator_id="x",
            knowledge_labels=("basic_facts",),
            reasoning_labels=("linguistic",),
            timestamp="2026-01-01T00:00:00.000000Z",
        )
        for r in records
    ]
    annotations_path = tmp_path / "annotations.jsonl"
    _write_annotations(annotations_path, annotations)
    return questions_path, annotations_path


def test_eval_empty_corpus_is_chance(tmp_path, capsys):
    questions_path, annotations_path = _synthetic_dataset(tmp_path)
    empty_corpus = tmp_path / "corpus.txt"
    empty_corpus.write_text("placeholder sentence with no shared tokens\n", encoding="utf-8")
    code, stdout, _ = run_cli(
        capsys, "eval", str(annotations_path),
        "--corpus", str(empty_corpus), "--questions", str(questions_path),
        "--solvers", "text_search,overlap", "--format", "records",
    )
    assert code == 0
    rows = [json.loads(l) for l in stdout.splitlines()]
    overall = next(r for r in rows if r["label"] == "overall")
    assert overall["text_search"] == pytest.approx(25.0)
    assert overall["overlap"] == pytest.approx(25.0)


def test_eval_table_format(tmp_path, capsys):
    questions_path, annotations_path = _synthetic_dataset(tmp_path)
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("alpha0 outcome is the marker0 answer\n", encoding="utf-8")
    code, stdout, _ = run_cli(
        capsys, "eval", str(annotations_path),
        "--corpus", str(corpus), "--questions", str(questions_path),
        "--solvers", "text_search,random", "--seed", "7",
    )
    assert code == 0
    assert "basic_facts (4)" in stdout
    assert "overall" in stdout


def test_eval_unknown_solver_exits_1(tmp_path, capsys):
    questions_path, annotations_path = _synthetic_dataset(tmp_path)
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("x\n", encoding="utf-8")
    code, _, err = run_cli(
        capsys, "eval", str(annotations_path),
        "--corpus", str(corpus), "--questions", str(questions_path), "--solvers", "guessing",
    )
    assert code == 1
    assert "unknown solver" in err


# -- compare-contexts command ---------------------------------------------------------


def test_compare_contexts_oracle(tmp_path, capsys):
    records = [synthetic_question_record(i) for i in range(4)]
    questions_path = tmp_path / "questions.jsonl"
    questions_path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    # Per option, a decoy sentence dominates the click query (with --top-k 1
    # only decoys are retrieved); the marked sentence is the only one carrying
    # the key choice text verbatim.
    sentences = []
    marks = []
    for i, record in enumerate(records):
        for choice in record["question"]["choices"]:
            word = choice["text"].split()[0]
            sentences.append(f"which option matches marker{i} {word} {word} {word}")
        key_text = next(c["text"] for c in record["question"]["choices"] if c["label"] == record["answerKey"])
        marks.append(
            RelevanceMark(
                annotator_id="a",
                question_id=record["id"],
                sentence_id=len(sentences),
                relevant=True,
                timestamp="2026-01-01T00:00:00.000000Z",
            )
        )
        sentences.append(f"the right answer is {key_text}")
    corpus_path = tmp_path / "corpus.txt"
    corpus_path.write_text("\n".join(sentences) + "\n", encoding="utf-8")
    relevance_path = tmp_path / "relevance.jsonl"
    relevance_path.write_text("".join(_to_line(m) for m in marks), encoding="utf-8")
    code, stdout, _ = run_cli(
        capsys, "compare-contexts",
        "--corpus", str(corpus_path), "--questions", str(questions_path),
        "--relevance", str(relevance_path), "--reader", "oracle",
        "--top-k", "1", "--format", "records",
    )
    assert code == 0
    result = json.loads(stdout.splitlines()[-1])
    assert result["accuracy_relevant"] == pytest.approx(100.0)
    assert result["accuracy_retrieved"] == pytest.approx(25.0)


def test_config_file_and_flag_override(tmp_path, capsys, corpus_file):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"corpus": str(tmp_path / "wrong.txt"), "top_k": 3}), encoding="utf-8")
    out = tmp_path / "x.idx"
    # Flag must win over the config file's (broken) corpus path.
    code, stdout, _ = run_cli(
        capsys, "index", "--config", str(config), "--corpus", str(corpus_file), "--out", str(out)
    )
    assert code == 0
    assert "indexed 8 sentences" in stdout


def test_bad_config_file_exits_2(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text('{"nonsense_key": 1}', encoding="utf-8")
    code, _, err = run_cli(capsys, "index", "--config", str(config), "--out", str(tmp_path / "o"))
    assert code == 2
    assert "unknown keys" in err
