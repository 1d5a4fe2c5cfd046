import json

import pytest

from qanno import parse_questions, sample_questions

_acceptance_results = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_results:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, ok in _acceptance_results:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")


@pytest.fixture(scope="session")
def samples():
    return sample_questions()


@pytest.fixture(scope="session")
def sample_by_id(samples):
    return {q.id: q for q in samples}


@pytest.fixture
def questions_file(tmp_path, samples):
    from qanno import serialize_questions

    path = tmp_path / "questions.jsonl"
    path.write_text(serialize_questions(samples), encoding="utf-8")
    return path


@pytest.fixture
def corpus_file(tmp_path):
    sentences = [
        "Trees change solar energy into chemical energy by photosynthesis.",
        "Nitrogen makes up most of the air we breathe.",
        "Metals are solid at room temperature.",
        "Metals conduct electricity because their electrons move freely.",
        "Global warming is a worldwide increase in temperature.",
        "Erosion is the first step in forming sedimentary rocks.",
        "The circulatory system transports materials through the body.",
        "Steam can transfer heat to cooler objects.",
    ]
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(sentences) + "\n", encoding="utf-8")
    return path
