"""Operator entry point.

Commands: index, serve, report, eval, compare-contexts. Exit codes: 0 success,
1 usage error, 2 data error. Every flag can also be set through an environment
variable with the QANNO_ prefix (see --help of each command).
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click

from . import agreement, corpus, evaluation, store as store_mod
from .config import Config, load_config
from .errors import DataError
from .questions import parse_questions

_EPILOG = (
    "Every flag can also come from an environment variable with the QANNO_ prefix: "
    "QANNO_CONFIG, QANNO_CORPUS, QANNO_QUESTIONS, QANNO_DATA_DIR, QANNO_BIND, "
    "QANNO_TOP_K, QANNO_SEED, QANNO_FORMAT. Flags win over the environment, "
    "and both win over the config file."
)


def _config(config_path, **overrides) -> Config:
    return load_config(Path(config_path) if config_path else None, **overrides)


@click.group(epilog=_EPILOG)
def cli():
    """Annotation service and analysis tools for multiple-choice science QA."""


config_option = click.option(
    "--config", "config_path", type=click.Path(), default=None, envvar="QANNO_CONFIG",
    help="JSON config file."
)


@cli.command()
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="QANNO_CORPUS",
              help="Sentence corpus, one per line.")
@click.option("--out", "out_path", type=click.Path(), required=True, help="Where to write the serialized index.")
@click.option("--stopwords/--no-stopwords", default=None, help="Drop stopwords while indexing.")
@click.option("--stemming/--no-stemming", default=None, help="Apply light stemming while indexing.")
def index(config_path, corpus_path, out_path, stopwords, stemming):
    """Build and serialize the inverted index for a sentence corpus."""
    cfg = _config(config_path, corpus=corpus_path, stopwords=stopwords, stemming=stemming)
    cfg.require_paths("corpus")
    records = corpus.load_corpus(cfg.corpus)
    idx = corpus.build_index(records, stopwords=cfg.stopwords, stemming=cfg.stemming)
    corpus.save_index(idx, out_path)
    click.echo(f"indexed {idx.doc_count} sentences (avg_doc_length={idx.avg_doc_length:.2f}) -> {out_path}")


@cli.command()
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="QANNO_CORPUS")
@click.option("--questions", "questions_path", type=click.Path(), default=None, envvar="QANNO_QUESTIONS")
@click.option("--data-dir", "data_dir", type=click.Path(), default=None, envvar="QANNO_DATA_DIR")
@click.option("--bind", default=None, envvar="QANNO_BIND", help="HOST:PORT to listen on.")
@click.option("--top-k", type=int, default=None, envvar="QANNO_TOP_K", help="Default search result count.")
@click.option("--ui", "ui_dir", type=click.Path(), default=None, help="Static UI directory to serve at /.")
def serve(config_path, corpus_path, questions_path, data_dir, bind, top_k, ui_dir):
    """Run the annotation service."""
    import uvicorn

    from .service import create_app

    cfg = _config(
        config_path,
        corpus=corpus_path,
        questions=questions_path,
        data_dir=data_dir,
        bind=bind,
        top_k=top_k,
        ui_dir=ui_dir,
    )
    cfg.require_paths("corpus", "questions")
    questions = parse_questions(cfg.questions)
    idx = corpus.build_index(corpus.load_corpus(cfg.corpus), stopwords=cfg.stopwords, stemming=cfg.stemming)
    st = store_mod.AnnotationStore(cfg.data_dir, questions, corpus_ids=set(idx.doc_lengths))
    app = create_app(st, idx, cfg)
    host, port = cfg.host_port()
    click.echo(f"serving {len(questions)} questions over {idx.doc_count} sentences on {host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@cli.command()
@click.argument("kind", type=click.Choice(["agreement", "histogram", "consensus"]))
@click.argument("annotations_file", type=click.Path())
@click.option("--label-kind", type=click.Choice(["knowledge", "reasoning"]), default="knowledge", show_default=True)
@click.option("--mode", type=click.Choice(["first", "first_and_second"]), default="first", show_default=True,
              help="Histogram bucketing: first labels only, or merged first+second.")
@click.option("--format", "fmt", type=click.Choice(["table", "records"]), default="table",
              show_default=True, envvar="QANNO_FORMAT")
def report(kind, annotations_file, label_kind, mode, fmt):
    """Agreement tables, label histograms, and per-question consensus listings."""
    annotations = store_mod.load_annotations(Path(annotations_file))
    if not annotations:
        raise DataError(f"no annotations in {annotations_file}")
    if kind == "agreement":
        rep = agreement.consensus_table(annotations, label_kind)
        if fmt == "records":
            for row in rep.rows:
                click.echo(json.dumps(row.__dict__))
            click.echo(json.dumps({
                "kappa": rep.kappa,
                "n_questions": rep.n_questions,
                "n_annotations": rep.n_annotations,
                "n_excluded_questions": rep.n_excluded_questions,
                "mean_labels_per_annotation": rep.mean_labels_per_annotation,
            }))
        else:
            click.echo(agreement.render_agreement_report(rep))
    elif kind == "histogram":
        counts = agreement.histogram(annotations, label_kind, mode=mode)
        items = sorted(counts.items(), key=lambda kv: (-kv[1], str(kv[0])))
        for key, count in items:
            name = "+".join(key) if isinstance(key, tuple) else key
            if fmt == "records":
                click.echo(json.dumps({"labels": name, "count": count}))
            else:
                click.echo(f"{name:<30} {count}")
    else:
        results = agreement.consensus_by_question(annotations, label_kind)
        for qid, res in results:
            line = {
                "question_id": qid,
                "consensus": list(res.consensus.items),
                "total_score": res.total_score,
                "mean_score": res.mean_score,
                "minimizer_count": res.minimizer_count,
            }
            if fmt == "records":
                click.echo(json.dumps(line))
            else:
                ranking = " > ".join(res.consensus.items)
                click.echo(f"{qid}: {ranking} (total={res.total_score}, mean={res.mean_score:.2f}, ties={res.minimizer_count})")
        mean_of_means = sum(r.mean_score for _, r in results) / len(results)
        if fmt == "records":
            click.echo(json.dumps({"mean_consensus_score": mean_of_means}))
        else:
            click.echo(f"mean Kemeny score of the per-question consensus: {mean_of_means:.2f}")


def _build_solvers(names, idx, cfg, embeddings_path):
    rng = random.Random(cfg.seed)
    solvers = {}
    for name in names:
        if name == "text_search":
            solvers[name] = lambda q, _idx=idx: evaluation.text_search_solver(
                q, _idx, hits_per_option=cfg.text_search_hits, k1=cfg.k1, b=cfg.b)
        elif name == "overlap":
            solvers[name] = lambda q, _idx=idx: evaluation.overlap_solver(
                q, _idx, pool_size=cfg.overlap_hits, k1=cfg.k1, b=cfg.b)
        elif name == "random":
            solvers[name] = lambda q: evaluation.random_singleton_solver(q, rng)
        elif name == "embedding":
            if not embeddings_path:
                raise DataError("the embedding solver needs --embeddings FILE")
            vectors = evaluation.load_embeddings(embeddings_path)
            solvers[name] = lambda q, _idx=idx, _v=vectors: evaluation.embedding_solver(
                q, _idx, _v, pool_size=cfg.overlap_hits, k1=cfg.k1, b=cfg.b)
        else:
            raise click.UsageError(f"unknown solver {name!r} (text_search, overlap, random, embedding)")
    return solvers


@cli.command(name="eval")
@click.argument("annotations_file", type=click.Path())
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="QANNO_CORPUS")
@click.option("--questions", "questions_path", type=click.Path(), default=None, envvar="QANNO_QUESTIONS")
@click.option("--label-kind", type=click.Choice(["knowledge", "reasoning"]), default="knowledge", show_default=True)
@click.option("--solvers", default="text_search,overlap", show_default=True,
              help="Comma-separated: text_search, overlap, random, embedding.")
@click.option("--embeddings", "embeddings_path", type=click.Path(), default=None,
              help="Plain-text word vectors for the embedding solver.")
@click.option("--seed", type=int, default=None, envvar="QANNO_SEED", help="RNG seed for the random solver.")
@click.option("--format", "fmt", type=click.Choice(["table", "records"]), default="table",
              show_default=True, envvar="QANNO_FORMAT")
def eval_command(annotations_file, config_path, corpus_path, questions_path, label_kind,
                 solvers, embeddings_path, seed, fmt):
    """Partition questions by consensus label and score solvers with 1/k credit."""
    cfg = _config(config_path, corpus=corpus_path, questions=questions_path, seed=seed)
    cfg.require_paths("corpus", "questions")
    questions = parse_questions(cfg.questions)
    idx = corpus.build_index(corpus.load_corpus(cfg.corpus), stopwords=cfg.stopwords, stemming=cfg.stemming)
    annotations = store_mod.load_annotations(Path(annotations_file))
    names = [n.strip() for n in solvers.split(",") if n.strip()]
    report = evaluation.run_evaluation(questions, annotations, label_kind, _build_solvers(names, idx, cfg, embeddings_path))
    if fmt == "records":
        for row in report.rows:
            click.echo(json.dumps({"label": row.label, "n": row.n_questions, **row.accuracies}))
        click.echo(json.dumps({"label": "overall", "n": report.n_questions, **report.overall}))
    else:
        click.echo(evaluation.render_eval_report(report))


@cli.command(name="compare-contexts")
@config_option
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="QANNO_CORPUS")
@click.option("--questions", "questions_path", type=click.Path(), default=None, envvar="QANNO_QUESTIONS")
@click.option("--relevance", "relevance_file", type=click.Path(), required=True,
              help="Relevance-mark export from the service.")
@click.option("--reader", default="oracle", show_default=True,
              help="'oracle' or a shell command speaking the line-delimited reader protocol.")
@click.option("--top-k", type=int, default=None, envvar="QANNO_TOP_K",
              help="Hits pooled per option for the baseline context.")
@click.option("--timeout", type=float, default=10.0, show_default=True, help="Per-request reader timeout.")
@click.option("--format", "fmt", type=click.Choice(["table", "records"]), default="table",
              show_default=True, envvar="QANNO_FORMAT")
def compare_contexts_command(config_path, corpus_path, questions_path, relevance_file, reader, top_k, timeout, fmt):
    """Measure answer accuracy with retrieved context vs human-marked context."""
    import shlex

    cfg = _config(config_path, corpus=corpus_path, questions=questions_path, top_k=top_k)
    cfg.require_paths("corpus", "questions")
    questions = parse_questions(cfg.questions)
    idx = corpus.build_index(corpus.load_corpus(cfg.corpus), stopwords=cfg.stopwords, stemming=cfg.stemming)
    marks = store_mod.load_relevance(Path(relevance_file))
    retrieved = evaluation.retrieved_contexts(questions, idx, top_k=cfg.top_k, k1=cfg.k1, b=cfg.b)
    relevant = evaluation.relevant_contexts(questions, marks, idx)
    if reader == "oracle":
        adapter = evaluation.OracleReader(questions)
        result = evaluation.compare_contexts(questions, adapter, retrieved, relevant)
    else:
        with evaluation.ProcessReader(shlex.split(reader), timeout=timeout) as adapter:
            result = evaluation.compare_contexts(questions, adapter, retrieved, relevant)
    if fmt == "records":
        click.echo(json.dumps(result.__dict__))
    else:
        click.echo(f"questions:            {result.n_questions}")
        click.echo(f"retrieved context:    {result.accuracy_retrieved:.1f}% (strict {result.strict_retrieved:.1f}%)")
        click.echo(f"relevant context:     {result.accuracy_relevant:.1f}% (strict {result.strict_relevant:.1f}%)")
        click.echo(f"delta (partial):      {result.delta:+.1f} points")
        if result.reader_failures:
            click.echo(f"reader failures:      {result.reader_failures}")


def main(argv=None) -> int:
    """Dispatch with the documented exit codes (0 ok, 1 usage, 2 data)."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return 1
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
