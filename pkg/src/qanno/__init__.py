"""Annotation platform and analysis toolkit for multiple-choice science QA.

The pieces compose in data order: a BM25 sentence index (:mod:`qanno.corpus`)
feeds a labeling service (:mod:`qanno.store`, :mod:`qanno.service`) whose
exports feed agreement statistics (:mod:`qanno.agreement`) and the partitioned
solver evaluation (:mod:`qanno.evaluation`).
"""

from .agreement import (
    AgreementReport,
    ConsensusResult,
    Ranking,
    condorcet_noise_sample,
    consensus_by_question,
    consensus_table,
    fleiss_kappa,
    histogram,
    kemeny,
    kemeny_minimizers,
    kendall_tau,
    partial_tau,
)
from .config import Config, load_config
from .corpus import (
    InvertedIndex,
    QuerySpec,
    ScoredHit,
    SentenceRecord,
    build_index,
    default_query,
    last_sentence,
    load_corpus,
    load_index,
    save_index,
    search,
    tokenize,
)
from .errors import DataError, InsufficientRatersError
from .evaluation import (
    ContextComparison,
    EvalReport,
    OracleReader,
    ProcessReader,
    SolverAnswer,
    compare_contexts,
    overlap_solver,
    partition_by_consensus,
    random_singleton_solver,
    retrieved_contexts,
    relevant_contexts,
    run_evaluation,
    score,
    span_to_choice,
    text_search_solver,
)
from .questions import (
    Choice,
    KnowledgeLabel,
    Question,
    ReasoningLabel,
    VocabEntry,
    label_vocabulary,
    parse_questions,
    sample_questions,
    serialize_questions,
)
from .service import create_app
from .store import (
    AnnotationRecord,
    AnnotationStore,
    QueryLogEntry,
    RelevanceMark,
    load_annotations,
    load_queries,
    load_relevance,
)

__version__ = "0.1.0"
