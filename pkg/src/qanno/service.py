"""HTTP API over the annotation store and the sentence index.

Every JSON response carries a ``schema_version`` field. Paths:

    GET  /api/health
    GET  /api/next?annotator=
    POST /api/annotations
    POST /api/skip
    GET  /api/search?q=&k=            (+question_id & annotator to auto-log)
    POST /api/relevance
    GET  /api/relevance/{question_id}?annotator=
    GET  /api/context/{question_id}
    GET  /api/questions/{id}
    GET  /api/vocab/{kind}
    GET  /api/export/{kind}
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import corpus as corpus_mod
from .config import Config
from .errors import DataError
from .questions import (
    LABEL_KINDS,
    QUALITY_LEVELS,
    label_vocabulary,
    question_to_record,
    vocab_preamble,
)
from .store import AnnotationRecord, AnnotationStore, QueryLogEntry, RelevanceMark

SCHEMA_VERSION = 1


class AnnotationIn(BaseModel):
    question_id: str
    annotator_id: str
    knowledge_labels: list[str]
    reasoning_labels: list[str]
    selected_answer: Optional[str] = None
    quality: Optional[str] = None
    notes: Optional[str] = None


class SkipIn(BaseModel):
    annotator_id: str
    question_id: str


class RelevanceIn(BaseModel):
    annotator_id: str
    question_id: str
    sentence_id: int
    relevant: bool


def _payload(**body) -> dict:
    return {"schema_version": SCHEMA_VERSION, **body}


def create_app(
    store: AnnotationStore,
    index: corpus_mod.InvertedIndex,
    config: Optional[Config] = None,
) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="qanno annotation service")

    @app.exception_handler(DataError)
    async def data_error_handler(request: Request, exc: DataError):
        status = 404 if str(exc).startswith("unknown question") else 400
        return JSONResponse(status_code=status, content=_payload(detail=str(exc)))

    @app.get("/api/health")
    def health():
        return _payload(status="ok", questions=len(store.questions), sentences=index.doc_count)

    @app.get("/api/next")
    def next_question(annotator: str = Query(min_length=1)):
        question = store.next_question(annotator)
        if question is None:
            return _payload(done=True, question=None)
        return _payload(done=False, question=question_to_record(question))

    @app.post("/api/annotations")
    def submit_annotation(body: AnnotationIn):
        record = AnnotationRecord(
            question_id=body.question_id,
            annotator_id=body.annotator_id,
            knowledge_labels=tuple(body.knowledge_labels),
            reasoning_labels=tuple(body.reasoning_labels),
            selected_answer=body.selected_answer,
            quality=body.quality,
            notes=body.notes,
        )
        stored = store.submit_annotation(record)
        return _payload(status="ok", timestamp=stored.timestamp)

    @app.post("/api/skip")
    def skip(body: SkipIn):
        store.skip(body.annotator_id, body.question_id)
        return _payload(status="ok")

    @app.get("/api/search")
    def search(
        q: str,
        k: Optional[int] = Query(default=None, ge=1),
        question_id: Optional[str] = None,
        annotator: Optional[str] = None,
    ):
        try:
            spec = corpus_mod.QuerySpec(text=q, top_k=k or config.top_k)
            hits = corpus_mod.search(index, spec, k1=config.k1, b=config.b)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if question_id is not None:
            if not annotator:
                raise HTTPException(status_code=400, detail="annotator is required when question_id is supplied")
            store.log_query(
                QueryLogEntry(
                    annotator_id=annotator,
                    question_id=question_id,
                    query_text=q,
                    result_sentence_ids=tuple(h.sentence_id for h in hits),
                )
            )
        return _payload(
            query=q,
            hits=[{"sentence_id": h.sentence_id, "score": h.score, "text": h.text} for h in hits],
        )

    @app.post("/api/relevance")
    def mark_relevance(body: RelevanceIn):
        store.mark_relevance(
            RelevanceMark(
                annotator_id=body.annotator_id,
                question_id=body.question_id,
                sentence_id=body.sentence_id,
                relevant=body.relevant,
            )
        )
        return _payload(status="ok")

    @app.get("/api/relevance/{question_id}")
    def relevance_state(question_id: str, annotator: str = Query(min_length=1)):
        store.question(question_id)
        marks = store.relevance_for(question_id, annotator)
        return _payload(
            question_id=question_id,
            marks=[
                {
                    "sentence_id": m.sentence_id,
                    "relevant": m.relevant,
                    "text": index.texts.get(m.sentence_id, ""),
                }
                for m in marks
            ],
        )

    @app.get("/api/context/{question_id}")
    def relevant_context(question_id: str):
        ids = store.relevant_context(question_id)
        return _payload(
            question_id=question_id,
            sentences=[{"sentence_id": sid, "text": index.texts.get(sid, "")} for sid in ids],
        )

    @app.get("/api/questions/{question_id}")
    def get_question(question_id: str):
        return _payload(question=question_to_record(store.question(question_id)))

    @app.get("/api/vocab/{kind}")
    def vocab(kind: str):
        if kind not in LABEL_KINDS:
            raise HTTPException(status_code=404, detail=f"unknown vocabulary kind {kind!r}")
        entries = label_vocabulary(kind)
        return _payload(
            kind=kind,
            preamble=vocab_preamble(kind),
            quality_levels=list(QUALITY_LEVELS),
            labels=[
                {
                    "label": e.label,
                    "title": e.title,
                    "instructions": e.instructions,
                    "example_question_id": e.example_question_id,
                }
                for e in entries
            ],
        )

    @app.get("/api/export/{kind}")
    def export(kind: str):
        try:
            body = store.export(kind)
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return PlainTextResponse(body, headers={"X-Schema-Version": str(SCHEMA_VERSION)})

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app
