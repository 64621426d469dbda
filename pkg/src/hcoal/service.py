"""HTTP review service: serve the ranked queue, journal corrections, export.

All mutable state lives in an append-only JSONL journal (one correction
record per line, flushed and fsynced before the submission is
acknowledged), so a restarted server replays the journal and continues
exactly where it left off. The source corpus file is never touched.

API (JSON bodies, UTF-8):
    GET  /api/queue                -> [{example_id, score, status}]
    GET  /api/examples/{id}        -> {tokens, current_tags, status}
    POST /api/examples/{id}/labels -> {revision}
    GET  /api/progress             -> {reviewed, pending}
    POST /api/export               -> {path, reviewed, pending}
    GET  /api/schema               -> {entity_types}
Errors: {"error": {"code", "message"}} with 4xx/5xx status.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .corpus import BioTag, Corpus, Example, LabelSource, write_corpus
from .ranking import RankedList, select_budget


class NotFoundError(LookupError):
    pass


class SubmissionError(ValueError):
    pass


@dataclass(frozen=True)
class CorrectionRecord:
    """One journaled correction: a full replacement tag sequence."""

    example_id: int
    tags: tuple[str, ...]
    annotator: str
    submitted_at: str

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "tags": list(self.tags),
            "annotator": self.annotator,
            "submitted_at": self.submitted_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> CorrectionRecord:
        return cls(example_id=int(data["example_id"]),
                   tags=tuple(data["tags"]),
                   annotator=data["annotator"],
                   submitted_at=data["submitted_at"])


class ReviewSession:
    """Queue, journal and export state for one review run.

    The queue is the budgeted prefix of a ranked list, in rank order. The
    latest record per example wins; an example is REVIEWED iff it has at
    least one record. Submissions are serialized through a lock and
    acknowledged only after the journal line reaches disk.
    """

    def __init__(self, corpus: Corpus, ranked: RankedList, budget_fraction: float,
                 journal_path: str | Path, export_path: str | Path | None = None):
        self.corpus = corpus
        selection = select_budget(ranked, budget_fraction)
        scores = dict(ranked.entries)
        self.queue_ids: tuple[int, ...] = selection.ids
        self.queue_scores: dict[int, float] = {i: scores[i] for i in selection.ids}
        self.journal_path = Path(journal_path)
        self.export_path = Path(export_path) if export_path else \
            self.journal_path.with_name("mixed.conll")
        self.records: dict[int, CorrectionRecord] = {}
        self.revision = 0
        self._lock = threading.Lock()
        if self.journal_path.exists():
            self._replay()

    def _replay(self) -> None:
        for lineno, line in enumerate(
                self.journal_path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = CorrectionRecord.from_dict(json.loads(line))
                self._validate(record.example_id, record.tags)
            except (ValueError, KeyError, LookupError) as err:
                raise SubmissionError(
                    f"{self.journal_path}:{lineno}: bad journal record: {err}") from err
            self.records[record.example_id] = record
            self.revision += 1

    def _validate(self, example_id: int, tags: tuple[str, ...]) -> list[BioTag]:
        """Reject anything the repair policy would have to fix."""
        if example_id not in self.queue_scores:
            raise NotFoundError(f"example {example_id} is not in the review queue")
        example = self.corpus.example(example_id)
        if len(tags) != len(example):
            raise SubmissionError(
                f"expected {len(example)} tags, got {len(tags)}")
        parsed: list[BioTag] = []
        for i, text in enumerate(tags):
            try:
                tag = BioTag.parse(text)
            except ValueError as err:
                raise SubmissionError(f"tag {i}: {err}") from None
            if tag.is_entity and tag.entity_type not in self.corpus.entity_types:
                raise SubmissionError(
                    f"tag {i}: unknown entity type {tag.entity_type!r}")
            if tag.position == "I":
                prev = parsed[i - 1] if i else None
                if prev is None or not prev.is_entity or \
                        prev.entity_type != tag.entity_type:
                    raise SubmissionError(
                        f"tag {i}: I-{tag.entity_type} does not continue a span")
            parsed.append(tag)
        return parsed

    def status(self, example_id: int) -> str:
        return "REVIEWED" if example_id in self.records else "PENDING"

    def queue(self) -> list[dict]:
        return [{"example_id": i, "score": self.queue_scores[i],
                 "status": self.status(i)} for i in self.queue_ids]

    def example(self, example_id: int) -> dict:
        if example_id not in self.queue_scores:
            raise NotFoundError(f"example {example_id} is not in the review queue")
        ex = self.corpus.example(example_id)
        record = self.records.get(example_id)
        current = list(record.tags) if record else [str(t.ai_label) for t in ex.tokens]
        return {
            "tokens": [{"text": t.text, "ai_tag": str(t.ai_label),
                        "confidence": t.confidence} for t in ex.tokens],
            "current_tags": current,
            "status": self.status(example_id),
        }

    def submit(self, example_id: int, tags: list[str], annotator: str) -> int:
        with self._lock:
            self._validate(example_id, tuple(tags))
            record = CorrectionRecord(
                example_id=example_id, tags=tuple(tags), annotator=annotator,
                submitted_at=datetime.now(timezone.utc).isoformat())
            with open(self.journal_path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(record.to_dict()) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            self.records[example_id] = record
            self.revision += 1
            return self.revision

    def progress(self) -> dict:
        reviewed = sum(1 for i in self.queue_ids if i in self.records)
        return {"reviewed": reviewed, "pending": len(self.queue_ids) - reviewed}

    def corrected_corpus(self) -> Corpus:
        """The source corpus with the latest corrections applied.

        Corrected tokens get confidence 1.0, matching oracle correction, so
        a reviewer who enters the gold tags produces the oracle's output.
        """
        examples = []
        for ex in self.corpus.examples:
            record = self.records.get(ex.id)
            if record is None:
                examples.append(ex)
                continue
            tokens = tuple(
                replace(tok, ai_label=BioTag.parse(tag), confidence=1.0)
                for tok, tag in zip(ex.tokens, record.tags))
            examples.append(Example(id=ex.id, tokens=tokens))
        return Corpus(examples=tuple(examples),
                      entity_types=self.corpus.entity_types,
                      has_gold=self.corpus.has_gold)

    def export(self) -> dict:
        """Write the mixed-label corpus file; partial review is fine."""
        mode = LabelSource.GOLD if self.corpus.has_gold else LabelSource.AI
        text = write_corpus(self.corrected_corpus(), mode)
        self.export_path.parent.mkdir(parents=True, exist_ok=True)
        self.export_path.write_text(text, encoding="utf-8")
        return {"path": str(self.export_path), **self.progress()}


class SubmitBody(BaseModel):
    tags: list[str]
    annotator: str = ""


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": code, "message": message}})


def create_app(session: ReviewSession) -> FastAPI:
    app = FastAPI(title="label review service")

    @app.exception_handler(NotFoundError)
    async def on_not_found(_req: Request, exc: NotFoundError):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(SubmissionError)
    async def on_submission(_req: Request, exc: SubmissionError):
        return _error(400, "validation", str(exc))

    @app.exception_handler(RequestValidationError)
    async def on_request_validation(_req: Request, exc: RequestValidationError):
        return _error(400, "validation", str(exc))

    @app.exception_handler(OSError)
    async def on_io(_req: Request, exc: OSError):
        return _error(500, "io_error", str(exc))

    @app.get("/api/queue")
    def get_queue():
        return session.queue()

    @app.get("/api/examples/{example_id}")
    def get_example(example_id: int):
        return session.example(example_id)

    @app.post("/api/examples/{example_id}/labels")
    def post_labels(example_id: int, body: SubmitBody):
        revision = session.submit(example_id, body.tags, body.annotator)
        return {"revision": revision}

    @app.get("/api/progress")
    def get_progress():
        return session.progress()

    @app.post("/api/export")
    def post_export():
        return session.export()

    @app.get("/api/schema")
    def get_schema():
        return {"entity_types": sorted(session.corpus.entity_types)}

    return app


def serve(session: ReviewSession, port: int, ui_dir: str | Path | None = None) -> None:
    """Run the service under uvicorn, optionally serving a static UI at /."""
    import uvicorn

    app = create_app(session)
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
