"""HTTP JSON API for the curator UI: scoring, sessions, bank browsing,
alignment, merging, and targeted over-generation.

Every endpoint is a thin adapter over the library; response bodies are the
canonical serializations of library results.  Sessions live in memory (one
curator, short-lived edits) with each state change appended to a JSONL
snapshot log; durable storage is the bank's job.
"""

import json
import threading
import uuid
from collections import deque
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from leveltext.alignment import (
    LockSpan,
    Replacement,
    SIDE_BASE,
    SIDE_CANDIDATE,
    align,
    merge,
    validate_locks,
)
from leveltext.corpus import LeveledPair
from leveltext.errors import MergeConflictError, UnknownRunError, UnscorableError
from leveltext.harness import (
    Method,
    ResponseBank,
    RunContext,
    RunSpec,
    load_run,
    run_benchmark,
    scatter_csv,
    scatter_rows,
)
from leveltext.metrics import PairEmbedder
from leveltext.providers import GenerationProvider
from leveltext.readability import ScorerModel, score
from leveltext.textproc import FrequencyTable, tokenize

UNDO_LIMIT = 100


@dataclass
class Session:
    """One curator's working copy of a pair, with bounded undo."""

    session_id: str
    pair: LeveledPair
    working_text: str
    locks: list[LockSpan] = dataclass_field(default_factory=list)
    undo: deque = dataclass_field(default_factory=lambda: deque(maxlen=UNDO_LIMIT))
    guard: threading.Lock = dataclass_field(default_factory=threading.Lock)

    def push_undo(self) -> None:
        self.undo.append((self.working_text, tuple(self.locks)))

    def pop_undo(self) -> bool:
        if not self.undo:
            return False
        self.working_text, locks = self.undo.pop()
        self.locks = list(locks)
        return True


@dataclass
class ServiceState:
    """Shared backends the endpoints adapt: scorer, corpus pairs, bank,
    providers, and the in-memory session table."""

    model: ScorerModel
    freq: FrequencyTable
    pairs: dict[str, LeveledPair]
    train_pairs: list[LeveledPair]
    bank: ResponseBank
    workspace: Path
    providers: dict[str, GenerationProvider] = dataclass_field(default_factory=dict)
    embedder: PairEmbedder | None = None
    sessions: dict[str, Session] = dataclass_field(default_factory=dict)
    _counter_lock: threading.Lock = dataclass_field(default_factory=threading.Lock)
    _generate_counter: int = 0

    def next_generate_id(self, pair_id: str) -> str:
        with self._counter_lock:
            self._generate_counter += 1
            counter = self._generate_counter
        safe = "".join(c if c.isalnum() else "-" for c in pair_id)
        return f"gen-{safe}-{counter}"

    def snapshot_session(self, session: Session) -> None:
        line = json.dumps(
            {
                "session_id": session.session_id,
                "pair_id": session.pair.pair_id,
                "working_text": session.working_text,
                "locks": [lock.to_dict() for lock in session.locks],
                "at": datetime.now(timezone.utc).isoformat(),
            },
            sort_keys=True,
        )
        with (self.workspace / "sessions.jsonl").open("a", encoding="utf-8") as handle:
            handle.write(line + "\n")


def _fail(status_code: int, code: str, message: str, **extra) -> HTTPException:
    return HTTPException(status_code=status_code, detail={"code": code, "message": message, **extra})


class ScoreRequest(BaseModel):
    text: str


class SessionCreate(BaseModel):
    pair_id: str


class AlignRequest(BaseModel):
    base: str
    candidate: str


class ReplacementModel(BaseModel):
    link_id: int
    side: str = SIDE_CANDIDATE


class MergeRequest(BaseModel):
    candidate: str
    replacements: list[ReplacementModel]
    alignment_digest: str | None = None


class LockModel(BaseModel):
    start: int
    end: int
    reason: str = ""


class LocksRequest(BaseModel):
    spans: list[LockModel]


class GenerateRequest(BaseModel):
    pair_id: str
    providers: list[str]
    method: str = "zero-shot"
    k: int = Field(default=1, ge=1)


def _session_view(state: ServiceState, session: Session) -> dict:
    try:
        report = score(session.working_text, state.model, state.freq).to_dict()
        unscorable = False
    except (UnscorableError, ValueError):
        report = None
        unscorable = True
    return {
        "session_id": session.session_id,
        "pair_id": session.pair.pair_id,
        "working_text": session.working_text,
        "report": report,
        "unscorable": unscorable,
        "locks": [lock.to_dict() for lock in session.locks],
        "undo_depth": len(session.undo),
        "source_score": session.pair.source_score,
        "target_score": session.pair.target_score,
    }


def create_app(
    state: ServiceState, ui_origin: str = "*", ui_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="leveltext service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[ui_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "malformed_body", "message": str(exc.errors()[:3])},
        )

    @app.exception_handler(HTTPException)
    async def http_error(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "error", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    def get_session(session_id: str) -> Session:
        session = state.sessions.get(session_id)
        if session is None:
            raise _fail(404, "unknown_session", f"no session {session_id!r}")
        return session

    @app.post("/score")
    def score_text(body: ScoreRequest):
        try:
            return score(body.text, state.model, state.freq).to_dict()
        except UnscorableError as exc:
            raise _fail(400, "unscorable", str(exc))

    @app.post("/sessions")
    def create_session(body: SessionCreate):
        pair = state.pairs.get(body.pair_id)
        if pair is None:
            raise _fail(404, "unknown_pair", f"no pair {body.pair_id!r}")
        session = Session(
            session_id=uuid.uuid4().hex[:12],
            pair=pair,
            working_text=pair.source_text,
        )
        state.sessions[session.session_id] = session
        state.snapshot_session(session)
        return _session_view(state, session)

    @app.get("/sessions/{session_id}")
    def read_session(session_id: str):
        return _session_view(state, get_session(session_id))

    @app.get("/bank")
    def bank_query(
        pair_id: str | None = None,
        provider: str | None = None,
        method: str | None = None,
        min_score: float | None = None,
        max_score: float | None = None,
    ):
        candidates = state.bank.query(
            pair_id=pair_id,
            provider=provider,
            method=method,
            min_score=min_score,
            max_score=max_score,
        )
        return {"candidates": [c.to_dict() for c in candidates]}

    @app.post("/align")
    def align_texts(body: AlignRequest):
        return align(tokenize(body.base), tokenize(body.candidate)).to_dict()

    @app.post("/sessions/{session_id}/merge")
    def merge_session(session_id: str, body: MergeRequest):
        session = get_session(session_id)
        with session.guard:
            map_ = align(tokenize(session.working_text), tokenize(body.candidate))
            if (
                body.alignment_digest is not None
                and body.alignment_digest != map_.similarity_matrix_digest
            ):
                raise _fail(
                    409,
                    "stale_alignment",
                    "working text changed since the alignment was computed",
                )
            replacements = []
            for rep in body.replacements:
                if rep.side not in (SIDE_BASE, SIDE_CANDIDATE):
                    raise _fail(400, "bad_side", f"unknown side {rep.side!r}")
                replacements.append(Replacement(link_id=rep.link_id, side=rep.side))
            try:
                merged = merge(
                    session.working_text, body.candidate, map_, replacements, session.locks
                )
            except MergeConflictError as exc:
                raise _fail(409, "lock_violation", str(exc), link_ids=exc.link_ids)
            except ValueError as exc:
                raise _fail(400, "bad_replacements", str(exc))
            session.push_undo()
            session.working_text = merged
            state.snapshot_session(session)
            return _session_view(state, session)

    @app.post("/sessions/{session_id}/locks")
    def set_locks(session_id: str, body: LocksRequest):
        session = get_session(session_id)
        with session.guard:
            spans = [LockSpan(s.start, s.end, s.reason) for s in body.spans]
            try:
                validate_locks(spans, len(session.working_text))
            except ValueError as exc:
                raise _fail(400, "invalid_locks", str(exc))
            session.push_undo()
            session.locks = spans
            state.snapshot_session(session)
            return {"ok": True, "locks": len(spans)}

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        with session.guard:
            if not session.pop_undo():
                raise _fail(409, "nothing_to_undo", "undo history is empty")
            state.snapshot_session(session)
            return _session_view(state, session)

    @app.post("/generate")
    def generate(body: GenerateRequest):
        pair = state.pairs.get(body.pair_id)
        if pair is None:
            raise _fail(404, "unknown_pair", f"no pair {body.pair_id!r}")
        try:
            Method.parse(body.method)
        except ValueError as exc:
            raise _fail(400, "bad_method", str(exc))
        chosen: list[GenerationProvider] = []
        for name in body.providers:
            provider = state.providers.get(name)
            if provider is None:
                raise _fail(404, "unknown_provider", f"no provider {name!r}")
            chosen.append(provider)
        if not chosen:
            raise _fail(400, "no_providers", "providers list is empty")
        spec = RunSpec(
            run_id=state.next_generate_id(body.pair_id),
            split="test",
            sample_size=1,
            methods=[body.method],
            over_generation_k=body.k,
            seed=0,
        )
        ctx = RunContext(
            pairs=[pair],
            train_pairs=state.train_pairs,
            model=state.model,
            freq=state.freq,
            embedder=state.embedder,
        )
        result = run_benchmark(
            spec, ctx, providers=chosen, workspace=state.workspace, bank=state.bank
        )
        return {
            "run_id": result.run_id,
            "new_candidates": result.new_candidates,
            "pair_id": body.pair_id,
        }

    @app.get("/runs/{run_id}/report")
    def run_report(run_id: str):
        try:
            result = load_run(state.workspace, run_id)
        except UnknownRunError as exc:
            raise _fail(404, "unknown_run", str(exc))
        return {"reports": [r.to_dict() for r in result.reports]}

    @app.get("/runs/{run_id}/scatter")
    def run_scatter(run_id: str, provider: str | None = None, method: str | None = None):
        try:
            result = load_run(state.workspace, run_id)
            rows = scatter_rows(result, provider=provider, method=method)
        except UnknownRunError as exc:
            raise _fail(404, "unknown_run", str(exc))
        return PlainTextResponse(scatter_csv(rows), media_type="text/csv")

    # Routes above win; the mount only answers paths no endpoint claimed.
    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
