"""Session-scoped HTTP API serving the explorer UI and programmatic clients."""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .conversation import Conversation, advance_turn
from .pipeline import Pipeline


@dataclass
class Session:
    session_id: str
    conversation: Conversation
    created_at: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)


class TurnRequest(BaseModel):
    query: str
    overrides: dict | None = None


class RescoreRequest(BaseModel):
    gamma: float | None = None
    method: str | None = None
    min_length: int | None = None
    include_query: bool | None = None


def create_app(pipeline: Pipeline) -> FastAPI:
    app = FastAPI(title="convsearch")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown session {session_id}")
        return session

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "passages": pipeline.index.passage_count}

    @app.post("/sessions", status_code=201)
    def create_session():
        session_id = uuid.uuid4().hex
        with registry_lock:
            sessions[session_id] = Session(
                session_id=session_id,
                conversation=Conversation(topic_id=session_id))
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, request: TurnRequest):
        session = get_session(session_id)
        if not request.query.strip():
            raise HTTPException(status_code=422, detail="empty query")
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409,
                                detail="a turn is already in flight")
        try:
            result = pipeline.run_turn(session.conversation, request.query,
                                       request.overrides)
            advance_turn(session.conversation, result.turn)
        finally:
            session.lock.release()
        return {
            "turn": result.turn.index,
            "prompt": result.turn.prompt,
            "rewritten_query": result.turn.rewritten_query,
            "ranked": [pid for pid, _ in result.turn.reranked],
            "passages": result.passages,
            "selected": result.turn.selected_passages,
            "graph": result.graph_doc,
            "answer": result.turn.answer,
            "answer_words": len(result.turn.answer.split()),
            "timings": result.timings,
        }

    @app.get("/sessions/{session_id}")
    def get_transcript(session_id: str):
        session = get_session(session_id)
        return {
            "session_id": session_id,
            "created_at": session.created_at,
            "turns": [{
                "turn": t.index,
                "query": t.raw_query,
                "prompt": t.prompt,
                "rewritten_query": t.rewritten_query,
                "ranked": [pid for pid, _ in t.reranked],
                "selected": t.selected_passages,
                "answer": t.answer,
            } for t in session.conversation.turns],
        }

    @app.post("/sessions/{session_id}/turns/{turn_number}/rescore")
    def rescore(session_id: str, turn_number: int, request: RescoreRequest):
        session = get_session(session_id)
        overrides = {k: v for k, v in request.model_dump().items()
                     if v is not None}
        try:
            return pipeline.rescore_turn(session.conversation, turn_number,
                                         overrides)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"no turn {turn_number}") from None

    return app
