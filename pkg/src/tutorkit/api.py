"""REST surface over the tutoring engine.

Endpoints (JSON bodies):
  POST /api/sessions                  {"topic": str}  -> 201 session view
  GET  /api/sessions/{id}                             -> 200 session view
  POST /api/sessions/{id}/answer      {"answer": str} -> 200 turn result
  POST /api/sessions/{id}/question                    -> 200 session view (retry generation)
  GET  /api/sessions/{id}/transcript                  -> 200 transcript
  GET  /api/healthz                                   -> 200 {"status","provider"}
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .adaptivity import ExhaustedDomains
from .engine import (
    CompletionUnparseable,
    NoPendingQuestion,
    ProviderUnavailable,
    TurnConflict,
    TutorEngine,
    UnknownSession,
)
from .prompts import EmptyAnswer


class CreateSessionBody(BaseModel):
    topic: str


class AnswerBody(BaseModel):
    answer: str


def create_app(engine: TutorEngine) -> FastAPI:
    app = FastAPI(title="tutorkit", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def error(status: int, exc: Exception) -> JSONResponse:
        detail: dict = {"detail": str(exc)}
        session_id = getattr(exc, "session_id", None)
        if session_id:
            detail["session_id"] = session_id
        return JSONResponse(status_code=status, content=detail)

    @app.exception_handler(UnknownSession)
    async def _unknown(request: Request, exc: UnknownSession):
        return error(404, exc)

    @app.exception_handler(NoPendingQuestion)
    async def _no_pending(request: Request, exc: NoPendingQuestion):
        return error(409, exc)

    @app.exception_handler(TurnConflict)
    async def _conflict(request: Request, exc: TurnConflict):
        return error(409, exc)

    @app.exception_handler(EmptyAnswer)
    async def _empty(request: Request, exc: EmptyAnswer):
        return error(422, exc)

    @app.exception_handler(ValueError)
    async def _invalid(request: Request, exc: ValueError):
        return error(422, exc)

    @app.exception_handler(ProviderUnavailable)
    async def _provider(request: Request, exc: ProviderUnavailable):
        return error(502, exc)

    @app.exception_handler(CompletionUnparseable)
    async def _unparseable(request: Request, exc: CompletionUnparseable):
        return error(502, exc)

    @app.exception_handler(ExhaustedDomains)
    async def _exhausted(request: Request, exc: ExhaustedDomains):
        return error(500, exc)

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        return engine.create_session(body.topic).to_json_dict()

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return engine.get_view(session_id).to_json_dict()

    @app.post("/api/sessions/{session_id}/answer")
    def submit_answer(session_id: str, body: AnswerBody):
        return engine.submit_answer(session_id, body.answer).to_json_dict()

    @app.post("/api/sessions/{session_id}/question")
    def regenerate_question(session_id: str):
        return engine.regenerate_question(session_id).to_json_dict()

    @app.get("/api/sessions/{session_id}/transcript")
    def get_transcript(session_id: str):
        return engine.get_transcript(session_id)

    @app.get("/api/healthz")
    def healthz():
        return {"status": "ok", "provider": engine.provider_id}

    return app
