"""One client surface over the engine, embedded or remote.

Both clients speak in the exact JSON dict shapes the REST API serves, so a
caller (the CLI, tests) cannot tell where the engine runs. The remote
client maps HTTP error statuses back onto the engine's exception types.
"""

from __future__ import annotations

from typing import Protocol

import httpx

from .engine import (
    NoPendingQuestion,
    ProviderUnavailable,
    TurnConflict,
    TutorEngine,
    UnknownSession,
)
from .prompts import EmptyAnswer


class TutorClient(Protocol):
    def create_session(self, topic: str) -> dict: ...

    def get_session(self, session_id: str) -> dict: ...

    def submit_answer(self, session_id: str, answer: str) -> dict: ...

    def get_transcript(self, session_id: str) -> dict: ...

    def health(self) -> dict: ...


class EmbeddedClient:
    """Runs the engine in-process; no HTTP hop."""

    def __init__(self, engine: TutorEngine):
        self._engine = engine

    def create_session(self, topic: str) -> dict:
        return self._engine.create_session(topic).to_json_dict()

    def get_session(self, session_id: str) -> dict:
        return self._engine.get_view(session_id).to_json_dict()

    def submit_answer(self, session_id: str, answer: str) -> dict:
        return self._engine.submit_answer(session_id, answer).to_json_dict()

    def get_transcript(self, session_id: str) -> dict:
        return self._engine.get_transcript(session_id)

    def health(self) -> dict:
        return {"status": "ok", "provider": self._engine.provider_id}


class RemoteClient:
    """Talks to a running service over its REST API."""

    def __init__(self, base_url: str, client: httpx.Client | None = None):
        self._base = base_url.rstrip("/")
        self._client = client or httpx.Client(timeout=60.0)

    def _check(self, response: httpx.Response) -> dict:
        if response.status_code < 400:
            return response.json()
        detail = response.text[:300]
        try:
            detail = response.json().get("detail", detail)
        except ValueError:
            pass
        if response.status_code == 404:
            raise UnknownSession(str(detail))
        if response.status_code == 409:
            message = str(detail)
            if "no pending question" in message or "mastered" in message:
                raise NoPendingQuestion(message)
            raise TurnConflict(message)
        if response.status_code == 422:
            if "answer" in str(detail):
                raise EmptyAnswer()
            raise ValueError(str(detail))
        raise ProviderUnavailable(f"server error {response.status_code}: {detail}")

    def create_session(self, topic: str) -> dict:
        return self._check(self._client.post(f"{self._base}/api/sessions", json={"topic": topic}))

    def get_session(self, session_id: str) -> dict:
        return self._check(self._client.get(f"{self._base}/api/sessions/{session_id}"))

    def submit_answer(self, session_id: str, answer: str) -> dict:
        return self._check(
            self._client.post(f"{self._base}/api/sessions/{session_id}/answer", json={"answer": answer})
        )

    def get_transcript(self, session_id: str) -> dict:
        return self._check(self._client.get(f"{self._base}/api/sessions/{session_id}/transcript"))

    def health(self) -> dict:
        return self._check(self._client.get(f"{self._base}/api/healthz"))
