"""Event (de)serialization and the append-only per-session JSONL log.

Each session's events live in ``<data_dir>/<session_id>.log``, one JSON
object per line, written only in whole-turn batches so a log never holds a
partial turn.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .model import (
    Evaluation,
    EventKind,
    Option,
    Phase,
    Question,
    QuestionKind,
    SessionEvent,
)

SESSION_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")


def canonical_json(value) -> str:
    """Stable byte-for-byte JSON: sorted keys, no whitespace."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def question_to_dict(question: Question, redacted: bool) -> dict:
    """Question as a JSON dict; redacted drops the answer key entirely.

    Redacted dicts never carry the ``correct_label`` or ``reference_answer``
    keys, so a pending question's answer cannot leak through any response.
    """
    data = {
        "id": question.id,
        "kind": question.kind.value,
        "stem": question.stem,
        "difficulty": question.difficulty,
        "options": (
            [{"label": o.label, "text": o.text} for o in question.options]
            if question.options is not None
            else None
        ),
        "transfer_domain": question.transfer_domain,
    }
    if not redacted:
        data["correct_label"] = question.correct_label
        data["reference_answer"] = question.reference_answer
    return data


def question_from_dict(data: dict) -> Question:
    options = data.get("options")
    return Question(
        id=data["id"],
        kind=QuestionKind(data["kind"]),
        stem=data["stem"],
        difficulty=data["difficulty"],
        options=tuple(Option(o["label"], o["text"]) for o in options) if options is not None else None,
        correct_label=data.get("correct_label"),
        reference_answer=data.get("reference_answer"),
        transfer_domain=data.get("transfer_domain"),
    )


def evaluation_to_dict(evaluation: Evaluation) -> dict:
    return {"score": evaluation.score, "feedback": evaluation.feedback, "hint": evaluation.hint}


def evaluation_from_dict(data: dict) -> Evaluation:
    return Evaluation(score=data["score"], feedback=data["feedback"], hint=data.get("hint"))


def event_to_dict(event: SessionEvent) -> dict:
    data: dict = {"kind": event.kind.value, "timestamp": event.timestamp}
    if event.kind is EventKind.SESSION_CREATED:
        data["session_id"] = event.session_id
        data["topic"] = event.topic
    elif event.kind is EventKind.QUESTION_POSED:
        data["question"] = question_to_dict(event.question, redacted=False)
    elif event.kind is EventKind.ANSWER_SUBMITTED:
        data["answer"] = event.answer
    elif event.kind is EventKind.EVALUATED:
        data["evaluation"] = evaluation_to_dict(event.evaluation)
    elif event.kind is EventKind.PHASE_CHANGED:
        data["phase"] = event.phase.value
    elif event.kind is EventKind.DIFFICULTY_CHANGED:
        data["difficulty"] = event.difficulty
    return data


def event_from_dict(data: dict) -> SessionEvent:
    kind = EventKind(data["kind"])
    timestamp = data["timestamp"]
    if kind is EventKind.SESSION_CREATED:
        return SessionEvent.session_created(data["session_id"], data["topic"], timestamp)
    if kind is EventKind.QUESTION_POSED:
        return SessionEvent.question_posed(question_from_dict(data["question"]), timestamp)
    if kind is EventKind.ANSWER_SUBMITTED:
        return SessionEvent.answer_submitted(data["answer"], timestamp)
    if kind is EventKind.EVALUATED:
        return SessionEvent.evaluated(evaluation_from_dict(data["evaluation"]), timestamp)
    if kind is EventKind.PHASE_CHANGED:
        return SessionEvent.phase_changed(Phase(data["phase"]), timestamp)
    if kind is EventKind.DIFFICULTY_CHANGED:
        return SessionEvent.difficulty_changed(data["difficulty"], timestamp)
    raise ValueError(f"unknown event kind {data['kind']!r}")


class EventStore:
    """Per-session append-only event logs under one data directory."""

    def __init__(self, data_dir: Path | str):
        self._dir = Path(data_dir)
        self._dir.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str) -> Path:
        if not SESSION_ID_RE.match(session_id):
            raise ValueError(f"invalid session id {session_id!r}")
        return self._dir / f"{session_id}.log"

    def append(self, session_id: str, events: list[SessionEvent]) -> None:
        """Append a batch of events as one write."""
        if not events:
            return
        lines = "".join(canonical_json(event_to_dict(e)) + "\n" for e in events)
        with open(self._path(session_id), "a", encoding="utf-8") as handle:
            handle.write(lines)
            handle.flush()

    def load(self, session_id: str) -> list[SessionEvent]:
        path = self._path(session_id)
        if not path.exists():
            return []
        events = []
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    events.append(event_from_dict(json.loads(line)))
        return events

    def session_ids(self) -> list[str]:
        return sorted(path.stem for path in self._dir.glob("*.log"))
