"""Shared test machinery: a policy-level session driver used as the
simulation oracle, seeded random value generators for parser round-trips,
and a local stub completions server."""

from __future__ import annotations

import itertools
import json
import random
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from tutorkit.adaptivity import (
    DEFAULT_POLICY,
    AdaptivityPolicy,
    TurnOutcome,
    select_next_action,
    update_after_turn,
)
from tutorkit.model import (
    ActionKind,
    Evaluation,
    Option,
    Phase,
    Question,
    QuestionKind,
    SessionEvent,
    SessionState,
    TutorAction,
    apply_event,
)
from tutorkit.parsing import McqBlock, McqQuestion, QaPair

MCQ_LABELS = ("A", "B", "C", "D")


def make_mcq(qid: str = "q1", difficulty: int = 1, stem: str = "Which is it?") -> Question:
    return Question(
        id=qid,
        kind=QuestionKind.MULTIPLE_CHOICE,
        stem=stem,
        difficulty=difficulty,
        options=tuple(Option(label, f"choice {label}") for label in MCQ_LABELS),
        correct_label="B",
    )


def make_short_answer(qid: str = "q1", difficulty: int = 3, stem: str = "Explain it.") -> Question:
    return Question(
        id=qid,
        kind=QuestionKind.SHORT_ANSWER,
        stem=stem,
        difficulty=difficulty,
        reference_answer="a reference answer",
    )


def make_transfer(qid: str = "q1", difficulty: int = 5, domain: str = "art") -> Question:
    return Question(
        id=qid,
        kind=QuestionKind.TRANSFER,
        stem=f"Relate the topic to {domain}.",
        difficulty=difficulty,
        reference_answer="a reference answer",
        transfer_domain=domain,
    )


def question_for_action(action: TutorAction, difficulty: int, qid: str) -> Question:
    if action.kind is ActionKind.ASK_TRANSFER:
        return make_transfer(qid, difficulty, action.transfer_domain)
    if action.question_kind is QuestionKind.MULTIPLE_CHOICE:
        return make_mcq(qid, action.difficulty)
    return make_short_answer(qid, action.difficulty)


@dataclass
class DrivenSession:
    """Trace of a simulated session: its event log and per-turn snapshots."""

    events: list[SessionEvent]
    state: SessionState
    turn_trace: list[dict] = field(default_factory=list)


def drive_session(
    scores: list[int],
    policy: AdaptivityPolicy = DEFAULT_POLICY,
    topic: str = "photosynthesis",
) -> DrivenSession:
    """Simulate the tutoring loop with canned questions and given scores.

    Restates the service's turn protocol at the policy level: fold answer
    and evaluation, apply the controller, record difficulty/phase diffs as
    events, then pose whatever the selected action asks for. Stops early on
    mastery; later scores are ignored.
    """
    rules = policy.score_rules
    ts = itertools.count(0)
    ids = (f"q{i}" for i in itertools.count(1))
    events = [SessionEvent.session_created("sim", topic, float(next(ts)))]
    state = apply_event(None, events[0], rules)
    trace: list[dict] = []

    def fold(event: SessionEvent) -> None:
        nonlocal state
        state = apply_event(state, event, rules)
        events.append(event)

    action = select_next_action(state, policy)
    fold(SessionEvent.question_posed(question_for_action(action, state.difficulty, next(ids)), float(next(ts))))

    for score in scores:
        question = state.pending_question
        assert question is not None
        fold(SessionEvent.answer_submitted("an answer", float(next(ts))))
        fold(SessionEvent.evaluated(Evaluation(score, "feedback"), float(next(ts))))
        outcome = TurnOutcome(
            score=score,
            was_transfer=question.kind is QuestionKind.TRANSFER,
            transfer_domain=question.transfer_domain,
        )
        successor = update_after_turn(state, outcome, policy)
        if successor.difficulty != state.difficulty:
            fold(SessionEvent.difficulty_changed(successor.difficulty, float(next(ts))))
        if successor.phase != state.phase:
            fold(SessionEvent.phase_changed(successor.phase, float(next(ts))))
        assert state == successor, "event folding drifted from the controller's successor"

        action = select_next_action(state, policy)
        trace.append(
            {
                "question_kind": question.kind,
                "transfer_domain": question.transfer_domain,
                "score": score,
                "difficulty_after": state.difficulty,
                "phase_after": state.phase,
                "action": action,
            }
        )
        if action.kind is ActionKind.DECLARE_MASTERY:
            if state.phase is not Phase.MASTERED:
                fold(SessionEvent.phase_changed(Phase.MASTERED, float(next(ts))))
            break
        if action.kind is ActionKind.ASK_TRANSFER and state.phase is Phase.PRACTICING:
            fold(SessionEvent.phase_changed(Phase.TRANSFERRING, float(next(ts))))
        fold(SessionEvent.question_posed(question_for_action(action, state.difficulty, next(ids)), float(next(ts))))

    return DrivenSession(events=events, state=state, turn_trace=trace)


# --- canned completion texts for scripted providers -------------------------


def mcq_completion(stem: str = "Which choice fits best?", correct: str = "D") -> str:
    lines = [f"Q1: {stem}"]
    for label in MCQ_LABELS:
        marker = "*" if label == correct else ""
        lines.append(f"{label}) choice {label}{marker}")
    return "\n".join(lines)


def sa_completion(stem: str = "Explain the main idea.", answer: str = "The reference explanation.") -> str:
    return f"Q1: {stem}\nA1: {answer}"


def eval_completion(score: int, feedback: str = "Scripted feedback sentence.", hint: str | None = None) -> str:
    text = f"Score: {score}/10\nFeedback: {feedback}"
    if hint:
        text += f"\nHint: {hint}"
    return text


# --- seeded random values for parser round-trips ---------------------------

_WORDS = (
    "light", "energy", "plant", "cycle", "carbon", "water", "leaf", "cell",
    "sugar", "oxygen", "paint", "color", "history", "sound", "bridge", "motor",
)


def _phrase(rng: random.Random, low: int = 2, high: int = 8) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(rng.randint(low, high)))


def random_mcq_block(rng: random.Random) -> McqBlock:
    questions = []
    for index in range(1, rng.randint(1, 4) + 1):
        correct = rng.choice(MCQ_LABELS)
        options = tuple(Option(label, _phrase(rng, 1, 4)) for label in MCQ_LABELS)
        questions.append(
            McqQuestion(
                index=index,
                stem=_phrase(rng).capitalize() + "?",
                options=options,
                correct_label=correct,
            )
        )
    return McqBlock(questions=tuple(questions))


def random_evaluation(rng: random.Random) -> Evaluation:
    feedback_lines = [_phrase(rng).capitalize() + "." for _ in range(rng.randint(1, 3))]
    hint = (_phrase(rng).capitalize() + ".") if rng.random() < 0.5 else None
    return Evaluation(score=rng.randint(0, 10), feedback=" ".join(feedback_lines), hint=hint)


def random_qa_pairs(rng: random.Random) -> tuple[QaPair, ...]:
    pairs = []
    for index in range(1, rng.randint(1, 4) + 1):
        answer_lines = [_phrase(rng).capitalize() + "." for _ in range(rng.randint(1, 3))]
        pairs.append(
            QaPair(
                index=index,
                question_text=_phrase(rng).capitalize() + "?",
                answer_text="\n".join(answer_lines),
            )
        )
    return tuple(pairs)


# --- local stub completions server ------------------------------------------


class StubCompletionsServer:
    """Minimal /v1/completions endpoint driven by a plan of responses.

    Plan entries: an int status (error response), or a tuple
    ``(200, "completion text")``. An exhausted plan keeps serving the last
    entry. Every request's path, headers, and JSON body are recorded.
    """

    def __init__(self, plan: list):
        self.plan = list(plan)
        self.requests: list[dict] = []
        self._lock = threading.Lock()
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                body = json.loads(self.rfile.read(length) or b"{}")
                with outer._lock:
                    outer.requests.append(
                        {
                            "path": self.path,
                            "authorization": self.headers.get("Authorization"),
                            "body": body,
                        }
                    )
                    entry = outer.plan.pop(0) if len(outer.plan) > 1 else outer.plan[0]
                if isinstance(entry, tuple) and entry[0] == 200:
                    payload = json.dumps({"choices": [{"text": entry[1]}]}).encode()
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(payload)))
                    self.end_headers()
                    self.wfile.write(payload)
                else:
                    status = entry if isinstance(entry, int) else entry[0]
                    payload = json.dumps({"error": f"stubbed {status}"}).encode()
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(payload)))
                    self.end_headers()
                    self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self) -> "StubCompletionsServer":
        self._thread.start()
        return self

    def __exit__(self, *exc_info):
        self._server.shutdown()
        self._server.server_close()
