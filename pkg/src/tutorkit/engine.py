"""Session orchestration: prompt, complete, parse, evaluate, adapt, persist.

Each turn is atomic: its events are staged in memory and appended to the
session log in one batch only after every step succeeded, so a failed turn
leaves both the log and the live state untouched. Per-session mutations are
serialized; a second concurrent answer for the same session is rejected
with :class:`TurnConflict` instead of waiting.
"""

from __future__ import annotations

import tempfile
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .adaptivity import (
    DEFAULT_POLICY,
    AdaptivityPolicy,
    TurnOutcome,
    select_next_action,
    update_after_turn,
)
from .gateway import (
    EVALUATION_TEMPERATURE,
    GENERATION_TEMPERATURE,
    CompletionProvider,
    CompletionRequest,
    ProviderError,
)
from .model import (
    ActionKind,
    Evaluation,
    MCQ_LABELS,
    Phase,
    Question,
    QuestionKind,
    SessionEvent,
    SessionState,
    Topic,
    TutorAction,
    apply_event,
    replay,
)
from .parsing import (
    BlockKind,
    ParseError,
    ParseFailure,
    parse_evaluation_block,
    parse_mcq_block,
    parse_short_qa_block,
)
from .prompts import (
    EVALUATION_FORMAT_CONTRACT,
    EmptyAnswer,
    MCQ_FORMAT_CONTRACT,
    PromptText,
    QA_FORMAT_CONTRACT,
    TemplateKind,
    TemplateLibrary,
    build_evaluation_prompt,
    build_question_prompt,
    build_transfer_prompt,
    default_library,
)
from .storage import EventStore, evaluation_to_dict, question_to_dict

REPAIR_BUDGET = 2
MCQ_CORRECT_SCORE = 10
MCQ_INCORRECT_SCORE = 0


class EngineError(Exception):
    pass


class UnknownSession(EngineError):
    def __init__(self, session_id: str):
        super().__init__(f"unknown session {session_id!r}")
        self.session_id = session_id


class NoPendingQuestion(EngineError):
    pass


class TurnConflict(EngineError):
    pass


class ProviderUnavailable(EngineError):
    def __init__(self, message: str, session_id: str | None = None):
        super().__init__(message)
        self.session_id = session_id


class CompletionUnparseable(EngineError):
    """A completion still failed to parse after the repair budget."""

    def __init__(self, message: str, failure: ParseFailure, session_id: str | None = None):
        super().__init__(message)
        self.failure = failure
        self.session_id = session_id


class GenerationUnparseable(CompletionUnparseable):
    pass


class EvaluationUnparseable(CompletionUnparseable):
    pass


class RepairBudgetExhausted(EngineError):
    pass


@dataclass(frozen=True)
class RepairAttempt:
    """One corrective round-trip after an unparseable completion."""

    original_completion: str
    failure: ParseFailure
    repair_prompt: PromptText
    attempt_index: int


_REPAIR_CONTRACTS = {
    BlockKind.MCQ: MCQ_FORMAT_CONTRACT,
    BlockKind.SHORT_QA: QA_FORMAT_CONTRACT,
    BlockKind.EVALUATION: EVALUATION_FORMAT_CONTRACT,
}

_REPAIR_PROMPT_KINDS = {
    BlockKind.MCQ: TemplateKind.QUESTION_GEN,
    BlockKind.SHORT_QA: TemplateKind.QUESTION_GEN,
    BlockKind.EVALUATION: TemplateKind.EVALUATION,
}


def repair_completion(
    failure: ParseFailure,
    original: str,
    expected_kind: BlockKind,
    attempt_index: int,
    budget: int = REPAIR_BUDGET,
) -> PromptText:
    """Corrective prompt: the bad completion, what failed, and the format contract."""
    if attempt_index > budget:
        raise RepairBudgetExhausted(f"repair attempt {attempt_index} exceeds budget of {budget}")
    contract = _REPAIR_CONTRACTS[expected_kind]
    text = (
        "Your previous response could not be parsed.\n"
        "Previous response:\n"
        f"{original}\n"
        f"Problem: {failure.describe()}\n"
        f"{contract}\n"
        "Respond again following the required format exactly."
    )
    return PromptText.of(text, _REPAIR_PROMPT_KINDS[expected_kind])


@dataclass(frozen=True)
class SessionView:
    """Student-facing session snapshot; the pending question is redacted."""

    session_id: str
    topic: str
    difficulty: int
    phase: Phase
    turn_count: int
    pending_question: Question | None

    def to_json_dict(self) -> dict:
        pending = self.pending_question
        return {
            "session_id": self.session_id,
            "topic": self.topic,
            "difficulty": self.difficulty,
            "phase": self.phase.value,
            "turn_count": self.turn_count,
            "pending_question": question_to_dict(pending, redacted=True) if pending else None,
        }


@dataclass(frozen=True)
class TurnResult:
    """Feedback for the answered question plus the next question, if any."""

    evaluation: Evaluation
    next_question: Question | None
    difficulty_after: int
    phase_after: Phase

    def __post_init__(self):
        if (self.next_question is None) != (self.phase_after is Phase.MASTERED):
            raise ValueError("a turn result carries a next question exactly until mastery")

    def to_json_dict(self) -> dict:
        return {
            "evaluation": evaluation_to_dict(self.evaluation),
            "next_question": (
                question_to_dict(self.next_question, redacted=True) if self.next_question else None
            ),
            "difficulty_after": self.difficulty_after,
            "phase_after": self.phase_after.value,
            "mastered": self.phase_after is Phase.MASTERED,
        }


def _default_id_factory() -> str:
    return uuid.uuid4().hex[:12]


class TutorEngine:
    """The tutoring loop over one completion provider and one event store."""

    def __init__(
        self,
        provider: CompletionProvider,
        policy: AdaptivityPolicy = DEFAULT_POLICY,
        data_dir: Path | str | None = None,
        store: EventStore | None = None,
        library: TemplateLibrary | None = None,
        clock: Callable[[], float] = time.time,
        id_factory: Callable[[], str] = _default_id_factory,
        repair_budget: int = REPAIR_BUDGET,
    ):
        self._provider = provider
        self._policy = policy
        self._rules = policy.score_rules
        if store is None:
            store = EventStore(data_dir if data_dir is not None else tempfile.mkdtemp(prefix="tutorkit-"))
        self._store = store
        self._library = library or default_library()
        self._clock = clock
        self._new_id = id_factory
        self._repair_budget = repair_budget
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._ts_lock = threading.Lock()
        self._last_ts = float("-inf")
        self.repair_log: list[RepairAttempt] = []
        for session_id in self._store.session_ids():
            self._sessions[session_id] = replay(self._store.load(session_id), self._rules)
            self._locks[session_id] = threading.Lock()

    @property
    def provider_id(self) -> str:
        return self._provider.provider_id

    @property
    def policy(self) -> AdaptivityPolicy:
        return self._policy

    def session_ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def _now(self) -> float:
        # Wall-clock, clamped to be non-decreasing across the engine.
        with self._ts_lock:
            ts = self._clock()
            if ts < self._last_ts:
                ts = self._last_ts
            self._last_ts = ts
            return ts

    def _state(self, session_id: str) -> SessionState:
        state = self._sessions.get(session_id)
        if state is None:
            raise UnknownSession(session_id)
        return state

    def _lock(self, session_id: str) -> threading.Lock:
        lock = self._locks.get(session_id)
        if lock is None:
            raise UnknownSession(session_id)
        return lock

    # --- provider round-trips -------------------------------------------------

    def _complete(self, prompt: PromptText, temperature: float) -> str:
        request = CompletionRequest(prompt=prompt, temperature=temperature)
        try:
            return self._provider.complete(request).text
        except ProviderError as exc:
            raise ProviderUnavailable(str(exc)) from exc

    def _complete_parsed(
        self,
        prompt: PromptText,
        temperature: float,
        expected_kind: BlockKind,
        parse,
        unparseable: type[CompletionUnparseable],
    ):
        """One provider call plus up to ``repair_budget`` corrective round-trips."""
        completion = self._complete(prompt, temperature)
        failures = 0
        while True:
            try:
                return parse(completion)
            except ParseError as exc:
                failures += 1
                if failures > self._repair_budget:
                    raise unparseable(
                        f"completion unparseable after {self._repair_budget} repairs: {exc}",
                        exc.failure,
                    ) from exc
                repair_prompt = repair_completion(
                    exc.failure, completion, expected_kind, failures, self._repair_budget
                )
                self.repair_log.append(
                    RepairAttempt(
                        original_completion=completion,
                        failure=exc.failure,
                        repair_prompt=repair_prompt,
                        attempt_index=failures,
                    )
                )
                completion = self._complete(repair_prompt, temperature)

    def _generate_question(self, state: SessionState, action: TutorAction) -> Question:
        if action.kind is ActionKind.ASK_TRANSFER:
            prompt = build_transfer_prompt(
                state.topic, action.transfer_domain or "", 1, library=self._library
            )
            pairs = self._complete_parsed(
                prompt, GENERATION_TEMPERATURE, BlockKind.SHORT_QA, parse_short_qa_block, GenerationUnparseable
            )
            pair = pairs[0]
            return Question(
                id=self._new_id(),
                kind=QuestionKind.TRANSFER,
                stem=pair.question_text,
                difficulty=state.difficulty,
                reference_answer=pair.answer_text,
                transfer_domain=action.transfer_domain,
            )
        last_turn = state.turns[-1] if state.turns else None
        prompt = build_question_prompt(
            state.topic, action.difficulty or state.difficulty, action.question_kind, last_turn, library=self._library
        )
        if action.question_kind is QuestionKind.MULTIPLE_CHOICE:
            block = self._complete_parsed(
                prompt, GENERATION_TEMPERATURE, BlockKind.MCQ, parse_mcq_block, GenerationUnparseable
            )
            parsed = block.questions[0]
            return Question(
                id=self._new_id(),
                kind=QuestionKind.MULTIPLE_CHOICE,
                stem=parsed.stem,
                difficulty=action.difficulty or state.difficulty,
                options=parsed.options,
                correct_label=parsed.correct_label,
            )
        pairs = self._complete_parsed(
            prompt, GENERATION_TEMPERATURE, BlockKind.SHORT_QA, parse_short_qa_block, GenerationUnparseable
        )
        pair = pairs[0]
        return Question(
            id=self._new_id(),
            kind=QuestionKind.SHORT_ANSWER,
            stem=pair.question_text,
            difficulty=action.difficulty or state.difficulty,
            reference_answer=pair.answer_text,
        )

    def _evaluate(self, question: Question, answer_text: str) -> Evaluation:
        if question.kind is QuestionKind.MULTIPLE_CHOICE:
            label = answer_text.strip().upper()
            if label in MCQ_LABELS:
                return self._grade_mcq(question, label)
        prompt = build_evaluation_prompt(question, answer_text, library=self._library)
        return self._complete_parsed(
            prompt, EVALUATION_TEMPERATURE, BlockKind.EVALUATION, parse_evaluation_block, EvaluationUnparseable
        )

    @staticmethod
    def _grade_mcq(question: Question, label: str) -> Evaluation:
        # Option-label answers are graded locally against the stored key; no
        # provider call is spent on comparing two letters.
        correct = question.correct_label or ""
        correct_text = question.option_text(correct)
        if label == correct:
            return Evaluation(
                score=MCQ_CORRECT_SCORE,
                feedback=f"Correct. {correct}) {correct_text} is the right answer.",
            )
        return Evaluation(
            score=MCQ_INCORRECT_SCORE,
            feedback=f"Not quite. The correct answer is {correct}) {correct_text}.",
            hint="Re-read the question and weigh each option against it before choosing.",
        )

    # --- public surface -------------------------------------------------------

    def create_session(self, topic_text: str) -> SessionView:
        """Start a session on a topic and pose its first question.

        If generation stays unparseable after the repair budget, the session
        is still created (and persisted) without a pending question; the
        error carries the session id so a later regenerate call can retry.
        """
        topic = Topic(topic_text)
        session_id = self._new_id()
        created = SessionEvent.session_created(session_id, topic.text, self._now())
        state = apply_event(None, created, self._rules)
        action = select_next_action(state, self._policy)
        try:
            question = self._generate_question(state, action)
        except (ProviderUnavailable, GenerationUnparseable) as exc:
            self._store.append(session_id, [created])
            self._register(session_id, state)
            exc.session_id = session_id
            raise
        posed = SessionEvent.question_posed(question, self._now())
        state = apply_event(state, posed, self._rules)
        self._store.append(session_id, [created, posed])
        self._register(session_id, state)
        return self._view(state)

    def _register(self, session_id: str, state: SessionState) -> None:
        with self._registry_lock:
            self._sessions[session_id] = state
            self._locks[session_id] = threading.Lock()

    def submit_answer(self, session_id: str, answer_text: str) -> TurnResult:
        """Evaluate the pending question's answer and advance the session."""
        lock = self._lock(session_id)
        if not lock.acquire(blocking=False):
            raise TurnConflict("an answer for this session is already being processed")
        try:
            state = self._state(session_id)
            question = state.pending_question
            if question is None:
                raise NoPendingQuestion(f"session {session_id} has no pending question")
            if not answer_text.strip():
                raise EmptyAnswer()

            events: list[SessionEvent] = []

            def fold(event: SessionEvent) -> None:
                nonlocal state
                state = apply_event(state, event, self._rules)
                events.append(event)

            fold(SessionEvent.answer_submitted(answer_text, self._now()))
            evaluation = self._evaluate(question, answer_text)
            fold(SessionEvent.evaluated(evaluation, self._now()))

            outcome = TurnOutcome(
                score=evaluation.score,
                was_transfer=question.kind is QuestionKind.TRANSFER,
                transfer_domain=question.transfer_domain,
            )
            successor = update_after_turn(state, outcome, self._policy)
            if successor.difficulty != state.difficulty:
                fold(SessionEvent.difficulty_changed(successor.difficulty, self._now()))
            if successor.phase != state.phase:
                fold(SessionEvent.phase_changed(successor.phase, self._now()))

            action = select_next_action(state, self._policy)
            next_question = None
            if action.kind is ActionKind.DECLARE_MASTERY:
                if state.phase is not Phase.MASTERED:
                    fold(SessionEvent.phase_changed(Phase.MASTERED, self._now()))
            else:
                if action.kind is ActionKind.ASK_TRANSFER and state.phase is Phase.PRACTICING:
                    fold(SessionEvent.phase_changed(Phase.TRANSFERRING, self._now()))
                next_question = self._generate_question(state, action)
                fold(SessionEvent.question_posed(next_question, self._now()))

            self._store.append(session_id, events)
            self._sessions[session_id] = state
            return TurnResult(
                evaluation=evaluation,
                next_question=next_question,
                difficulty_after=state.difficulty,
                phase_after=state.phase,
            )
        finally:
            lock.release()

    def regenerate_question(self, session_id: str) -> SessionView:
        """Retry question generation for a session left without one."""
        lock = self._lock(session_id)
        if not lock.acquire(blocking=False):
            raise TurnConflict("an answer for this session is already being processed")
        try:
            state = self._state(session_id)
            if state.pending_question is not None:
                raise TurnConflict("session already has a pending question")
            if state.phase is Phase.MASTERED:
                raise NoPendingQuestion("session is mastered; nothing to regenerate")
            events: list[SessionEvent] = []
            action = select_next_action(state, self._policy)
            if action.kind is ActionKind.DECLARE_MASTERY:
                event = SessionEvent.phase_changed(Phase.MASTERED, self._now())
                state = apply_event(state, event, self._rules)
                events.append(event)
            else:
                if action.kind is ActionKind.ASK_TRANSFER and state.phase is Phase.PRACTICING:
                    event = SessionEvent.phase_changed(Phase.TRANSFERRING, self._now())
                    state = apply_event(state, event, self._rules)
                    events.append(event)
                question = self._generate_question(state, action)
                event = SessionEvent.question_posed(question, self._now())
                state = apply_event(state, event, self._rules)
                events.append(event)
            self._store.append(session_id, events)
            self._sessions[session_id] = state
            return self._view(state)
        finally:
            lock.release()

    def get_view(self, session_id: str) -> SessionView:
        return self._view(self._state(session_id))

    def _view(self, state: SessionState) -> SessionView:
        return SessionView(
            session_id=state.session_id,
            topic=state.topic.text,
            difficulty=state.difficulty,
            phase=state.phase,
            turn_count=len(state.turns),
            pending_question=state.pending_question,
        )

    def get_transcript(self, session_id: str) -> dict:
        """Full history; answer keys are visible for answered questions only."""
        state = self._state(session_id)
        events = self._store.load(session_id)
        pending = state.pending_question
        return {
            "session_id": state.session_id,
            "topic": state.topic.text,
            "difficulty": state.difficulty,
            "phase": state.phase.value,
            "event_count": len(events),
            "turns": [
                {
                    "question": question_to_dict(turn.question, redacted=False),
                    "student_answer": turn.student_answer,
                    "evaluation": evaluation_to_dict(turn.evaluation),
                    "timestamp": turn.timestamp,
                }
                for turn in state.turns
            ],
            "pending_question": question_to_dict(pending, redacted=True) if pending else None,
        }
