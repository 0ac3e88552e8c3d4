"""Core session types and the pure event reducer.

Everything here is an immutable value; ``apply_event`` and ``replay`` are
pure functions, so a session's full state can always be rebuilt from its
event log.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

MIN_DIFFICULTY = 1
MAX_DIFFICULTY = 5
MAX_SCORE = 10
TOPIC_MAX_CHARS = 200

MCQ_LABELS = ("A", "B", "C", "D")


class IllegalTransition(Exception):
    """An event that is not legal in the current session state.

    Signals a corrupted event log or an orchestration bug, never a
    user-input problem.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class QuestionKind(enum.Enum):
    MULTIPLE_CHOICE = "multiple_choice"
    SHORT_ANSWER = "short_answer"
    TRANSFER = "transfer"


class Phase(enum.Enum):
    PRACTICING = "practicing"
    TRANSFERRING = "transferring"
    MASTERED = "mastered"


@dataclass(frozen=True)
class Topic:
    """Student-chosen subject, e.g. "photosynthesis"."""

    text: str

    def __post_init__(self):
        trimmed = self.text.strip()
        if not trimmed:
            raise ValueError("topic must be non-empty")
        if len(trimmed) > TOPIC_MAX_CHARS:
            raise ValueError(f"topic longer than {TOPIC_MAX_CHARS} characters")
        object.__setattr__(self, "text", trimmed)


def _check_difficulty(level: int) -> None:
    if not isinstance(level, int) or isinstance(level, bool):
        raise ValueError(f"difficulty must be an integer, got {level!r}")
    if not MIN_DIFFICULTY <= level <= MAX_DIFFICULTY:
        raise ValueError(f"difficulty {level} outside [{MIN_DIFFICULTY}, {MAX_DIFFICULTY}]")


def _check_score(score: int) -> None:
    if not isinstance(score, int) or isinstance(score, bool):
        raise ValueError(f"score must be an integer, got {score!r}")
    if not 0 <= score <= MAX_SCORE:
        raise ValueError(f"score {score} outside [0, {MAX_SCORE}]")


@dataclass(frozen=True)
class Option:
    label: str
    text: str

    def __post_init__(self):
        if self.label not in MCQ_LABELS:
            raise ValueError(f"option label must be one of {MCQ_LABELS}, got {self.label!r}")
        if not self.text.strip():
            raise ValueError(f"option {self.label} has empty text")


@dataclass(frozen=True)
class Question:
    """One question posed to the student.

    Multiple-choice questions carry exactly four options labeled A-D and a
    ``correct_label``; short-answer and transfer questions carry a
    ``reference_answer`` instead, and transfer questions additionally name
    the ``transfer_domain`` they reach into.
    """

    id: str
    kind: QuestionKind
    stem: str
    difficulty: int
    options: tuple[Option, ...] | None = None
    correct_label: str | None = None
    reference_answer: str | None = None
    transfer_domain: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("question id must be non-empty")
        if not self.stem.strip():
            raise ValueError("question stem must be non-empty")
        _check_difficulty(self.difficulty)
        if self.kind is QuestionKind.MULTIPLE_CHOICE:
            if self.options is None or tuple(o.label for o in self.options) != MCQ_LABELS:
                raise ValueError("multiple-choice question needs exactly options A-D in order")
            if self.correct_label not in MCQ_LABELS:
                raise ValueError("multiple-choice question needs a correct label among A-D")
            if self.reference_answer is not None or self.transfer_domain is not None:
                raise ValueError("multiple-choice question carries no reference answer or domain")
        else:
            if self.options is not None or self.correct_label is not None:
                raise ValueError(f"{self.kind.value} question carries no options")
            if self.reference_answer is None or not self.reference_answer.strip():
                raise ValueError(f"{self.kind.value} question needs a reference answer")
            if self.kind is QuestionKind.TRANSFER:
                if not (self.transfer_domain or "").strip():
                    raise ValueError("transfer question needs a non-empty transfer domain")
            elif self.transfer_domain is not None:
                raise ValueError("short-answer question carries no transfer domain")

    def option_text(self, label: str) -> str:
        for option in self.options or ():
            if option.label == label:
                return option.text
        raise KeyError(label)


@dataclass(frozen=True)
class Evaluation:
    """Judgment of one student answer: a 0-10 score, feedback, optional hint."""

    score: int
    feedback: str
    hint: str | None = None

    def __post_init__(self):
        _check_score(self.score)
        if not self.feedback.strip():
            raise ValueError("feedback must be non-empty")
        if self.hint is not None and not self.hint.strip():
            raise ValueError("hint, when present, must be non-empty")


@dataclass(frozen=True)
class TurnRecord:
    question: Question
    student_answer: str
    evaluation: Evaluation
    timestamp: float

    def __post_init__(self):
        if not self.student_answer.strip():
            raise ValueError("student answer must be non-empty")


@dataclass(frozen=True)
class SessionState:
    """Complete state of one tutoring session.

    ``pending_answer`` holds a submitted-but-not-yet-evaluated answer; it is
    only ever non-None between the AnswerSubmitted and Evaluated events of a
    turn.
    """

    session_id: str
    topic: Topic
    difficulty: int = MIN_DIFFICULTY
    turns: tuple[TurnRecord, ...] = ()
    pending_question: Question | None = None
    pending_answer: str | None = None
    consecutive_high_scores: int = 0
    transfer_passes: frozenset[str] = frozenset()
    phase: Phase = Phase.PRACTICING

    def __post_init__(self):
        if not self.session_id:
            raise ValueError("session id must be non-empty")
        _check_difficulty(self.difficulty)
        if self.consecutive_high_scores < 0:
            raise ValueError("consecutive_high_scores must be non-negative")
        if self.consecutive_high_scores > len(self.turns):
            raise ValueError("consecutive_high_scores cannot exceed the turn count")
        if self.pending_answer is not None and self.pending_question is None:
            raise ValueError("pending answer without a pending question")

    @property
    def transfer_domains_used(self) -> frozenset[str]:
        """Domains already spent on this session, posed or answered."""
        used = {
            turn.question.transfer_domain
            for turn in self.turns
            if turn.question.kind is QuestionKind.TRANSFER
        }
        used |= self.transfer_passes
        pending = self.pending_question
        if pending is not None and pending.kind is QuestionKind.TRANSFER:
            used.add(pending.transfer_domain)
        return frozenset(d for d in used if d)


class ActionKind(enum.Enum):
    ASK_QUESTION = "ask_question"
    ASK_TRANSFER = "ask_transfer"
    DECLARE_MASTERY = "declare_mastery"


@dataclass(frozen=True)
class TutorAction:
    """Controller decision: pose a question, pose a transfer, or stop."""

    kind: ActionKind
    difficulty: int | None = None
    question_kind: QuestionKind | None = None
    transfer_domain: str | None = None

    def __post_init__(self):
        if self.kind is ActionKind.ASK_QUESTION:
            if self.difficulty is None or self.question_kind is None:
                raise ValueError("ask-question action needs a difficulty and a question kind")
            _check_difficulty(self.difficulty)
            if self.question_kind is QuestionKind.TRANSFER:
                raise ValueError("transfer questions go through the ask-transfer action")
        elif self.kind is ActionKind.ASK_TRANSFER:
            if not (self.transfer_domain or "").strip():
                raise ValueError("ask-transfer action needs a target domain")

    @classmethod
    def ask_question(cls, difficulty: int, question_kind: QuestionKind) -> "TutorAction":
        return cls(ActionKind.ASK_QUESTION, difficulty=difficulty, question_kind=question_kind)

    @classmethod
    def ask_transfer(cls, domain: str) -> "TutorAction":
        return cls(ActionKind.ASK_TRANSFER, transfer_domain=domain)

    @classmethod
    def declare_mastery(cls) -> "TutorAction":
        return cls(ActionKind.DECLARE_MASTERY)


class EventKind(enum.Enum):
    SESSION_CREATED = "session_created"
    QUESTION_POSED = "question_posed"
    ANSWER_SUBMITTED = "answer_submitted"
    EVALUATED = "evaluated"
    PHASE_CHANGED = "phase_changed"
    DIFFICULTY_CHANGED = "difficulty_changed"


@dataclass(frozen=True)
class SessionEvent:
    """One entry of a session's append-only log."""

    kind: EventKind
    timestamp: float
    session_id: str | None = None
    topic: str | None = None
    question: Question | None = None
    answer: str | None = None
    evaluation: Evaluation | None = None
    phase: Phase | None = None
    difficulty: int | None = None

    @classmethod
    def session_created(cls, session_id: str, topic: str, timestamp: float) -> "SessionEvent":
        return cls(EventKind.SESSION_CREATED, timestamp, session_id=session_id, topic=topic)

    @classmethod
    def question_posed(cls, question: Question, timestamp: float) -> "SessionEvent":
        return cls(EventKind.QUESTION_POSED, timestamp, question=question)

    @classmethod
    def answer_submitted(cls, answer: str, timestamp: float) -> "SessionEvent":
        return cls(EventKind.ANSWER_SUBMITTED, timestamp, answer=answer)

    @classmethod
    def evaluated(cls, evaluation: Evaluation, timestamp: float) -> "SessionEvent":
        return cls(EventKind.EVALUATED, timestamp, evaluation=evaluation)

    @classmethod
    def phase_changed(cls, phase: Phase, timestamp: float) -> "SessionEvent":
        return cls(EventKind.PHASE_CHANGED, timestamp, phase=phase)

    @classmethod
    def difficulty_changed(cls, difficulty: int, timestamp: float) -> "SessionEvent":
        return cls(EventKind.DIFFICULTY_CHANGED, timestamp, difficulty=difficulty)


@dataclass(frozen=True)
class ScoreRules:
    """Score thresholds the reducer needs to fold an evaluation into state.

    Defaults mirror the default adaptivity policy; the session service
    threads its configured policy's values through every reducer call so
    that live folding and replay agree.
    """

    high_score: int = 8
    transfer_pass: int = 7

    def __post_init__(self):
        _check_score(self.high_score)
        _check_score(self.transfer_pass)


DEFAULT_SCORE_RULES = ScoreRules()


def streak_after_difficulty_change(turns: tuple[TurnRecord, ...], streak: int, rules: ScoreRules) -> int:
    """Streak value once a turn has moved the difficulty level.

    A level change restarts the consecutive-high-score count; the turn that
    caused the change is the first score earned at the new level, so a
    high-scoring non-transfer turn restarts the streak at 1 rather than 0.
    """
    if not turns:
        return streak
    last = turns[-1]
    if last.question.kind is not QuestionKind.TRANSFER and last.evaluation.score >= rules.high_score:
        return 1
    return streak


def apply_event(
    state: SessionState | None,
    event: SessionEvent,
    rules: ScoreRules = DEFAULT_SCORE_RULES,
) -> SessionState:
    """Fold one event into the session state.

    Pure: identical inputs always yield identical outputs, and folding a
    complete event log from ``state=None`` reproduces the live state
    exactly. Raises :class:`IllegalTransition` for any event that is not
    legal where it appears.
    """
    if event.kind is EventKind.SESSION_CREATED:
        if state is not None:
            raise IllegalTransition("session already created")
        if not event.session_id:
            raise IllegalTransition("session-created event carries no session id")
        return SessionState(session_id=event.session_id, topic=Topic(event.topic or ""))

    if state is None:
        raise IllegalTransition(f"event log must begin with session creation, got {event.kind.value}")
    if state.phase is Phase.MASTERED:
        raise IllegalTransition(f"no event leaves the mastered phase, got {event.kind.value}")

    if event.kind is EventKind.QUESTION_POSED:
        question = event.question
        if question is None:
            raise IllegalTransition("question-posed event carries no question")
        if state.pending_question is not None:
            raise IllegalTransition("a question is already pending")
        if question.difficulty != state.difficulty:
            raise IllegalTransition(
                f"question difficulty {question.difficulty} does not match session difficulty {state.difficulty}"
            )
        is_transfer = question.kind is QuestionKind.TRANSFER
        if is_transfer != (state.phase is Phase.TRANSFERRING):
            raise IllegalTransition(f"{question.kind.value} question is illegal in phase {state.phase.value}")
        return replace(state, pending_question=question)

    if event.kind is EventKind.ANSWER_SUBMITTED:
        if state.pending_question is None:
            raise IllegalTransition("answer submitted with no pending question")
        if state.pending_answer is not None:
            raise IllegalTransition("an answer was already submitted for the pending question")
        if not (event.answer or "").strip():
            raise IllegalTransition("submitted answer is empty")
        return replace(state, pending_answer=event.answer)

    if event.kind is EventKind.EVALUATED:
        if event.evaluation is None:
            raise IllegalTransition("evaluated event carries no evaluation")
        if state.pending_question is None or state.pending_answer is None:
            raise IllegalTransition("evaluation with no answered pending question")
        turn = TurnRecord(
            question=state.pending_question,
            student_answer=state.pending_answer,
            evaluation=event.evaluation,
            timestamp=event.timestamp,
        )
        streak = state.consecutive_high_scores
        passes = state.transfer_passes
        if turn.question.kind is QuestionKind.TRANSFER:
            if event.evaluation.score >= rules.transfer_pass:
                passes = passes | {turn.question.transfer_domain or ""}
            else:
                streak = 0
        elif event.evaluation.score >= rules.high_score:
            streak += 1
        else:
            streak = 0
        return replace(
            state,
            turns=state.turns + (turn,),
            pending_question=None,
            pending_answer=None,
            consecutive_high_scores=streak,
            transfer_passes=passes,
        )

    if event.kind is EventKind.DIFFICULTY_CHANGED:
        new_level = event.difficulty
        if new_level is None:
            raise IllegalTransition("difficulty-changed event carries no level")
        if not state.turns:
            raise IllegalTransition("difficulty cannot change before any turn was evaluated")
        if state.pending_question is not None:
            raise IllegalTransition("difficulty cannot change while a question is pending")
        if not MIN_DIFFICULTY <= new_level <= MAX_DIFFICULTY:
            raise IllegalTransition(f"difficulty {new_level} outside [{MIN_DIFFICULTY}, {MAX_DIFFICULTY}]")
        if abs(new_level - state.difficulty) != 1:
            raise IllegalTransition(
                f"difficulty may only move one step, got {state.difficulty} -> {new_level}"
            )
        streak = streak_after_difficulty_change(state.turns, state.consecutive_high_scores, rules)
        return replace(state, difficulty=new_level, consecutive_high_scores=streak)

    if event.kind is EventKind.PHASE_CHANGED:
        new_phase = event.phase
        if new_phase is None:
            raise IllegalTransition("phase-changed event carries no phase")
        if not state.turns:
            raise IllegalTransition("phase cannot change before any turn was evaluated")
        if state.pending_question is not None:
            raise IllegalTransition("phase cannot change while a question is pending")
        if new_phase == state.phase:
            raise IllegalTransition(f"phase is already {new_phase.value}")
        if new_phase is Phase.MASTERED and state.phase is not Phase.TRANSFERRING:
            raise IllegalTransition("mastery is only declared from the transferring phase")
        return replace(state, phase=new_phase)

    raise IllegalTransition(f"unknown event kind {event.kind!r}")


def replay(events: list[SessionEvent], rules: ScoreRules = DEFAULT_SCORE_RULES) -> SessionState:
    """Left-fold ``apply_event`` over a full log; deterministic.

    Raises :class:`IllegalTransition` carrying the offending event's index.
    """
    if not events:
        raise IllegalTransition("empty event log", index=0)
    state: SessionState | None = None
    for index, event in enumerate(events):
        try:
            state = apply_event(state, event, rules)
        except IllegalTransition as exc:
            raise IllegalTransition(f"event {index}: {exc}", index=index) from None
    assert state is not None
    return state
