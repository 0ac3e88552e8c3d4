"""Policy decisions: difficulty moves, transfer scheduling, mastery.

All functions are pure; every tunable lives in :class:`AdaptivityPolicy`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import (
    MAX_DIFFICULTY,
    MAX_SCORE,
    MIN_DIFFICULTY,
    Phase,
    QuestionKind,
    ScoreRules,
    SessionState,
    TutorAction,
    streak_after_difficulty_change,
)

DEFAULT_TRANSFER_DOMAINS = ("art", "history", "engineering", "everyday life", "sports")


class ExhaustedDomains(Exception):
    """Every configured transfer domain was used without reaching mastery."""


@dataclass(frozen=True)
class AdaptivityPolicy:
    """Tunable knobs of the tutoring loop.

    ``raise_threshold``/``lower_threshold`` drive difficulty moves,
    ``mastery_streak`` is the run of high scores at the top level that
    unlocks transfer questions, and ``required_transfer_passes`` distinct
    domains must each be passed at ``transfer_pass_score`` or better before
    mastery is declared. Question kind is fixed by level:
    multiple-choice below ``short_answer_min_level``, short-answer from it.
    """

    raise_threshold: int = 8
    lower_threshold: int = 4
    mastery_streak: int = 3
    required_transfer_passes: int = 2
    transfer_pass_score: int = 7
    transfer_domains: tuple[str, ...] = DEFAULT_TRANSFER_DOMAINS
    short_answer_min_level: int = 3

    def __post_init__(self):
        if not 0 <= self.lower_threshold < self.raise_threshold <= MAX_SCORE:
            raise ValueError("thresholds must satisfy 0 <= lower < raise <= 10")
        if not 0 <= self.transfer_pass_score <= MAX_SCORE:
            raise ValueError("transfer pass score must lie in [0, 10]")
        if self.mastery_streak < 1 or self.required_transfer_passes < 1:
            raise ValueError("streak and transfer-pass counts must be at least 1")
        domains = tuple(self.transfer_domains)
        if not domains or len(set(domains)) != len(domains) or not all(d.strip() for d in domains):
            raise ValueError("transfer domains must be non-empty and distinct")
        if self.required_transfer_passes > len(domains):
            raise ValueError("cannot require more transfer passes than there are domains")
        if not MIN_DIFFICULTY <= self.short_answer_min_level <= MAX_DIFFICULTY + 1:
            raise ValueError("short-answer start level out of range")
        object.__setattr__(self, "transfer_domains", domains)

    @property
    def score_rules(self) -> ScoreRules:
        return ScoreRules(high_score=self.raise_threshold, transfer_pass=self.transfer_pass_score)


DEFAULT_POLICY = AdaptivityPolicy()


@dataclass(frozen=True)
class TurnOutcome:
    """What the just-evaluated turn scored, and whether it was a transfer."""

    score: int
    was_transfer: bool = False
    transfer_domain: str | None = None

    def __post_init__(self):
        if not 0 <= self.score <= MAX_SCORE:
            raise ValueError(f"score {self.score} outside [0, {MAX_SCORE}]")
        if self.was_transfer != (self.transfer_domain is not None):
            raise ValueError("transfer domain must be present exactly for transfer outcomes")


def next_difficulty(current: int, score: int, policy: AdaptivityPolicy = DEFAULT_POLICY) -> int:
    """Next level after a non-transfer turn: one step up, one step down, or hold."""
    if not MIN_DIFFICULTY <= current <= MAX_DIFFICULTY:
        raise ValueError(f"difficulty {current} outside [{MIN_DIFFICULTY}, {MAX_DIFFICULTY}]")
    if not 0 <= score <= MAX_SCORE:
        raise ValueError(f"score {score} outside [0, {MAX_SCORE}]")
    if score >= policy.raise_threshold:
        return min(current + 1, MAX_DIFFICULTY)
    if score <= policy.lower_threshold:
        return max(current - 1, MIN_DIFFICULTY)
    return current


def question_kind_for_level(level: int, policy: AdaptivityPolicy = DEFAULT_POLICY) -> QuestionKind:
    if level >= policy.short_answer_min_level:
        return QuestionKind.SHORT_ANSWER
    return QuestionKind.MULTIPLE_CHOICE


def pick_transfer_domain(policy: AdaptivityPolicy, used: frozenset[str] | set[str]) -> str:
    """First domain in policy order that has not been used yet."""
    for domain in policy.transfer_domains:
        if domain not in used:
            return domain
    raise ExhaustedDomains(
        f"all {len(policy.transfer_domains)} transfer domains used; "
        "raise the domain list or lower required_transfer_passes"
    )


def select_next_action(state: SessionState, policy: AdaptivityPolicy = DEFAULT_POLICY) -> TutorAction:
    """Decide what the tutor does next for a session with no pending question."""
    if state.pending_question is not None:
        raise ValueError("cannot select an action while a question is pending")
    if state.phase is Phase.MASTERED:
        return TutorAction.declare_mastery()
    if state.phase is Phase.PRACTICING:
        ready = (
            state.difficulty == MAX_DIFFICULTY
            and state.consecutive_high_scores >= policy.mastery_streak
        )
        if ready:
            return TutorAction.ask_transfer(pick_transfer_domain(policy, state.transfer_domains_used))
        return TutorAction.ask_question(state.difficulty, question_kind_for_level(state.difficulty, policy))
    # Transferring
    if len(state.transfer_passes) >= policy.required_transfer_passes:
        return TutorAction.declare_mastery()
    return TutorAction.ask_transfer(pick_transfer_domain(policy, state.transfer_domains_used))


def update_after_turn(
    state: SessionState,
    outcome: TurnOutcome,
    policy: AdaptivityPolicy = DEFAULT_POLICY,
) -> SessionState:
    """Advance difficulty and phase once a turn's evaluation is folded in.

    ``state`` must already contain the evaluated turn (the reducer folds the
    turn record, streak, and transfer passes); this applies the follow-on
    policy decisions: difficulty steps for practice turns, demotion back to
    the practicing phase for failed transfers.
    """
    if outcome.was_transfer:
        if outcome.score >= policy.transfer_pass_score:
            return state
        demoted = max(state.difficulty - 1, MIN_DIFFICULTY)
        return replace(state, difficulty=demoted, phase=Phase.PRACTICING)
    new_level = next_difficulty(state.difficulty, outcome.score, policy)
    if new_level == state.difficulty:
        return state
    streak = streak_after_difficulty_change(state.turns, state.consecutive_high_scores, policy.score_rules)
    return replace(state, difficulty=new_level, consecutive_high_scores=streak)


def turns_to_mastery(policy: AdaptivityPolicy = DEFAULT_POLICY) -> int:
    """Closed-form turn count for a student who scores 10 on every turn.

    Climbing from the bottom level takes ``MAX - MIN`` raising turns, the
    last of which is also the first turn of the streak at the top level, so
    only ``mastery_streak - 1`` further turns are needed there before the
    ``required_transfer_passes`` transfer turns.
    """
    climb = MAX_DIFFICULTY - MIN_DIFFICULTY
    return climb + (policy.mastery_streak - 1) + policy.required_transfer_passes
