"""Reducer and replay semantics for the event-sourced session state."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import drive_session, make_mcq, make_short_answer, make_transfer

from tutorkit.adaptivity import DEFAULT_POLICY, turns_to_mastery
from tutorkit.model import (
    Evaluation,
    EventKind,
    IllegalTransition,
    Option,
    Phase,
    Question,
    QuestionKind,
    SessionEvent,
    SessionState,
    Topic,
    apply_event,
    replay,
)
from tutorkit.parsing import parse_evaluation_block


def created(ts: float = 0.0) -> SessionEvent:
    return SessionEvent.session_created("s1", "photosynthesis", ts)


def fresh_state() -> SessionState:
    return apply_event(None, created())


class TestTypes:
    def test_topic_trims_and_validates(self):
        assert Topic("  photosynthesis  ").text == "photosynthesis"
        with pytest.raises(ValueError):
            Topic("   ")
        with pytest.raises(ValueError):
            Topic("x" * 201)
        Topic("x" * 200)

    def test_question_invariants(self):
        with pytest.raises(ValueError):
            make_mcq(stem="   ")
        with pytest.raises(ValueError):
            Question(id="q", kind=QuestionKind.MULTIPLE_CHOICE, stem="s?", difficulty=1)
        with pytest.raises(ValueError):
            Question(
                id="q",
                kind=QuestionKind.MULTIPLE_CHOICE,
                stem="s?",
                difficulty=1,
                options=tuple(Option(l, "t") for l in ("A", "B", "C", "D")),
                correct_label="E",
            )
        with pytest.raises(ValueError):
            Question(id="q", kind=QuestionKind.TRANSFER, stem="s?", difficulty=5, reference_answer="r")
        with pytest.raises(ValueError):
            Question(id="q", kind=QuestionKind.SHORT_ANSWER, stem="s?", difficulty=9, reference_answer="r")

    def test_evaluation_bounds(self):
        with pytest.raises(ValueError):
            Evaluation(score=11, feedback="x")
        with pytest.raises(ValueError):
            Evaluation(score=-1, feedback="x")
        with pytest.raises(ValueError):
            Evaluation(score=5, feedback="  ")
        assert Evaluation(score=0, feedback="x").hint is None

    def test_state_invariants(self):
        with pytest.raises(ValueError):
            SessionState(session_id="s", topic=Topic("t"), consecutive_high_scores=1)
        with pytest.raises(ValueError):
            SessionState(session_id="s", topic=Topic("t"), pending_answer="a")


class TestApplyEvent:
    def test_initial_state(self):
        state = fresh_state()
        assert state.topic.text == "photosynthesis"
        assert state.difficulty == 1
        assert state.phase is Phase.PRACTICING
        assert state.turns == ()
        assert state.pending_question is None
        assert state.consecutive_high_scores == 0
        assert state.transfer_passes == frozenset()

    def test_turn_fold_records_reference_evaluation(self, evaluation_transcript):
        evaluation = parse_evaluation_block(evaluation_transcript)
        state = fresh_state()
        question = make_short_answer("q1", 1, "What is photosynthesis?")
        state = apply_event(state, SessionEvent.question_posed(question, 1.0))
        state = apply_event(
            state,
            SessionEvent.answer_submitted("Photosynthesis is when plants make food from sunlight.", 2.0),
        )
        state = apply_event(state, SessionEvent.evaluated(evaluation, 3.0))
        assert len(state.turns) == 1
        assert state.pending_question is None
        assert state.pending_answer is None
        assert state.turns[0].evaluation.score == 7
        assert state.turns[0].timestamp == 3.0
        # 7 is below the high-score bar, so no streak
        assert state.consecutive_high_scores == 0

    def test_purity(self):
        state = fresh_state()
        event = SessionEvent.question_posed(make_mcq(), 1.0)
        assert apply_event(state, event) == apply_event(state, event)

    def test_streak_and_passes(self):
        state = fresh_state()
        state = apply_event(state, SessionEvent.question_posed(make_mcq("q1", 1), 1.0))
        state = apply_event(state, SessionEvent.answer_submitted("B", 2.0))
        state = apply_event(state, SessionEvent.evaluated(Evaluation(10, "good"), 3.0))
        assert state.consecutive_high_scores == 1
        # a raise restarts the streak at 1 (this turn counts at the new level)
        state = apply_event(state, SessionEvent.difficulty_changed(2, 4.0))
        assert state.difficulty == 2
        assert state.consecutive_high_scores == 1
        state = apply_event(state, SessionEvent.question_posed(make_mcq("q2", 2), 5.0))
        state = apply_event(state, SessionEvent.answer_submitted("B", 6.0))
        state = apply_event(state, SessionEvent.evaluated(Evaluation(9, "good"), 7.0))
        assert state.consecutive_high_scores == 2
        state = apply_event(state, SessionEvent.question_posed(make_mcq("q3", 2), 8.0))
        state = apply_event(state, SessionEvent.answer_submitted("A", 9.0))
        state = apply_event(state, SessionEvent.evaluated(Evaluation(5, "meh"), 10.0))
        assert state.consecutive_high_scores == 0

    def test_transfer_pass_and_fail(self):
        trace = drive_session([10] * 6)  # transfer-ready, transfer question pending
        state = trace.state
        assert state.phase is Phase.TRANSFERRING
        assert state.pending_question.kind is QuestionKind.TRANSFER
        passed = apply_event(state, SessionEvent.answer_submitted("a fine answer", 90.0))
        passed = apply_event(passed, SessionEvent.evaluated(Evaluation(8, "good"), 91.0))
        assert passed.transfer_passes == frozenset({"art"})
        failed = apply_event(state, SessionEvent.answer_submitted("a weak answer", 90.0))
        failed = apply_event(failed, SessionEvent.evaluated(Evaluation(3, "weak"), 91.0))
        assert failed.transfer_passes == frozenset()
        assert failed.consecutive_high_scores == 0

    @pytest.mark.parametrize(
        "event",
        [
            SessionEvent.answer_submitted("hello", 1.0),
            SessionEvent.evaluated(Evaluation(5, "fb"), 1.0),
            SessionEvent.difficulty_changed(2, 1.0),
            SessionEvent.phase_changed(Phase.TRANSFERRING, 1.0),
        ],
    )
    def test_illegal_on_fresh_state(self, event):
        with pytest.raises(IllegalTransition):
            apply_event(fresh_state(), event)

    def test_illegal_cases(self):
        with pytest.raises(IllegalTransition):
            apply_event(fresh_state(), created())  # double creation
        with pytest.raises(IllegalTransition):
            apply_event(None, SessionEvent.question_posed(make_mcq(), 1.0))
        posed = apply_event(fresh_state(), SessionEvent.question_posed(make_mcq(), 1.0))
        with pytest.raises(IllegalTransition):
            apply_event(posed, SessionEvent.question_posed(make_mcq("q2"), 2.0))
        with pytest.raises(IllegalTransition):
            apply_event(fresh_state(), SessionEvent.question_posed(make_mcq(difficulty=2), 1.0))
        with pytest.raises(IllegalTransition):
            apply_event(fresh_state(), SessionEvent.question_posed(make_transfer(difficulty=1), 1.0))
        with pytest.raises(IllegalTransition):
            apply_event(posed, SessionEvent.answer_submitted("   ", 2.0))
        answered = apply_event(posed, SessionEvent.answer_submitted("B", 2.0))
        with pytest.raises(IllegalTransition):
            apply_event(answered, SessionEvent.answer_submitted("again", 3.0))
        with pytest.raises(IllegalTransition):
            apply_event(posed, SessionEvent.evaluated(Evaluation(5, "fb"), 3.0))

    def test_difficulty_change_constraints(self):
        turn_done = drive_session([5]).state  # one mid-score turn, difficulty 1
        with pytest.raises(IllegalTransition):
            apply_event(turn_done, SessionEvent.difficulty_changed(3, 50.0))
        with pytest.raises(IllegalTransition):
            apply_event(turn_done, SessionEvent.difficulty_changed(0, 50.0))
        with pytest.raises(IllegalTransition):
            apply_event(turn_done, SessionEvent.difficulty_changed(1, 50.0))

    def test_mastered_is_absorbing(self):
        trace = drive_session([10] * turns_to_mastery(DEFAULT_POLICY))
        state = trace.state
        assert state.phase is Phase.MASTERED
        for event in (
            SessionEvent.question_posed(make_mcq(difficulty=state.difficulty), 99.0),
            SessionEvent.answer_submitted("more", 99.0),
            SessionEvent.phase_changed(Phase.PRACTICING, 99.0),
            SessionEvent.difficulty_changed(state.difficulty - 1, 99.0),
        ):
            with pytest.raises(IllegalTransition):
                apply_event(state, event)

    def test_mastery_only_from_transferring(self):
        state = drive_session([5]).state
        with pytest.raises(IllegalTransition):
            apply_event(state, SessionEvent.phase_changed(Phase.MASTERED, 50.0))


class TestReplay:
    def test_single_event(self):
        assert replay([created()]) == fresh_state()

    def test_empty_log(self):
        with pytest.raises(IllegalTransition):
            replay([])

    def test_reference_session_log(self, evaluation_transcript):
        evaluation = parse_evaluation_block(evaluation_transcript)
        question = make_short_answer("q1", 1, "What is photosynthesis?")
        log = [
            created(0.0),
            SessionEvent.question_posed(question, 1.0),
            SessionEvent.answer_submitted("Photosynthesis is when plants make food from sunlight.", 2.0),
            SessionEvent.evaluated(evaluation, 3.0),
        ]
        state = replay(log)
        assert len(state.turns) == 1
        assert state.turns[0].evaluation.score == 7
        assert state.turns[0].evaluation.hint is not None

    def test_two_event_permutations(self):
        """Exactly the in-order prefix among all 2-event arrangements replays."""
        question = make_mcq("q1", 1)
        log = [
            created(0.0),
            SessionEvent.question_posed(question, 1.0),
            SessionEvent.answer_submitted("B", 2.0),
            SessionEvent.evaluated(Evaluation(9, "good"), 3.0),
            SessionEvent.difficulty_changed(2, 4.0),
        ]
        replay(log)  # the full log itself is valid
        outcomes = {}
        for i, j in itertools.permutations(range(len(log)), 2):
            try:
                replay([log[i], log[j]])
                outcomes[(i, j)] = True
            except IllegalTransition:
                outcomes[(i, j)] = False
        passing = {pair for pair, ok in outcomes.items() if ok}
        assert passing == {(0, 1)}

    def test_offending_index_reported(self):
        log = [created(0.0), SessionEvent.answer_submitted("早い", 1.0)]
        with pytest.raises(IllegalTransition) as exc_info:
            replay(log)
        assert exc_info.value.index == 1


score_lists = st.lists(st.integers(min_value=0, max_value=10), min_size=0, max_size=25)
high_score_lists = st.lists(st.integers(min_value=6, max_value=10), min_size=0, max_size=25)


class TestProperties:
    @given(scores=score_lists)
    @settings(max_examples=150)
    def test_replay_matches_live_fold(self, scores):
        trace = drive_session(scores)
        assert replay(trace.events, DEFAULT_POLICY.score_rules) == trace.state

    @given(scores=st.one_of(score_lists, high_score_lists))
    @settings(max_examples=150)
    def test_reachable_state_invariants(self, scores):
        trace = drive_session(scores)
        state = trace.state
        assert 1 <= state.difficulty <= 5
        assert 0 <= state.consecutive_high_scores <= len(state.turns)
        if state.phase is Phase.MASTERED:
            assert len(state.transfer_passes) >= DEFAULT_POLICY.required_transfer_passes

    @given(scores=score_lists)
    @settings(max_examples=75)
    def test_replay_is_deterministic(self, scores):
        events = drive_session(scores).events
        assert replay(events) == replay(events)
