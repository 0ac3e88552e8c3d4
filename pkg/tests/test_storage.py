"""Event codec round-trips and the append-only log file format."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import drive_session, make_mcq, make_short_answer, make_transfer

from tutorkit.model import Evaluation, Phase, SessionEvent
from tutorkit.storage import (
    EventStore,
    canonical_json,
    event_from_dict,
    event_to_dict,
    question_from_dict,
    question_to_dict,
)

EXAMPLE_EVENTS = [
    SessionEvent.session_created("s1", "photosynthesis", 0.0),
    SessionEvent.question_posed(make_mcq("q1", 1), 1.0),
    SessionEvent.question_posed(make_short_answer("q2", 3), 1.5),
    SessionEvent.question_posed(make_transfer("q3", 5, "art"), 2.0),
    SessionEvent.answer_submitted("my answer", 3.0),
    SessionEvent.evaluated(Evaluation(7, "fine", "try harder"), 4.0),
    SessionEvent.evaluated(Evaluation(10, "great"), 4.5),
    SessionEvent.phase_changed(Phase.TRANSFERRING, 5.0),
    SessionEvent.difficulty_changed(4, 6.0),
]


class TestEventCodec:
    @pytest.mark.parametrize("event", EXAMPLE_EVENTS, ids=lambda e: e.kind.value)
    def test_round_trip(self, event):
        assert event_from_dict(event_to_dict(event)) == event

    def test_canonical_json_is_stable(self):
        event = EXAMPLE_EVENTS[1]
        assert canonical_json(event_to_dict(event)) == canonical_json(event_to_dict(event))
        assert json.loads(canonical_json(event_to_dict(event))) == event_to_dict(event)

    def test_question_redaction_keys(self):
        full = question_to_dict(make_mcq("q1", 1), redacted=False)
        redacted = question_to_dict(make_mcq("q1", 1), redacted=True)
        assert full["correct_label"] == "B"
        assert "correct_label" not in redacted
        assert "reference_answer" not in redacted
        assert question_from_dict(full) == make_mcq("q1", 1)

    @given(scores=st.lists(st.integers(0, 10), max_size=15))
    @settings(max_examples=60)
    def test_driven_logs_round_trip(self, scores):
        events = drive_session(scores).events
        decoded = [event_from_dict(json.loads(canonical_json(event_to_dict(e)))) for e in events]
        assert decoded == events


class TestEventStore:
    def test_append_and_load(self, tmp_path):
        store = EventStore(tmp_path)
        store.append("abc", EXAMPLE_EVENTS[:2])
        store.append("abc", [EXAMPLE_EVENTS[4]])
        assert store.load("abc") == EXAMPLE_EVENTS[:2] + [EXAMPLE_EVENTS[4]]
        assert store.session_ids() == ["abc"]

    def test_one_json_line_per_event(self, tmp_path):
        store = EventStore(tmp_path)
        store.append("abc", EXAMPLE_EVENTS[:3])
        lines = (tmp_path / "abc.log").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 3
        for line in lines:
            json.loads(line)

    def test_missing_session_loads_empty(self, tmp_path):
        assert EventStore(tmp_path).load("ghost") == []

    def test_rejects_path_like_ids(self, tmp_path):
        store = EventStore(tmp_path)
        with pytest.raises(ValueError):
            store.append("../evil", EXAMPLE_EVENTS[:1])
        with pytest.raises(ValueError):
            store.load("a/b")
