#!/usr/bin/env python3
"""Capture REST payloads from scripted sessions into frontend test fixtures.

The browser UI's tests stub fetch() with these files, so the shapes the UI
is tested against are exactly what the service serves.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient


from tutorkit.api import create_app
from tutorkit.engine import TutorEngine
from tutorkit.gateway import ScriptEntry, ScriptedProvider, load_script

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "frontend" / "tests" / "fixtures"
TRANSCRIPTS = ROOT / "tests" / "fixtures" / "transcripts"
PERFECT_SCRIPT = ROOT / "tests" / "fixtures" / "scripts" / "perfect_student.script"
PERFECT_ANSWERS = ROOT / "tests" / "fixtures" / "scripts" / "perfect_student.answers"


def write(name: str, payload: dict) -> None:
    OUT.joinpath(name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {name}")


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)

    # Session 1: reference MCQ first, free-text answer evaluated at 7/10.
    mcq_block = (TRANSCRIPTS / "mcq_block.txt").read_text(encoding="utf-8")
    evaluation_block = (TRANSCRIPTS / "evaluation_block.txt").read_text(encoding="utf-8")
    provider = ScriptedProvider(
        [
            ScriptEntry(completion=mcq_block, guard="multiple-choice"),
            ScriptEntry(completion=evaluation_block, guard="evaluating"),
            ScriptEntry(
                completion="Q1: What gas do plants absorb from the air for photosynthesis?\n"
                "A) Oxygen\nB) Carbon dioxide*\nC) Nitrogen\nD) Hydrogen",
                guard="multiple-choice",
            ),
        ]
    )
    engine = TutorEngine(
        provider=provider,
        id_factory=iter(f"fx{i:04d}" for i in range(1, 100)).__next__,
        clock=iter(float(i) for i in range(10_000)).__next__,
    )
    client = TestClient(create_app(engine))

    created = client.post("/api/sessions", json={"topic": "photosynthesis"})
    assert created.status_code == 201, created.text
    session_id = created.json()["session_id"]
    write("create_session.json", created.json())

    answered = client.post(
        f"/api/sessions/{session_id}/answer",
        json={"answer": "Photosynthesis is when plants make food from sunlight."},
    )
    assert answered.status_code == 200, answered.text
    assert answered.json()["evaluation"]["score"] == 7
    write("turn_result.json", answered.json())

    write("session_view_after_turn.json", client.get(f"/api/sessions/{session_id}").json())
    write("transcript.json", client.get(f"/api/sessions/{session_id}/transcript").json())
    write("healthz.json", client.get("/api/healthz").json())

    # Session 2: full mastery run for the transfer chip and completion screen.
    engine2 = TutorEngine(
        provider=load_script(PERFECT_SCRIPT),
        id_factory=iter(f"pf{i:04d}" for i in range(1, 100)).__next__,
        clock=iter(float(i) for i in range(10_000)).__next__,
    )
    client2 = TestClient(create_app(engine2))
    session2 = client2.post("/api/sessions", json={"topic": "photosynthesis"}).json()["session_id"]
    answers = [l for l in PERFECT_ANSWERS.read_text(encoding="utf-8").splitlines() if l.strip()]
    transfer_result = None
    final_result = None
    for answer in answers:
        response = client2.post(f"/api/sessions/{session2}/answer", json={"answer": answer})
        assert response.status_code == 200, response.text
        body = response.json()
        question = body.get("next_question")
        if transfer_result is None and question and question["kind"] == "transfer":
            transfer_result = body
        final_result = body
    assert final_result and final_result["mastered"]
    write("turn_result_transfer.json", transfer_result)
    write("turn_result_mastered.json", final_result)
    write("transcript_mastered.json", client2.get(f"/api/sessions/{session2}/transcript").json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
