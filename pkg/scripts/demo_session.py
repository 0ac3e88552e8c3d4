#!/usr/bin/env python3
"""Play the bundled perfect-student fixture through an embedded engine and
print the resulting transcript, turn by turn."""

from __future__ import annotations

import sys
from pathlib import Path

from tutorkit.engine import TutorEngine
from tutorkit.gateway import load_script
from tutorkit.model import Phase

ROOT = Path(__file__).resolve().parent.parent
SCRIPT = ROOT / "tests" / "fixtures" / "scripts" / "perfect_student.script"
ANSWERS = ROOT / "tests" / "fixtures" / "scripts" / "perfect_student.answers"


def main() -> int:
    engine = TutorEngine(provider=load_script(SCRIPT))
    view = engine.create_session("photosynthesis")
    print(f"session {view.session_id}: topic {view.topic!r}\n")
    answers = [line for line in ANSWERS.read_text(encoding="utf-8").splitlines() if line.strip()]
    for turn, answer in enumerate(answers, start=1):
        question = engine.get_view(view.session_id).pending_question
        label = question.kind.value
        if question.transfer_domain:
            label += f" -> {question.transfer_domain}"
        print(f"turn {turn} [{label}, difficulty {question.difficulty}]")
        print(f"  Q: {question.stem}")
        print(f"  A: {answer}")
        result = engine.submit_answer(view.session_id, answer)
        print(f"  Score: {result.evaluation.score}/10")
        print(f"  Feedback: {result.evaluation.feedback}\n")
        if result.phase_after is Phase.MASTERED:
            print(f"mastered after {turn} turns")
            return 0
    print("answers exhausted before mastery")
    return 1


if __name__ == "__main__":
    sys.exit(main())
