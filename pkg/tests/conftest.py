from __future__ import annotations

import itertools
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def mcq_transcript() -> str:
    return (FIXTURES / "transcripts" / "mcq_block.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def evaluation_transcript() -> str:
    return (FIXTURES / "transcripts" / "evaluation_block.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def short_qa_transcript() -> str:
    return (FIXTURES / "transcripts" / "short_qa_block.txt").read_text(encoding="utf-8")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def deterministic_ids():
    counter = itertools.count(1)
    return lambda: f"n{next(counter):04d}"


@pytest.fixture
def deterministic_clock():
    counter = itertools.count(0)
    return lambda: float(next(counter))


@pytest.fixture
def make_engine(tmp_path, deterministic_ids, deterministic_clock):
    """Engine factory over a scripted provider, deterministic by default."""
    from tutorkit.engine import TutorEngine
    from tutorkit.gateway import ScriptedProvider, ScriptEntry, load_script

    dirs = itertools.count(1)

    def factory(script=None, entries=None, policy=None, data_dir=None, deterministic=True, **kwargs):
        if entries is not None:
            provider = ScriptedProvider(
                [e if isinstance(e, ScriptEntry) else ScriptEntry(completion=e) for e in entries]
            )
        elif script is not None:
            provider = load_script(script)
        else:
            provider = kwargs.pop("provider")
        if policy is not None:
            kwargs["policy"] = policy
        if deterministic:
            kwargs.setdefault("clock", deterministic_clock)
            kwargs.setdefault("id_factory", deterministic_ids)
        return TutorEngine(
            provider,
            data_dir=data_dir or tmp_path / f"data{next(dirs)}",
            **kwargs,
        )

    return factory


@pytest.fixture
def perfect_script() -> Path:
    return FIXTURES / "scripts" / "perfect_student.script"


@pytest.fixture
def perfect_answers() -> list[str]:
    lines = (FIXTURES / "scripts" / "perfect_student.answers").read_text(encoding="utf-8").splitlines()
    return [line for line in lines if line.strip()]
