"""Deterministic prompt construction with ``{{name}}`` placeholder templates.

Templates live in plain-text files (``question_gen.txt``, ``evaluation.txt``,
``transfer_gen.txt``) loaded from a configurable directory; the packaged
defaults ship under ``tutorkit/templates/``. Substitution is single-pass:
placeholder values are spliced in verbatim and never re-scanned, so student
text containing ``{{...}}`` cannot inject further substitutions.
"""

from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .model import Question, QuestionKind, Topic, TurnRecord, _check_difficulty

PLACEHOLDER_RE = re.compile(r"\{\{([A-Za-z_][A-Za-z0-9_]*)\}\}")

BUILTIN_TEMPLATE_DIR = Path(__file__).parent / "templates"

TEMPLATE_FILE_NAMES = {
    "question_gen": "question_gen.txt",
    "evaluation": "evaluation.txt",
    "transfer_gen": "transfer_gen.txt",
}

MCQ_FORMAT_CONTRACT = (
    'Label the question "Q1:". The question should have four options (A-D) '
    "and one correct answer. Indicate the correct answer with an asterisk (*)."
)
SHORT_ANSWER_FORMAT_CONTRACT = (
    'Label the question "Q1:" and provide a reference answer labeled "A1:". '
    "The question should have a short answer."
)
EVALUATION_FORMAT_CONTRACT = (
    'Respond with exactly the labeled lines "Score: <number>/10", '
    '"Feedback: <2-3 sentences>", and optionally "Hint: <hint>".'
)
QA_FORMAT_CONTRACT = 'Label each question "Qn:" and each answer "An:", numbered from 1.'

_COUNT_WORDS = ("zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten")


class PromptError(Exception):
    pass


class MissingVariable(PromptError):
    def __init__(self, name: str):
        super().__init__(f"template variable {name!r} was not supplied")
        self.name = name


class UnknownVariable(PromptError):
    def __init__(self, name: str):
        super().__init__(f"variable {name!r} does not appear in the template")
        self.name = name


class EmptyAnswer(PromptError):
    def __init__(self):
        super().__init__("student answer is empty")


class TemplateKind(enum.Enum):
    QUESTION_GEN = "question_gen"
    EVALUATION = "evaluation"
    TRANSFER_GEN = "transfer_gen"


@dataclass(frozen=True)
class PromptTemplate:
    """Template body whose ``{{name}}`` placeholders match ``required_vars``."""

    kind: TemplateKind
    body: str
    required_vars: frozenset[str]

    def __post_init__(self):
        found = frozenset(PLACEHOLDER_RE.findall(self.body))
        if found != self.required_vars:
            raise ValueError(
                f"placeholders {sorted(found)} do not match required vars {sorted(self.required_vars)}"
            )

    @classmethod
    def from_body(cls, kind: TemplateKind, body: str) -> "PromptTemplate":
        return cls(kind=kind, body=body, required_vars=frozenset(PLACEHOLDER_RE.findall(body)))


@dataclass(frozen=True)
class PromptText:
    """Finished prompt: text, originating template kind, stable fingerprint."""

    text: str
    kind: TemplateKind
    fingerprint: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("prompt text must be non-empty")

    @classmethod
    def of(cls, text: str, kind: TemplateKind) -> "PromptText":
        return cls(text=text, kind=kind, fingerprint=fingerprint_text(text))


def fingerprint_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def substitute_context(
    template: PromptTemplate,
    variables: Mapping[str, str],
    strict: bool = True,
) -> PromptText:
    """Replace every placeholder in one pass over the template body.

    Raises :class:`MissingVariable` when the template needs a name that is
    absent, and, in strict mode, :class:`UnknownVariable` for supplied names
    the template never mentions.
    """
    missing = template.required_vars - variables.keys()
    if missing:
        raise MissingVariable(sorted(missing)[0])
    if strict:
        extra = variables.keys() - template.required_vars
        if extra:
            raise UnknownVariable(sorted(extra)[0])
    text = PLACEHOLDER_RE.sub(lambda m: variables[m.group(1)], template.body)
    return PromptText.of(text, template.kind)


@dataclass(frozen=True)
class TemplateLibrary:
    question_gen: PromptTemplate
    evaluation: PromptTemplate
    transfer_gen: PromptTemplate

    @classmethod
    def load(cls, directory: Path | str) -> "TemplateLibrary":
        directory = Path(directory)
        loaded = {}
        for kind in TemplateKind:
            path = directory / TEMPLATE_FILE_NAMES[kind.value]
            if not path.is_file():
                raise FileNotFoundError(f"template file not found: {path}")
            loaded[kind.value] = PromptTemplate.from_body(kind, path.read_text(encoding="utf-8"))
        return cls(**loaded)

    @classmethod
    def builtin(cls) -> "TemplateLibrary":
        return cls.load(BUILTIN_TEMPLATE_DIR)


_builtin_library: TemplateLibrary | None = None


def default_library() -> TemplateLibrary:
    global _builtin_library
    if _builtin_library is None:
        _builtin_library = TemplateLibrary.builtin()
    return _builtin_library


def count_phrase(count: int) -> str:
    if count < 1:
        raise ValueError("count must be at least 1")
    return _COUNT_WORDS[count] if count < len(_COUNT_WORDS) else str(count)


def _performance_context(last_turn: TurnRecord | None) -> str:
    if last_turn is None:
        return ""
    return (
        "The student previously answered this question:\n"
        f"Question: {last_turn.question.stem}\n"
        f"Student's answer: {last_turn.student_answer}\n"
        f"Score: {last_turn.evaluation.score}/10\n"
        "Generate a new question that accounts for the student's performance "
        "on their previous answer.\n"
    )


def build_question_prompt(
    topic: Topic,
    difficulty: int,
    kind: QuestionKind,
    last_turn: TurnRecord | None = None,
    library: TemplateLibrary | None = None,
) -> PromptText:
    """Prompt asking for one practice question at the given difficulty."""
    if kind is QuestionKind.TRANSFER:
        raise ValueError("transfer prompts are built by build_transfer_prompt")
    _check_difficulty(difficulty)
    library = library or default_library()
    if kind is QuestionKind.MULTIPLE_CHOICE:
        descriptor = "multiple-choice question"
        contract = MCQ_FORMAT_CONTRACT
    else:
        descriptor = "short-answer question"
        contract = SHORT_ANSWER_FORMAT_CONTRACT
    return substitute_context(
        library.question_gen,
        {
            "performance_context": _performance_context(last_turn),
            "question_count": count_phrase(1),
            "question_descriptor": descriptor,
            "topic": topic.text,
            "difficulty": str(difficulty),
            "format_instructions": contract,
        },
    )


def _reference_block(question: Question) -> str:
    if question.kind is QuestionKind.MULTIPLE_CHOICE:
        lines = ["Options:"]
        lines += [f"{o.label}) {o.text}" for o in question.options or ()]
        correct = question.option_text(question.correct_label or "")
        lines.append(f"The correct option is {question.correct_label}) {correct}.")
        return "\n".join(lines) + "\n"
    return f"Reference answer: {question.reference_answer}\n"


def build_evaluation_prompt(
    question: Question,
    student_answer: str,
    library: TemplateLibrary | None = None,
) -> PromptText:
    """Prompt asking for a Score/Feedback/Hint judgment of one answer."""
    if not student_answer.strip():
        raise EmptyAnswer()
    library = library or default_library()
    return substitute_context(
        library.evaluation,
        {
            "question": question.stem,
            "reference_block": _reference_block(question),
            "student_answer": student_answer,
        },
    )


def build_transfer_prompt(
    topic: Topic,
    target_domain: str,
    count: int,
    library: TemplateLibrary | None = None,
) -> PromptText:
    """Prompt asking for short-answer questions linking the topic to a new domain."""
    if not target_domain.strip():
        raise ValueError("target domain must be non-empty")
    if count < 1:
        raise ValueError("count must be at least 1")
    library = library or default_library()
    return substitute_context(
        library.transfer_gen,
        {
            "question_count": count_phrase(count),
            "question_form": "question" if count == 1 else "questions",
            "relate_form": "relates" if count == 1 else "relate",
            "topic": topic.text,
            "target_domain": target_domain,
        },
    )
