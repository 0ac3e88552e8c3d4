"""Parsers for the labeled completion formats, plus canonical renderers.

Three formats come back from the completion provider: multiple-choice
blocks ("Qn:" stems with "A)".."D)" options and an asterisk on the correct
one), short question/answer blocks ("Qn:"/"An:" pairs), and evaluations
("Score:"/"Feedback:"/"Hint:" fields). Parsers are total: any input either
yields a value or raises :class:`ParseError` carrying a located
:class:`ParseFailure` — nothing else escapes.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .model import MCQ_LABELS, Evaluation, Option

EXCERPT_CHARS = 80

_QUESTION_RE = re.compile(r"(?m)^[ \t]*Q(\d+)\s*:")
_ANSWER_RE = re.compile(r"(?m)(?:^|(?<=\s))A(\d+)\s*:")
_OPTION_RE = re.compile(r"(?m)(?:^|(?<=\s))([A-D])\)")
_FIELD_LABEL_RE = re.compile(r"(?im)\b(Score|Feedback|Hint)\s*:")
_SCORE_VALUE_RE = re.compile(r"\s*(\d+)\s*/\s*(\d+)")


class FailureKind(enum.Enum):
    NO_BLOCKS_FOUND = "no_blocks_found"
    MISSING_CORRECT_MARKER = "missing_correct_marker"
    MULTIPLE_CORRECT_MARKERS = "multiple_correct_markers"
    MISSING_FIELD = "missing_field"
    MALFORMED_SCORE = "malformed_score"
    INDEX_GAP = "index_gap"


@dataclass(frozen=True)
class ParseFailure:
    """Where and why a completion failed to parse."""

    kind: FailureKind
    location: int
    excerpt: str
    field: str | None = None

    def describe(self) -> str:
        parts = [self.kind.value.replace("_", " ")]
        if self.field:
            parts.append(f"({self.field})")
        if self.excerpt:
            parts.append(f"near: {self.excerpt!r}")
        return " ".join(parts)


class ParseError(Exception):
    def __init__(self, failure: ParseFailure):
        super().__init__(failure.describe())
        self.failure = failure


def _fail(kind: FailureKind, text: str, location: int, field: str | None = None) -> None:
    location = max(0, min(location, len(text)))
    excerpt = text[location : location + EXCERPT_CHARS]
    raise ParseError(ParseFailure(kind=kind, location=location, excerpt=excerpt, field=field))


@dataclass(frozen=True)
class McqQuestion:
    index: int
    stem: str
    options: tuple[Option, ...]
    correct_label: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("question index starts at 1")
        if not self.stem.strip():
            raise ValueError("stem must be non-empty")
        if tuple(o.label for o in self.options) != MCQ_LABELS:
            raise ValueError("options must be exactly A-D in order")
        if self.correct_label not in MCQ_LABELS:
            raise ValueError("correct label must be one of A-D")


@dataclass(frozen=True)
class McqBlock:
    questions: tuple[McqQuestion, ...]

    def __post_init__(self):
        if tuple(q.index for q in self.questions) != tuple(range(1, len(self.questions) + 1)):
            raise ValueError("question indices must run 1..n")


@dataclass(frozen=True)
class QaPair:
    index: int
    question_text: str
    answer_text: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("pair index starts at 1")
        if not self.question_text.strip() or not self.answer_text.strip():
            raise ValueError("question and answer texts must be non-empty")


class BlockKind(enum.Enum):
    MCQ = "mcq"
    SHORT_QA = "short_qa"
    EVALUATION = "evaluation"
    UNKNOWN = "unknown"


def parse_mcq_block(text: str) -> McqBlock:
    """Parse "Qn:" questions with "A)".."D)" options and one starred answer.

    Options may sit on one line or on separate lines; the option whose text
    ends with "*" (ignoring trailing whitespace) is the correct one and the
    asterisk is stripped from the stored text.
    """
    q_matches = list(_QUESTION_RE.finditer(text))
    if not q_matches:
        _fail(FailureKind.NO_BLOCKS_FOUND, text, 0)
    questions = []
    for pos, q_match in enumerate(q_matches):
        if int(q_match.group(1)) != pos + 1:
            _fail(FailureKind.INDEX_GAP, text, q_match.start())
        block_end = q_matches[pos + 1].start() if pos + 1 < len(q_matches) else len(text)
        body = text[q_match.end() : block_end]
        base = q_match.end()

        option_matches = list(_OPTION_RE.finditer(body))
        chosen: list[re.Match[str]] = []
        previous_start = -1
        for label in MCQ_LABELS:
            found = next(
                (m for m in option_matches if m.group(1) == label and m.start() > previous_start),
                None,
            )
            if found is None:
                _fail(FailureKind.MISSING_FIELD, text, q_match.start(), field=f"option {label}")
            chosen.append(found)
            previous_start = found.start()

        stem = body[: chosen[0].start()].strip()
        if not stem:
            _fail(FailureKind.MISSING_FIELD, text, q_match.start(), field="stem")

        options = []
        starred: list[str] = []
        for i, (label, match) in enumerate(zip(MCQ_LABELS, chosen)):
            segment_end = chosen[i + 1].start() if i + 1 < len(chosen) else len(body)
            value = body[match.end() : segment_end].strip()
            if value.endswith("*"):
                starred.append(label)
                value = value[:-1].rstrip()
            if not value:
                _fail(FailureKind.MISSING_FIELD, text, base + match.start(), field=f"option {label}")
            options.append(Option(label=label, text=value))

        if not starred:
            _fail(FailureKind.MISSING_CORRECT_MARKER, text, q_match.start())
        if len(starred) > 1:
            _fail(FailureKind.MULTIPLE_CORRECT_MARKERS, text, q_match.start())
        questions.append(
            McqQuestion(index=pos + 1, stem=stem, options=tuple(options), correct_label=starred[0])
        )
    return McqBlock(questions=tuple(questions))


def normalize_score(numerator: int, denominator: int) -> int:
    """Rescale an X/D score to the 0-10 scale, rounding halves up."""
    if denominator < 1 or not 0 <= numerator <= denominator:
        raise ValueError(f"score {numerator}/{denominator} is not a valid fraction")
    return (20 * numerator + denominator) // (2 * denominator)


def parse_evaluation_block(text: str) -> Evaluation:
    """Parse "Score:"/"Feedback:"/"Hint:" fields, inline or on separate lines.

    The score is read as "X/D" and normalized to the 0-10 scale; the hint is
    optional.
    """
    first_by_name: dict[str, re.Match[str]] = {}
    for match in _FIELD_LABEL_RE.finditer(text):
        name = match.group(1).capitalize()
        first_by_name.setdefault(name, match)
    if "Score" not in first_by_name:
        _fail(FailureKind.MISSING_FIELD, text, 0, field="Score")
    if "Feedback" not in first_by_name:
        _fail(FailureKind.MISSING_FIELD, text, 0, field="Feedback")

    boundaries = sorted(m.start() for m in first_by_name.values())

    def segment(name: str) -> tuple[str, int]:
        match = first_by_name[name]
        end = next((b for b in boundaries if b > match.start()), len(text))
        return text[match.end() : end], match.end()

    score_text, score_at = segment("Score")
    value = _SCORE_VALUE_RE.match(score_text)
    if value is None:
        _fail(FailureKind.MALFORMED_SCORE, text, score_at)
    numerator, denominator = int(value.group(1)), int(value.group(2))
    if denominator < 1 or numerator > denominator:
        _fail(FailureKind.MALFORMED_SCORE, text, score_at)

    feedback, feedback_at = segment("Feedback")
    feedback = feedback.strip()
    if not feedback:
        _fail(FailureKind.MISSING_FIELD, text, feedback_at, field="Feedback")

    hint: str | None = None
    if "Hint" in first_by_name:
        hint = segment("Hint")[0].strip() or None

    return Evaluation(score=normalize_score(numerator, denominator), feedback=feedback, hint=hint)


def parse_short_qa_block(text: str) -> tuple[QaPair, ...]:
    """Pair "Qn:" lines with their "An:" regions.

    An answer region runs to the next "Qn:" line or the end of the text and
    may span several lines or bullet items.
    """
    q_matches = list(_QUESTION_RE.finditer(text))
    if not q_matches:
        _fail(FailureKind.NO_BLOCKS_FOUND, text, 0)
    pairs = []
    for pos, q_match in enumerate(q_matches):
        index = pos + 1
        if int(q_match.group(1)) != index:
            _fail(FailureKind.INDEX_GAP, text, q_match.start())
        block_end = q_matches[pos + 1].start() if pos + 1 < len(q_matches) else len(text)
        body = text[q_match.end() : block_end]

        a_match = _ANSWER_RE.search(body)
        if a_match is None or int(a_match.group(1)) != index:
            _fail(FailureKind.MISSING_FIELD, text, q_match.start(), field=f"A{index}")
        question_text = body[: a_match.start()].strip()
        answer_text = body[a_match.end() :].strip()
        if not question_text:
            _fail(FailureKind.MISSING_FIELD, text, q_match.start(), field=f"Q{index}")
        if not answer_text:
            _fail(FailureKind.MISSING_FIELD, text, q_match.start(), field=f"A{index}")
        pairs.append(QaPair(index=index, question_text=question_text, answer_text=answer_text))
    return tuple(pairs)


def classify_block(text: str) -> BlockKind:
    """Best-effort guess at which format a completion is in."""
    score = next(
        (m for m in _FIELD_LABEL_RE.finditer(text) if m.group(1).capitalize() == "Score"),
        None,
    )
    question = _QUESTION_RE.search(text)
    if score is not None and (question is None or score.start() < question.start()):
        return BlockKind.EVALUATION
    if _OPTION_RE.search(text) is not None:
        return BlockKind.MCQ
    if question is not None and _ANSWER_RE.search(text) is not None:
        return BlockKind.SHORT_QA
    return BlockKind.UNKNOWN


def canonical_render(value) -> str:
    """One fixed textual form per parsed type; parse(canonical_render(v)) == v.

    Texts that themselves contain the structural markers ("Qn:"/"An:" at a
    line start, option labels after whitespace, a trailing "*") cannot be
    represented unambiguously and will not round-trip.
    """
    if isinstance(value, McqBlock):
        rendered = []
        for question in value.questions:
            lines = [f"Q{question.index}: {question.stem}"]
            for option in question.options:
                marker = "*" if option.label == question.correct_label else ""
                lines.append(f"{option.label}) {option.text}{marker}")
            rendered.append("\n".join(lines))
        return "\n\n".join(rendered)
    if isinstance(value, Evaluation):
        text = f"Score: {value.score}/10\nFeedback: {value.feedback}"
        if value.hint is not None:
            text += f"\nHint: {value.hint}"
        return text
    if isinstance(value, (list, tuple)) and value and all(isinstance(p, QaPair) for p in value):
        return "\n\n".join(
            f"Q{pair.index}: {pair.question_text}\nA{pair.index}: {pair.answer_text}" for pair in value
        )
    raise TypeError(f"cannot render {type(value).__name__}")
