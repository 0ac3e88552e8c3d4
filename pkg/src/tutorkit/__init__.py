"""Adaptive tutoring engine over a text-completion provider."""

from .adaptivity import (
    DEFAULT_POLICY,
    AdaptivityPolicy,
    ExhaustedDomains,
    TurnOutcome,
    next_difficulty,
    pick_transfer_domain,
    select_next_action,
    turns_to_mastery,
    update_after_turn,
)
from .engine import SessionView, TurnResult, TutorEngine
from .gateway import (
    CompletionRequest,
    CompletionResult,
    HttpCompletionProvider,
    RetryPolicy,
    ScriptedProvider,
    load_script,
)
from .model import (
    Evaluation,
    IllegalTransition,
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
    McqBlock,
    ParseError,
    ParseFailure,
    QaPair,
    canonical_render,
    classify_block,
    parse_evaluation_block,
    parse_mcq_block,
    parse_short_qa_block,
)
from .prompts import (
    PromptTemplate,
    PromptText,
    TemplateLibrary,
    build_evaluation_prompt,
    build_question_prompt,
    build_transfer_prompt,
    substitute_context,
)

__version__ = "0.1.0"
