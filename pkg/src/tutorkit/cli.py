"""Terminal tutor: interactive sessions and deterministic scripted replays.

Interactive mode loops question -> answer -> feedback until mastery or EOF.
Replay mode drives an embedded engine from a provider script and an answers
file (one answer per line) and emits one JSON record per turn, byte-stable
across runs for golden-file comparison.

Exit codes: 0 success/mastery, 1 usage error, 2 provider error, 3 parse
failure.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path

from .client import EmbeddedClient, RemoteClient, TutorClient
from .config import ServiceConfig, build_library, build_provider, load_config
from .engine import CompletionUnparseable, ProviderUnavailable, TutorEngine
from .gateway import ProviderError, load_script
from .prompts import EmptyAnswer
from .storage import canonical_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROVIDER = 2
EXIT_PARSE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tutorkit",
        description="Adaptive tutoring over a text-completion provider.",
    )
    parser.add_argument("--topic", help="subject to practice")
    parser.add_argument("--mode", choices=("interactive", "replay"), default="interactive")
    parser.add_argument("--server", help="base URL of a running service (remote mode)")
    parser.add_argument("--embedded", action="store_true", help="run the engine in-process")
    parser.add_argument("--script", help="scripted-provider fixture file")
    parser.add_argument("--answers", help="replay answers file, one per line")
    parser.add_argument("--output", choices=("plain", "structured"), default="plain")
    parser.add_argument("--config", help="service config file for the embedded engine")
    return parser


def _usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _sequential_ids():
    counter = itertools.count(1)
    return lambda: f"n{next(counter):04d}"


def _counting_clock():
    counter = itertools.count(0)
    return lambda: float(next(counter))


def _build_embedded(args, deterministic: bool) -> EmbeddedClient:
    config = load_config(args.config) if args.config else ServiceConfig()
    if args.script:
        provider = load_script(args.script)
    else:
        provider = build_provider(config)
    kwargs = {}
    if args.config:
        kwargs["data_dir"] = config.data_dir
    if deterministic:
        kwargs["clock"] = _counting_clock()
        kwargs["id_factory"] = _sequential_ids()
    engine = TutorEngine(
        provider,
        policy=config.policy,
        library=build_library(config),
        **kwargs,
    )
    return EmbeddedClient(engine)


def _build_client(args, deterministic: bool) -> TutorClient:
    if args.server:
        return RemoteClient(args.server)
    return _build_embedded(args, deterministic)


def _print_question(question: dict) -> None:
    header = f"[difficulty {question['difficulty']}/5]"
    if question.get("transfer_domain"):
        header += f" [transfer: {question['transfer_domain']}]"
    print(header)
    print(f"Q: {question['stem']}")
    for option in question.get("options") or []:
        print(f"{option['label']}) {option['text']}")


def _print_feedback(evaluation: dict) -> None:
    print(f"Score: {evaluation['score']}/10")
    print(f"Feedback: {evaluation['feedback']}")
    if evaluation.get("hint"):
        print(f"Hint: {evaluation['hint']}")


def _turn_record(turn: int, question: dict, answer: str, result: dict) -> str:
    return canonical_json(
        {
            "turn": turn,
            "question": question,
            "answer": answer,
            "evaluation": result["evaluation"],
            "difficulty_after": result["difficulty_after"],
            "phase_after": result["phase_after"],
        }
    )


def run_interactive(args) -> int:
    topic = args.topic
    if not topic and sys.stdin.isatty():
        topic = input("Topic to practice: ").strip()
    if not topic:
        return _usage("--topic is required")
    structured = args.output == "structured"

    try:
        client = _build_client(args, deterministic=False)
        view = client.create_session(topic)
    except ValueError as exc:
        return _usage(str(exc))
    except CompletionUnparseable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ProviderUnavailable, ProviderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER

    session_id = view["session_id"]
    if not structured:
        print(f"Session {session_id} on {view['topic']!r}")
    pending = view["pending_question"]
    turn = 0
    while pending is not None:
        if not structured:
            _print_question(pending)
        try:
            answer = input("> " if not structured else "").strip()
        except EOFError:
            if not structured:
                print()
            return EXIT_OK
        if not answer:
            continue
        try:
            result = client.submit_answer(session_id, answer)
        except EmptyAnswer:
            continue
        except CompletionUnparseable as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        except (ProviderUnavailable, ProviderError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PROVIDER
        turn += 1
        if structured:
            print(_turn_record(turn, pending, answer, result))
        else:
            _print_feedback(result["evaluation"])
        if result["mastered"]:
            if structured:
                print(canonical_json({"mastered": True, "turns": turn}))
            else:
                print(f"Mastery achieved after {turn} turns. Session complete.")
            return EXIT_OK
        pending = result["next_question"]
    print("error: session has no pending question", file=sys.stderr)
    return EXIT_PROVIDER


def run_replay(args) -> int:
    if args.server:
        return _usage("replay mode runs embedded, not against a server")
    if not args.topic:
        return _usage("replay mode requires --topic")
    if not args.script or not args.answers:
        return _usage("replay mode requires both --script and --answers")
    answers_path = Path(args.answers)
    if not Path(args.script).is_file():
        return _usage(f"script file not found: {args.script}")
    if not answers_path.is_file():
        return _usage(f"answers file not found: {args.answers}")
    answers = [line.strip() for line in answers_path.read_text(encoding="utf-8").splitlines()]
    answers = [a for a in answers if a]

    try:
        client = _build_embedded(args, deterministic=True)
        view = client.create_session(args.topic)
    except ValueError as exc:
        return _usage(str(exc))
    except CompletionUnparseable as exc:
        print(f"error: {exc.failure.describe()}", file=sys.stderr)
        return EXIT_PARSE
    except (ProviderUnavailable, ProviderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER

    session_id = view["session_id"]
    pending = view["pending_question"]
    for turn, answer in enumerate(answers, start=1):
        if pending is None:
            break
        try:
            result = client.submit_answer(session_id, answer)
        except CompletionUnparseable as exc:
            sys.stdout.flush()
            print(f"error: {exc.failure.describe()}", file=sys.stderr)
            return EXIT_PARSE
        except (ProviderUnavailable, ProviderError) as exc:
            sys.stdout.flush()
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PROVIDER
        print(_turn_record(turn, pending, answer, result))
        if result["mastered"]:
            print(canonical_json({"mastered": True, "turns": turn}))
            return EXIT_OK
        pending = result["next_question"]
    sys.stdout.flush()
    print("error: answers exhausted before mastery", file=sys.stderr)
    return EXIT_USAGE


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.mode == "replay":
        return run_replay(args)
    return run_interactive(args)


if __name__ == "__main__":
    sys.exit(main())
