"""Completion providers behind one contract.

Two implementations: an HTTP provider speaking the OpenAI-style
``/v1/completions`` wire format with retry/backoff, and a deterministic
scripted provider that replays canned completions from a fixture file for
hermetic tests. Callers can only tell them apart through
``CompletionResult.provider_id``.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

from .prompts import PromptText

DEFAULT_MAX_TOKENS = 512
GENERATION_TEMPERATURE = 0.7
EVALUATION_TEMPERATURE = 0.0
MAX_STOP_SEQUENCES = 4

API_KEY_ENV = "TUTOR_API_KEY"
API_BASE_ENV = "TUTOR_API_BASE"
MODEL_ENV = "TUTOR_MODEL"
DEFAULT_MODEL = "gpt-3.5-turbo-instruct"

SCRIPT_SEPARATOR = "---"
SCRIPT_GUARD_PREFIX = "guard:"

RETRYABLE_STATUSES = frozenset({429} | set(range(500, 600)))


class ProviderError(Exception):
    pass


class ProviderTimeout(ProviderError):
    pass


class ProviderRejected(ProviderError):
    """Non-retryable HTTP rejection (4xx other than 429)."""

    def __init__(self, status: int, body_excerpt: str):
        super().__init__(f"provider rejected the request with status {status}: {body_excerpt}")
        self.status = status
        self.body_excerpt = body_excerpt


class AttemptsExceeded(ProviderError):
    def __init__(self, attempts: int, last_error: str):
        super().__init__(f"gave up after {attempts} attempts: {last_error}")
        self.attempts = attempts


class ScriptExhausted(ProviderError):
    pass


class ScriptParseError(ProviderError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class CompletionRequest:
    prompt: PromptText
    max_tokens: int = DEFAULT_MAX_TOKENS
    temperature: float = GENERATION_TEMPERATURE
    stop_sequences: tuple[str, ...] = ()

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must lie in [0, 2]")
        if len(self.stop_sequences) > MAX_STOP_SEQUENCES:
            raise ValueError(f"at most {MAX_STOP_SEQUENCES} stop sequences allowed")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    provider_id: str
    latency: float
    attempt_count: int

    def __post_init__(self):
        if self.attempt_count < 1:
            raise ValueError("attempt_count must be positive")


class CompletionProvider(Protocol):
    provider_id: str

    def complete(self, request: CompletionRequest) -> CompletionResult: ...


@dataclass(frozen=True)
class ScriptEntry:
    """One canned completion; a guard restricts it to prompts containing it."""

    completion: str
    guard: str | None = None


@dataclass
class _ScriptSlot:
    entry: ScriptEntry
    consumed: bool = False


class ScriptedProvider:
    """Replays entries in file order among those whose guard matches.

    Consumption is serialized under a lock, so concurrent callers observe a
    single global FIFO order.
    """

    provider_id = "scripted"

    def __init__(self, entries: list[ScriptEntry] | tuple[ScriptEntry, ...]):
        self._slots = [_ScriptSlot(entry) for entry in entries]
        self._lock = threading.Lock()

    @property
    def remaining(self) -> int:
        with self._lock:
            return sum(1 for slot in self._slots if not slot.consumed)

    def complete(self, request: CompletionRequest) -> CompletionResult:
        started = time.monotonic()
        with self._lock:
            for slot in self._slots:
                if slot.consumed:
                    continue
                if slot.entry.guard is not None and slot.entry.guard not in request.prompt.text:
                    continue
                slot.consumed = True
                return CompletionResult(
                    text=slot.entry.completion,
                    provider_id=self.provider_id,
                    latency=time.monotonic() - started,
                    attempt_count=1,
                )
        raise ScriptExhausted("no unconsumed script entry matches the prompt")


def parse_script(text: str) -> list[ScriptEntry]:
    """Parse the script file format: entries separated by lines of "---".

    An entry may start with a ``guard: <substring>`` line; the rest is the
    completion verbatim.
    """
    if not text.strip():
        return []
    entries = []
    chunk_lines: list[str] = []
    chunk_start = 1
    lines = text.splitlines()

    def flush(at_line: int) -> None:
        body = chunk_lines
        guard = None
        if body and body[0].strip().lower().startswith(SCRIPT_GUARD_PREFIX):
            guard = body[0].strip()[len(SCRIPT_GUARD_PREFIX) :].strip()
            if not guard:
                raise ScriptParseError(chunk_start, "guard line has no pattern")
            body = body[1:]
        completion = "\n".join(body)
        if not completion.strip():
            raise ScriptParseError(at_line, "entry has no completion text")
        entries.append(ScriptEntry(completion=completion, guard=guard))

    for number, line in enumerate(lines, start=1):
        if line.strip() == SCRIPT_SEPARATOR:
            flush(number)
            chunk_lines = []
            chunk_start = number + 1
        else:
            chunk_lines.append(line)
    if any(line.strip() for line in chunk_lines):
        flush(len(lines))
    return entries


def load_script(path: Path | str) -> ScriptedProvider:
    return ScriptedProvider(parse_script(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class RetryPolicy:
    """Attempt limit, exponential backoff, and per-request timeout."""

    max_attempts: int = 3
    backoff_base: float = 0.5
    backoff_cap: float = 8.0
    timeout: float = 30.0

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        if self.backoff_base < 0 or self.backoff_cap < 0 or self.timeout <= 0:
            raise ValueError("backoff and timeout values must be positive")

    def delay_after(self, attempt: int) -> float:
        """Sleep before attempt ``attempt + 1``; doubles each retry, capped."""
        return min(self.backoff_base * (2 ** (attempt - 1)), self.backoff_cap)


class HttpCompletionProvider:
    """OpenAI-compatible completions client.

    POSTs ``{base_url}/v1/completions`` and reads ``choices[0].text``.
    Transient failures (timeouts, 429, 5xx) are retried with exponential
    backoff up to the attempt limit; other 4xx responses fail immediately.
    """

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        retry: RetryPolicy = RetryPolicy(),
        sleep: Callable[[float], None] = time.sleep,
        client: httpx.Client | None = None,
    ):
        base = base_url or os.environ.get(API_BASE_ENV)
        if not base:
            raise ValueError(f"no provider base URL configured (set {API_BASE_ENV})")
        self._base_url = base.rstrip("/")
        self._api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self._model = model or os.environ.get(MODEL_ENV) or DEFAULT_MODEL
        self._retry = retry
        self._sleep = sleep
        self._client = client or httpx.Client(timeout=retry.timeout)
        self.provider_id = f"http:{self._model}"

    def complete(self, request: CompletionRequest) -> CompletionResult:
        started = time.monotonic()
        payload = {
            "model": self._model,
            "prompt": request.prompt.text,
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
            "stop": list(request.stop_sequences) or None,
        }
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"

        last_error = "no attempt made"
        for attempt in range(1, self._retry.max_attempts + 1):
            try:
                response = self._client.post(
                    f"{self._base_url}/v1/completions",
                    json=payload,
                    headers=headers,
                    timeout=self._retry.timeout,
                )
            except httpx.TimeoutException as exc:
                last_error = f"timeout: {exc}"
                if attempt == self._retry.max_attempts:
                    raise ProviderTimeout(
                        f"request timed out on attempt {attempt}/{self._retry.max_attempts}"
                    ) from exc
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
                if attempt == self._retry.max_attempts:
                    raise AttemptsExceeded(attempt, last_error) from exc
            else:
                if response.status_code == 200:
                    body = response.json()
                    text = body["choices"][0]["text"]
                    return CompletionResult(
                        text=text,
                        provider_id=self.provider_id,
                        latency=time.monotonic() - started,
                        attempt_count=attempt,
                    )
                if response.status_code not in RETRYABLE_STATUSES:
                    raise ProviderRejected(response.status_code, response.text[:200])
                last_error = f"status {response.status_code}"
                if attempt == self._retry.max_attempts:
                    raise AttemptsExceeded(attempt, last_error)
            self._sleep(self._retry.delay_after(attempt))

        raise AttemptsExceeded(self._retry.max_attempts, last_error)
