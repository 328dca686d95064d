"""Chat-completion endpoints and the formalize-with-repair loop."""

from __future__ import annotations

import json
import logging
import os
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from ..context import Context, errors_only, parse_context, validate_context
from ..errors import ContextError, FormalizationFailed, ParseError, TransportError
from .prompts import build_formalization_prompt, build_repair_prompt

log = logging.getLogger(__name__)

DEFAULT_KEY_ENV = "STEPCHECK_API_KEY"


@dataclass(frozen=True)
class LlmEndpointConfig:
    """Where and how to call a model. The API key is named, never stored."""

    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    api_key_env: str = DEFAULT_KEY_ENV
    temperature: float = 0.0
    max_tokens: int = 2048
    timeout_s: float = 60.0
    retries: int = 2
    max_concurrency: int = 4

    def __post_init__(self):
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must lie in [0, 2]")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")

    def api_key(self) -> str | None:
        return os.environ.get(self.api_key_env) if self.api_key_env else None

    def to_json(self) -> dict:
        return {"base_url": self.base_url, "model": self.model, "api_key_env": self.api_key_env,
                "temperature": self.temperature, "max_tokens": self.max_tokens,
                "timeout_s": self.timeout_s, "retries": self.retries,
                "max_concurrency": self.max_concurrency}


class Endpoint(Protocol):
    config: LlmEndpointConfig

    def complete(self, prompt: str) -> str: ...


class HttpEndpoint:
    """An OpenAI-compatible ``/chat/completions`` endpoint."""

    def __init__(self, config: LlmEndpointConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._slots = threading.Semaphore(config.max_concurrency)
        self._client = httpx.Client(timeout=config.timeout_s, transport=transport)

    def complete(self, prompt: str) -> str:
        url = f"{self.config.base_url.rstrip('/')}/chat/completions"
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        key = self.config.api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        with self._slots:
            try:
                response = self._client.post(url, json=payload, headers=headers)
                response.raise_for_status()
                data = response.json()
            except httpx.HTTPStatusError as exc:
                raise TransportError(f"endpoint returned HTTP {exc.response.status_code}") from exc
            except (httpx.HTTPError, ValueError) as exc:
                raise TransportError(f"request to {url} failed: {type(exc).__name__}") from exc
        try:
            return data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError("response has no choices[0].message.content") from exc

    def close(self) -> None:
        self._client.close()


class MockEndpoint:
    """Replays canned responses in order, then repeats the last; records prompts."""

    def __init__(self, responses: Sequence[str], config: LlmEndpointConfig | None = None):
        if not responses:
            raise ValueError("a mock endpoint needs at least one response")
        self.responses = list(responses)
        self.config = config or LlmEndpointConfig(base_url="mock://", model="mock",
                                                  api_key_env="")
        self.prompts: list[str] = []
        self._lock = threading.Lock()

    def complete(self, prompt: str) -> str:
        with self._lock:
            i = min(len(self.prompts), len(self.responses) - 1)
            self.prompts.append(prompt)
            return self.responses[i]


def mock_endpoint(script: Sequence[str], retries: int = 2) -> MockEndpoint:
    return MockEndpoint(script, LlmEndpointConfig(base_url="mock://", model="mock",
                                                  api_key_env="", retries=retries))


_MOCK_DIR = Path(__file__).resolve().parent.parent / "data" / "mock"


def load_mock_script(name: str, directory: Path | None = None) -> list[str]:
    """Responses of a packaged mock fixture such as ``fib-solution``."""
    path = (directory or _MOCK_DIR) / f"{name}.json"
    data = json.loads(path.read_text())
    return list(data["responses"])


@dataclass(frozen=True)
class FormalizationRequest:
    problem: str
    solution: str
    template: str = "default"


@dataclass(frozen=True)
class Attempt:
    number: int
    prompt: str
    response: str
    diagnostics: tuple[str, ...]

    def to_json(self) -> dict:
        return {"attempt": self.number, "prompt": self.prompt, "response": self.response,
                "diagnostics": list(self.diagnostics)}


@dataclass(frozen=True)
class FormalizationResult:
    context: Context
    transcript: tuple[Attempt, ...]
    diagnostics: tuple[str, ...] = field(default=())   # from the failed attempts

    @property
    def attempts(self) -> int:
        return len(self.transcript)


_FENCE = re.compile(r"```[A-Za-z0-9_-]*\n(.*?)```", re.DOTALL)


def extract_context_text(response: str) -> str:
    """The context file inside a reply, dropping a surrounding code fence."""
    m = _FENCE.search(response)
    return (m.group(1) if m else response).strip() + "\n"


def check_context_text(text: str) -> tuple[Context | None, list[str]]:
    try:
        ctx = parse_context(text)
    except (ParseError, ContextError) as exc:
        return None, [str(exc)]
    problems = errors_only(validate_context(ctx))
    if problems:
        return None, [str(d) for d in problems]
    return ctx, []


def write_transcript(path: Path | str, attempts: Sequence[Attempt], extra: dict | None = None) -> None:
    """Append one JSON line per attempt."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        for a in attempts:
            fh.write(json.dumps({**(extra or {}), **a.to_json()}, sort_keys=True) + "\n")


def formalize(req: FormalizationRequest, endpoint: Endpoint,
              transcript_path: Path | str | None = None) -> FormalizationResult:
    """Ask for a context, re-prompting with diagnostics until one validates."""
    base = build_formalization_prompt(req.problem, req.solution, req.template)
    prompt = base
    attempts: list[Attempt] = []
    failures: list[str] = []
    try:
        for number in range(1, endpoint.config.retries + 2):
            response = endpoint.complete(prompt)
            ctx, diags = check_context_text(extract_context_text(response))
            attempts.append(Attempt(number, prompt, response, tuple(diags)))
            if ctx is not None:
                if not ctx.problem_text:
                    ctx = Context(ctx.statements, req.problem.strip(), ctx.goal)
                return FormalizationResult(ctx, tuple(attempts), tuple(failures))
            log.info("formalization attempt %d rejected: %s", number, "; ".join(diags))
            failures.extend(f"attempt {number}: {d}" for d in diags)
            prompt = build_repair_prompt(base, response, diags)
        raise FormalizationFailed(failures, len(attempts))
    finally:
        if transcript_path is not None:
            write_transcript(transcript_path, attempts, {"model": endpoint.config.model})


__all__ = [
    "Attempt", "DEFAULT_KEY_ENV", "Endpoint", "FormalizationRequest", "FormalizationResult",
    "HttpEndpoint", "LlmEndpointConfig", "MockEndpoint", "check_context_text",
    "extract_context_text", "formalize", "load_mock_script", "mock_endpoint",
    "write_transcript",
]
