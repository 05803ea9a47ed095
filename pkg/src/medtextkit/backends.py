"""Uniform contract over text-generation models.

Two call shapes cover all evaluation pipelines: free-text generation for a
prompt, and scoring a set of answer options. An HTTP client speaks a small
JSON protocol to any inference server; deterministic stub backends make
every pipeline testable offline.

Wire protocol (JSON over HTTP):
    POST {base}/v1/generate
        {"task": str, "prompt": str, "max_new_tokens": int,
         "temperature": float, "stop": [str]?, "target_language": str?}
        -> 200 {"text": str, "model_id": str}
    POST {base}/v1/score_options
        {"question": str, "context": str|null, "options": [str]}
        -> 200 {"scores": [float]}

Health checks issue a one-token /v1/generate ping, so no endpoint beyond the
two above is required of a server.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

import requests

from medtextkit import textproc

__all__ = [
    "Backend",
    "BackendError",
    "EchoBackend",
    "GenerationRequest",
    "GenerationResponse",
    "HealthStatus",
    "HttpBackend",
    "LeadKBackend",
    "OptionScoreRequest",
    "OverlapScorerBackend",
    "ProtocolError",
    "TemplateAnswerBackend",
    "argmax",
    "health_check",
    "make_backend",
]

TASKS = ("qa", "summarize", "simplify", "translate")

DEFAULT_TIMEOUT = 30.0
DEFAULT_RETRIES = 2
DEFAULT_MAX_IN_FLIGHT = 4

_BODY_EXCERPT = 200


class BackendError(Exception):
    """Transport failure, timeout, or non-success HTTP status."""

    def __init__(self, message: str, status: int | None = None, body: str | None = None):
        super().__init__(message)
        self.status = status
        self.body = body[:_BODY_EXCERPT] if body else None


class ProtocolError(BackendError):
    """The server answered, but not in the agreed wire format."""


@dataclass(frozen=True)
class GenerationRequest:
    task: str
    prompt: str
    max_new_tokens: int = 256
    temperature: float = 0.0
    stop: tuple[str, ...] | None = None
    target_language: str | None = None

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}, expected one of {TASKS}")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class GenerationResponse:
    text: str
    model_id: str


@dataclass(frozen=True)
class OptionScoreRequest:
    question: str
    options: tuple[str, ...]
    context: str | None = None

    def __post_init__(self) -> None:
        if len(self.options) < 2:
            raise ValueError("option scoring needs at least two options")


@dataclass(frozen=True)
class HealthStatus:
    ok: bool
    reason: str | None = None


def argmax(scores: Sequence[float]) -> int:
    """Index of the highest score; ties go to the lower index."""
    return scores.index(max(scores))


def health_check(backend: Backend) -> HealthStatus:
    """Probe a backend; failures come back as a status, never an exception."""
    return backend.health()


class Backend:
    """Base contract: generate text and score options."""

    model_id = "backend"

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        raise NotImplementedError

    def score_options(self, request: OptionScoreRequest) -> list[float]:
        raise NotImplementedError

    def health(self) -> HealthStatus:
        return HealthStatus(ok=True)


# ----------------------------------------------------------------------------
# Deterministic stubs
# ----------------------------------------------------------------------------


def _truncate(text: str, max_tokens: int) -> str:
    words = text.split()
    if len(words) <= max_tokens:
        return text
    return " ".join(words[:max_tokens])


class StubBackend(Backend):
    """Shared behavior of the offline stubs: all deterministic, no I/O."""

    model_id = "stub"

    @staticmethod
    def _payload(request: GenerationRequest) -> str:
        """Prompt text after the "<task>: " prefix the harness templates use."""
        prefix = f"{request.task}: "
        if request.prompt.startswith(prefix):
            return request.prompt[len(prefix):]
        return request.prompt

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        return GenerationResponse(
            _truncate(self._payload(request), request.max_new_tokens), self.model_id
        )

    def score_options(self, request: OptionScoreRequest) -> list[float]:
        base = textproc.content_tokens(request.question)
        if request.context:
            base |= textproc.content_tokens(request.context)
        return [float(len(textproc.content_tokens(opt) & base)) for opt in request.options]


class EchoBackend(StubBackend):
    """Returns the prompt payload unchanged."""

    model_id = "stub-echo"


class LeadKBackend(StubBackend):
    """Returns the first k sentences of the prompt payload."""

    def __init__(self, k: int = 1):
        if k < 1:
            raise ValueError("lead-k needs k >= 1")
        self.k = k
        self.model_id = f"stub-lead-{k}"

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        sentences = textproc.split_sentences(self._payload(request))
        text = " ".join(s.text for s in sentences[: self.k])
        return GenerationResponse(_truncate(text, request.max_new_tokens), self.model_id)


class TemplateAnswerBackend(StubBackend):
    """Answers with a fixed template around the first sentence of the payload."""

    model_id = "stub-template-answer"

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        payload = self._payload(request)
        sentences = textproc.split_sentences(payload)
        lead = sentences[0].text if sentences else payload
        return GenerationResponse(
            _truncate(f"answer: {lead}", request.max_new_tokens), self.model_id
        )


class OverlapScorerBackend(StubBackend):
    """Scores each option by distinct content-token overlap with the question."""

    model_id = "stub-overlap"


# ----------------------------------------------------------------------------
# HTTP client
# ----------------------------------------------------------------------------


class HttpBackend(Backend):
    """Client for any server speaking the /v1 generate/score protocol.

    Retries transport errors (connection failures, timeouts) up to
    ``max_retries`` times and surfaces the last error verbatim; HTTP error
    statuses are never retried. At most ``max_in_flight`` requests run
    concurrently; further callers queue.
    """

    def __init__(
        self,
        base_url: str,
        auth_token: str | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        max_retries: int = DEFAULT_RETRIES,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.max_retries = max_retries
        self.model_id = f"http:{self.base_url}"
        self._session = requests.Session()
        if auth_token:
            self._session.headers["Authorization"] = f"Bearer {auth_token}"
        self._slots = threading.Semaphore(max_in_flight)

    def _post(self, path: str, body: dict, retries: int) -> dict:
        url = f"{self.base_url}{path}"
        attempt = 0
        while True:
            try:
                with self._slots:
                    response = self._session.post(url, json=body, timeout=self.timeout)
            except (requests.ConnectionError, requests.Timeout) as exc:
                if attempt < retries:
                    attempt += 1
                    continue
                raise BackendError(f"transport failure calling {url}: {exc}") from exc
            if response.status_code != 200:
                raise BackendError(
                    f"{url} returned status {response.status_code}",
                    status=response.status_code,
                    body=response.text,
                )
            try:
                payload = response.json()
            except ValueError as exc:
                raise ProtocolError(
                    f"{url} returned a non-JSON body", body=response.text
                ) from exc
            if not isinstance(payload, dict):
                raise ProtocolError(f"{url} returned a non-object body", body=response.text)
            return payload

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        body: dict = {
            "task": request.task,
            "prompt": request.prompt,
            "max_new_tokens": request.max_new_tokens,
            "temperature": request.temperature,
        }
        if request.stop is not None:
            body["stop"] = list(request.stop)
        if request.target_language is not None:
            body["target_language"] = request.target_language
        payload = self._post("/v1/generate", body, self.max_retries)
        text, model_id = payload.get("text"), payload.get("model_id")
        if not isinstance(text, str) or not isinstance(model_id, str):
            raise ProtocolError("generate response missing text/model_id fields")
        return GenerationResponse(text, model_id)

    def score_options(self, request: OptionScoreRequest) -> list[float]:
        body = {
            "question": request.question,
            "context": request.context,
            "options": list(request.options),
        }
        payload = self._post("/v1/score_options", body, self.max_retries)
        scores = payload.get("scores")
        if (
            not isinstance(scores, list)
            or len(scores) != len(request.options)
            or not all(isinstance(s, (int, float)) and not isinstance(s, bool) for s in scores)
        ):
            raise ProtocolError("score response must carry one float per option")
        return [float(s) for s in scores]

    def health(self) -> HealthStatus:
        ping = {"task": "qa", "prompt": "ping", "max_new_tokens": 1, "temperature": 0.0}
        try:
            self._post("/v1/generate", ping, retries=0)
        except ProtocolError as exc:
            return HealthStatus(False, f"protocol error: {exc}")
        except BackendError as exc:
            if exc.status is not None:
                return HealthStatus(False, f"status {exc.status}")
            return HealthStatus(False, str(exc))
        return HealthStatus(True)


def make_backend(
    spec: str,
    auth_token: str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
) -> Backend:
    """Build a backend from a spec string.

    Accepts the stub names ("echo", "lead-<k>", "template-answer",
    "overlap-scorer") or a server URL ("http://host:port").
    """
    if spec == "echo":
        return EchoBackend()
    if spec == "template-answer":
        return TemplateAnswerBackend()
    if spec == "overlap-scorer":
        return OverlapScorerBackend()
    if spec.startswith("lead-"):
        try:
            return LeadKBackend(int(spec[len("lead-"):]))
        except ValueError:
            raise ValueError(f"bad lead-k backend spec {spec!r}") from None
    if spec.startswith(("http://", "https://")):
        return HttpBackend(
            spec, auth_token=auth_token, timeout=timeout, max_in_flight=max_in_flight
        )
    raise ValueError(
        f"unknown backend {spec!r}; expected a stub name or an http(s) URL"
    )
