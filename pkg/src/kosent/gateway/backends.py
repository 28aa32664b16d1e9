"""Gateway backends: deterministic mock, record/replay cassette, remote HTTP.

The mock is first-class, not a test shim: with it the whole pipeline is
bit-for-bit reproducible, which is what the test suite and the end-to-end
determinism check run on.
"""

from __future__ import annotations

import json
import os
import threading
from typing import Callable, Iterable, Union

import httpx

from .core import (
    AuthenticationError,
    Backend,
    BackendRejectionError,
    BackendResponse,
    BackendTimeoutError,
    CompletionRequest,
    GatewayError,
    InvalidRequestError,
    ModelConfig,
    RateLimitedError,
    SUMMARIZE_SYSTEM,
    request_fingerprint,
)
from ..feed import estimate_tokens

SCORE_LABELS = {1: "Very Negative", 2: "Negative", 3: "Neutral", 4: "Positive", 5: "Very Positive"}

Matcher = Union[str, Callable[[CompletionRequest], bool]]
Reply = Union[str, Exception, Callable[[CompletionRequest], str]]


def _first_sentence(text: str) -> str:
    stripped = text.strip()
    for mark in (". ", ".\n"):
        pos = stripped.find(mark)
        if pos != -1:
            return stripped[: pos + 1]
    return stripped


def canned_reply(request: CompletionRequest, config: ModelConfig) -> str:
    """Built-in deterministic behavior when no explicit rule matches.

    Summarization requests get the first sentence of the submitted body;
    anything else is treated as a rating request and answered with a score
    derived from the request fingerprint, in the canonical reply shape.
    """
    if request.system == SUMMARIZE_SYSTEM:
        body = request.user.split("Body:", 1)[-1]
        return _first_sentence(body) or "No content."
    fp = request_fingerprint(request, config.model_id)
    score = int(fp[:8], 16) % 5 + 1
    return f"{score} ({SCORE_LABELS[score]})\nReasons: Deterministic mock assessment {fp[:12]}."


class MockBackend:
    """In-process backend driven by match rules and scripted faults.

    ``rules`` is an ordered list of (matcher, reply): a matcher is a
    substring of the combined request text or a predicate; a reply is a
    canned string, a callable producing one, or an exception to raise.
    ``faults`` is a schedule of exceptions consumed (and raised) one per
    call before any rule is consulted — e.g. two rate-limit errors then
    success. Unmatched requests fall back to :func:`canned_reply`.
    """

    def __init__(
        self,
        rules: Iterable[tuple[Matcher, Reply]] = (),
        *,
        faults: Iterable[Exception] = (),
        default: Callable[[CompletionRequest, ModelConfig], str] = canned_reply,
    ):
        self.rules = list(rules)
        self.faults = list(faults)
        self.default = default
        self.calls: list[CompletionRequest] = []
        self._lock = threading.Lock()

    def complete_once(self, request: CompletionRequest, config: ModelConfig) -> BackendResponse:
        with self._lock:
            self.calls.append(request)
            fault = self.faults.pop(0) if self.faults else None
        if fault is not None:
            raise fault
        text = None
        combined = request.system + "\n" + request.user
        for matcher, reply in self.rules:
            matched = matcher(request) if callable(matcher) else matcher in combined
            if matched:
                if isinstance(reply, Exception):
                    raise reply
                text = reply(request) if callable(reply) else reply
                break
        if text is None:
            text = self.default(request, config)
        return BackendResponse(
            text=text,
            input_tokens=estimate_tokens(combined),
            output_tokens=estimate_tokens(text),
        )


class CassetteMissError(GatewayError):
    retryable = False


class CassetteBackend:
    """Record/replay cassette keyed by request fingerprint.

    In replay mode an unknown fingerprint raises CassetteMissError. In
    record mode misses are forwarded to ``inner`` and the response is
    appended to the cassette file, so a recorded run replays bit-for-bit.
    """

    def __init__(self, path, *, inner: Backend | None = None, mode: str = "replay"):
        if mode not in ("replay", "record"):
            raise InvalidRequestError(f"unknown cassette mode {mode!r}")
        if mode == "record" and inner is None:
            raise InvalidRequestError("record mode needs an inner backend")
        self.path = str(path)
        self.mode = mode
        self.inner = inner
        self._lock = threading.Lock()
        self._responses: dict[str, str] = {}
        if os.path.exists(self.path):
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        self._responses[rec["fingerprint"]] = rec["response"]

    def complete_once(self, request: CompletionRequest, config: ModelConfig) -> BackendResponse:
        fp = request_fingerprint(request, config.model_id)
        with self._lock:
            hit = self._responses.get(fp)
        if hit is not None:
            return BackendResponse(text=hit, input_tokens=0, output_tokens=estimate_tokens(hit))
        if self.mode == "replay":
            raise CassetteMissError(f"no recorded response for fingerprint {fp[:12]}…")
        assert self.inner is not None
        response = self.inner.complete_once(request, config)
        with self._lock:
            self._responses[fp] = response.text
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {"fingerprint": fp, "model_id": config.model_id, "response": response.text},
                        sort_keys=True,
                    )
                    + "\n"
                )
        return response


class OpenAIChatBackend:
    """OpenAI-compatible /chat/completions backend over httpx.

    Credentials come from the environment (``api_key_env``); nothing is
    read from disk. Status codes map onto the typed gateway errors so the
    retry loop only retries what is actually transient.
    """

    def __init__(
        self,
        api_base: str = "https://api.openai.com/v1",
        *,
        api_key_env: str = "OPENAI_API_KEY",
        transport: httpx.BaseTransport | None = None,
    ):
        self.api_base = api_base.rstrip("/")
        self.api_key_env = api_key_env
        self._client = httpx.Client(transport=transport)

    def complete_once(self, request: CompletionRequest, config: ModelConfig) -> BackendResponse:
        api_key = os.environ.get(self.api_key_env, "")
        if not api_key:
            raise AuthenticationError(f"no API key in ${self.api_key_env}")
        payload = {
            "model": config.model_id,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
            "temperature": config.temperature,
            "max_tokens": config.max_output_tokens,
        }
        try:
            resp = self._client.post(
                f"{self.api_base}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {api_key}"},
                timeout=config.request_timeout,
            )
        except httpx.TimeoutException as exc:
            raise BackendTimeoutError(f"backend timed out after {config.request_timeout}s") from exc
        except httpx.TransportError as exc:
            raise BackendRejectionError(f"transport failure: {exc}", retryable=True) from exc
        if resp.status_code in (401, 403):
            raise AuthenticationError(f"backend rejected credentials ({resp.status_code})")
        if resp.status_code == 429:
            raise RateLimitedError("backend rate limit hit (429)")
        if 400 <= resp.status_code < 500:
            raise InvalidRequestError(f"backend rejected request ({resp.status_code}): {resp.text[:200]}")
        if resp.status_code >= 500:
            raise BackendRejectionError(f"backend error ({resp.status_code})", retryable=True)
        data = resp.json()
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendRejectionError(f"malformed backend response: {exc}", retryable=False) from exc
        usage = data.get("usage", {})
        return BackendResponse(
            text=text,
            input_tokens=int(usage.get("prompt_tokens", 0)),
            output_tokens=int(usage.get("completion_tokens", 0)),
        )
