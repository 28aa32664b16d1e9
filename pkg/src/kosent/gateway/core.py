"""Completion-model gateway.

One interface over interchangeable backends (remote HTTP, deterministic
mock, recorded cassette) with bounded exponential-backoff retries and a
token-bucket rate limiter. Per-request state is isolated; the limiter
serializes admission, so the gateway is safe to share across threads.
"""

from __future__ import annotations

import hashlib
import threading
import time
from dataclasses import dataclass
from typing import Callable, Protocol

from ..dossier import DisclosureSummary
from ..errors import ContractViolation
from ..feed import Disclosure, estimate_tokens


class GatewayError(Exception):
    """Base for backend failures. ``attempts`` counts calls actually made."""

    retryable = False

    def __init__(self, message: str, *, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class AuthenticationError(GatewayError):
    retryable = False


class InvalidRequestError(GatewayError):
    retryable = False


class RateLimitedError(GatewayError):
    retryable = True


class BackendTimeoutError(GatewayError):
    retryable = True


class BackendRejectionError(GatewayError):
    """Server-side rejection; retryable only for transient (5xx-class) faults."""

    def __init__(self, message: str, *, retryable: bool = True, attempts: int = 1):
        super().__init__(message, attempts=attempts)
        self.retryable = retryable


@dataclass(frozen=True)
class ModelConfig:
    model_id: str
    temperature: float = 0.0
    max_output_tokens: int = 512
    request_timeout: float = 30.0
    context_budget_tokens: int = 16000

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ContractViolation("model_id must be non-empty")
        if self.temperature < 0:
            raise ContractViolation("temperature must be >= 0")
        if self.max_output_tokens < 1:
            raise ContractViolation("max_output_tokens must be >= 1")
        if self.request_timeout <= 0:
            raise ContractViolation("request_timeout must be positive")


@dataclass(frozen=True)
class RetryPolicy:
    """Bounded retries with exponentially growing, capped delays."""

    max_retries: int = 3
    initial_delay: float = 0.5
    multiplier: float = 2.0
    max_delay: float = 30.0

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ContractViolation("max_retries must be >= 0")
        if self.initial_delay < 0 or self.max_delay < 0:
            raise ContractViolation("delays must be >= 0")
        if self.multiplier < 1.0:
            raise ContractViolation("multiplier < 1 would shrink delays between attempts")

    def delay(self, retry_index: int) -> float:
        return min(self.initial_delay * self.multiplier**retry_index, self.max_delay)


@dataclass(frozen=True)
class CompletionRequest:
    system: str
    user: str

    def __post_init__(self) -> None:
        if not self.system.strip() and not self.user.strip():
            raise ContractViolation("request text must be non-empty")


@dataclass(frozen=True)
class BackendResponse:
    text: str
    input_tokens: int = 0
    output_tokens: int = 0


@dataclass(frozen=True)
class CompletionResult:
    text: str
    input_tokens: int
    output_tokens: int
    latency: float
    attempts: int


class Backend(Protocol):
    def complete_once(self, request: CompletionRequest, config: ModelConfig) -> BackendResponse: ...


def request_fingerprint(request: CompletionRequest, model_id: str) -> str:
    """Stable key for cassette lookup and deterministic mock replies."""
    payload = "\x1f".join((model_id, request.system, request.user))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class TokenBucket:
    """Thread-safe requests-per-minute admission control."""

    def __init__(
        self,
        per_minute: float,
        *,
        burst: float | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if per_minute <= 0:
            raise ContractViolation("per_minute must be positive")
        self._rate = per_minute / 60.0
        self._capacity = burst if burst is not None else max(1.0, per_minute)
        self._tokens = self._capacity
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        # One sleep at most: waiting (1 - tokens)/rate earns exactly the
        # missing fraction, so the token can be claimed without re-checking
        # the clock (oversleep credit is deliberately dropped — the limiter
        # may under-admit, never over-admit).
        with self._lock:
            now = self._clock()
            self._tokens = min(self._capacity, self._tokens + (now - self._last) * self._rate)
            self._last = now
            if self._tokens >= 1.0:
                self._tokens -= 1.0
                return
            self._sleep((1.0 - self._tokens) / self._rate)
            self._tokens = 0.0
            self._last = self._clock()


SUMMARIZE_SYSTEM = (
    "You condense corporate disclosures. Reply with exactly one short English "
    "sentence capturing the disclosure's key facts and figures. Respond in "
    "English regardless of the source language. No preamble, no list."
)


def summarize_request(disclosure: Disclosure) -> CompletionRequest:
    if not disclosure.body:
        raise ContractViolation("cannot summarize a disclosure with an empty body")
    user = (
        f"Company: {disclosure.company_name}\n"
        f"Title: {disclosure.title}\n"
        f"Body: {disclosure.body}"
    )
    return CompletionRequest(system=SUMMARIZE_SYSTEM, user=user)


class Gateway:
    """Shared front door for completions: budget check, admission, retries."""

    def __init__(
        self,
        backend: Backend,
        config: ModelConfig,
        *,
        retry: RetryPolicy = RetryPolicy(),
        limiter: TokenBucket | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.backend = backend
        self.config = config
        self.retry = retry
        self.limiter = limiter
        self._sleep = sleep
        self._clock = clock

    def complete(self, request: CompletionRequest) -> CompletionResult:
        """Run one completion with bounded retries.

        Non-retryable failures (authentication, invalid request) surface
        immediately; retryable ones back off with nondecreasing delays until
        the attempt budget is spent. The raised error carries the attempt
        count. A request over the configured context budget never reaches
        the backend.
        """
        budget = self.config.context_budget_tokens
        if estimate_tokens(request.system) + estimate_tokens(request.user) > budget:
            raise InvalidRequestError(
                f"request exceeds context budget of {budget} tokens", attempts=0
            )
        started = self._clock()
        attempts = 0
        while True:
            attempts += 1
            if self.limiter is not None:
                self.limiter.acquire()
            try:
                response = self.backend.complete_once(request, self.config)
            except GatewayError as exc:
                exc.attempts = attempts
                if not exc.retryable or attempts > self.retry.max_retries:
                    raise
                self._sleep(self.retry.delay(attempts - 1))
                continue
            return CompletionResult(
                text=response.text,
                input_tokens=response.input_tokens,
                output_tokens=response.output_tokens,
                latency=self._clock() - started,
                attempts=attempts,
            )

    def summarize(self, disclosure: Disclosure) -> DisclosureSummary:
        """One-sentence English summary, keeping the source date and title."""
        result = self.complete(summarize_request(disclosure))
        text = result.text.strip()
        if not text:
            raise BackendRejectionError("backend returned an empty summary", retryable=False)
        return DisclosureSummary(
            company_id=disclosure.company_id,
            disclosed_at=disclosure.disclosed_at,
            title=disclosure.title,
            summary=text,
        )
