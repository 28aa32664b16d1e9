"""Uniform gateway to completion models: real, recorded, or mocked."""

from .core import (
    AuthenticationError,
    Backend,
    BackendRejectionError,
    BackendResponse,
    BackendTimeoutError,
    CompletionRequest,
    CompletionResult,
    Gateway,
    GatewayError,
    InvalidRequestError,
    ModelConfig,
    RateLimitedError,
    RetryPolicy,
    SUMMARIZE_SYSTEM,
    TokenBucket,
    request_fingerprint,
    summarize_request,
)
from .backends import (
    CassetteBackend,
    CassetteMissError,
    MockBackend,
    OpenAIChatBackend,
    SCORE_LABELS,
    canned_reply,
)

__all__ = [
    "AuthenticationError",
    "Backend",
    "BackendRejectionError",
    "BackendResponse",
    "BackendTimeoutError",
    "CassetteBackend",
    "CassetteMissError",
    "CompletionRequest",
    "CompletionResult",
    "Gateway",
    "GatewayError",
    "InvalidRequestError",
    "MockBackend",
    "ModelConfig",
    "OpenAIChatBackend",
    "RateLimitedError",
    "RetryPolicy",
    "SCORE_LABELS",
    "SUMMARIZE_SYSTEM",
    "TokenBucket",
    "canned_reply",
    "request_fingerprint",
    "summarize_request",
]
