"""Human annotation backend: task queue, durable submissions, export."""

from .service import RaterAuth, create_app
from .store import (
    AnnotationStore,
    IncompleteCoverageError,
    RaterSession,
    RatingSubmission,
    SubmitAck,
    UnassignedTaskError,
    UnknownRaterError,
)

__all__ = [
    "AnnotationStore",
    "IncompleteCoverageError",
    "RaterAuth",
    "RaterSession",
    "RatingSubmission",
    "SubmitAck",
    "UnassignedTaskError",
    "UnknownRaterError",
    "create_app",
]
