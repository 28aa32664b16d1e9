"""Post-hoc score adjustment conditions.

Four deterministic transforms of a model's 1..5 score: identity, dampening
of positive scores, lifting of negative scores, and both at once. The
combined condition evaluates both rules against the original score, so a 2
lifted to 3 is never re-examined by the subtract rule.
"""

from __future__ import annotations

import enum

from .errors import ContractViolation


class Condition(enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"

    @classmethod
    def parse(cls, tag: str) -> "Condition":
        try:
            return cls(tag.strip().upper())
        except ValueError:
            raise ContractViolation(f"unknown condition {tag!r} (want C1..C4)") from None


def apply_condition(score: int, condition: Condition) -> int:
    """Transform one model score under the given condition.

    C1: unchanged. C2: -1 if score >= 4. C3: +1 if score <= 2. C4: both
    rules applied to the original score. Output stays in 1..5 without
    clamping.
    """
    if not isinstance(score, int) or isinstance(score, bool) or not 1 <= score <= 5:
        raise ContractViolation(f"score must be an integer in 1..5, got {score!r}")
    if condition is Condition.C1:
        return score
    if condition is Condition.C2:
        return score - 1 if score >= 4 else score
    if condition is Condition.C3:
        return score + 1 if score <= 2 else score
    if condition is Condition.C4:
        if score >= 4:
            return score - 1
        if score <= 2:
            return score + 1
        return score
    raise ContractViolation(f"unknown condition {condition!r}")
