"""Rubric-based sentiment rating of monthly dossiers.

Builds the rating prompt (criteria + output-format instruction as system
text, the rendered dossier as user text), sends it through the gateway, and
parses the structured "score plus reasons" reply. Parsing is defensive:
the integer and its parenthesized label must agree when both appear, and
conflicting score lines are rejected rather than guessed at.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

from .dossier import MonthlyDossier, render_dossier
from .errors import ContractViolation
from .gateway import CompletionRequest, Gateway, SCORE_LABELS

LABEL_SCORES = {label.lower(): score for score, label in SCORE_LABELS.items()}

FORMAT_INSTRUCTION = (
    "Respond in exactly this format:\n"
    "Score: <integer 1-5>\n"
    "Reasons: <brief explanation of the score>"
)

REASK_REMINDER = (
    "Your previous reply could not be parsed. Respond again with exactly:\n"
    "Score: <integer 1-5>\n"
    "Reasons: <brief explanation>"
)


@dataclass(frozen=True)
class Rubric:
    """Five scoring criteria (keys 1..5) plus the instruction preamble."""

    criteria: dict[int, str]
    preamble: str
    version: str = "v1"

    def __post_init__(self) -> None:
        if set(self.criteria) != {1, 2, 3, 4, 5}:
            raise ContractViolation(f"rubric must define criteria exactly for scores 1..5, got {sorted(self.criteria)}")
        if any(not text for text in self.criteria.values()):
            raise ContractViolation("rubric criteria must be non-empty")

    def render(self) -> str:
        rows = [f"{s} ({SCORE_LABELS[s]}): {self.criteria[s]}" for s in range(1, 6)]
        return "\n\n".join(rows)


def load_rubric(version: str = "v1") -> Rubric:
    """Load the versioned rubric asset shipped with the package."""
    raw = resources.files("kosent.assets").joinpath(f"rubric_{version}.json").read_text("utf-8")
    data = json.loads(raw)
    return Rubric(
        criteria={int(k): v for k, v in data["criteria"].items()},
        preamble=data["preamble"],
        version=data["version"],
    )


@dataclass(frozen=True)
class SentimentRating:
    """One model rating for a company-month, with full provenance."""

    company_id: str
    month: str
    score: int
    rationale: str
    model_id: str
    raw_response: str
    condition: str | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.score <= 5:
            raise ContractViolation(f"score must be in 1..5, got {self.score}")
        if not self.rationale:
            raise ContractViolation("rationale must be non-empty")

    def to_record(self) -> dict:
        return {
            "company_id": self.company_id,
            "month": self.month,
            "score": self.score,
            "rationale": self.rationale,
            "model_id": self.model_id,
            "raw_response": self.raw_response,
            "condition": self.condition,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SentimentRating":
        return cls(
            company_id=rec["company_id"],
            month=rec["month"],
            score=int(rec["score"]),
            rationale=rec["rationale"],
            model_id=rec["model_id"],
            raw_response=rec.get("raw_response", rec["rationale"]),
            condition=rec.get("condition"),
        )


class UnparseableResponseError(ValueError):
    """No in-range score could be extracted from the reply."""


class AmbiguousResponseError(ValueError):
    """Conflicting score lines or a label contradicting its integer."""


# A score line either carries an explicit prefix ("Score: 2", "Rating - 4")
# or starts with a bare integer followed by a label, punctuation, or line
# end — "4 of our plants closed" stays prose. The (?!\.\d) lookahead keeps
# decimals like "3.5" from being read as the integer 3.
_PREFIXED = re.compile(
    r"^[\s*#>]*(?:final\s+)?(?:rating\s*score|rating|score)\s*[:\-–—=]?\s*(\d+)(?!\.\d)\s*(?:\(\s*([^)]*?)\s*\))?",
    re.IGNORECASE,
)
_BARE = re.compile(
    r"^[\s*#>]*(\d+)(?!\.\d)\s*(?:\(\s*([^)]*?)\s*\)|(?=$|[-–—:.,;)\]]))",
)
_REASONS_PREFIX = re.compile(r"^[\s*#>]*(?:reasons?|rationale|explanation)\s*[:\-–—]\s*", re.IGNORECASE)
_LEADING_SEPARATORS = re.compile(r"^[\s\-–—:.,;&*#>`]+")


def _score_match(line: str):
    return _PREFIXED.match(line) or _BARE.match(line)


def _rationale_part(text: str) -> str:
    """Strip a leading "Reasons:"-style label; one strip per line."""
    return _REASONS_PREFIX.sub("", text, count=1)


def parse_rating(raw: str) -> tuple[int, str]:
    """Extract (score, rationale) from a model reply.

    Accepts the common shapes: "2", "2 (Negative) — …", "Score: 2",
    "Rating Score: 2\\nReasons: …". Raises UnparseableResponseError when no
    in-range integer is found and AmbiguousResponseError when score lines
    conflict or a label contradicts the integer next to it.
    """
    lines = raw.splitlines()
    score: int | None = None
    rationale_parts: list[str] = []
    for line in lines:
        m = _score_match(line) if line.strip() else None
        value = int(m.group(1)) if m else None
        if m is not None and value is not None and 1 <= value <= 5:
            label = (m.group(2) or "").strip().lower()
            if label and label in LABEL_SCORES and LABEL_SCORES[label] != value:
                raise AmbiguousResponseError(
                    f"label {m.group(2)!r} contradicts score {value}"
                )
            if score is not None and value != score:
                raise AmbiguousResponseError(f"conflicting score lines: {score} vs {value}")
            if score is None:
                score = value
            # a repeated identical score line adds nothing but its remainder
            remainder = _LEADING_SEPARATORS.sub("", line[m.end():]).rstrip("*_`# \t")
            if remainder:
                rationale_parts.append(_rationale_part(remainder))
            continue
        rationale_parts.append(_rationale_part(line))
    if score is None:
        raise UnparseableResponseError(f"no score in 1..5 found in reply: {raw[:120]!r}")
    return score, "\n".join(rationale_parts).strip()


def render_rating(score: int, rationale: str) -> str:
    """Canonical reply shape; parse_rating inverts it."""
    if not 1 <= score <= 5:
        raise ContractViolation(f"score must be in 1..5, got {score}")
    return f"{score} ({SCORE_LABELS[score]})\nReasons: {rationale}"


def build_rating_prompt(dossier: MonthlyDossier, rubric: Rubric) -> CompletionRequest:
    """Assemble the full rating request for one dossier.

    The request text carries all five criteria verbatim, every dossier row,
    and the output-format instruction; identical inputs produce identical
    bytes.
    """
    system = f"{rubric.preamble}\n\n{rubric.render()}\n\n{FORMAT_INSTRUCTION}"
    return CompletionRequest(system=system, user=render_dossier(dossier))


class RatingFailed(Exception):
    """Both the original ask and the single re-ask failed to parse."""

    def __init__(self, dossier: MonthlyDossier, cause: Exception):
        super().__init__(f"rating failed for {dossier.company_id} {dossier.month}: {cause}")
        self.company_id = dossier.company_id
        self.month = dossier.month
        self.cause = cause


def rate_dossier(dossier: MonthlyDossier, rubric: Rubric, gateway: Gateway) -> SentimentRating:
    """Prompt, complete, parse; exactly one re-ask on an unparseable reply.

    The re-ask appends a strict-format reminder to the user text, so
    deterministic backends key a distinct response for the second attempt.
    When the reply carries a score but no explanatory text, the raw reply
    stands in as the rationale.
    """
    request = build_rating_prompt(dossier, rubric)
    raw = gateway.complete(request).text
    try:
        score, rationale = parse_rating(raw)
    except (UnparseableResponseError, AmbiguousResponseError):
        retry_request = CompletionRequest(
            system=request.system, user=f"{request.user}\n\n{REASK_REMINDER}"
        )
        raw = gateway.complete(retry_request).text
        try:
            score, rationale = parse_rating(raw)
        except (UnparseableResponseError, AmbiguousResponseError) as exc:
            raise RatingFailed(dossier, exc) from exc
    return SentimentRating(
        company_id=dossier.company_id,
        month=dossier.month,
        score=score,
        rationale=rationale or raw.strip(),
        model_id=gateway.config.model_id,
        raw_response=raw,
    )


def read_ratings(path) -> list[SentimentRating]:
    with open(path, encoding="utf-8") as fh:
        return [SentimentRating.from_record(json.loads(line)) for line in fh if line.strip()]


def write_ratings(path, ratings) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in ratings:
            fh.write(json.dumps(r.to_record(), sort_keys=True) + "\n")
