"""Disclosure feed ingestion.

Parses a line-delimited disclosure feed into normalized records, classifies
each record as timely or periodic from a configurable keyword map, and keeps
only the timely ones for the rating pipeline.

Feed format ("kind-jsonl"): UTF-8, one JSON object per line with keys
company_id, company_name, date (YYYY-MM-DD), time (HH:MM), title, body,
category. Timestamps are interpreted in a single configured zone
(Korean market local time by default).
"""

from __future__ import annotations

import datetime as dt
import enum
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence
from zoneinfo import ZoneInfo

from .errors import ContractViolation

DEFAULT_ZONE = "Asia/Seoul"


class ReportType(enum.Enum):
    TIMELY = "timely"
    FAIR_REPORT = "fair_report"
    BUSINESS_REPORT = "business_report"
    SEMI_ANNUAL_REPORT = "semi_annual_report"
    QUARTERLY_REPORT = "quarterly_report"
    OTHER_PERIODIC = "other_periodic"


#: Ordered, case-insensitive substring rules. First match wins, so the more
#: specific "semi-annual" entries must precede "annual report". No match
#: means the record is a timely disclosure.
DEFAULT_CATEGORY_KEYWORDS: tuple[tuple[str, ReportType], ...] = (
    ("semi-annual", ReportType.SEMI_ANNUAL_REPORT),
    ("semiannual", ReportType.SEMI_ANNUAL_REPORT),
    ("half-year report", ReportType.SEMI_ANNUAL_REPORT),
    ("quarterly", ReportType.QUARTERLY_REPORT),
    ("business report", ReportType.BUSINESS_REPORT),
    ("fair report", ReportType.FAIR_REPORT),
    ("fair disclosure", ReportType.FAIR_REPORT),
    ("annual report", ReportType.OTHER_PERIODIC),
    ("periodic", ReportType.OTHER_PERIODIC),
)


def classify_report_type(
    category: str,
    title: str = "",
    keywords: Sequence[tuple[str, ReportType]] = DEFAULT_CATEGORY_KEYWORDS,
) -> ReportType:
    """Map a feed category (falling back to the title) onto a report type."""
    for haystack in (category, title):
        lowered = haystack.lower()
        if not lowered:
            continue
        for needle, tag in keywords:
            if needle in lowered:
                return tag
        if haystack is category:
            # an explicit category that matches nothing is a timely tag
            return ReportType.TIMELY
    return ReportType.TIMELY


@dataclass(frozen=True)
class Disclosure:
    """One normalized timely-disclosure record."""

    company_id: str
    company_name: str
    disclosed_at: dt.datetime
    title: str
    body: str
    report_type: ReportType

    def __post_init__(self) -> None:
        if not self.title:
            raise ContractViolation("disclosure title must be non-empty")
        if self.disclosed_at.tzinfo is None:
            raise ContractViolation("disclosed_at must be timezone-aware")
        if not isinstance(self.report_type, ReportType):
            raise ContractViolation(f"bad report_type: {self.report_type!r}")

    def to_record(self) -> dict:
        return {
            "company_id": self.company_id,
            "company_name": self.company_name,
            "disclosed_at": self.disclosed_at.isoformat(),
            "title": self.title,
            "body": self.body,
            "report_type": self.report_type.value,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Disclosure":
        return cls(
            company_id=rec["company_id"],
            company_name=rec.get("company_name", rec["company_id"]),
            disclosed_at=dt.datetime.fromisoformat(rec["disclosed_at"]),
            title=rec["title"],
            body=rec.get("body", ""),
            report_type=ReportType(rec.get("report_type", "timely")),
        )


@dataclass(frozen=True)
class EntryError:
    """A malformed feed entry, reported instead of silently dropped."""

    index: int
    reason: str

    def __str__(self) -> str:
        return f"entry {self.index}: {self.reason}"


@dataclass
class FeedParseResult:
    records: list[Disclosure] = field(default_factory=list)
    errors: list[EntryError] = field(default_factory=list)

    @property
    def entry_count(self) -> int:
        return len(self.records) + len(self.errors)


class FeedFormatError(ValueError):
    """The document as a whole is unreadable in the declared format."""


def _parse_kind_jsonl(
    raw: bytes,
    zone: ZoneInfo,
    keywords: Sequence[tuple[str, ReportType]],
) -> FeedParseResult:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FeedFormatError(f"feed is not valid UTF-8: {exc}") from exc

    result = FeedParseResult()
    index = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        index += 1
        entry_index = index
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            result.errors.append(EntryError(entry_index, f"line {line_no}: invalid JSON ({exc.msg})"))
            continue
        if not isinstance(obj, dict):
            result.errors.append(EntryError(entry_index, f"line {line_no}: entry is not an object"))
            continue
        missing = [k for k in ("company_id", "date", "title") if not obj.get(k)]
        if missing:
            result.errors.append(EntryError(entry_index, f"line {line_no}: missing {', '.join(missing)}"))
            continue
        try:
            date = dt.date.fromisoformat(str(obj["date"]))
            hh, mm = str(obj.get("time") or "00:00").split(":")
            disclosed_at = dt.datetime(date.year, date.month, date.day, int(hh), int(mm), tzinfo=zone)
        except (ValueError, TypeError) as exc:
            result.errors.append(EntryError(entry_index, f"line {line_no}: bad date/time ({exc})"))
            continue
        result.records.append(
            Disclosure(
                company_id=str(obj["company_id"]),
                company_name=str(obj.get("company_name") or obj["company_id"]),
                disclosed_at=disclosed_at,
                title=str(obj["title"]),
                body=str(obj.get("body") or ""),
                report_type=classify_report_type(str(obj.get("category") or ""), str(obj["title"]), keywords),
            )
        )
    return result


_PARSERS: dict[str, Callable[[bytes, ZoneInfo, Sequence[tuple[str, ReportType]]], FeedParseResult]] = {
    "kind-jsonl": _parse_kind_jsonl,
}


def parse_feed(
    raw: bytes,
    fmt: str = "kind-jsonl",
    *,
    zone: str = DEFAULT_ZONE,
    keywords: Sequence[tuple[str, ReportType]] = DEFAULT_CATEGORY_KEYWORDS,
) -> FeedParseResult:
    """Parse a raw feed document into disclosures plus per-entry errors.

    Unreadable documents (unknown format, bad encoding) raise
    FeedFormatError; malformed entries land in ``result.errors`` with their
    entry index so that record count + error count equals the entry count.
    """
    try:
        parser = _PARSERS[fmt]
    except KeyError:
        raise FeedFormatError(f"unknown feed format: {fmt!r}") from None
    return parser(raw, ZoneInfo(zone), keywords)


def filter_timely(items: Sequence[Disclosure]) -> list[Disclosure]:
    """Keep only timely disclosures, preserving relative order."""
    return [d for d in items if d.report_type is ReportType.TIMELY]


def estimate_tokens(text: str) -> int:
    """Cheap monotone token estimate (4 characters per token, rounded up).

    Used for corpus statistics and context-budget warnings only; never as a
    filtering criterion.
    """
    return (len(text) + 3) // 4
