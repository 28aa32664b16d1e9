"""Company-month dossiers.

Groups one-sentence disclosure summaries into per-company calendar-month
buckets, keeps at most the 15 most recent entries per bucket, and renders the
date/time/details prompt payload.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import ContractViolation

RECENCY_CAP = 15


def month_of(ts: dt.datetime) -> str:
    return f"{ts.year:04d}-{ts.month:02d}"


@dataclass(frozen=True)
class DisclosureSummary:
    """A dated single-sentence English summary of one disclosure."""

    company_id: str
    disclosed_at: dt.datetime
    title: str
    summary: str

    def __post_init__(self) -> None:
        if not self.summary:
            raise ContractViolation("summary must be non-empty")
        if self.disclosed_at.tzinfo is None:
            raise ContractViolation("disclosed_at must be timezone-aware")

    def to_record(self) -> dict:
        return {
            "company_id": self.company_id,
            "disclosed_at": self.disclosed_at.isoformat(),
            "title": self.title,
            "summary": self.summary,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "DisclosureSummary":
        return cls(
            company_id=rec["company_id"],
            disclosed_at=dt.datetime.fromisoformat(rec["disclosed_at"]),
            title=rec.get("title", ""),
            summary=rec["summary"],
        )


@dataclass(frozen=True)
class MonthlyDossier:
    """1..15 chronologically ordered summaries for one company-month."""

    company_id: str
    month: str
    entries: tuple[DisclosureSummary, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ContractViolation("dossier needs at least one entry")
        if len(self.entries) > RECENCY_CAP:
            raise ContractViolation(f"dossier holds at most {RECENCY_CAP} entries, got {len(self.entries)}")
        for a, b in zip(self.entries, self.entries[1:]):
            if a.disclosed_at > b.disclosed_at:
                raise ContractViolation("dossier entries must be nondecreasing by disclosed_at")
        for e in self.entries:
            if month_of(e.disclosed_at) != self.month:
                raise ContractViolation(
                    f"entry dated {e.disclosed_at.date()} falls outside month {self.month}"
                )
            if e.company_id != self.company_id:
                raise ContractViolation("entry belongs to a different company")

    def to_record(self) -> dict:
        return {
            "company_id": self.company_id,
            "month": self.month,
            "entries": [
                {"disclosed_at": e.disclosed_at.isoformat(), "title": e.title, "summary": e.summary}
                for e in self.entries
            ],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "MonthlyDossier":
        entries = tuple(
            DisclosureSummary(
                company_id=rec["company_id"],
                disclosed_at=dt.datetime.fromisoformat(e["disclosed_at"]),
                title=e.get("title", ""),
                summary=e["summary"],
            )
            for e in rec["entries"]
        )
        return cls(company_id=rec["company_id"], month=rec["month"], entries=entries)


def group_by_company_month(
    items: Iterable[DisclosureSummary],
) -> dict[tuple[str, str], list[DisclosureSummary]]:
    """Bucket summaries by (company, calendar month), each bucket ascending.

    The sort is stable, so entries sharing a timestamp keep their input
    order; later input position counts as more recent at the cap boundary.
    """
    buckets: dict[tuple[str, str], list[DisclosureSummary]] = {}
    for item in items:
        buckets.setdefault((item.company_id, month_of(item.disclosed_at)), []).append(item)
    for bucket in buckets.values():
        bucket.sort(key=lambda s: s.disclosed_at)
    return buckets


def cap_most_recent(
    entries: Sequence[DisclosureSummary], limit: int = RECENCY_CAP
) -> list[DisclosureSummary]:
    """Keep the most recent ``limit`` entries (the suffix) of a sorted list."""
    if limit < 1:
        raise ContractViolation("limit must be positive")
    for a, b in zip(entries, entries[1:]):
        if a.disclosed_at > b.disclosed_at:
            raise ContractViolation("cap_most_recent requires entries sorted ascending by disclosed_at")
    return list(entries[-limit:]) if entries else []


def build_dossier(
    company_id: str, month: str, entries: Sequence[DisclosureSummary]
) -> MonthlyDossier:
    """Validate and assemble one company-month dossier.

    Empty months carry no dossier: an empty ``entries`` raises EmptyMonth,
    which pipeline callers treat as "skip this month".
    """
    if not entries:
        raise EmptyMonth(company_id, month)
    return MonthlyDossier(company_id=company_id, month=month, entries=tuple(entries))


class EmptyMonth(Exception):
    """Signal that a (company, month) slot has no entries and is skipped."""

    def __init__(self, company_id: str, month: str):
        super().__init__(f"no entries for {company_id} {month}")
        self.company_id = company_id
        self.month = month


def render_dossier(dossier: MonthlyDossier) -> str:
    """Render the prompt payload: one date/time/details paragraph per entry."""
    parts = [f"Disclosures for {dossier.month}:"]
    for e in dossier.entries:
        details = f"{e.title}: {e.summary}" if e.title else e.summary
        parts.append(
            f"Date: {e.disclosed_at:%Y-%m-%d}\nTime: {e.disclosed_at:%H:%M}\nDetails: {details}"
        )
    return "\n\n".join(parts)


def iter_months(first: str, last: str) -> list[str]:
    """All calendar months from ``first`` to ``last`` inclusive (YYYY-MM)."""
    try:
        fy, fm = (int(p) for p in first.split("-"))
        ly, lm = (int(p) for p in last.split("-"))
    except ValueError:
        raise ContractViolation(f"bad month range {first!r}..{last!r}") from None
    if (fy, fm) > (ly, lm):
        raise ContractViolation("month range is reversed")
    months = []
    y, m = fy, fm
    while (y, m) <= (ly, lm):
        months.append(f"{y:04d}-{m:02d}")
        m += 1
        if m == 13:
            y, m = y + 1, 1
    return months


def build_all_dossiers(
    summaries: Iterable[DisclosureSummary],
    *,
    cap: int = RECENCY_CAP,
    expected_months: Sequence[str] | None = None,
) -> tuple[list[MonthlyDossier], list[tuple[str, str]]]:
    """Group, cap, and build dossiers for every populated company-month.

    When ``expected_months`` is given, every (company, month) slot in
    companies-seen x expected_months with no entries is reported as skipped.
    Both lists come back sorted for deterministic downstream output.
    """
    buckets = group_by_company_month(summaries)
    dossiers = [
        build_dossier(company, month, cap_most_recent(bucket, cap))
        for (company, month), bucket in sorted(buckets.items())
    ]
    skipped: list[tuple[str, str]] = []
    if expected_months is not None:
        companies = sorted({c for c, _ in buckets})
        populated = set(buckets)
        skipped = [
            (c, m) for c in companies for m in expected_months if (c, m) not in populated
        ]
    return dossiers, skipped


def write_dossiers(path, dossiers: Iterable[MonthlyDossier]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in dossiers:
            fh.write(json.dumps(d.to_record(), sort_keys=True) + "\n")


def read_dossiers(path) -> list[MonthlyDossier]:
    with open(path, encoding="utf-8") as fh:
        return [MonthlyDossier.from_record(json.loads(line)) for line in fh if line.strip()]


def read_summaries(path) -> list[DisclosureSummary]:
    with open(path, encoding="utf-8") as fh:
        return [DisclosureSummary.from_record(json.loads(line)) for line in fh if line.strip()]


def write_summaries(path, summaries: Iterable[DisclosureSummary]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in summaries:
            fh.write(json.dumps(s.to_record(), sort_keys=True) + "\n")


def write_skipped(path, skipped: Sequence[tuple[str, str]]) -> None:
    payload: Mapping = {
        "skipped_months": [{"company_id": c, "month": m} for c, m in skipped]
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_skipped(path) -> list[tuple[str, str]]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return [(row["company_id"], row["month"]) for row in payload["skipped_months"]]
