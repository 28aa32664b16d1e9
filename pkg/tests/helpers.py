"""Shared constructors for test data."""

from __future__ import annotations

import datetime as dt
import pathlib
from zoneinfo import ZoneInfo

from kosent.dossier import DisclosureSummary, MonthlyDossier, month_of
from kosent.feed import Disclosure, ReportType
from kosent.gateway import Gateway, MockBackend, ModelConfig, RetryPolicy

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
KST = ZoneInfo("Asia/Seoul")


def kst(text: str) -> dt.datetime:
    """'2023-06-13 16:30' -> aware datetime in the feed's default zone."""
    return dt.datetime.strptime(text, "%Y-%m-%d %H:%M").replace(tzinfo=KST)


def make_summary(
    company: str = "c01",
    when: str = "2023-06-05 10:00",
    title: str = "Filing",
    text: str = "One synthetic sentence.",
) -> DisclosureSummary:
    return DisclosureSummary(company_id=company, disclosed_at=kst(when), title=title, summary=text)


def make_dossier(
    company: str = "c01",
    whens: tuple[str, ...] = ("2023-06-05 10:00",),
    texts: tuple[str, ...] | None = None,
) -> MonthlyDossier:
    entries = tuple(
        make_summary(company, when, text=(texts[i] if texts else f"Synthetic event {i}."))
        for i, when in enumerate(whens)
    )
    return MonthlyDossier(
        company_id=company, month=month_of(entries[0].disclosed_at), entries=entries
    )


def make_disclosure(
    company: str = "c01",
    when: str = "2023-06-05 10:00",
    title: str = "Filing",
    body: str = "Something happened. More detail follows.",
    report_type: ReportType = ReportType.TIMELY,
) -> Disclosure:
    return Disclosure(
        company_id=company,
        company_name=company.upper(),
        disclosed_at=kst(when),
        title=title,
        body=body,
        report_type=report_type,
    )


def mock_gateway(
    model_id: str = "mock-rater",
    rules=(),
    faults=(),
    *,
    max_retries: int = 3,
    limiter=None,
    **config_kw,
) -> tuple[Gateway, MockBackend]:
    """Gateway over a MockBackend with no real sleeping."""
    backend = MockBackend(rules=list(rules), faults=list(faults))
    config = ModelConfig(model_id=model_id, **config_kw)
    gateway = Gateway(
        backend,
        config,
        retry=RetryPolicy(max_retries=max_retries, initial_delay=0.0),
        limiter=limiter,
        sleep=lambda _s: None,
    )
    return gateway, backend
