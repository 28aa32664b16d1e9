"""Experiment orchestration and report rendering.

Joins model ratings with human consensus on (company, month), applies each
adjustment condition, and produces per-condition summaries, a per-company
table at one chosen condition, and score-distribution histograms. All
iteration orders are pinned so identical inputs render byte-identical
reports; display rounding is half-up to two decimals and happens only at
render time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping, Sequence

from .adjust import Condition, apply_condition
from .errors import ContractViolation
from .metrics import AgreementSummary, aggregate_human, summarize_agreement
from .rating import SentimentRating


@dataclass(frozen=True)
class HumanAssessment:
    """Two expert scores and their floored consensus for one company-month."""

    company_id: str
    month: str
    expert_scores: tuple[int, int]
    consensus: int

    def __post_init__(self) -> None:
        if len(self.expert_scores) != 2:
            raise ContractViolation(f"expected exactly 2 expert scores, got {len(self.expert_scores)}")
        expected = aggregate_human(*self.expert_scores)
        if self.consensus != expected:
            raise ContractViolation(
                f"consensus {self.consensus} not recomputable from experts {self.expert_scores} (want {expected})"
            )

    @classmethod
    def from_experts(cls, company_id: str, month: str, e1: int, e2: int) -> "HumanAssessment":
        return cls(company_id, month, (e1, e2), aggregate_human(e1, e2))

    def to_record(self) -> dict:
        return {
            "company_id": self.company_id,
            "month": self.month,
            "expert_scores": list(self.expert_scores),
            "consensus": self.consensus,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "HumanAssessment":
        return cls(
            company_id=rec["company_id"],
            month=rec["month"],
            expert_scores=tuple(int(s) for s in rec["expert_scores"]),
            consensus=int(rec["consensus"]),
        )


@dataclass
class EvaluationReport:
    per_condition: dict[tuple[Condition, str], AgreementSummary]
    per_company: dict[str, AgreementSummary]
    distributions: dict[str, dict[int, int]]
    skipped_months: list[tuple[str, str]]
    missing_ratings: list[tuple[str, str, str]]  # (model, company, month)
    per_company_condition: Condition
    per_company_model: str | None


class JoinError(ValueError):
    """Ratings and assessments do not line up on (company, month)."""

    def __init__(self, message: str, keys: Sequence = ()):
        detail = f"{message}: {sorted(keys)}" if keys else message
        super().__init__(detail)
        self.keys = sorted(keys)


def run_evaluation(
    ratings: Sequence[SentimentRating],
    humans: Sequence[HumanAssessment],
    conditions: Iterable[Condition] = tuple(Condition),
    per_company_condition: Condition = Condition.C2,
    *,
    per_company_model: str | None = None,
    skipped_months: Sequence[tuple[str, str]] = (),
) -> EvaluationReport:
    """Pair every rating with its human consensus and summarize agreement.

    Ratings must be unadjusted (no condition tag); conditions are applied
    here so every condition sees the same n. A human assessment without a
    rating for some model is excluded from that model's pairs and listed in
    the report; a rating without a human assessment is a hard join error,
    as are duplicates on either side.
    """
    tagged = [r for r in ratings if r.condition is not None]
    if tagged:
        raise ContractViolation(
            "run_evaluation expects unadjusted ratings; found condition tags "
            f"on {len(tagged)} records (conditions are applied internally)"
        )

    human_by_key: dict[tuple[str, str], HumanAssessment] = {}
    dup_humans = []
    for h in humans:
        key = (h.company_id, h.month)
        if key in human_by_key:
            dup_humans.append(key)
        human_by_key[key] = h
    if dup_humans:
        raise JoinError("duplicate human assessments", dup_humans)

    by_model: dict[str, dict[tuple[str, str], SentimentRating]] = {}
    dup_ratings = []
    unmatched = []
    for r in ratings:
        key = (r.company_id, r.month)
        slot = by_model.setdefault(r.model_id, {})
        if key in slot:
            dup_ratings.append((r.model_id, *key))
        slot[key] = r
        if key not in human_by_key:
            unmatched.append((r.model_id, *key))
    if dup_ratings:
        raise JoinError("duplicate ratings for (model, company, month)", dup_ratings)
    if unmatched:
        raise JoinError("ratings with no matching human assessment", unmatched)

    models = sorted(by_model)
    conditions = sorted(set(conditions), key=lambda c: c.value)

    missing: list[tuple[str, str, str]] = []
    joined: dict[str, list[tuple[tuple[str, str], int, int]]] = {}
    for model in models:
        slot = by_model[model]
        pairs = []
        for key in sorted(human_by_key):
            if key in slot:
                pairs.append((key, human_by_key[key].consensus, slot[key].score))
            else:
                missing.append((model, *key))
        joined[model] = pairs

    per_condition: dict[tuple[Condition, str], AgreementSummary] = {}
    distributions: dict[str, dict[int, int]] = {}
    distributions["human"] = _histogram(h.consensus for h in humans)
    for cond in conditions:
        for model in models:
            pairs = joined[model]
            if not pairs:
                continue
            hs = [h for _, h, _ in pairs]
            ms = [apply_condition(m, cond) for _, _, m in pairs]
            per_condition[(cond, model)] = summarize_agreement(hs, ms)
            distributions[f"{model}:{cond.value}"] = _histogram(ms)

    if per_company_model is None:
        if len(models) == 1:
            per_company_model = models[0]
        elif len(models) > 1:
            raise ContractViolation(
                f"multiple models present ({models}); pick one for the per-company table"
            )
    elif per_company_model not in by_model and models:
        raise ContractViolation(f"per_company_model {per_company_model!r} not in ratings")

    per_company: dict[str, AgreementSummary] = {}
    if per_company_model is not None:
        by_company: dict[str, list[tuple[int, int]]] = {}
        for (company, _), h, m in joined[per_company_model]:
            by_company.setdefault(company, []).append((h, apply_condition(m, per_company_condition)))
        for company in sorted(by_company):
            hs = [h for h, _ in by_company[company]]
            ms = [m for _, m in by_company[company]]
            per_company[company] = summarize_agreement(hs, ms)

    return EvaluationReport(
        per_condition=per_condition,
        per_company=per_company,
        distributions=distributions,
        skipped_months=sorted(skipped_months),
        missing_ratings=sorted(missing),
        per_company_condition=per_company_condition,
        per_company_model=per_company_model,
    )


def _histogram(values: Iterable[int]) -> dict[int, int]:
    counts = {s: 0 for s in range(1, 6)}
    for v in values:
        counts[v] += 1
    return counts


def _fmt(value: float | None) -> str:
    if value is None:
        return "NaN"
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _grid(header: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in [header, *rows]]
    return "\n".join(lines)


def render_condition_table(report: EvaluationReport) -> str:
    """Condition x model grid with the three statistics, 2-decimal display."""
    header = ["Condition", "Model", "Concordance", "Spearman", "Kendall", "n"]
    rows = [
        [cond.value, model, _fmt(s.concordance), _fmt(s.spearman), _fmt(s.kendall), str(s.n)]
        for (cond, model), s in sorted(report.per_condition.items(), key=lambda kv: (kv[0][0].value, kv[0][1]))
    ]
    sections = [_grid(header, rows)]
    if report.skipped_months:
        lines = [f"  {c} {m}" for c, m in report.skipped_months]
        sections.append("Skipped months (no disclosures):\n" + "\n".join(lines))
    if report.missing_ratings:
        lines = [f"  {model} {c} {m}" for model, c, m in report.missing_ratings]
        sections.append("Missing ratings (excluded from all conditions):\n" + "\n".join(lines))
    return "\n\n".join(sections) + "\n"


def render_company_table(report: EvaluationReport) -> str:
    """Per-company grid at the chosen condition; undefined renders as NaN."""
    header = ["Company", "Concordance", "Spearman", "Kendall", "n"]
    rows = [
        [company, _fmt(s.concordance), _fmt(s.spearman), _fmt(s.kendall), str(s.n)]
        for company, s in sorted(report.per_company.items())
    ]
    title = f"Per-company results ({report.per_company_condition.value}"
    title += f", {report.per_company_model})" if report.per_company_model else ")"
    return title + "\n" + _grid(header, rows) + "\n"


def render_structured(report: EvaluationReport) -> str:
    """Line-delimited records carrying full-precision values."""
    rows: list[Mapping] = []
    for (cond, model), s in sorted(report.per_condition.items(), key=lambda kv: (kv[0][0].value, kv[0][1])):
        rows.append(
            {
                "kind": "condition_summary",
                "condition": cond.value,
                "model": model,
                "concordance": s.concordance,
                "spearman": s.spearman,
                "kendall": s.kendall,
                "n": s.n,
            }
        )
    for company, s in sorted(report.per_company.items()):
        rows.append(
            {
                "kind": "company_summary",
                "company_id": company,
                "condition": report.per_company_condition.value,
                "model": report.per_company_model,
                "concordance": s.concordance,
                "spearman": s.spearman,
                "kendall": s.kendall,
                "n": s.n,
            }
        )
    rows.extend(
        {"kind": "skipped_month", "company_id": c, "month": m} for c, m in report.skipped_months
    )
    rows.extend(
        {"kind": "missing_rating", "model": model, "company_id": c, "month": m}
        for model, c, m in report.missing_ratings
    )
    return "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)


def render_histograms(report: EvaluationReport) -> dict[str, str]:
    """One line-delimited file per score source, for any plotting tool."""
    files = {}
    for source in sorted(report.distributions):
        counts = report.distributions[source]
        body = "".join(
            json.dumps({"score": score, "count": counts[score]}) + "\n" for score in range(1, 6)
        )
        files[_safe_name(source) + ".records"] = body
    return files


def _safe_name(source: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in source)


def render_report(report: EvaluationReport, fmt: str):
    """Render one of the three report shapes.

    "table-text" and "structured-records" return a single document string;
    "histogram-data" returns {filename: content}.
    """
    if fmt == "table-text":
        return render_condition_table(report)
    if fmt == "structured-records":
        return render_structured(report)
    if fmt == "histogram-data":
        return render_histograms(report)
    raise ContractViolation(f"unknown report format {fmt!r}")


def read_humans(path) -> list[HumanAssessment]:
    with open(path, encoding="utf-8") as fh:
        return [HumanAssessment.from_record(json.loads(line)) for line in fh if line.strip()]


def write_humans(path, humans: Iterable[HumanAssessment]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for h in humans:
            fh.write(json.dumps(h.to_record(), sort_keys=True) + "\n")
