"""Annotation state: assignments, durable submission log, export.

Every rater in the config is assigned the full task list in dossier-store
order. Submissions go to an append-only log (flushed and fsynced before the
caller sees an acknowledgment) and state is a pure fold over that log, so a
restarted service replays to exactly where it left off. Resubmission
overwrites the effective score; the log keeps every entry as the audit
trail.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import threading
from dataclasses import dataclass, field
from typing import Sequence

from ..dossier import MonthlyDossier
from ..errors import ContractViolation
from ..evaluation import HumanAssessment
from ..metrics import cohens_kappa, concordance_rate

TaskKey = tuple[str, str]  # (company_id, month)


class UnknownRaterError(LookupError):
    pass


class UnassignedTaskError(PermissionError):
    pass


class IncompleteCoverageError(Exception):
    """Export was asked for before every task had the required raters."""

    def __init__(self, missing: Sequence[tuple[str, TaskKey]]):
        self.missing = sorted(missing)
        preview = ", ".join(f"{r}:{c}/{m}" for r, (c, m) in self.missing[:5])
        more = "" if len(self.missing) <= 5 else f" (+{len(self.missing) - 5} more)"
        super().__init__(f"{len(self.missing)} missing submissions: {preview}{more}")


@dataclass(frozen=True)
class RatingSubmission:
    rater_id: str
    company_id: str
    month: str
    score: int
    submitted_at: dt.datetime
    idempotency_token: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.score, int) or isinstance(self.score, bool) or not 1 <= self.score <= 5:
            raise ContractViolation(f"score must be an integer in 1..5, got {self.score!r}")


@dataclass
class RaterSession:
    rater_id: str
    assigned: list[TaskKey]
    completed: set[TaskKey] = field(default_factory=set)
    started_at: dt.datetime | None = None

    @property
    def progress(self) -> tuple[int, int]:
        return len(self.completed), len(self.assigned)


@dataclass
class SubmitAck:
    completed: int
    total: int
    resubmission: bool
    duplicate: bool = False  # idempotent replay of the same attempt


class AnnotationStore:
    """Task assignments plus the durable submission log."""

    def __init__(self, dossiers: Sequence[MonthlyDossier], rater_ids: Sequence[str], log_path):
        if len(set(rater_ids)) != len(rater_ids):
            raise ContractViolation("duplicate rater ids")
        seen: set[TaskKey] = set()
        self.tasks: list[TaskKey] = []
        self.dossiers: dict[TaskKey, MonthlyDossier] = {}
        for d in dossiers:
            key = (d.company_id, d.month)
            if key in seen:
                raise ContractViolation(f"duplicate dossier for {key}")
            seen.add(key)
            self.tasks.append(key)
            self.dossiers[key] = d
        self.rater_ids = list(rater_ids)
        self.log_path = str(log_path)
        self._lock = threading.Lock()
        self._sessions: dict[str, RaterSession] = {
            r: RaterSession(rater_id=r, assigned=list(self.tasks)) for r in rater_ids
        }
        # effective score per (rater, task), last write wins
        self._scores: dict[tuple[str, TaskKey], int] = {}
        self._last_token: dict[tuple[str, TaskKey], str | None] = {}
        self._audit_counts: dict[tuple[str, TaskKey], int] = {}
        self._replay()

    def _replay(self) -> None:
        if not os.path.exists(self.log_path):
            return
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                sub = RatingSubmission(
                    rater_id=rec["rater_id"],
                    company_id=rec["company_id"],
                    month=rec["month"],
                    score=int(rec["score"]),
                    submitted_at=dt.datetime.fromisoformat(rec["submitted_at"]),
                    idempotency_token=rec.get("idempotency_token"),
                )
                self._apply(sub)

    def _apply(self, sub: RatingSubmission) -> None:
        key = (sub.rater_id, (sub.company_id, sub.month))
        self._scores[key] = sub.score
        self._last_token[key] = sub.idempotency_token
        self._audit_counts[key] = self._audit_counts.get(key, 0) + 1
        session = self._sessions[sub.rater_id]
        session.completed.add((sub.company_id, sub.month))
        if session.started_at is None:
            session.started_at = sub.submitted_at

    def _append_durably(self, sub: RatingSubmission) -> None:
        rec = {
            "rater_id": sub.rater_id,
            "company_id": sub.company_id,
            "month": sub.month,
            "score": sub.score,
            "submitted_at": sub.submitted_at.isoformat(),
            "idempotency_token": sub.idempotency_token,
        }
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def session(self, rater_id: str) -> RaterSession:
        try:
            return self._sessions[rater_id]
        except KeyError:
            raise UnknownRaterError(rater_id) from None

    def next_task(self, rater_id: str) -> MonthlyDossier | None:
        """First assigned-but-uncompleted dossier in assignment order."""
        with self._lock:
            session = self.session(rater_id)
            for key in session.assigned:
                if key not in session.completed:
                    return self.dossiers[key]
            return None

    def progress(self, rater_id: str) -> tuple[int, int]:
        with self._lock:
            return self.session(rater_id).progress

    def submit(self, sub: RatingSubmission) -> SubmitAck:
        """Persist one submission durably, then acknowledge with progress."""
        with self._lock:
            session = self.session(sub.rater_id)
            key = (sub.company_id, sub.month)
            if key not in self.dossiers:
                raise UnassignedTaskError(f"unknown task {key}")
            store_key = (sub.rater_id, key)
            if (
                sub.idempotency_token is not None
                and self._last_token.get(store_key) == sub.idempotency_token
            ):
                done, total = session.progress
                return SubmitAck(completed=done, total=total, resubmission=False, duplicate=True)
            resubmission = store_key in self._scores
            self._append_durably(sub)
            self._apply(sub)
            done, total = session.progress
            return SubmitAck(completed=done, total=total, resubmission=resubmission)

    def audit_entries(self, rater_id: str, company_id: str, month: str) -> int:
        with self._lock:
            return self._audit_counts.get((rater_id, (company_id, month)), 0)

    def export_assessments(self, required_raters: int = 2):
        """HumanAssessments plus inter-rater kappa and simple agreement.

        Requires every task completed by exactly ``required_raters`` raters
        (the consensus fold is defined for two); otherwise raises with the
        full list of missing (rater, task) pairs.
        """
        with self._lock:
            if len(self.rater_ids) != required_raters:
                raise ContractViolation(
                    f"export needs exactly {required_raters} configured raters, have {len(self.rater_ids)}"
                )
            missing = [
                (rater, task)
                for rater in self.rater_ids
                for task in self.tasks
                if (rater, task) not in self._scores
            ]
            if missing:
                raise IncompleteCoverageError(missing)
            r1, r2 = sorted(self.rater_ids)
            v1 = [self._scores[(r1, task)] for task in self.tasks]
            v2 = [self._scores[(r2, task)] for task in self.tasks]
            assessments = [
                HumanAssessment.from_experts(company, month, e1, e2)
                for (company, month), e1, e2 in zip(self.tasks, v1, v2)
            ]
            kappa = cohens_kappa(v1, v2) if self.tasks else None
            agreement = concordance_rate(v1, v2) if self.tasks else None
            return assessments, kappa, agreement
