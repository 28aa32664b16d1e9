"""HTTP API for human raters.

GET /tasks/next?rater=…   next dossier + rubric + progress, or done
POST /ratings             submit one score
GET /progress?rater=…     completed/total
GET /export               consensus assessments (admin token required)

Every rater authenticates with their own bearer token and can only see
their own queue and progress; /export needs the separate admin token.
Error bodies always carry a machine-readable ``error.code``.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..errors import ContractViolation
from ..rating import Rubric, load_rubric
from .store import (
    AnnotationStore,
    IncompleteCoverageError,
    RatingSubmission,
    UnassignedTaskError,
    UnknownRaterError,
)


@dataclass(frozen=True)
class RaterAuth:
    tokens: dict[str, str]  # rater_id -> bearer token
    admin_token: str
    required_raters: int = 2

    @classmethod
    def from_config_file(cls, path) -> "RaterAuth":
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
        tokens = {rater: entry["token"] for rater, entry in cfg["raters"].items()}
        return cls(
            tokens=tokens,
            admin_token=cfg["admin_token"],
            required_raters=int(cfg.get("required_raters", 2)),
        )


class ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str, **extra):
        super().__init__(detail)
        self.status = status
        self.body = {"error": {"code": code, "detail": detail, **extra}}


def _bearer(authorization: str | None) -> str:
    if not authorization or not authorization.startswith("Bearer "):
        raise ApiError(401, "unauthenticated", "missing bearer token")
    return authorization.removeprefix("Bearer ")


class SubmissionBody(BaseModel):
    rater_id: str
    company_id: str
    month: str
    score: int = Field(description="1..5")
    idempotency_token: str | None = None


def create_app(store: AnnotationStore, auth: RaterAuth, rubric: Rubric | None = None) -> FastAPI:
    rubric = rubric or load_rubric()
    app = FastAPI(title="disclosure annotation service")

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.body)

    def authenticate_rater(rater: str, token: str) -> None:
        if rater not in auth.tokens:
            raise ApiError(404, "not_found", f"unknown rater {rater!r}")
        if auth.tokens[rater] != token:
            raise ApiError(403, "authorization", "token does not belong to this rater")

    def task_payload(rater: str) -> dict:
        dossier = store.next_task(rater)
        done, total = store.progress(rater)
        progress = {"completed": done, "total": total}
        if dossier is None:
            return {"done": True, "progress": progress}
        rows = [
            {
                "date": e.disclosed_at.strftime("%Y-%m-%d"),
                "time": e.disclosed_at.strftime("%H:%M"),
                "details": f"{e.title}: {e.summary}" if e.title else e.summary,
            }
            for e in dossier.entries
        ]
        return {
            "done": False,
            "task": {"company_id": dossier.company_id, "month": dossier.month, "rows": rows},
            "rubric": {
                "preamble": rubric.preamble,
                "criteria": {str(s): rubric.criteria[s] for s in range(1, 6)},
            },
            "progress": progress,
        }

    @app.get("/tasks/next")
    def next_task(rater: str = Query(...), authorization: str | None = Header(default=None)):
        token = _bearer(authorization)
        authenticate_rater(rater, token)
        return task_payload(rater)

    @app.get("/progress")
    def progress(rater: str = Query(...), authorization: str | None = Header(default=None)):
        token = _bearer(authorization)
        authenticate_rater(rater, token)
        done, total = store.progress(rater)
        return {"completed": done, "total": total}

    @app.post("/ratings")
    def submit(body: SubmissionBody, authorization: str | None = Header(default=None)):
        token = _bearer(authorization)
        authenticate_rater(body.rater_id, token)
        try:
            sub = RatingSubmission(
                rater_id=body.rater_id,
                company_id=body.company_id,
                month=body.month,
                score=body.score,
                submitted_at=dt.datetime.now(dt.timezone.utc),
                idempotency_token=body.idempotency_token,
            )
        except ContractViolation as exc:
            raise ApiError(422, "validation", str(exc)) from exc
        try:
            ack = store.submit(sub)
        except UnknownRaterError as exc:
            raise ApiError(404, "not_found", f"unknown rater {exc}") from exc
        except UnassignedTaskError as exc:
            raise ApiError(403, "authorization", str(exc)) from exc
        return {
            "ok": True,
            "progress": {"completed": ack.completed, "total": ack.total},
            "resubmission": ack.resubmission,
            "duplicate": ack.duplicate,
        }

    @app.get("/export")
    def export(authorization: str | None = Header(default=None)):
        token = _bearer(authorization)
        if token != auth.admin_token:
            raise ApiError(403, "authorization", "export requires the admin token")
        try:
            assessments, kappa, agreement = store.export_assessments(auth.required_raters)
        except IncompleteCoverageError as exc:
            raise ApiError(
                409,
                "incomplete",
                str(exc),
                missing=[
                    {"rater_id": r, "company_id": c, "month": m} for r, (c, m) in exc.missing
                ],
            ) from exc
        except ContractViolation as exc:
            raise ApiError(409, "incomplete", str(exc)) from exc
        return {
            "assessments": [a.to_record() for a in assessments],
            "inter_rater": {"kappa": kappa, "agreement": agreement},
        }

    return app
