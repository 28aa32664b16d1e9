"""Command-line pipeline: ingest -> summarize -> build-dossiers -> rate ->
adjust -> evaluate, plus the annotation server.

Backend selection and model knobs live in a JSON config file (see
``--config``); credentials are only ever read from the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import dossier as dossier_mod
from .adjust import Condition, apply_condition
from .dossier import build_all_dossiers, iter_months, read_dossiers, read_summaries
from .errors import ContractViolation
from .evaluation import (
    read_humans,
    render_company_table,
    render_condition_table,
    render_histograms,
    render_structured,
    run_evaluation,
)
from .feed import Disclosure, filter_timely, parse_feed
from .gateway import (
    CassetteBackend,
    Gateway,
    GatewayError,
    MockBackend,
    ModelConfig,
    OpenAIChatBackend,
    RetryPolicy,
    TokenBucket,
)
from .rating import RatingFailed, load_rubric, rate_dossier, read_ratings, write_ratings


def load_gateway_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def build_gateway(cfg: dict, model_override: str | None = None) -> Gateway:
    """Assemble backend + retry + limiter from a config mapping."""
    model_id = model_override or cfg.get("model_id")
    if not model_id:
        raise ContractViolation("config needs model_id (or pass --model)")
    config = ModelConfig(
        model_id=model_id,
        temperature=float(cfg.get("temperature", 0.0)),
        max_output_tokens=int(cfg.get("max_output_tokens", 512)),
        request_timeout=float(cfg.get("request_timeout", 30.0)),
        context_budget_tokens=int(cfg.get("context_budget_tokens", 16000)),
    )
    retry = RetryPolicy(
        max_retries=int(cfg.get("max_retries", 3)),
        initial_delay=float(cfg.get("initial_delay", 0.5)),
    )
    kind = cfg.get("backend", "mock")
    if kind == "mock":
        backend = MockBackend()
    elif kind == "cassette":
        mode = cfg.get("cassette_mode", "replay")
        inner = None
        if mode == "record":
            inner = (
                MockBackend()
                if cfg.get("cassette_inner") == "mock"
                else OpenAIChatBackend(
                    cfg.get("api_base", "https://api.openai.com/v1"),
                    api_key_env=cfg.get("api_key_env", "OPENAI_API_KEY"),
                )
            )
        backend = CassetteBackend(cfg["cassette_path"], inner=inner, mode=mode)
    elif kind == "openai":
        backend = OpenAIChatBackend(
            cfg.get("api_base", "https://api.openai.com/v1"),
            api_key_env=cfg.get("api_key_env", "OPENAI_API_KEY"),
        )
    else:
        raise ContractViolation(f"unknown backend {kind!r}")
    rpm = cfg.get("requests_per_minute")
    limiter = TokenBucket(float(rpm)) if rpm else None
    return Gateway(backend, config, retry=retry, limiter=limiter)


def cmd_ingest(args) -> int:
    with open(args.feed, "rb") as fh:
        raw = fh.read()
    result = parse_feed(raw, args.format, zone=args.zone)
    for err in result.errors:
        print(f"ingest: {err}", file=sys.stderr)
    records = result.records if args.keep_periodic else filter_timely(result.records)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for d in records:
            out.write(json.dumps(d.to_record(), sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    dropped = len(result.records) - len(records)
    print(
        f"ingest: {result.entry_count} entries, {len(result.errors)} errors, "
        f"{dropped} periodic dropped, {len(records)} kept",
        file=sys.stderr,
    )
    return 0


def _read_disclosures(path) -> list[Disclosure]:
    with open(path, encoding="utf-8") as fh:
        return [Disclosure.from_record(json.loads(line)) for line in fh if line.strip()]


def cmd_summarize(args) -> int:
    gateway = build_gateway(load_gateway_config(args.config), args.model)
    disclosures = _read_disclosures(args.disclosures)
    summaries = []
    skipped = 0
    for d in disclosures:
        if not d.body:
            print(f"summarize: skipping {d.company_id} {d.disclosed_at:%Y-%m-%d} (empty body)", file=sys.stderr)
            skipped += 1
            continue
        summaries.append(gateway.summarize(d))
    dossier_mod.write_summaries(args.out, summaries)
    print(f"summarize: {len(summaries)} summaries, {skipped} skipped", file=sys.stderr)
    return 0


def cmd_build_dossiers(args) -> int:
    summaries = read_summaries(getattr(args, "from"))
    expected = None
    if args.months:
        try:
            first, last = args.months.split(":")
        except ValueError:
            print(f"build-dossiers: bad --months {args.months!r} (want YYYY-MM:YYYY-MM)", file=sys.stderr)
            return 2
        expected = iter_months(first, last)
    dossiers, skipped = build_all_dossiers(summaries, cap=args.cap, expected_months=expected)
    dossier_mod.write_dossiers(args.out, dossiers)
    if args.skipped_out:
        dossier_mod.write_skipped(args.skipped_out, skipped)
    print(f"build-dossiers: {len(dossiers)} dossiers, {len(skipped)} empty months", file=sys.stderr)
    return 0


def cmd_rate(args) -> int:
    gateway = build_gateway(load_gateway_config(args.config), args.model)
    rubric = load_rubric(args.rubric)
    ratings = []
    failures = 0
    for d in read_dossiers(args.dossiers):
        try:
            ratings.append(rate_dossier(d, rubric, gateway))
        except RatingFailed as exc:
            failures += 1
            print(f"rate: {exc}", file=sys.stderr)
        except GatewayError as exc:
            failures += 1
            print(f"rate: gateway failure for {d.company_id} {d.month}: {exc} (attempts={exc.attempts})", file=sys.stderr)
    write_ratings(args.out, ratings)
    print(f"rate: {len(ratings)} ratings, {failures} failures", file=sys.stderr)
    return 0


def cmd_adjust(args) -> int:
    condition = Condition.parse(args.condition)
    with open(args.out, "w", encoding="utf-8") as out:
        n = 0
        for r in read_ratings(args.ratings):
            if r.condition is not None:
                print(f"adjust: {r.company_id} {r.month} already adjusted ({r.condition})", file=sys.stderr)
                return 2
            rec = r.to_record()
            rec["score"] = apply_condition(r.score, condition)
            rec["condition"] = condition.value
            out.write(json.dumps(rec, sort_keys=True) + "\n")
            n += 1
    print(f"adjust: {n} ratings adjusted under {condition.value}", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    ratings = read_ratings(args.ratings)
    humans = read_humans(args.human)
    conditions = [Condition.parse(tag) for tag in args.conditions.split(",") if tag.strip()]
    skipped = dossier_mod.read_skipped(args.skipped) if args.skipped else []
    report = run_evaluation(
        ratings,
        humans,
        conditions,
        per_company_condition=Condition.parse(args.per_company_condition),
        per_company_model=args.per_company_model,
        skipped_months=skipped,
    )
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(render_condition_table(report))
    with open(os.path.join(args.out, "per_company.txt"), "w", encoding="utf-8") as fh:
        fh.write(render_company_table(report))
    with open(os.path.join(args.out, "report.records"), "w", encoding="utf-8") as fh:
        fh.write(render_structured(report))
    dist_dir = os.path.join(args.out, "distributions")
    os.makedirs(dist_dir, exist_ok=True)
    for name, body in render_histograms(report).items():
        with open(os.path.join(dist_dir, name), "w", encoding="utf-8") as fh:
            fh.write(body)
    print(f"evaluate: wrote report to {args.out}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .annotation import AnnotationStore, RaterAuth, create_app

    auth = RaterAuth.from_config_file(args.raters)
    store = AnnotationStore(read_dossiers(args.tasks), sorted(auth.tokens), args.log)
    app = create_app(store, auth, load_rubric(args.rubric))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kosent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a disclosure feed, keep timely records")
    p.add_argument("--feed", required=True)
    p.add_argument("--out", default=None, help="normalized disclosures path (default stdout)")
    p.add_argument("--format", default="kind-jsonl")
    p.add_argument("--zone", default="Asia/Seoul")
    p.add_argument("--keep-periodic", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("summarize", help="one-sentence English summaries via the gateway")
    p.add_argument("--disclosures", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", required=True, help="gateway config JSON")
    p.add_argument("--model", default=None)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("build-dossiers", help="group summaries into company-month dossiers")
    p.add_argument("--from", required=True, help="summaries path")
    p.add_argument("--out", required=True)
    p.add_argument("--cap", type=int, default=15)
    p.add_argument("--months", default=None, help="expected range YYYY-MM:YYYY-MM for skip tracking")
    p.add_argument("--skipped-out", default=None)
    p.set_defaults(func=cmd_build_dossiers)

    p = sub.add_parser("rate", help="rate each dossier with the rubric")
    p.add_argument("--dossiers", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--rubric", default="v1")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("adjust", help="apply one adjustment condition to a ratings file")
    p.add_argument("--ratings", required=True)
    p.add_argument("--condition", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_adjust)

    p = sub.add_parser("evaluate", help="agreement statistics against human assessments")
    p.add_argument("--ratings", required=True)
    p.add_argument("--human", required=True)
    p.add_argument("--conditions", default="C1,C2,C3,C4")
    p.add_argument("--per-company-condition", default="C2")
    p.add_argument("--per-company-model", default=None)
    p.add_argument("--skipped", default=None, help="skipped-months sidecar from build-dossiers")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--tasks", required=True, help="dossiers path")
    p.add_argument("--raters", required=True, help="raters config JSON")
    p.add_argument("--log", default="submissions.log", help="append-only submission log path")
    p.add_argument("--rubric", default="v1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ContractViolation, FileNotFoundError) as exc:
        print(f"kosent: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
