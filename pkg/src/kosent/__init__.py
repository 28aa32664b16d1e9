"""Disclosure sentiment monitoring: feed ingestion, monthly dossiers,
rubric-based 1-5 ratings through a model gateway, bias-adjustment
conditions, and agreement statistics against human assessments.
"""

__version__ = "0.1.0"

from .adjust import Condition, apply_condition
from .dossier import DisclosureSummary, EmptyMonth, MonthlyDossier, build_all_dossiers
from .errors import ContractViolation
from .evaluation import EvaluationReport, HumanAssessment, run_evaluation
from .feed import Disclosure, ReportType, filter_timely, parse_feed
from .metrics import (
    aggregate_human,
    cohens_kappa,
    concordance_rate,
    kendall_tau,
    spearman_rho,
    summarize_agreement,
)
from .rating import SentimentRating, parse_rating, rate_dossier, render_rating

__all__ = [
    "Condition",
    "ContractViolation",
    "Disclosure",
    "DisclosureSummary",
    "EmptyMonth",
    "EvaluationReport",
    "HumanAssessment",
    "MonthlyDossier",
    "ReportType",
    "SentimentRating",
    "__version__",
    "aggregate_human",
    "apply_condition",
    "build_all_dossiers",
    "cohens_kappa",
    "concordance_rate",
    "filter_timely",
    "kendall_tau",
    "parse_feed",
    "parse_rating",
    "rate_dossier",
    "render_rating",
    "run_evaluation",
    "spearman_rho",
    "summarize_agreement",
]
