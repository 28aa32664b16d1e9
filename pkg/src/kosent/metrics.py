"""Inter-rater agreement statistics.

Concordance (exact-match) rate, Spearman's rho with averaged tied ranks,
tie-corrected Kendall tau-b, unweighted Cohen's kappa, and the two-expert
consensus floor-average. Correlations on a 5-point scale routinely hit
degenerate inputs (a constant vector on either side), which come back as
``None`` — an explicit undefined marker, rendered as "NaN" in reports,
never a silent zero.

Rank statistics are computed in exact rational arithmetic and converted to
float at the end, so equal inputs give bit-identical outputs and tests can
compare against brute-force oracles at 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ContractViolation

SCALE_MIN, SCALE_MAX = 1, 5


def _check_lengths(xs: Sequence, ys: Sequence, minimum: int) -> int:
    if len(xs) != len(ys):
        raise ContractViolation(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < minimum:
        raise ContractViolation(f"need at least {minimum} pairs, got {len(xs)}")
    return len(xs)


def _check_score(value: int, name: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not SCALE_MIN <= value <= SCALE_MAX:
        raise ContractViolation(f"{name} must be an integer in {SCALE_MIN}..{SCALE_MAX}, got {value!r}")
    return value


@dataclass(frozen=True)
class PairedScores:
    """Matched (human, model) score pairs on the 1..5 scale."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise ContractViolation("PairedScores needs at least one pair")
        for h, m in self.pairs:
            _check_score(h, "human score")
            _check_score(m, "model score")

    @property
    def humans(self) -> list[int]:
        return [h for h, _ in self.pairs]

    @property
    def models(self) -> list[int]:
        return [m for _, m in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class AgreementSummary:
    """Concordance plus both rank correlations (None = undefined)."""

    concordance: float
    spearman: float | None
    kendall: float | None
    n: int


def aggregate_human(e1: int, e2: int) -> int:
    """Two-expert consensus: the averaged score, fractions rounded down."""
    _check_score(e1, "expert score")
    _check_score(e2, "expert score")
    return (e1 + e2) // 2


def concordance_rate(xs: Sequence, ys: Sequence) -> float:
    """Fraction of positions where both sides match exactly."""
    n = _check_lengths(xs, ys, 1)
    return sum(1 for x, y in zip(xs, ys) if x == y) / n


def average_ranks(values: Sequence) -> list[Fraction]:
    """1-based ranks; tied values share the average of their rank block."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks: list[Fraction] = [Fraction(0)] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = Fraction(i + j + 2, 2)  # average of ranks i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence, ys: Sequence) -> float | None:
    """Pearson correlation of averaged tied ranks; None when a side is constant."""
    _check_lengths(xs, ys, 2)
    rx, ry = average_ranks(xs), average_ranks(ys)
    n = len(rx)
    mean = Fraction(n + 1, 2)  # average-rank vectors always sum to n(n+1)/2
    dx = [r - mean for r in rx]
    dy = [r - mean for r in ry]
    sxx = sum(d * d for d in dx)
    syy = sum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        return None
    sxy = sum(a * b for a, b in zip(dx, dy))
    return float(sxy) / math.sqrt(float(sxx) * float(syy))


def kendall_tau(xs: Sequence, ys: Sequence) -> float | None:
    """Tie-corrected Kendall tau-b; None when a tie factor hits zero."""
    n = _check_lengths(xs, ys, 2)
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            sx = (xs[i] > xs[j]) - (xs[i] < xs[j])
            sy = (ys[i] > ys[j]) - (ys[i] < ys[j])
            prod = sx * sy
            if prod > 0:
                concordant += 1
            elif prod < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    n1 = sum(t * (t - 1) // 2 for t in _tie_counts(xs))
    n2 = sum(t * (t - 1) // 2 for t in _tie_counts(ys))
    if n0 == n1 or n0 == n2:
        return None
    return (concordant - discordant) / math.sqrt((n0 - n1) * (n0 - n2))


def _tie_counts(values: Sequence) -> list[int]:
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return [c for c in counts.values() if c > 1]


def cohens_kappa(xs: Sequence, ys: Sequence) -> float | None:
    """Unweighted Cohen's kappa; None when expected agreement is 1."""
    n = _check_lengths(xs, ys, 1)
    cx: dict = {}
    cy: dict = {}
    agree = 0
    for x, y in zip(xs, ys):
        cx[x] = cx.get(x, 0) + 1
        cy[y] = cy.get(y, 0) + 1
        agree += x == y
    p_o = Fraction(agree, n)
    p_e = Fraction(sum(cx[k] * cy.get(k, 0) for k in cx), n * n)
    if p_e == 1:
        return None
    return float((p_o - p_e) / (1 - p_e))


def summarize_agreement(xs: Sequence, ys: Sequence) -> AgreementSummary:
    """Bundle all three statistics; n < 2 leaves the correlations undefined."""
    n = _check_lengths(xs, ys, 1)
    if n < 2:
        return AgreementSummary(concordance=concordance_rate(xs, ys), spearman=None, kendall=None, n=n)
    return AgreementSummary(
        concordance=concordance_rate(xs, ys),
        spearman=spearman_rho(xs, ys),
        kendall=kendall_tau(xs, ys),
        n=n,
    )
