import random

import pytest
from hypothesis import given, strategies as st

from kosent.errors import ContractViolation
from kosent.metrics import (
    AgreementSummary,
    PairedScores,
    aggregate_human,
    average_ranks,
    cohens_kappa,
    concordance_rate,
    kendall_tau,
    spearman_rho,
    summarize_agreement,
)
from oracles import (
    concordance_oracle,
    consensus_oracle,
    kappa_oracle,
    kendall_oracle,
    spearman_oracle,
)

TOL = 1e-12

scores = st.integers(min_value=1, max_value=5)
score_vectors = st.integers(min_value=2, max_value=6).flatmap(
    lambda n: st.tuples(
        st.lists(scores, min_size=n, max_size=n),
        st.lists(scores, min_size=n, max_size=n),
    )
)


class TestAggregateHuman:
    def test_equal_inputs(self):
        assert aggregate_human(3, 3) == 3

    def test_half_rounds_down(self):
        assert aggregate_human(3, 4) == 3

    def test_exact_average(self):
        assert aggregate_human(1, 5) == 3

    def test_all_25_pairs_match_floor_oracle(self):
        for e1 in range(1, 6):
            for e2 in range(1, 6):
                assert aggregate_human(e1, e2) == consensus_oracle(e1, e2)

    @pytest.mark.parametrize("bad", [(0, 3), (3, 6), (6, 6), (3, 0)])
    def test_out_of_range_rejected(self, bad):
        with pytest.raises(ContractViolation):
            aggregate_human(*bad)

    def test_symmetric(self):
        for e1 in range(1, 6):
            for e2 in range(1, 6):
                assert aggregate_human(e1, e2) == aggregate_human(e2, e1)


class TestConcordance:
    def test_identical_vectors(self):
        assert concordance_rate([1, 2, 3], [1, 2, 3]) == 1.0

    def test_fully_disagreeing(self):
        assert concordance_rate([1, 1, 1], [2, 3, 4]) == 0.0

    def test_hand_count(self):
        assert concordance_rate([3, 3, 4, 2], [3, 4, 4, 2]) == 0.75

    def test_empty_rejected(self):
        with pytest.raises(ContractViolation):
            concordance_rate([], [])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ContractViolation):
            concordance_rate([1, 2], [1])

    def test_not_relabel_invariant(self):
        # exact-match semantics: shifting one side changes the rate
        assert concordance_rate([1, 2, 3], [1, 2, 3]) == 1.0
        assert concordance_rate([1, 2, 3], [2, 3, 4]) == 0.0


class TestSpearman:
    def test_perfect_monotone(self):
        assert spearman_rho([1, 2, 3, 4], [2, 3, 4, 5]) == 1.0

    def test_perfect_inverse(self):
        assert spearman_rho([1, 2, 3, 4], [5, 4, 3, 2]) == -1.0

    def test_constant_side_undefined(self):
        assert spearman_rho([3, 3, 3], [1, 2, 3]) is None
        assert spearman_rho([1, 2, 3], [4, 4, 4]) is None

    def test_frozen_tied_example(self):
        # ranks [1, 2.5, 2.5, 4] vs [2, 1, 3.5, 3.5]
        value = spearman_rho([1, 2, 2, 3], [2, 1, 3, 3])
        assert value == pytest.approx(0.5, abs=TOL)
        assert value == pytest.approx(spearman_oracle([1, 2, 2, 3], [2, 1, 3, 3]), abs=TOL)

    def test_single_pair_rejected(self):
        with pytest.raises(ContractViolation):
            spearman_rho([3], [3])

    def test_average_ranks_tied_blocks(self):
        from fractions import Fraction

        assert average_ranks([1, 2, 2, 3]) == [
            Fraction(1),
            Fraction(5, 2),
            Fraction(5, 2),
            Fraction(4),
        ]


class TestKendall:
    def test_identical_increasing(self):
        assert kendall_tau([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0

    def test_constant_side_undefined(self):
        assert kendall_tau([1, 2, 3], [2, 2, 2]) is None
        assert kendall_tau([5, 5, 5], [1, 2, 3]) is None

    def test_frozen_tied_example(self):
        value = kendall_tau([1, 2, 2, 3], [2, 1, 3, 3])
        assert value == pytest.approx(0.4, abs=TOL)
        assert value == pytest.approx(kendall_oracle([1, 2, 2, 3], [2, 1, 3, 3]), abs=TOL)

    def test_single_pair_rejected(self):
        with pytest.raises(ContractViolation):
            kendall_tau([2], [4])

    def test_random_vectors_match_pair_enumeration(self):
        rng = random.Random(42)
        for _ in range(300):
            n = rng.randint(2, 6)
            xs = [rng.randint(1, 5) for _ in range(n)]
            ys = [rng.randint(1, 5) for _ in range(n)]
            impl, oracle = kendall_tau(xs, ys), kendall_oracle(xs, ys)
            assert (impl is None) == (oracle is None)
            if impl is not None:
                assert impl == pytest.approx(oracle, abs=TOL)


class TestKappa:
    def test_perfect_agreement(self):
        assert cohens_kappa([1, 1, 2, 2], [1, 1, 2, 2]) == 1.0

    def test_full_reversal(self):
        assert cohens_kappa([1, 2], [2, 1]) == -1.0

    def test_constant_same_undefined(self):
        assert cohens_kappa([3, 3, 3], [3, 3, 3]) is None

    def test_constant_different_defined(self):
        # marginals do not coincide, so expected agreement < 1
        assert cohens_kappa([3, 3], [4, 4]) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ContractViolation):
            cohens_kappa([], [])

    def test_matches_oracle_on_random_vectors(self):
        rng = random.Random(99)
        for _ in range(300):
            n = rng.randint(1, 8)
            xs = [rng.randint(1, 5) for _ in range(n)]
            ys = [rng.randint(1, 5) for _ in range(n)]
            impl, oracle = cohens_kappa(xs, ys), kappa_oracle(xs, ys)
            assert (impl is None) == (oracle is None)
            if impl is not None:
                assert impl == pytest.approx(oracle, abs=TOL)


class TestPairedScores:
    def test_accessors(self):
        p = PairedScores(((3, 4), (2, 2)))
        assert p.humans == [3, 2]
        assert p.models == [4, 2]
        assert len(p) == 2

    def test_empty_rejected(self):
        with pytest.raises(ContractViolation):
            PairedScores(())

    @pytest.mark.parametrize("pair", [(0, 3), (3, 6), (True, 3)])
    def test_bad_values_rejected(self, pair):
        with pytest.raises(ContractViolation):
            PairedScores((pair,))


class TestSummarize:
    def test_single_pair_leaves_correlations_undefined(self):
        s = summarize_agreement([3], [3])
        assert s == AgreementSummary(concordance=1.0, spearman=None, kendall=None, n=1)

    def test_bundles_all_three(self):
        s = summarize_agreement([1, 2, 2, 3], [2, 1, 3, 3])
        assert s.n == 4
        assert s.concordance == 0.25
        assert s.spearman == pytest.approx(0.5, abs=TOL)
        assert s.kendall == pytest.approx(0.4, abs=TOL)


# ---- properties -----------------------------------------------------------


@given(score_vectors, st.randoms(use_true_random=False))
def test_permutation_invariance(pair, rng):
    xs, ys = pair
    order = list(range(len(xs)))
    rng.shuffle(order)
    px, py = [xs[i] for i in order], [ys[i] for i in order]
    assert concordance_rate(px, py) == pytest.approx(concordance_rate(xs, ys), abs=TOL)
    for stat in (spearman_rho, kendall_tau, cohens_kappa):
        a, b = stat(xs, ys), stat(px, py)
        assert (a is None) == (b is None)
        if a is not None:
            assert a == pytest.approx(b, abs=TOL)


@given(score_vectors)
def test_rank_correlations_symmetric_in_arguments(pair):
    xs, ys = pair
    for stat in (spearman_rho, kendall_tau):
        a, b = stat(xs, ys), stat(ys, xs)
        assert (a is None) == (b is None)
        if a is not None:
            assert a == pytest.approx(b, abs=TOL)


@given(score_vectors)
def test_rank_correlations_invariant_under_increasing_relabel(pair):
    xs, ys = pair
    relabeled = [x * 10 for x in xs]  # strictly increasing map 1..5 -> 10..50
    for stat in (spearman_rho, kendall_tau):
        a, b = stat(xs, ys), stat(relabeled, ys)
        assert (a is None) == (b is None)
        if a is not None:
            assert a == pytest.approx(b, abs=TOL)


@given(score_vectors)
def test_rank_correlations_match_oracles(pair):
    xs, ys = pair
    for impl, oracle in ((spearman_rho, spearman_oracle), (kendall_tau, kendall_oracle)):
        a, b = impl(xs, ys), oracle(xs, ys)
        degenerate = len(set(xs)) == 1 or len(set(ys)) == 1
        assert (a is None) == (b is None) == degenerate
        if a is not None:
            assert a == pytest.approx(b, abs=TOL)


@given(score_vectors)
def test_kappa_is_one_iff_perfect_agreement_with_varied_values(pair):
    xs, ys = pair
    kappa = cohens_kappa(xs, ys)
    perfect = xs == ys and len(set(xs)) > 1
    assert (kappa == 1.0) == perfect


@given(st.lists(st.tuples(scores, scores), min_size=1, max_size=30))
def test_concordance_bounds_and_oracle(pairs):
    xs = [a for a, _ in pairs]
    ys = [b for _, b in pairs]
    rate = concordance_rate(xs, ys)
    assert 0.0 <= rate <= 1.0
    assert rate == pytest.approx(concordance_oracle(xs, ys), abs=TOL)


@given(scores, scores)
def test_consensus_matches_floor_oracle(e1, e2):
    assert aggregate_human(e1, e2) == consensus_oracle(e1, e2)
    assert 1 <= aggregate_human(e1, e2) <= 5


def test_determinism_bit_identical():
    xs, ys = [1, 2, 2, 3, 5, 4], [2, 1, 3, 3, 4, 4]
    assert spearman_rho(xs, ys) == spearman_rho(list(xs), list(ys))
    assert kendall_tau(xs, ys) == kendall_tau(list(xs), list(ys))
    assert cohens_kappa(xs, ys) == cohens_kappa(list(xs), list(ys))
