import itertools
import math
import random

import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st
from statsmodels.stats.multitest import multipletests

from evosim.evaluation.stats import (DegenerateDataError, chi2_sf, cohens_d,
                                     dunn_posthoc_holm, gamma_q, holm_adjust,
                                     kruskal_wallis, normal_sf,
                                     wilcoxon_signed_rank, _average_ranks)


class TestDistributionTails:
    @given(st.floats(-8, 8))
    def test_normal_sf_against_scipy(self, z):
        assert normal_sf(z) == pytest.approx(scipy.stats.norm.sf(z), rel=1e-12, abs=1e-300)

    @given(st.floats(0.5, 30), st.floats(0, 80))
    def test_gamma_q_against_scipy(self, a, x):
        assert gamma_q(a, x) == pytest.approx(scipy.stats.gamma.sf(x, a), rel=1e-9, abs=1e-12)

    @given(st.floats(0.001, 200), st.integers(1, 30))
    def test_chi2_sf_against_scipy(self, x, df):
        assert chi2_sf(x, df) == pytest.approx(scipy.stats.chi2.sf(x, df), rel=1e-9, abs=1e-12)

    def test_chi2_sf_at_zero(self):
        assert chi2_sf(0.0, 3) == 1.0

    def test_gamma_q_rejects_bad_args(self):
        with pytest.raises(ValueError):
            gamma_q(0, 1)
        with pytest.raises(ValueError):
            gamma_q(1, -1)


class TestAverageRanks:
    def test_ties_get_average_rank(self):
        assert _average_ranks([10, 20, 20, 30]) == [1.0, 2.5, 2.5, 4.0]

    @given(st.lists(st.integers(0, 20), min_size=1, max_size=30))
    def test_against_scipy_rankdata(self, values):
        assert _average_ranks(values) == list(scipy.stats.rankdata(values))


def enumeration_p(diffs):
    """[DERIVED] oracle: exact two-sided p by enumerating all 2^n sign
    assignments over the observed absolute-rank multiset."""
    ranks = list(scipy.stats.rankdata([abs(d) for d in diffs]))
    w_obs = sum(r for r, d in zip(ranks, diffs) if d > 0)
    n = len(diffs)
    lower = upper = 0
    for signs in itertools.product((0, 1), repeat=n):
        w = sum(r for r, s in zip(ranks, signs) if s)
        lower += w <= w_obs + 1e-9
        upper += w >= w_obs - 1e-9
    total = 2 ** n
    return min(1.0, 2.0 * min(lower / total, upper / total))


class TestWilcoxon:
    def test_exact_p_matches_enumeration(self):
        rng = random.Random(21)
        for _ in range(200):
            n = rng.randint(1, 12)
            diffs = [rng.randint(-9, 9) or 1 for _ in range(n)]
            result = wilcoxon_signed_rank(diffs)
            assert result.p_value == pytest.approx(enumeration_p(diffs), abs=1e-12)

    def test_statistic_is_min_rank_sum(self):
        result = wilcoxon_signed_rank([1, 2, 3, -4])
        # ranks of |1,2,3,4| are 1..4; W+ = 6, W- = 4 -> T = 4.
        assert result.statistic == 4.0
        assert result.extra["w_plus"] == 6.0

    def test_matches_scipy_without_ties(self):
        rng = random.Random(22)
        for _ in range(100):
            n = rng.randint(6, 20)
            diffs = rng.sample(range(1, 200), n)
            diffs = [d if rng.random() < 0.6 else -d for d in diffs]
            ours = wilcoxon_signed_rank(diffs)
            ref = scipy.stats.wilcoxon(diffs, mode="exact")
            assert ours.statistic == pytest.approx(ref.statistic)
            assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-10)

    def test_normal_approximation_for_large_n(self):
        rng = random.Random(23)
        diffs = [rng.gauss(0.5, 1) or 0.1 for _ in range(60)]
        ours = wilcoxon_signed_rank(diffs)
        ref = scipy.stats.wilcoxon(diffs, mode="approx", correction=False)
        assert ours.method == "wilcoxon-normal"
        assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-9)

    def test_all_zero_differences_degenerate(self):
        with pytest.raises(DegenerateDataError):
            wilcoxon_signed_rank([0.0, 0.0])

    def test_hypothesized_median_shift(self):
        a = wilcoxon_signed_rank([5, 6, 7, 8], hypothesized_median=4)
        b = wilcoxon_signed_rank([1, 2, 3, 4])
        assert a.p_value == b.p_value

    @given(st.lists(st.integers(-5, 5).filter(bool), min_size=1, max_size=10))
    @settings(max_examples=60, deadline=None)
    def test_p_in_unit_interval(self, diffs):
        result = wilcoxon_signed_rank(diffs)
        assert 0.0 < result.p_value <= 1.0


class TestCohensD:
    def test_spec_value(self):
        # [DERIVED] means 2 and 3, pooled sd 1 -> d = -1.
        assert cohens_d([1, 2, 3], [2, 3, 4]) == pytest.approx(-1.0)

    def test_sign_convention(self):
        assert cohens_d([10, 11, 12], [1, 2, 3]) > 0

    def test_matches_pooled_formula(self):
        rng = random.Random(31)
        for _ in range(100):
            a = [rng.gauss(0, 1) for _ in range(rng.randint(3, 12))]
            b = [rng.gauss(0.5, 2) for _ in range(rng.randint(3, 12))]
            import statistics
            pooled = math.sqrt(((len(a) - 1) * statistics.variance(a)
                                + (len(b) - 1) * statistics.variance(b))
                               / (len(a) + len(b) - 2))
            expected = (statistics.mean(a) - statistics.mean(b)) / pooled
            assert cohens_d(a, b) == pytest.approx(expected, rel=1e-12)

    def test_zero_variance_degenerate(self):
        with pytest.raises(DegenerateDataError):
            cohens_d([2, 2, 2], [2, 2, 2])


class TestKruskalWallis:
    def test_spec_example(self):
        # [DERIVED] {1,2,3} vs {4,5,6}: H = 3.857..., p ~ 0.0495.
        result = kruskal_wallis([[1, 2, 3], [4, 5, 6]])
        assert result.statistic == pytest.approx(3.857, abs=1e-3)
        assert result.p_value == pytest.approx(0.0495, abs=1e-3)

    def test_matches_scipy_with_ties(self):
        rng = random.Random(41)
        for _ in range(100):
            groups = [[rng.randint(0, 8) for _ in range(rng.randint(3, 10))]
                      for _ in range(rng.randint(2, 5))]
            if len({v for g in groups for v in g}) < 2:
                continue
            ours = kruskal_wallis(groups)
            ref = scipy.stats.kruskal(*groups)
            assert ours.statistic == pytest.approx(ref.statistic, rel=1e-10)
            assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-8)

    def test_identical_values_degenerate(self):
        with pytest.raises(DegenerateDataError):
            kruskal_wallis([[3, 3], [3, 3]])

    def test_needs_two_groups(self):
        with pytest.raises(ValueError):
            kruskal_wallis([[1, 2, 3]])


class TestHolm:
    def test_matches_statsmodels(self):
        rng = random.Random(51)
        for _ in range(100):
            ps = [rng.random() for _ in range(rng.randint(1, 8))]
            ref = multipletests(ps, method="holm")[1]
            assert holm_adjust(ps) == pytest.approx(list(ref), rel=1e-12)

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=8))
    def test_adjusted_at_least_raw(self, ps):
        for raw, adj in zip(ps, holm_adjust(ps)):
            assert adj >= raw - 1e-15
            assert adj <= 1.0


class TestDunn:
    def _reference_dunn(self, groups):
        # [DERIVED] independent implementation straight from Dunn (1964)
        # with the standard tie correction, using scipy rank utilities.
        pooled = [v for g in groups for v in g]
        n = len(pooled)
        ranks = scipy.stats.rankdata(pooled)
        mean_ranks = []
        pos = 0
        for g in groups:
            mean_ranks.append(sum(ranks[pos:pos + len(g)]) / len(g))
            pos += len(g)
        from collections import Counter
        tie_sum = sum(t ** 3 - t for t in Counter(pooled).values())
        out = {}
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                var = (n * (n + 1) / 12 - tie_sum / (12 * (n - 1))) \
                    * (1 / len(groups[i]) + 1 / len(groups[j]))
                z = (mean_ranks[i] - mean_ranks[j]) / math.sqrt(var)
                out[(i, j)] = (z, min(1.0, 2 * scipy.stats.norm.sf(abs(z))))
        return out

    def test_matches_reference(self):
        rng = random.Random(61)
        for _ in range(50):
            groups = [[rng.randint(0, 12) for _ in range(rng.randint(3, 9))]
                      for _ in range(rng.randint(2, 4))]
            if len({v for g in groups for v in g}) < 2:
                continue
            ref = self._reference_dunn(groups)
            results = dunn_posthoc_holm(groups)
            raws = [r.p_value for r in results]
            expected_adj = multipletests(raws, method="holm")[1]
            for r, (pair, (z, p)), adj in zip(results, sorted(ref.items()), expected_adj):
                assert r.statistic == pytest.approx(z, rel=1e-10)
                assert r.p_value == pytest.approx(p, rel=1e-10)
                assert r.p_adjusted == pytest.approx(adj, rel=1e-10)

    def test_labels_attached(self):
        results = dunn_posthoc_holm([[1, 2], [3, 4], [5, 6]], labels=["a", "b", "c"])
        assert [r.extra["pair"] for r in results] == [("a", "b"), ("a", "c"), ("b", "c")]

    def test_adjusted_never_below_raw(self):
        results = dunn_posthoc_holm([[1, 2, 3], [2, 3, 4], [8, 9, 10]])
        for r in results:
            assert r.p_adjusted >= r.p_value
