import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as scipy_stats

from tempdrift.corpus import Corpus, TemporalDomain
from tempdrift.drift import DriftContext, MetricSpec
from tempdrift.errors import DataError, DegenerateDataError
from tempdrift.rng import SplitMix64, derive_seed, fisher_yates
from tempdrift.stats import (
    ObservationSet,
    cross_domain_observations,
    drift_significance,
    in_domain_observations,
    pearson_correlation,
    regularized_incomplete_beta,
    student_t_cdf,
    welch_t_test,
)

from conftest import docs_from_texts, domain_of
from generators import iid_token_domains
from oracles import ref_t_cdf


class TestStudentTCdf:
    def test_zero_is_half(self):
        for df in (1, 5, 30, 2.5):
            assert student_t_cdf(0.0, df) == 0.5

    def test_symmetry(self):
        for t in (0.5, 1.0, 2.0):
            for df in (1, 5, 30):
                assert student_t_cdf(-t, df) == pytest.approx(
                    1.0 - student_t_cdf(t, df), abs=1e-12)

    def test_df1_cauchy_closed_form(self):
        # cdf(t, 1) = 1/2 + arctan(t)/pi
        assert student_t_cdf(1.0, 1) == pytest.approx(0.75, abs=1e-12)
        for t in (-2.0, -0.3, 0.7, 4.0):
            assert student_t_cdf(t, 1) == pytest.approx(
                0.5 + math.atan(t) / math.pi, abs=1e-12)

    def test_df2_algebraic_closed_form(self):
        for t in (-3.0, -1.0, 0.5, 2.0):
            expected = 0.5 + t / (2.0 * math.sqrt(2.0 + t * t))
            assert student_t_cdf(t, 2) == pytest.approx(expected, abs=1e-12)

    def test_against_numerical_integration(self):
        for t in (-4.0, -1.5, 0.25, 1.0, 3.0):
            for df in (1, 3, 8, 25):
                assert student_t_cdf(t, df) == pytest.approx(ref_t_cdf(t, df), abs=1e-10)

    def test_monotone_in_t(self):
        grid = [-6 + 0.5 * k for k in range(25)]
        for df in (1, 4, 17):
            values = [student_t_cdf(t, df) for t in grid]
            assert all(a <= b for a, b in zip(values, values[1:]))

    def test_invalid_inputs(self):
        with pytest.raises(DataError):
            student_t_cdf(1.0, 0)
        with pytest.raises(DataError):
            student_t_cdf(float("inf"), 3)

    def test_incomplete_beta_edges(self):
        assert regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0
        assert regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0
        # I_x(1,1) = x exactly
        assert regularized_incomplete_beta(0.37, 1.0, 1.0) == pytest.approx(0.37, abs=1e-12)


class TestWelch:
    def test_identical_samples(self):
        res = welch_t_test([1, 2, 3], [1, 2, 3])
        assert res.statistic == 0.0 and res.p_value == 1.0 and not res.significant

    def test_hand_derived_example(self):
        res = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
        assert res.statistic == pytest.approx(-1.0, abs=1e-12)
        assert res.df == pytest.approx(8.0, abs=1e-12)
        assert res.p_value == pytest.approx(0.3466, abs=1e-3)

    def test_zero_variance_both_sides(self):
        with pytest.raises(DegenerateDataError):
            welch_t_test([0, 0, 0], [0, 0, 0])
        with pytest.raises(DegenerateDataError):
            welch_t_test([1, 1], [2, 2])  # unequal means, still no variance

    def test_too_small(self):
        with pytest.raises(DataError):
            welch_t_test([1], [1, 2])

    def test_antisymmetry(self):
        xs = [0.1, 0.5, 0.9, 0.2]
        ys = [1.1, 0.8, 1.4]
        ab = welch_t_test(xs, ys)
        ba = welch_t_test(ys, xs)
        assert ab.statistic == -ba.statistic
        assert ab.df == ba.df and ab.p_value == ba.p_value

    def test_against_scipy(self):
        rng = SplitMix64(8)
        xs = [rng.next_below(1000) / 100 for _ in range(7)]
        ys = [rng.next_below(1000) / 100 + 1.5 for _ in range(9)]
        ours = welch_t_test(xs, ys)
        ref = scipy_stats.ttest_ind(xs, ys, equal_var=False)
        assert ours.statistic == pytest.approx(ref.statistic, rel=1e-12)
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9)
        pooled = welch_t_test(xs, ys, equal_variance=True)
        ref_pooled = scipy_stats.ttest_ind(xs, ys, equal_var=True)
        assert pooled.statistic == pytest.approx(ref_pooled.statistic, rel=1e-12)
        assert pooled.df == len(xs) + len(ys) - 2
        assert pooled.p_value == pytest.approx(ref_pooled.pvalue, rel=1e-9)


class TestPearson:
    def test_exact_linear(self):
        r, p = pearson_correlation([1, 2, 3], [2, 4, 6])
        assert r == 1.0 and p == 0.0

    def test_exact_antilinear(self):
        r, p = pearson_correlation([1, 2, 3], [3, 2, 1])
        assert r == -1.0 and p == 0.0

    def test_hand_derived_example(self):
        r, p = pearson_correlation([1, 2, 3, 4], [1, 3, 2, 4])
        assert r == pytest.approx(0.8, abs=1e-12)
        assert p == pytest.approx(0.200, abs=1e-3)

    def test_against_scipy(self):
        xs = [0.3, 1.7, 2.2, 4.8, 5.1, 6.0]
        ys = [1.1, 0.4, 2.9, 3.2, 5.5, 4.1]
        r, p = pearson_correlation(xs, ys)
        ref = scipy_stats.pearsonr(xs, ys)
        assert r == pytest.approx(ref.statistic, rel=1e-12)
        assert p == pytest.approx(ref.pvalue, rel=1e-9)

    def test_errors(self):
        with pytest.raises(DataError):
            pearson_correlation([1, 2], [3, 4])
        with pytest.raises(DegenerateDataError):
            pearson_correlation([1, 1, 1], [1, 2, 3])

    @given(a=st.floats(min_value=0.01, max_value=50),
           b=st.floats(min_value=-100, max_value=100))
    @settings(max_examples=40)
    def test_affine_invariance(self, a, b):
        xs = [1.0, 2.5, 3.1, 4.7, 5.2]
        ys = [0.4, 0.1, 0.8, 0.9, 0.3]
        r0, _ = pearson_correlation(xs, ys)
        r_pos, _ = pearson_correlation([a * x + b for x in xs], ys)
        r_neg, _ = pearson_correlation([-a * x + b for x in xs], ys)
        assert r_pos == pytest.approx(r0, abs=1e-12)
        assert r_neg == pytest.approx(-r0, abs=1e-12)


def two_label_context(texts_a, texts_b):
    docs_a = docs_from_texts(texts_a, label="A", prefix="a")
    docs_b = docs_from_texts(texts_b, label="B", prefix="b")
    corpus = Corpus(docs_a + docs_b)
    return (DriftContext(corpus), domain_of(docs_a, "A", 1), domain_of(docs_b, "B", 2))


class TestObservationProtocol:
    def test_default_k_is_15(self):
        ctx, da, db = two_label_context(["a b"] * 6, ["b c"] * 6)
        metric = MetricSpec("jaccard")
        cross = cross_domain_observations(da, db, metric, ctx, master_seed=1)
        indom = in_domain_observations(db, metric, ctx, master_seed=1)
        assert len(cross.values) == 15 and len(indom.values) == 15
        assert cross.mode == "cross_domain" and indom.mode == "in_domain"

    def test_determinism(self):
        ctx, da, db = two_label_context(["a b", "b c", "c d", "d e"], ["e f", "f g", "g h"])
        metric = MetricSpec("jaccard")
        one = cross_domain_observations(da, db, metric, ctx, k=5, master_seed=9)
        two = cross_domain_observations(da, db, metric, ctx, k=5, master_seed=9)
        assert one.values == two.values and one.seeds == two.seeds

    def test_half_sizes(self):
        # odd-sized domain: both halves take floor(n/2), one doc sits out
        texts = [f"w{i} common" for i in range(7)]
        ctx, da, db = two_label_context(texts, texts)
        seen_sizes = set()
        orig = ctx.measure_ids

        def spy(ids_a, ids_b, metric, src, tgt):
            seen_sizes.add((len(ids_a), len(ids_b)))
            return orig(ids_a, ids_b, metric, src, tgt)

        ctx.measure_ids = spy
        in_domain_observations(db, MetricSpec("jaccard"), ctx, k=3, master_seed=0)
        cross_domain_observations(da, db, MetricSpec("jaccard"), ctx, k=3, master_seed=0)
        assert seen_sizes == {(3, 3)}

    def test_identical_docs_give_unit_jaccard(self):
        ctx, da, db = two_label_context(["same text"] * 2, ["same text"] * 2)
        indom = in_domain_observations(db, MetricSpec("jaccard"), ctx, k=15, master_seed=3)
        assert all(v == 1.0 for v in indom.values)

    def test_similarity_bounded_by_one(self):
        ctx, da, db = two_label_context([f"x{i} y{i % 3}" for i in range(10)],
                                        [f"y{i % 4} z{i}" for i in range(10)])
        cross = cross_domain_observations(da, db, MetricSpec("jaccard"), ctx, master_seed=2)
        assert all(0.0 <= v <= 1.0 for v in cross.values)

    def test_too_small_domain(self):
        ctx, da, db = two_label_context(["a"], ["b c"] * 3)
        with pytest.raises(DataError):
            cross_domain_observations(da, db, MetricSpec("jaccard"), ctx, master_seed=0)

    def test_error_reports_observation_index(self):
        # two one-token docs with no tokens at all trigger the jaccard 0/0
        ctx, da, db = two_label_context(["", ""], ["", ""])
        with pytest.raises(DegenerateDataError, match="observation 1"):
            cross_domain_observations(da, db, MetricSpec("jaccard"), ctx, k=2, master_seed=0)

    def test_observation_set_invariants(self):
        with pytest.raises(DataError):
            ObservationSet(pair=("A", "B"), metric=MetricSpec("jaccard"),
                           values=(1.0,), seeds=(1,), mode="cross_domain")
        with pytest.raises(DataError):
            ObservationSet(pair=("A", "B"), metric=MetricSpec("jaccard"),
                           values=(1.0, 2.0), seeds=(1, 2), mode="sideways")


class TestDriftSignificance:
    def test_mode_and_metric_validation(self):
        ctx, da, db = two_label_context(["a b", "a c", "b d", "c e"],
                                        ["b c", "c d", "d e", "e f"])
        cross = cross_domain_observations(da, db, MetricSpec("jaccard"), ctx, k=3, master_seed=1)
        indom = in_domain_observations(db, MetricSpec("jaccard"), ctx, k=3, master_seed=1)
        with pytest.raises(DataError, match="expects"):
            drift_significance(indom, cross)
        other_metric = in_domain_observations(db, MetricSpec("tfidf_cosine"), ctx,
                                              k=3, master_seed=1)
        with pytest.raises(DataError, match="metric mismatch"):
            drift_significance(cross, other_metric)

    def test_target_label_mismatch(self):
        ctx, da, db = two_label_context(["a b"] * 4, ["b c"] * 4)
        cross = cross_domain_observations(da, db, MetricSpec("jaccard"), ctx, k=3, master_seed=1)
        indom_a = in_domain_observations(da, MetricSpec("jaccard"), ctx, k=3, master_seed=1)
        with pytest.raises(DataError, match="target label mismatch"):
            drift_significance(cross, indom_a)

    def test_identical_observation_lists(self):
        metric = MetricSpec("jaccard")
        values = tuple([0.5, 0.6, 0.7, 0.4, 0.55])
        cross = ObservationSet(("A", "B"), metric, values, tuple(range(5)), "cross_domain")
        indom = ObservationSet(("B", "B"), metric, values, tuple(range(5)), "in_domain")
        res = drift_significance(cross, indom)
        assert res.statistic == 0.0 and res.p_value == 1.0 and not res.significant

    def test_disjoint_vocabulary_detected(self):
        ctx, da, db = two_label_context([f"a{i} a{i + 1}" for i in range(8)],
                                        [f"b{i} b{i + 1}" for i in range(8)])
        cross = cross_domain_observations(da, db, MetricSpec("jaccard"), ctx, master_seed=4)
        indom = in_domain_observations(db, MetricSpec("jaccard"), ctx, master_seed=4)
        assert all(v == 0.0 for v in cross.values)
        assert all(v > 0.0 for v in indom.values)
        res = drift_significance(cross, indom)
        assert res.significant and res.p_value < 0.05

    def test_df_range_for_k15(self):
        ctx, da, db = iid_token_domains(derive_seed(5, "dfcheck"), n_docs=40,
                                        doc_len=10, vocab=60, tail=2.0)
        cross = cross_domain_observations(da, db, MetricSpec("jaccard"), ctx, master_seed=5)
        indom = in_domain_observations(db, MetricSpec("jaccard"), ctx, master_seed=5)
        res = drift_significance(cross, indom)
        assert 2.0 < res.df <= 28.0

    def test_observation_mean_tracks_in_domain_mean(self):
        # same-distribution domains: |cross mean - in-domain mean| within 3 SE
        # in at least 45 of 50 trials
        ok = 0
        for trial in range(50):
            seed = derive_seed(2026, f"se3/{trial}")
            ctx, da, db = iid_token_domains(seed)
            cross = cross_domain_observations(da, db, MetricSpec("jaccard"), ctx,
                                              master_seed=seed)
            indom = in_domain_observations(db, MetricSpec("jaccard"), ctx, master_seed=seed)
            k = len(cross.values)
            mx, my = cross.mean, indom.mean
            vx = sum((v - mx) ** 2 for v in cross.values) / (k - 1)
            vy = sum((v - my) ** 2 for v in indom.values) / (k - 1)
            se = math.sqrt(vx / k + vy / k)
            if abs(mx - my) <= 3 * se:
                ok += 1
        assert ok >= 45

    def test_calibrated_when_domains_share_one_pool(self):
        # two pseudo-domains made by splitting one iid pool: rejection stays
        # near the nominal rate (protocol calibration; see acceptance suite)
        rejects = 0
        trials = 60
        for trial in range(trials):
            seed = derive_seed(515, f"pool/{trial}")
            ctx, da, db = iid_token_domains(seed)
            pool = list(da.doc_ids) + list(db.doc_ids)
            shuffled = fisher_yates(pool, SplitMix64(derive_seed(seed, "resplit")))
            half = len(pool) // 2
            da2 = TemporalDomain("A", 1, shuffled[:half])
            db2 = TemporalDomain("B", 2, shuffled[half:])
            cross = cross_domain_observations(da2, db2, MetricSpec("jaccard"), ctx,
                                              master_seed=seed)
            indom = in_domain_observations(db2, MetricSpec("jaccard"), ctx, master_seed=seed)
            rejects += drift_significance(cross, indom).significant
        assert rejects / trials <= 0.10
