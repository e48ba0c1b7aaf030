"""Analytics tests: fixtures with hand-computed values plus scipy/sklearn
cross-checks for the hand-rolled statistics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats
from sklearn.cluster import KMeans as SkKMeans
from sklearn.metrics import calinski_harabasz_score, silhouette_score

from brewopt.analytics import (
    ClusterReport,
    Significance,
    Stats,
    c_index,
    calinski_harabasz,
    cluster_indices,
    davies_bouldin,
    distance_density,
    distance_matrix,
    distance_summary,
    duda_hart_critical,
    efficiency,
    improvement_raster,
    kmeans,
    majority_winner,
    population_diversity,
    rank_sum_p,
    reliability,
    select_k_majority,
    silhouette,
    summarize_trials,
    wilcoxon_1x1,
)
from brewopt.optimizers import Algorithm, TrialRecord


def make_trial(success, best_error, fes_used, improvements=(), final_population=None):
    if final_population is None:
        final_population = np.zeros((4, 2))
    return TrialRecord(
        algorithm=Algorithm.DFO,
        seed=0,
        best_recipe=np.zeros(2),
        best_error=best_error,
        fes_used=fes_used,
        success=success,
        iterations=max(improvements, default=0),
        improvement_iters=list(improvements),
        diversity_trace=[0.0],
        final_population=np.asarray(final_population, dtype=float),
        final_errors=np.zeros(len(final_population)),
    )


class TestDiversity:
    def test_identical_members(self):
        assert population_diversity(np.full((10, 3), 2.5)) == 0.0

    def test_two_member_hand_case(self):
        assert population_diversity([[0.0], [2.0]]) == pytest.approx(1.0, abs=1e-12)

    def test_three_member_hand_case(self):
        # centroid 3; distances {3, 0, 3}; mean 2
        assert population_diversity([[0.0], [3.0], [6.0]]) == pytest.approx(2.0, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 12), st.integers(1, 5), st.integers(0, 10_000))
    def test_translation_invariance(self, n, d, seed):
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(n, d))
        shift = rng.normal(size=d) * 100
        assert population_diversity(pts + shift) == pytest.approx(
            population_diversity(pts), rel=1e-9, abs=1e-9
        )

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 10), st.floats(0.1, 50.0), st.integers(0, 10_000))
    def test_uniform_scaling_linearity(self, n, scale, seed):
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(n, 3))
        assert population_diversity(pts * scale) == pytest.approx(
            scale * population_diversity(pts), rel=1e-9
        )


class TestMeasures:
    def test_efficiency_over_successes_only(self):
        trials = [make_trial(True, 0.01, 3000), make_trial(True, 0.02, 5000),
                  make_trial(False, 9.0, 150_000)]
        stats = efficiency(trials)
        assert stats.mean == 4000 and stats.best == 3000 and stats.worst == 5000

    def test_efficiency_undefined_without_successes(self):
        assert efficiency([make_trial(False, 9.0, 150_000)]) is None

    def test_reliability(self):
        trials = [make_trial(True, 0.0, 1)] * 47 + [make_trial(False, 1.0, 2)] * 3
        assert reliability(trials) == pytest.approx(94.0)
        assert reliability([make_trial(False, 1.0, 2)]) == 0.0
        assert reliability([make_trial(True, 0.0, 1)] * 50) == 100.0

    def test_summary_partitions_diversity(self):
        ok = make_trial(True, 0.01, 100, final_population=[[0.0], [2.0]])
        bad = make_trial(False, 2.0, 200, final_population=[[1.0], [1.0]])
        summary = summarize_trials([ok, bad])
        assert summary.diversity_successful == pytest.approx(1.0)
        assert summary.diversity_failed == pytest.approx(0.0)
        assert summary.reliability == 50.0
        assert summary.successes == 1 and summary.trials == 2

    def test_stats_fields(self):
        s = Stats.of([1.0, 2.0, 3.0, 4.0])
        assert (s.best, s.worst, s.median, s.mean) == (1.0, 4.0, 2.5, 2.5)
        assert s.stdev == pytest.approx(np.std([1, 2, 3, 4], ddof=1))


class TestWilcoxon:
    def test_identical_samples(self):
        assert wilcoxon_1x1([1, 2, 3], [1, 2, 3]) is Significance.NONE

    def test_all_tied(self):
        assert wilcoxon_1x1([5.0] * 10, [5.0] * 10) is Significance.NONE
        assert wilcoxon_1x1([5.0] * 30, [5.0] * 30) is Significance.NONE

    def test_separated_small_samples_exact(self):
        a = [1, 2, 3, 4, 5]
        b = [101, 102, 103, 104, 105]
        assert wilcoxon_1x1(a, b) is Significance.LEFT
        assert wilcoxon_1x1(b, a) is Significance.RIGHT
        # rank sum is minimal: two-sided p = 2/252
        assert rank_sum_p(a, b) == pytest.approx(2 / 252, rel=1e-12)

    def test_exact_path_matches_scipy(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = rng.normal(size=8)
            b = rng.normal(loc=rng.uniform(0, 2), size=9)
            expected = scipy_stats.mannwhitneyu(a, b, alternative="two-sided",
                                                method="exact").pvalue
            assert rank_sum_p(a, b) == pytest.approx(expected, rel=1e-9)

    def test_normal_path_matches_scipy(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = rng.normal(size=40)
            b = rng.normal(loc=rng.uniform(0, 1), size=35)
            expected = scipy_stats.mannwhitneyu(a, b, alternative="two-sided",
                                                method="asymptotic").pvalue
            assert rank_sum_p(a, b) == pytest.approx(expected, rel=1e-6)

    def test_normal_path_with_ties_matches_scipy(self):
        rng = np.random.default_rng(7)
        a = rng.integers(0, 6, size=30).astype(float)
        b = rng.integers(1, 7, size=28).astype(float)
        expected = scipy_stats.mannwhitneyu(a, b, alternative="two-sided",
                                            method="asymptotic").pvalue
        assert rank_sum_p(a, b) == pytest.approx(expected, rel=1e-6)

    def test_symmetry_property(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=25)
        b = rng.normal(loc=2.0, size=25)
        assert wilcoxon_1x1(a, b) is Significance.LEFT
        assert wilcoxon_1x1(b, a) is Significance.RIGHT

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            wilcoxon_1x1([], [1.0])


class TestDistances:
    def test_single_solution(self):
        m = distance_matrix([np.array([1.0, 2.0])])
        assert m.entries.shape == (1, 1) and m.entries[0, 0] == 0.0

    def test_duplicate_solutions(self):
        m = distance_matrix([np.array([1.0, 2.0]), np.array([1.0, 2.0])])
        assert m.entries[0, 1] == 0.0

    def test_hand_computed_three_vectors(self):
        m = distance_matrix([np.zeros(2), np.array([3.0, 4.0]), np.array([6.0, 8.0])])
        assert m.entries[0, 1] == pytest.approx(5.0)
        assert m.entries[1, 2] == pytest.approx(5.0)
        assert m.entries[0, 2] == pytest.approx(10.0)

    def test_metric_axioms(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(size=(12, 5))
        m = distance_matrix(list(pts)).entries
        assert np.allclose(m, m.T)
        assert np.all(np.diag(m) == 0)
        for i in range(12):
            for j in range(12):
                for k in range(12):
                    assert m[i, j] <= m[i, k] + m[k, j] + 1e-12

    def test_normalised_mode(self):
        m = distance_matrix(
            [np.array([0.0, 0.0]), np.array([100.0, 1.0])], scale=np.array([100.0, 1.0])
        )
        assert m.entries[0, 1] == pytest.approx(math.sqrt(2.0))

    def test_summary(self):
        m = distance_matrix([np.zeros(1), np.array([4.0])], labels=[7, 9])
        s = distance_summary(m)
        assert s["mean"] == s["min"] == s["max"] == 4.0
        assert s["stdev"] == 0.0
        assert s["farthest_pair"] == (7, 9)

    def test_summary_equilateral(self):
        pts = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.5, math.sqrt(3) / 2])]
        s = distance_summary(distance_matrix(pts))
        assert s["stdev"] == pytest.approx(0.0, abs=1e-12)

    def test_summary_needs_two(self):
        with pytest.raises(ValueError):
            distance_summary(distance_matrix([np.zeros(2)]))

    def test_density_single_bin(self):
        pts = [np.zeros(1), np.array([2.0]), np.array([4.0])]  # distances 2,2,4
        density, edges = distance_density(distance_matrix([np.zeros(1), np.array([2.0])]), bins=4)
        assert (density > 0).sum() == 1

    def test_density_degenerate_input(self):
        with pytest.raises(ValueError):
            distance_density(distance_matrix([np.zeros(2)]))

    def test_density_uniform_distances(self):
        # construct 1-D colinear points with near-uniform pairwise spread
        rng = np.random.default_rng(3)
        pts = [np.array([x]) for x in rng.uniform(0, 1, size=60)]
        density, edges = distance_density(distance_matrix(pts), bins=5)
        assert np.all(density > 0)


class TestKMeans:
    def _blobs(self, centers, n=20, spread=0.05, seed=0):
        rng = np.random.default_rng(seed)
        pts = []
        for c in centers:
            pts.append(np.asarray(c) + rng.normal(scale=spread, size=(n, len(c))))
        return np.vstack(pts)

    def test_two_blob_separation(self):
        pts = self._blobs([(0.0, 0.0), (10.0, 10.0)])
        result = kmeans(pts, 2, np.random.default_rng(0))
        first, second = result.assignments[:20], result.assignments[20:]
        assert len(set(first)) == 1 and len(set(second)) == 1
        assert first[0] != second[0]

    def test_k_equals_n(self):
        pts = np.arange(10, dtype=float).reshape(5, 2)
        result = kmeans(pts, 5, np.random.default_rng(0))
        assert result.wcss == pytest.approx(0.0, abs=1e-12)
        assert len(set(result.assignments)) == 5

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            kmeans(np.zeros((3, 2)), 4, np.random.default_rng(0))

    def test_seeded_determinism(self):
        pts = self._blobs([(0.0, 0.0), (5.0, 5.0)], seed=4)
        a = kmeans(pts, 2, np.random.default_rng(42))
        b = kmeans(pts, 2, np.random.default_rng(42))
        assert np.array_equal(a.assignments, b.assignments)
        assert np.allclose(a.centroids, b.centroids)

    def test_wcss_trace_non_increasing(self):
        rng = np.random.default_rng(9)
        pts = rng.uniform(size=(60, 4))
        result = kmeans(pts, 4, np.random.default_rng(1))
        trace = result.wcss_per_iteration
        assert all(trace[i + 1] <= trace[i] + 1e-9 for i in range(len(trace) - 1))

    def test_wcss_matches_sklearn_on_blobs(self):
        pts = self._blobs([(0, 0), (8, 8), (0, 8)], seed=2)
        ours = kmeans(pts, 3, np.random.default_rng(0))
        sk = SkKMeans(n_clusters=3, n_init=10, random_state=0).fit(pts)
        assert ours.wcss == pytest.approx(sk.inertia_, rel=1e-6)


class TestIndices:
    def test_calinski_harabasz_hand_case(self):
        pts = np.array([[0.0], [1.0], [10.0], [11.0]])
        labels = np.array([0, 0, 1, 1])
        # W = 1.0, B = 100.0: CH = (100/1) / (1/2) = 200
        assert calinski_harabasz(pts, labels, 2) == pytest.approx(200.0, abs=1e-9)

    def test_calinski_harabasz_matches_sklearn(self):
        rng = np.random.default_rng(11)
        pts = rng.uniform(size=(40, 3))
        labels = kmeans(pts, 3, np.random.default_rng(0)).assignments
        assert calinski_harabasz(pts, labels, 3) == pytest.approx(
            calinski_harabasz_score(pts, labels), rel=1e-9
        )

    def test_silhouette_matches_sklearn(self):
        rng = np.random.default_rng(12)
        pts = rng.uniform(size=(30, 2))
        labels = kmeans(pts, 3, np.random.default_rng(0)).assignments
        assert silhouette(pts, labels, 3) == pytest.approx(
            silhouette_score(pts, labels), rel=1e-9
        )

    def test_silhouette_near_one_for_blobs(self):
        rng = np.random.default_rng(13)
        pts = np.vstack([rng.normal(0, 0.01, (15, 2)), rng.normal(10, 0.01, (15, 2))])
        labels = np.array([0] * 15 + [1] * 15)
        assert silhouette(pts, labels, 2) > 0.97

    def test_davies_bouldin_undefined_for_repeated_point(self):
        pts = np.zeros((6, 2))
        labels = np.array([0, 0, 0, 1, 1, 1])
        assert davies_bouldin(pts, labels, 2) is None

    def test_c_index_bounds(self):
        rng = np.random.default_rng(14)
        pts = rng.uniform(size=(25, 3))
        labels = kmeans(pts, 3, np.random.default_rng(0)).assignments
        c = c_index(pts, labels, 3)
        assert 0.0 <= c <= 1.0

    def test_cluster_indices_reports_all_seven(self):
        rng = np.random.default_rng(15)
        pts = rng.uniform(size=(20, 2))
        labels = kmeans(pts, 2, np.random.default_rng(0)).assignments
        scores = cluster_indices(pts, labels, 2)
        assert set(scores) == {
            "calinski_harabasz", "c_index", "davies_bouldin", "silhouette",
            "krzanowski_lai", "hartigan", "duda_hart",
        }
        # comparative indices need the scatter sweep
        assert scores["krzanowski_lai"] is None
        wcss = {1: 10.0, 2: 4.0, 3: 2.0}
        scores = cluster_indices(pts, labels, 2, wcss_by_k=wcss)
        assert scores["hartigan"] == pytest.approx((4.0 / 2.0 - 1) * (20 - 3))
        assert scores["duda_hart"] == pytest.approx(0.5)
        assert scores["krzanowski_lai"] is not None

    def test_duda_hart_critical_value(self):
        # standard form with z = 3.20
        p, n = 2, 40
        expected = 1 - 2 / (math.pi * p) - 3.20 * math.sqrt(
            2 * (1 - 8 / (math.pi**2 * p)) / (n * p)
        )
        assert duda_hart_critical(p, n) == pytest.approx(expected, rel=1e-12)


class TestSelectK:
    def _blobs(self, centers, n=15, spread=0.05, seed=0):
        rng = np.random.default_rng(seed)
        return np.vstack(
            [np.asarray(c) + rng.normal(scale=spread, size=(n, len(c))) for c in centers]
        )

    def test_two_blobs_choose_two(self):
        pts = self._blobs([(0.0, 0.0), (10.0, 10.0)])
        report = select_k_majority(pts, range(2, 7), np.random.default_rng(0))
        assert report.k == 2
        assert sum(report.sizes) == len(pts)

    def test_three_blobs_choose_three(self):
        pts = self._blobs([(0.0, 0.0), (10.0, 0.0), (5.0, 9.0)])
        report = select_k_majority(pts, range(2, 7), np.random.default_rng(0))
        assert report.k == 3

    def test_votes_sum_to_computable_indices(self):
        pts = self._blobs([(0.0, 0.0), (8.0, 8.0)], n=12, spread=0.4)
        report = select_k_majority(pts, range(2, 7), np.random.default_rng(1))
        voters = sum(1 for v in report.index_choices.values() if v is not None)
        assert sum(report.index_votes.values()) == voters
        assert report.majority == report.index_votes[report.k]
        assert 2 <= report.k <= 6

    def test_majority_tie_resolves_low(self):
        assert majority_winner({2: 3, 5: 3}) == 2
        assert majority_winner({4: 1, 3: 2, 6: 2}) == 3

    def test_needs_two_solutions(self):
        with pytest.raises(ValueError):
            select_k_majority(np.zeros((1, 2)), range(2, 7), np.random.default_rng(0))


class TestRaster:
    def test_shape_and_flags(self):
        ok = make_trial(True, 0.0, 100, improvements=(1, 3, 200))
        fail = make_trial(False, 5.0, 100, improvements=(2, 4))
        raster = improvement_raster([ok, fail], iterations=300)
        assert raster.shape == (2, 300)
        assert raster[0, 0] == 1 and raster[0, 2] == 1 and raster[0, 199] == 1
        assert raster[0].sum() == 3
        assert raster[1].sum() == 0  # failed trials render blank

    def test_flags_beyond_window_dropped(self):
        ok = make_trial(True, 0.0, 100, improvements=(1, 301))
        raster = improvement_raster([ok], iterations=300)
        assert raster[0].sum() == 1
