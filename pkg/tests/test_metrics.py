import warnings

import numpy as np
import pytest
from oracles import assignment_brute, auroc_paircount, dtw_path_enumeration, dtw_reference

from oodgen import (
    CostMatrix,
    ValidationError,
    auroc,
    dtw_distance,
    f1_hat,
    f1_score,
    normalized_distance_report,
    pairwise_cost,
    roc_points,
    wasserstein_assignment,
)


class TestDtw:
    def test_identical_sequences_zero(self):
        assert dtw_distance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_known_values(self):
        assert dtw_distance([0, 0, 0], [1, 1]) == 3.0
        assert dtw_distance([0, 1, 2], [0, 1, 2, 3]) == 1.0
        assert dtw_distance([5.0], [3.0]) == 2.0

    def test_vector_rows_use_pointwise_euclidean(self):
        a = np.array([[0.0, 0.0], [1.0, 0.0]])
        b = np.array([[0.0, 0.0], [1.0, 1.0]])
        assert dtw_distance(a, b) == pytest.approx(1.0)

    def test_matches_reference_recursion(self, rng):
        for _ in range(50):
            la, lb = rng.integers(1, 9, size=2)
            a, b = rng.normal(size=la), rng.normal(size=lb)
            assert dtw_distance(a, b) == pytest.approx(dtw_reference(a, b), abs=1e-12)

    def test_matches_reference_recursion_multivariate(self, rng):
        for _ in range(20):
            la, lb = rng.integers(1, 7, size=2)
            a, b = rng.normal(size=(la, 3)), rng.normal(size=(lb, 3))
            assert dtw_distance(a, b) == pytest.approx(dtw_reference(a, b), abs=1e-12)

    def test_matches_path_enumeration_exactly_on_grid_values(self, rng):
        # Values on a dyadic grid keep every partial sum exact, so the
        # dynamic program and explicit path enumeration agree bitwise.
        for _ in range(60):
            la, lb = rng.integers(1, 7, size=2)
            a = rng.integers(-64, 65, size=la) / 16.0
            b = rng.integers(-64, 65, size=lb) / 16.0
            assert dtw_distance(a, b) == dtw_path_enumeration(a, b)

    def test_symmetry(self, rng):
        for _ in range(20):
            a, b = rng.normal(size=8), rng.normal(size=5)
            assert dtw_distance(a, b) == pytest.approx(dtw_distance(b, a), abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValidationError):
            dtw_distance([], [1.0])
        with pytest.raises(ValidationError):
            dtw_distance([1.0, np.nan], [1.0])
        with pytest.raises(ValidationError):
            dtw_distance([[1.0, 2.0]], [1.0])
        with pytest.raises(ValidationError):
            dtw_distance([[1.0, 2.0]], [[1.0, 2.0, 3.0]])


class TestPairwiseCost:
    def test_dtw_batch_is_bitwise_equal_to_scalar_loop(self, rng):
        A = rng.normal(size=(12, 10))
        B = rng.normal(size=(9, 10))
        batch = pairwise_cost(A, B, metric="dtw").costs
        scalar = np.array([[dtw_distance(a, b) for b in B] for a in A])
        assert np.array_equal(batch, scalar)

    def test_euclidean_matches_norm_loop(self, rng):
        A = rng.normal(size=(8, 4))
        B = rng.normal(size=(6, 4))
        costs = pairwise_cost(A, B, metric="euclidean").costs
        for i, a in enumerate(A):
            for j, b in enumerate(B):
                assert costs[i, j] == pytest.approx(float(np.linalg.norm(a - b)), abs=1e-12)

    def test_unknown_metric_rejected(self):
        with pytest.raises(ValidationError):
            pairwise_cost(np.ones((2, 2)), np.ones((2, 2)), metric="cosine")

    def test_width_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            pairwise_cost(np.ones((2, 3)), np.ones((2, 4)))

    def test_cost_matrix_validation(self):
        with pytest.raises(ValidationError):
            CostMatrix(costs=np.array([[-1.0]]))
        with pytest.raises(ValidationError):
            CostMatrix(costs=np.array([[np.inf]]))


class TestWasserstein:
    def test_identical_sets_zero(self):
        A = np.array([[0.0, 0.0], [2.0, 1.0]])
        assert wasserstein_assignment(pairwise_cost(A, A, metric="euclidean")) == 0.0

    def test_known_shift(self):
        A = np.array([[0.0, 0.0], [1.0, 0.0]])
        B = A + np.array([0.0, 1.0])
        assert wasserstein_assignment(pairwise_cost(A, B, metric="euclidean")) == pytest.approx(1.0)

    def test_row_permutation_invariant(self, rng):
        A = rng.normal(size=(6, 3))
        B = rng.normal(size=(6, 3))
        w1 = wasserstein_assignment(pairwise_cost(A, B, metric="euclidean"))
        w2 = wasserstein_assignment(pairwise_cost(A, B[rng.permutation(6)], metric="euclidean"))
        assert w1 == pytest.approx(w2, abs=1e-12)

    def test_matches_factorial_search_exactly_on_grid_values(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 6))
            C = rng.integers(0, 1600, size=(n, n)) / 16.0
            assert wasserstein_assignment(C) == assignment_brute(C) / n

    def test_rectangular_rejected_with_hint(self):
        with pytest.raises(ValidationError, match="subsample"):
            wasserstein_assignment(np.ones((3, 4)))

    def test_accepts_plain_array(self):
        assert wasserstein_assignment(np.array([[0.0, 5.0], [5.0, 0.0]])) == 0.0


class TestDistanceReport:
    def test_invariants_on_three_sets(self, rng):
        sets = [rng.normal(size=(10, 4)) + shift for shift in (0.0, 3.0, 9.0)]
        report = normalized_distance_report(sets, metric="euclidean",
                                            dataset_ids=["a", "b", "c"])
        assert report.dataset_ids == ("a", "b", "c")
        assert np.array_equal(report.matrix, report.matrix.T)
        assert np.all(np.diag(report.matrix) == 0.0)
        assert report.normalized.max() == 1.0
        assert not report.degenerate
        # widely spread sets: the far pair dominates
        assert report.normalized[0, 2] == 1.0

    def test_identical_sets_degenerate_with_warning(self):
        A = np.array([[0.0, 1.0], [2.0, 3.0]])
        with pytest.warns(UserWarning, match="normalization skipped"):
            report = normalized_distance_report([A, A.copy()], metric="euclidean")
        assert report.degenerate
        assert np.all(report.matrix == 0.0)
        assert np.all(report.normalized == 0.0)

    def test_subsample_reduces_to_common_size(self, rng):
        big = rng.normal(size=(30, 3))
        small = rng.normal(size=(8, 3))
        report = normalized_distance_report([big, small], metric="euclidean")
        assert report.subsample_size == 8
        capped = normalized_distance_report([big, small], metric="euclidean",
                                            subsample_size=5)
        assert capped.subsample_size == 5

    def test_subsampling_is_seeded(self, rng):
        sets = [rng.normal(size=(20, 3)), rng.normal(size=(15, 3))]
        a = normalized_distance_report(sets, metric="euclidean", subsample_size=6,
                                       subsample_seed=3)
        b = normalized_distance_report(sets, metric="euclidean", subsample_size=6,
                                       subsample_seed=3)
        c = normalized_distance_report(sets, metric="euclidean", subsample_size=6,
                                       subsample_seed=4)
        assert np.array_equal(a.matrix, b.matrix)
        assert not np.array_equal(a.matrix, c.matrix)

    def test_validation(self, rng):
        with pytest.raises(ValidationError):
            normalized_distance_report([rng.normal(size=(5, 2))])
        with pytest.raises(ValidationError):
            normalized_distance_report([rng.normal(size=(5, 2)), rng.normal(size=(5, 3))])
        with pytest.raises(ValidationError):
            normalized_distance_report([rng.normal(size=(5, 2))] * 2, dataset_ids=["x"])


class TestAuroc:
    def test_perfect_and_reversed(self):
        assert auroc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
        assert auroc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
        assert auroc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0

    def test_all_tied_is_half(self):
        assert auroc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 0.5

    def test_matches_pair_counting_exactly(self, rng):
        for _ in range(30):
            n = int(rng.integers(5, 60))
            scores = np.round(rng.normal(size=n), 1)  # coarse grid forces ties
            labels = rng.integers(0, 2, size=n)
            if len(np.unique(labels)) < 2:
                continue
            assert auroc(scores, labels) == auroc_paircount(scores, labels)

    def test_single_class_rejected(self):
        with pytest.raises(ValidationError):
            auroc([0.1, 0.9], [1, 1])

    def test_bad_inputs(self):
        with pytest.raises(ValidationError):
            auroc([0.1, np.nan], [0, 1])
        with pytest.raises(ValidationError):
            auroc([0.1, 0.2], [0, 2])


class TestRocPoints:
    def test_perfect_separation_curve(self):
        fpr, tpr, thr = roc_points([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
        np.testing.assert_allclose(fpr, [0.0, 0.0, 0.0, 0.5, 1.0])
        np.testing.assert_allclose(tpr, [0.0, 0.5, 1.0, 1.0, 1.0])
        assert thr[0] == np.inf
        assert thr[-1] == 0.1

    def test_curve_reaches_the_corner_and_is_monotone(self, rng):
        scores = rng.normal(size=50)
        labels = rng.integers(0, 2, size=50)
        labels[:2] = [0, 1]
        fpr, tpr, _ = roc_points(scores, labels)
        assert fpr[0] == 0.0 and tpr[0] == 0.0
        assert fpr[-1] == 1.0 and tpr[-1] == 1.0
        assert np.all(np.diff(fpr) >= 0)
        assert np.all(np.diff(tpr) >= 0)

    def test_ties_collapse_to_one_point(self):
        fpr, tpr, thr = roc_points([0.5, 0.5], [0, 1])
        np.testing.assert_allclose(fpr, [0.0, 1.0])
        np.testing.assert_allclose(tpr, [0.0, 1.0])


class TestF1:
    def test_known_confusion(self):
        # tp=1 fp=1 fn=1 -> 2/(2+1+1)
        assert f1_score([1, 1, 0, 0], [1, 0, 1, 0]) == 0.5

    def test_perfect(self):
        assert f1_score([1, 0, 1], [1, 0, 1]) == 1.0

    def test_empty_positive_world_warns_and_returns_one(self):
        with pytest.warns(UserWarning, match="1.0"):
            assert f1_score([0, 0], [0, 0]) == 1.0

    def test_no_warning_in_normal_case(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            f1_score([1, 0], [0, 1])

    def test_validation(self):
        with pytest.raises(ValidationError):
            f1_score([0, 2], [0, 1])
        with pytest.raises(ValidationError):
            f1_score([0, 1, 1], [0, 1])


class TestF1Hat:
    def test_equal_scores_zero(self):
        assert f1_hat(0.97, 0.97) == 0.0

    def test_relative_direction(self):
        assert f1_hat(0.5, 1.0) == pytest.approx(-0.5)
        assert f1_hat(1.0, 0.8) == pytest.approx(0.25)

    def test_nonpositive_baseline_rejected(self):
        with pytest.raises(ValidationError):
            f1_hat(0.5, 0.0)
        with pytest.raises(ValidationError):
            f1_hat(-0.1, 0.5)
