"""Metrics against brute-force assignment, probability-table, and
exhaustive-search oracles."""

import itertools
import math

import numpy as np
import pytest

from tring.metrics import (
    _lloyd,
    accuracy,
    entropy,
    kmeans,
    knn_classify,
    mutual_information,
    nmi,
    sparseness,
)


def accuracy_oracle(pred, truth):
    """Best match count over all permutations of a padded confusion matrix."""
    pl = np.unique(pred)
    tl = np.unique(truth)
    size = max(pl.size, tl.size)
    c = np.zeros((size, size), dtype=int)
    for p, t in zip(pred, truth):
        c[np.flatnonzero(pl == p)[0], np.flatnonzero(tl == t)[0]] += 1
    best = max(
        sum(c[i, perm[i]] for i in range(size))
        for perm in itertools.permutations(range(size))
    )
    return best / len(pred)


def mi_oracle(a, b):
    """Dict-based mutual information in bits."""
    n = len(a)
    pa, pb, pab = {}, {}, {}
    for x, y in zip(a, b):
        pa[x] = pa.get(x, 0) + 1
        pb[y] = pb.get(y, 0) + 1
        pab[(x, y)] = pab.get((x, y), 0) + 1
    total = 0.0
    for (x, y), cnt in pab.items():
        pj = cnt / n
        total += pj * math.log2(pj / ((pa[x] / n) * (pb[y] / n)))
    return total


def entropy_oracle(a):
    n = len(a)
    counts = {}
    for x in a:
        counts[x] = counts.get(x, 0) + 1
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def wcss_of_partition(x, labels):
    total = 0.0
    for c in np.unique(labels):
        pts = x[labels == c]
        total += np.sum((pts - pts.mean(axis=0)) ** 2)
    return total


class TestSparseness:
    def test_one_hot_is_one(self):
        assert sparseness(np.array([0.0, 0.0, 3.0, 0.0])) == pytest.approx(1.0)

    def test_constant_is_zero(self):
        assert sparseness(np.full(4, 2.5)) == pytest.approx(0.0, abs=1e-12)

    def test_half_active_vector(self):
        # (sqrt(4) - 2/sqrt(2)) / (sqrt(4) - 1)
        v = np.array([1.0, 1.0, 0.0, 0.0])
        assert sparseness(v) == pytest.approx((2 - np.sqrt(2)) / 1, rel=1e-12)

    def test_scale_invariance(self):
        v = np.random.default_rng(0).random((3, 4))
        for c in (0.5, -2.0, 100.0):
            assert sparseness(c * v) == pytest.approx(sparseness(v), abs=1e-12)

    def test_in_unit_interval(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            val = sparseness(rng.standard_normal(rng.integers(2, 30)))
            assert 0.0 <= val <= 1.0 + 1e-12

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            sparseness(np.zeros(5))


class TestAccuracy:
    def test_identical_labelings(self):
        y = np.array([0, 1, 2, 1, 0])
        assert accuracy(y, y) == 1.0

    def test_relabeling_absorbed(self):
        truth = np.array([0, 0, 1, 1, 2, 2])
        pred = np.array([5, 5, 9, 9, 7, 7])  # bijective relabeling
        assert accuracy(pred, truth) == 1.0

    def test_hand_worked_three_cluster_case(self):
        truth = np.array([0, 0, 1, 1, 2, 2])
        pred = np.array([1, 1, 1, 0, 0, 2])
        assert accuracy(pred, truth) == pytest.approx(4 / 6)
        assert accuracy_oracle(pred, truth) == pytest.approx(4 / 6)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_permutation_oracle(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 7))
        n = int(rng.integers(5, 40))
        pred = rng.integers(0, k, size=n)
        truth = rng.integers(0, k, size=n)
        assert accuracy(pred, truth) == pytest.approx(accuracy_oracle(pred, truth))

    def test_invariant_under_relabeling_either_side(self):
        rng = np.random.default_rng(99)
        pred = rng.integers(0, 4, size=30)
        truth = rng.integers(0, 4, size=30)
        base = accuracy(pred, truth)
        perm = rng.permutation(4)
        assert accuracy(perm[pred], truth) == pytest.approx(base)
        assert accuracy(pred, perm[truth]) == pytest.approx(base)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            accuracy([0, 1], [0, 1, 2])


class TestMutualInformation:
    def test_identical_two_class_labelings(self):
        a = np.array([0, 0, 1, 1])
        assert mutual_information(a, a) == pytest.approx(1.0)  # H = 1 bit
        assert nmi(a, a) == pytest.approx(1.0, abs=1e-12)

    def test_independent_uniform_labelings(self):
        a = np.array([0, 0, 1, 1])
        b = np.array([0, 1, 0, 1])
        assert mutual_information(a, b) == pytest.approx(0.0, abs=1e-12)
        assert nmi(a, b) == 0.0

    def test_hand_worked_asymmetric_case(self):
        a = np.array([0, 0, 1, 1])
        b = np.array([0, 0, 0, 1])
        # joint counts: (0,0)=2, (1,0)=1, (1,1)=1
        expected = (
            0.5 * math.log2(0.5 / (0.5 * 0.75))
            + 0.25 * math.log2(0.25 / (0.5 * 0.75))
            + 0.25 * math.log2(0.25 / (0.5 * 0.25))
        )
        assert mutual_information(a, b) == pytest.approx(expected, rel=1e-12)
        assert entropy(a) == pytest.approx(1.0)
        assert entropy(b) == pytest.approx(entropy_oracle(b), rel=1e-12)
        assert nmi(a, b) == pytest.approx(expected / 1.0, rel=1e-12)

    @pytest.mark.parametrize("seed", range(15))
    def test_matches_probability_table_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 60))
        a = rng.integers(0, rng.integers(2, 6), size=n)
        b = rng.integers(0, rng.integers(2, 6), size=n)
        assert mutual_information(a, b) == pytest.approx(mi_oracle(a, b), abs=1e-10)
        ref = mi_oracle(a, b)
        ref_nmi = (
            0.0
            if ref <= 0
            else min(1.0, ref / max(entropy_oracle(a), entropy_oracle(b)))
        )
        assert nmi(a, b) == pytest.approx(ref_nmi, abs=1e-10)

    def test_nmi_symmetric_and_bounded(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.integers(0, 4, size=25)
            b = rng.integers(0, 3, size=25)
            assert nmi(a, b) == pytest.approx(nmi(b, a), abs=1e-12)
            assert 0.0 <= nmi(a, b) <= 1.0

    def test_single_cluster_gives_zero(self):
        a = np.zeros(6, dtype=int)
        b = np.array([0, 1, 2, 0, 1, 2])
        assert nmi(a, b) == 0.0
        assert nmi(b, a) == 0.0


class TestKmeans:
    def test_two_separated_scalar_blobs(self):
        x = np.array([0.0, 0.1, 10.0, 10.1])
        labels = kmeans(x, 2, restarts=10, seed=0)
        assert accuracy(labels, np.array([0, 0, 1, 1])) == 1.0

    def test_k_equals_samples_gives_zero_wcss(self):
        x = np.random.default_rng(1).random((6, 3))
        labels = kmeans(x, 6, restarts=5, seed=0)
        assert np.unique(labels).size == 6
        assert wcss_of_partition(x, labels) == pytest.approx(0.0, abs=1e-20)

    def test_two_tight_triads_match_exhaustive_search(self):
        rng = np.random.default_rng(2)
        x = np.vstack(
            [np.array([0.0, 0.0]) + 0.05 * rng.random((3, 2)),
             np.array([5.0, 5.0]) + 0.05 * rng.random((3, 2))]
        )
        labels = kmeans(x, 2, restarts=200, seed=3)
        best = min(
            wcss_of_partition(x, np.array(assign))
            for assign in itertools.product([0, 1], repeat=6)
            if len(set(assign)) == 2
        )
        assert wcss_of_partition(x, labels) == pytest.approx(best, rel=1e-12)

    def test_deterministic_given_seed(self):
        x = np.random.default_rng(4).random((20, 3))
        a = kmeans(x, 4, restarts=8, seed=11)
        b = kmeans(x, 4, restarts=8, seed=11)
        assert np.array_equal(a, b)

    def test_objective_never_increases_within_a_run(self):
        x = np.random.default_rng(5).random((30, 2))
        for r in range(10):
            _, _, history = _lloyd(x, 4, np.random.default_rng((6, r)))
            assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))

    def test_k_out_of_range(self):
        x = np.random.default_rng(6).random((4, 2))
        with pytest.raises(ValueError):
            kmeans(x, 5, restarts=2, seed=0)
        with pytest.raises(ValueError):
            kmeans(x, 0, restarts=2, seed=0)


class TestKnnClassify:
    def test_exact_train_point_with_k1(self):
        train = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]])
        labels = np.array([0, 1, 2])
        pred = knn_classify(train, labels, train, 1)
        assert np.array_equal(pred, labels)

    def test_two_versus_one_majority(self):
        train = np.array([[0.0], [0.2], [5.0]])
        labels = np.array([0, 0, 1])
        pred = knn_classify(train, labels, np.array([[0.1]]), 3)
        assert pred[0] == 0

    def test_vote_tie_breaks_by_summed_distance(self):
        # k=2, one neighbor from each class; class 1 sits closer.
        train = np.array([[0.0], [1.0]])
        labels = np.array([0, 1])
        assert knn_classify(train, labels, np.array([[0.9]]), 2)[0] == 1
        assert knn_classify(train, labels, np.array([[0.1]]), 2)[0] == 0

    def test_full_tie_breaks_by_lower_class_id(self):
        train = np.array([[-1.0], [1.0]])
        labels = np.array([3, 1])
        assert knn_classify(train, labels, np.array([[0.0]]), 2)[0] == 1

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_exhaustive_scan_oracle(self, seed):
        rng = np.random.default_rng(seed)
        train = rng.random((20, 3))
        labels = rng.integers(0, 3, size=20)
        test = rng.random((8, 3))
        k = 5
        pred = knn_classify(train, labels, test, k)
        for i in range(8):
            dists = [
                (np.linalg.norm(test[i] - train[j]), j) for j in range(20)
            ]
            dists.sort()
            neigh = [j for _, j in dists[:k]]
            votes = {}
            for j in neigh:
                c = int(labels[j])
                cnt, s = votes.get(c, (0, 0.0))
                votes[c] = (cnt + 1, s + np.linalg.norm(test[i] - train[j]))
            # most votes, then smallest summed distance, then lowest id
            expected = min(votes, key=lambda c: (-votes[c][0], votes[c][1], c))
            assert pred[i] == expected

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            knn_classify(np.ones((3, 2)), [0, 1, 0], np.ones((1, 2)), 4)
