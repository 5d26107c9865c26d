"""Topic-count selection tests: SVD oracle, lss hand checks, planted recovery."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse

from topictree.errors import NumericError
from topictree.modelsel import (
    KRange,
    TopicSet,
    _argmax_median,
    draw_seeds,
    lss,
    pairwise_cosine,
    select_k,
    suggest_range,
    variance_increments,
    write_lss_csv,
    write_variance_csv,
)

from conftest import disjoint_topic_docs, matrix_from_docs


def svd_increment_oracle(X: np.ndarray, k_max: int) -> np.ndarray:
    sv = np.linalg.svd(X, compute_uv=False)
    return sv[:k_max] ** 2 / (X**2).sum()


class TestVarianceIncrements:
    def test_orthogonal_equal_norm_columns(self):
        # 4 orthogonal columns of equal norm -> each direction explains 1/4
        X = np.zeros((10, 4))
        for j in range(4):
            X[2 * j, j] = 3.0
        inc = variance_increments(X, 4)
        assert np.allclose(inc, 0.25)

    def test_rank_one(self):
        u = np.arange(1.0, 7.0).reshape(-1, 1)
        v = np.ones((1, 5))
        inc = variance_increments(u @ v, 3)
        assert inc[0] == pytest.approx(1.0, abs=1e-12)
        assert max(inc[1:]) < 1e-12

    def test_matches_dense_svd_oracle(self):
        rng = np.random.default_rng(0)
        X = rng.random((30, 40))
        inc = variance_increments(X, 12)
        assert np.abs(np.array(inc) - svd_increment_oracle(X, 12)).max() < 1e-8

    def test_sparse_iterative_path_matches_oracle(self):
        rng = np.random.default_rng(1)
        X = rng.random((30, 40))
        X[X < 0.5] = 0.0
        inc = variance_increments(sparse.csc_array(X), 6, method="sparse")
        assert np.abs(np.array(inc) - svd_increment_oracle(X, 6)).max() < 1e-8

    def test_sparse_path_deterministic(self):
        rng = np.random.default_rng(2)
        X = sparse.random_array((80, 90), density=0.2, random_state=3)
        a = variance_increments(X, 5, method="sparse")
        b = variance_increments(X, 5, method="sparse")
        assert a == b

    def test_sums_to_one_at_full_rank(self):
        rng = np.random.default_rng(3)
        X = rng.random((8, 6))
        inc = variance_increments(X, 6)
        assert sum(inc) == pytest.approx(1.0, abs=1e-8)

    def test_partial_sum_below_one(self):
        rng = np.random.default_rng(4)
        X = rng.random((20, 15))
        assert sum(variance_increments(X, 5)) < 1.0

    def test_k_max_out_of_range(self):
        with pytest.raises(NumericError):
            variance_increments(np.ones((3, 3)), 4)
        with pytest.raises(NumericError):
            variance_increments(np.ones((3, 3)), 0)


class TestSuggestRange:
    def test_plateau_detection(self):
        inc = [0.5, 0.2, 0.05, 0.049, 0.048, 0.047, 0.046]
        assert suggest_range(inc) == KRange(3, 7)

    def test_geometric_decay_falls_back(self):
        inc = [0.5 * 0.5**i for i in range(10)]
        assert suggest_range(inc) == KRange(2, 6)

    def test_empty_series_is_error(self):
        with pytest.raises(ValueError):
            suggest_range([])

    def test_immediate_plateau(self):
        assert suggest_range([0.3, 0.29, 0.28, 0.27]) == KRange(1, 5)


class TestLss:
    def test_identity_matrix(self):
        assert lss(np.eye(4)) == 1.0

    def test_symmetric_two_by_two(self):
        assert lss(np.array([[0.9, 0.1], [0.2, 0.8]])) == pytest.approx(0.8)

    def test_weak_row_dominates(self):
        # row maxima {0.9, 0.2}, column maxima {0.9, 0.85} -> min = 0.2
        assert lss(np.array([[0.9, 0.85], [0.2, 0.1]])) == pytest.approx(0.2)

    def test_empty_matrix_is_error(self):
        with pytest.raises(NumericError):
            lss(np.zeros((0, 0)))

    def test_hand_oracle_on_random_matrices(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            S = rng.random((5, 5))
            maxima = [max(row) for row in S] + [max(col) for col in S.T]
            assert lss(S) == min(maxima)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        S = rng.random((4, 6))
        rp = rng.permutation(4)
        cp = rng.permutation(6)
        assert lss(S[rp][:, cp]) == pytest.approx(lss(S), abs=1e-15)

    def test_upper_bound_by_row_maxima(self):
        rng = np.random.default_rng(6)
        S = rng.random((5, 5))
        assert lss(S) <= min(S.max(axis=1))

    def test_one_iff_every_row_and_column_attains_one(self):
        S = np.eye(3)
        assert lss(S) == 1.0
        S[2, 2] = 0.99  # row 2 and column 2 no longer attain 1
        assert lss(S) < 1.0


class TestPairwiseCosine:
    def _unit_set(self, vecs, seed=0):
        V = np.array(vecs, dtype=float).T
        V = V / np.linalg.norm(V, axis=0)
        return TopicSet(vectors=V, seed=seed)

    def test_self_similarity_is_identity_diagonal(self):
        A = self._unit_set([[1, 0, 0], [0, 1, 1]])
        S = pairwise_cosine(A, A)
        assert np.allclose(np.diag(S), 1.0)

    def test_disjoint_support_gives_zeros(self):
        A = self._unit_set([[1, 1, 0, 0]])
        B = self._unit_set([[0, 0, 1, 2]])
        assert np.allclose(pairwise_cosine(A, B), 0.0)

    def test_matches_brute_force_dots(self):
        rng = np.random.default_rng(7)
        Va = rng.random((6, 3))
        Vb = rng.random((6, 3))
        Va /= np.linalg.norm(Va, axis=0)
        Vb /= np.linalg.norm(Vb, axis=0)
        S = pairwise_cosine(TopicSet(Va, 0), TopicSet(Vb, 1))
        for a in range(3):
            for b in range(3):
                assert S[a, b] == pytest.approx(float(Va[:, a] @ Vb[:, b]), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(NumericError):
            pairwise_cosine(
                TopicSet(np.ones((4, 2)), 0), TopicSet(np.ones((4, 3)), 1)
            )


class TestSelectK:
    def test_single_candidate_range(self):
        docs = disjoint_topic_docs(seed=0, topics=2, words_per_topic=10,
                                   docs_per_topic=12, tokens_per_doc=15)
        cm = matrix_from_docs(docs, min_df=1)
        k, dist = select_k(cm.X, KRange(4, 4), q=2, seed_master=0, max_iters=50)
        assert k == 4
        assert set(dist) == {4}
        assert len(dist[4]) == 2

    def test_deterministic(self):
        docs = disjoint_topic_docs(seed=1, topics=2, words_per_topic=10,
                                   docs_per_topic=10, tokens_per_doc=12)
        cm = matrix_from_docs(docs, min_df=1)
        a = select_k(cm.X, KRange(2, 3), q=3, seed_master=5, max_iters=60)
        b = select_k(cm.X, KRange(2, 3), q=3, seed_master=5, max_iters=60)
        assert a[0] == b[0]
        assert a[1] == b[1]

    def test_scores_in_unit_interval_and_q_per_k(self):
        docs = disjoint_topic_docs(seed=2, topics=3, words_per_topic=8,
                                   docs_per_topic=10, tokens_per_doc=10)
        cm = matrix_from_docs(docs, min_df=1)
        _, dist = select_k(cm.X, KRange(2, 4), q=4, seed_master=1, max_iters=60)
        assert set(dist) == {2, 3, 4}
        for scores in dist.values():
            assert len(scores) == 4
            assert all(0.0 <= s <= 1.0 for s in scores)

    def test_recovers_planted_topic_count(self):
        docs = disjoint_topic_docs(seed=3, topics=3, words_per_topic=30,
                                   docs_per_topic=40, tokens_per_doc=25)
        cm = matrix_from_docs(docs, min_df=1)
        k, _ = select_k(cm.X, KRange(2, 5), q=6, seed_master=11, max_iters=150)
        assert k == 3

    def test_range_exceeding_matrix_is_error(self):
        with pytest.raises(NumericError):
            select_k(np.ones((3, 3)) + np.eye(3), KRange(2, 5), q=1, seed_master=0)

    def test_q_must_be_positive(self):
        with pytest.raises(ValueError):
            select_k(np.eye(3), KRange(2, 2), q=0, seed_master=0)


class TestMedianRule:
    def test_even_length_median_is_mean_of_middle_two(self):
        # medians: k=2 -> 0.5, k=3 -> 0.55 (mean of 0.5, 0.6)
        dist = {2: [0.5, 0.5], 3: [0.4, 0.6, 0.5, 0.7]}
        assert _argmax_median(dist) == 3

    def test_tie_goes_to_smaller_k(self):
        dist = {4: [0.7, 0.7], 3: [0.7], 5: [0.7, 0.7, 0.7]}
        assert _argmax_median(dist) == 3

    def test_seed_drawing_deterministic(self):
        assert draw_seeds(42, 5) == draw_seeds(42, 5)
        assert draw_seeds(42, 5) != draw_seeds(43, 5)


class TestCsvExports:
    def test_variance_csv(self, tmp_path):
        path = tmp_path / "variance.csv"
        write_variance_csv(path, [0.5, 0.25, 0.125])
        lines = path.read_text().splitlines()
        assert lines[0] == "k,increment"
        assert lines[1] == "1,0.5"
        assert len(lines) == 4

    def test_lss_csv(self, tmp_path):
        path = tmp_path / "scores.csv"
        write_lss_csv(path, {3: [0.5, 0.75], 2: [1.0]})
        lines = path.read_text().splitlines()
        assert lines[0] == "k,score"
        assert lines[1] == "2,1.0"  # sorted by k
        assert lines[2] == "3,0.5"
        assert len(lines) == 4
