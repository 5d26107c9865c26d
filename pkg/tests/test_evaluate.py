"""Scoring tests: coherence counting oracle, LP transport oracle, wmd metric laws."""

import math

import numpy as np
import pytest
from scipy.optimize import linprog

from topictree.errors import InputError, NumericError
from topictree.evaluate import (
    EmbeddingTable,
    SimilarityHeatmap,
    TopicWordSet,
    TransportProblem,
    coherence,
    embedding_coverage,
    emd,
    heatmap_from_word_sets,
    load_embeddings,
    read_heatmap_csv,
    wmd,
    write_heatmap_csv,
)


# ------------------------------------------------------------- coherence

def coherence_oracle(doc_sets, words):
    """Independent brute-force double loop over documents."""
    kept = [w for w in words if any(w in d for d in doc_sets)]
    total = 0.0
    for p in range(1, len(kept)):
        for l in range(p):
            joint = sum(1 for d in doc_sets if kept[p] in d and kept[l] in d)
            single = sum(1 for d in doc_sets if kept[l] in d)
            total += math.log((joint + 1) / single)
    return total


class TestCoherence:
    def test_joint_plus_one_equals_single_gives_zero(self):
        # D(v1) = 4 docs, D(v2, v1) = 3 -> log(4/4) = 0
        docs = [{"a", "b"}, {"a", "b"}, {"a", "b"}, {"a"}]
        assert coherence(docs, ["a", "b"]) == pytest.approx(0.0, abs=1e-15)

    def test_zero_joint_count(self):
        # D(v1) = 4, D(v2, v1) = 0 -> log(1/4)
        docs = [{"a"}, {"a"}, {"a"}, {"a", "c"}, {"b"}]
        assert coherence(docs, ["a", "b"]) == pytest.approx(math.log(1 / 4), abs=1e-12)

    def test_twenty_doc_fixture_matches_oracle_exactly(self):
        rng = np.random.default_rng(0)
        words = [f"w{i}" for i in range(10)]
        extra = [f"x{i}" for i in range(30)]
        docs = []
        for _ in range(20):
            picks = rng.random(10) < np.linspace(0.9, 0.15, 10)
            toks = {w for w, hit in zip(words, picks) if hit}
            toks |= set(rng.choice(extra, 5))
            docs.append(frozenset(toks))
        got = coherence(docs, words)
        want = coherence_oracle(docs, words)
        assert got == pytest.approx(want, abs=1e-12)

    def test_absent_words_dropped_with_warning(self, caplog):
        docs = [{"a", "b"}] * 3
        with caplog.at_level("WARNING"):
            score = coherence(docs, ["a", "ghost", "b"])
        assert "ghost" in caplog.text
        assert score == pytest.approx(coherence_oracle(docs, ["a", "b"]), abs=1e-12)

    def test_fewer_than_two_scoreable_is_error(self):
        with pytest.raises(NumericError, match="fewer than 2"):
            coherence([{"a"}], ["a", "ghost"])

    def test_term_bounds(self):
        # every pair term lies in [log(1/D(vl)), log((D(vl)+1)/D(vl))]
        rng = np.random.default_rng(1)
        vocab = [f"w{i}" for i in range(6)]
        docs = [frozenset(rng.choice(vocab, rng.integers(1, 5), replace=False))
                for _ in range(15)]
        words = [w for w in vocab if any(w in d for d in docs)][:4]
        if len(words) < 2:
            pytest.skip("degenerate draw")
        total = coherence(docs, words)
        lo = hi = 0.0
        for p in range(1, len(words)):
            for l in range(p):
                dl = sum(1 for d in docs if words[l] in d)
                lo += math.log(1 / dl)
                hi += math.log((dl + 1) / dl)
        assert lo - 1e-12 <= total <= hi + 1e-12


# ------------------------------------------------------------ embeddings

class TestLoadEmbeddings:
    def test_small_table(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("2 3\na 1 0 0\nb 0 1 0\n", "utf-8")
        emb = load_embeddings(path)
        assert len(emb) == 2 and emb.dim == 3
        assert np.allclose(emb.get("a"), [1, 0, 0])
        assert "c" not in emb and emb.get("c") is None

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("3 3\na 1 0 0\nb 0 1 0\n", "utf-8")
        with pytest.raises(InputError, match="declares 3"):
            load_embeddings(path)

    def test_duplicate_token(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("2 2\na 1 0\na 0 1\n", "utf-8")
        with pytest.raises(InputError, match=r"emb\.txt:3: duplicate"):
            load_embeddings(path)

    def test_dimension_mismatch_reports_line(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("2 3\na 1 0 0\nb 0 1\n", "utf-8")
        with pytest.raises(InputError, match=r"emb\.txt:3"):
            load_embeddings(path)

    def test_malformed_float(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("1 2\na 1 oops\n", "utf-8")
        with pytest.raises(InputError, match=r"emb\.txt:2: malformed"):
            load_embeddings(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError, match="cannot read"):
            load_embeddings(tmp_path / "none.txt")


# ------------------------------------------------------------------ emd

def lp_transport_oracle(a, b, C):
    m, n = C.shape
    A_eq = []
    for i in range(m):
        row = np.zeros((m, n))
        row[i, :] = 1
        A_eq.append(row.ravel())
    for j in range(n):
        row = np.zeros((m, n))
        row[:, j] = 1
        A_eq.append(row.ravel())
    res = linprog(
        C.ravel(),
        A_eq=np.array(A_eq)[:-1],  # drop one redundant constraint
        b_eq=np.concatenate([a, b])[:-1],
        bounds=(0, None),
        method="highs",
    )
    assert res.success
    return res.fun


class TestEmd:
    def test_zero_cost_diagonal(self):
        a = np.array([0.3, 0.7])
        C = 1.0 - np.eye(2)
        cost, plan = emd(TransportProblem(a, a.copy(), C))
        assert cost == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(plan, np.diag(a))

    def test_one_by_one(self):
        p = TransportProblem(np.array([1.0]), np.array([1.0]), np.array([[2.5]]))
        cost, plan = emd(p)
        assert cost == pytest.approx(2.5)
        assert np.allclose(plan, [[1.0]])

    def test_matches_lp_oracle_on_random_problems(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            m, n = rng.integers(1, 7, size=2)
            a = rng.random(m) + 0.05
            a /= a.sum()
            b = rng.random(n) + 0.05
            b /= b.sum()
            C = rng.random((m, n)) * 4
            cost, plan = emd(TransportProblem(a, b, C))
            assert cost == pytest.approx(lp_transport_oracle(a, b, C), abs=1e-6)
            assert np.abs(plan.sum(axis=1) - a).max() < 1e-9
            assert np.abs(plan.sum(axis=0) - b).max() < 1e-9
            assert plan.min() >= 0

    def test_cost_nonnegative(self):
        rng = np.random.default_rng(3)
        a = rng.random(4)
        a /= a.sum()
        cost, _ = emd(TransportProblem(a, a.copy(), rng.random((4, 4))))
        assert cost >= 0

    def test_invariants_enforced(self):
        with pytest.raises(NumericError, match="masses differ"):
            TransportProblem(np.array([1.0]), np.array([0.5]), np.array([[1.0]]))
        with pytest.raises(NumericError, match="nonnegative"):
            TransportProblem(np.array([1.0]), np.array([1.0]), np.array([[-1.0]]))
        with pytest.raises(NumericError, match="dimensions"):
            TransportProblem(np.array([1.0]), np.array([1.0]), np.ones((2, 2)))


# ------------------------------------------------------------------ wmd

def toy_embeddings(words, dim=5, seed=0):
    rng = np.random.default_rng(seed)
    return EmbeddingTable({w: rng.normal(size=dim) for w in words}, dim)


def word_set(path, words):
    n = len(words)
    return TopicWordSet(path=path, words=tuple(words),
                        weights=tuple(1.0 - i / (n + 1) for i in range(n)))


class TestWmd:
    def test_identical_sets_have_zero_distance(self):
        emb = toy_embeddings(["a", "b", "c"])
        s = word_set("1", ["a", "b", "c"])
        assert wmd(s, s, emb) == pytest.approx(0.0, abs=1e-12)

    def test_singletons_reduce_to_euclidean(self):
        emb = toy_embeddings(["x", "y"])
        d = wmd(word_set("1", ["x"]), word_set("2", ["y"]), emb)
        want = float(np.linalg.norm(emb.get("x") - emb.get("y")))
        assert d == pytest.approx(want, abs=1e-12)

    def test_matches_lp_oracle(self):
        words_a = ["a", "b", "c", "d"]
        words_b = ["e", "f", "g"]
        emb = toy_embeddings(words_a + words_b, seed=4)
        got = wmd(word_set("1", words_a), word_set("2", words_b), emb)
        Va = np.stack([emb.get(w) for w in words_a])
        Vb = np.stack([emb.get(w) for w in words_b])
        C = np.linalg.norm(Va[:, None, :] - Vb[None, :, :], axis=2)
        a = np.full(4, 1 / 4)
        b = np.full(3, 1 / 3)
        assert got == pytest.approx(lp_transport_oracle(a, b, C), abs=1e-6)

    def test_missing_tokens_dropped_and_renormalized(self):
        emb = toy_embeddings(["a", "b"])
        d = wmd(word_set("1", ["a", "ghost"]), word_set("2", ["b", "phantom"]), emb)
        want = float(np.linalg.norm(emb.get("a") - emb.get("b")))
        assert d == pytest.approx(want, abs=1e-12)

    def test_all_tokens_missing_is_error(self):
        emb = toy_embeddings(["a"])
        with pytest.raises(NumericError, match="no embeddable words"):
            wmd(word_set("1", ["ghost"]), word_set("2", ["a"]), emb)

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        for trial in range(10):
            wa = [f"a{i}" for i in range(6)]
            wb = [f"b{i}" for i in range(4)]
            emb = toy_embeddings(wa + wb, seed=trial)
            d_ab = wmd(word_set("1", wa), word_set("2", wb), emb)
            d_ba = wmd(word_set("2", wb), word_set("1", wa), emb)
            assert abs(d_ab - d_ba) < 1e-9

    def test_triangle_inequality_on_uniform_sets(self):
        for trial in range(10):
            names = [[f"s{s}w{i}" for i in range(8)] for s in range(3)]
            emb = toy_embeddings([w for ws in names for w in ws], seed=100 + trial)
            sets = [word_set(str(s), ws) for s, ws in enumerate(names)]
            d01 = wmd(sets[0], sets[1], emb)
            d12 = wmd(sets[1], sets[2], emb)
            d02 = wmd(sets[0], sets[2], emb)
            assert d02 <= d01 + d12 + 1e-6

    def test_weighted_mass_flag(self):
        emb = toy_embeddings(["a", "b", "y"])
        a = TopicWordSet(path="1", words=("a", "b"), weights=(0.9, 0.1))
        b = TopicWordSet(path="2", words=("y",), weights=(1.0,))
        da = np.linalg.norm(emb.get("a") - emb.get("y"))
        db = np.linalg.norm(emb.get("b") - emb.get("y"))
        assert wmd(a, b, emb, use_weights=True) == pytest.approx(0.9 * da + 0.1 * db, abs=1e-9)
        assert wmd(a, b, emb, use_weights=False) == pytest.approx(0.5 * da + 0.5 * db, abs=1e-9)


class TestWordSetValidation:
    def test_duplicate_words_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            TopicWordSet(path="1", words=("a", "a"), weights=(1.0, 0.5))

    def test_ascending_weights_rejected(self):
        with pytest.raises(ValueError, match="descending"):
            TopicWordSet(path="1", words=("a", "b"), weights=(0.5, 1.0))

    def test_coverage_ratio(self):
        emb = toy_embeddings(["a", "b"])
        assert embedding_coverage(["a", "b", "c", "d"], emb) == 0.5
        assert embedding_coverage([], emb) == 0.0


# -------------------------------------------------------------- heatmap

class TestHeatmap:
    def test_single_node(self):
        emb = toy_embeddings(["a", "b"])
        hm = heatmap_from_word_sets([word_set("1", ["a", "b"])], emb)
        assert hm.distances.shape == (1, 1)
        assert hm.distances[0, 0] == 0.0
        assert hm.similarities()[0, 0] == 1.0  # d_min == d_max handled as sim 1

    def test_identical_word_sets_fully_similar(self):
        emb = toy_embeddings(["a", "b", "c"])
        sets = [word_set("1", ["a", "b", "c"]), word_set("2", ["a", "b", "c"])]
        hm = heatmap_from_word_sets(sets, emb)
        assert hm.distances[0, 1] == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(hm.similarities(), 1.0)

    def test_three_node_fixture_symmetric_and_matches_wmd(self):
        names = {p: [f"{p}w{i}" for i in range(5)] for p in ["1", "2", "1-1"]}
        emb = toy_embeddings([w for ws in names.values() for w in ws], seed=9)
        sets = [word_set(p, ws) for p, ws in names.items()]
        hm = heatmap_from_word_sets(sets, emb)
        # ordered first layer to deeper layers
        assert hm.paths == ("1", "2", "1-1")
        D = hm.distances
        assert np.allclose(D, D.T, atol=1e-9)
        assert np.allclose(np.diag(D), 0.0)
        by_path = {s.path: s for s in sets}
        for i, pi in enumerate(hm.paths):
            for j, pj in enumerate(hm.paths):
                if i != j:
                    assert D[i, j] == pytest.approx(
                        wmd(by_path[pi], by_path[pj], emb), abs=1e-9
                    )

    def test_display_transform_affine(self):
        hm = SimilarityHeatmap(
            paths=("1", "2"),
            distances=np.array([[0.0, 2.0], [2.0, 0.0]]),
            d_min=0.0,
            d_max=2.0,
        )
        assert np.allclose(hm.similarities(), [[1.0, 0.0], [0.0, 1.0]])

    def test_csv_round_trip(self, tmp_path):
        emb = toy_embeddings([f"w{i}" for i in range(6)])
        sets = [word_set("1", [f"w{i}" for i in range(3)]),
                word_set("2", [f"w{i}" for i in range(3, 6)])]
        hm = heatmap_from_word_sets(sets, emb)
        path = tmp_path / "heatmap.csv"
        write_heatmap_csv(path, hm)
        loaded = read_heatmap_csv(path)
        assert loaded.paths == hm.paths
        assert np.allclose(loaded.distances, hm.distances, atol=0)
        assert loaded.d_min == hm.d_min and loaded.d_max == hm.d_max
        assert loaded.transform == hm.transform
        assert (tmp_path / "heatmap.meta.json").exists()
