import math

import numpy as np
import pytest

from litgraph.embeddings import EmbeddingStore
from litgraph.errors import EmptyStoreError, MissingEmbeddingError, ZeroVectorError
from litgraph.retriever import (
    Query,
    baseline_score,
    concept_score,
    cosine,
    recall_at_k,
    retrieve_top_k,
    similarity_histogram,
)


def brute_force_rank(ids, vectors, query_vec, method_vec=None):
    """Independent oracle: full sort by (-cosine, id) computed with math ops."""
    def cos(u, v):
        num = sum(a * b for a, b in zip(u, v))
        return num / (math.sqrt(sum(a * a for a in u)) * math.sqrt(sum(b * b for b in v)))

    scored = [(pid, cos(vec, query_vec)) for pid, vec in zip(ids, vectors)]
    return sorted(scored, key=lambda t: (-t[1], t[0]))


def random_store(n, dim, rng, with_text=True):
    store = EmbeddingStore()
    for i in range(n):
        store.add_concept_vectors(f"p{i:04d}", rng.normal(size=(3, dim)))
        if with_text:
            store.add_text_vector(f"p{i:04d}", rng.normal(size=dim))
    return store


class TestCosine:
    def test_identical_unit_vectors(self):
        assert cosine(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(0.0)

    def test_closed_form_inv_sqrt2(self):
        got = cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        assert got == pytest.approx(0.70710678, abs=1e-8)

    def test_symmetric(self):
        rng = np.random.default_rng(0)
        u, v = rng.normal(size=6), rng.normal(size=6)
        assert cosine(u, v) == pytest.approx(cosine(v, u))

    def test_zero_vector_undefined(self):
        with pytest.raises(ZeroVectorError):
            cosine(np.zeros(3), np.ones(3))


class TestScorers:
    def test_concept_score_all_levels_equal_query(self):
        store = EmbeddingStore()
        q = np.array([0.3, -0.7, 0.2])
        store.add_concept_vectors("a", np.stack([q, q, q]))
        assert concept_score(Query("x", q), "a", store) == pytest.approx(1.0)

    def test_concept_score_query_is_mean_direction(self):
        store = EmbeddingStore()
        store.add_concept_vectors("a", np.eye(3))
        q = np.ones(3) / 3
        assert concept_score(Query("x", q), "a", store) == pytest.approx(1.0)

    def test_concept_score_matches_recomputation(self):
        # independent oracle: mean then cosine with plain python math
        rng = np.random.default_rng(5)
        levels = rng.normal(size=(3, 4))
        q = rng.normal(size=4)
        store = EmbeddingStore()
        store.add_concept_vectors("a", levels)
        mean = [(levels[0][j] + levels[1][j] + levels[2][j]) / 3 for j in range(4)]
        num = sum(a * b for a, b in zip(mean, q))
        want = num / (math.sqrt(sum(a * a for a in mean)) * math.sqrt(sum(b * b for b in q)))
        assert concept_score(Query("x", q), "a", store) == pytest.approx(want, abs=1e-12)

    def test_concept_score_permutation_invariant(self):
        rng = np.random.default_rng(7)
        levels = rng.normal(size=(3, 5))
        q = rng.normal(size=5)
        store1, store2 = EmbeddingStore(), EmbeddingStore()
        store1.add_concept_vectors("a", levels)
        store2.add_concept_vectors("a", levels[[2, 0, 1]])
        assert concept_score(Query("x", q), "a", store1) == pytest.approx(
            concept_score(Query("x", q), "a", store2)
        )

    def test_baseline_score_identical_and_orthogonal(self):
        store = EmbeddingStore()
        store.add_text_vector("a", np.array([1.0, 0.0]))
        assert baseline_score(Query("q", np.array([1.0, 0.0])), "a", store) == pytest.approx(1.0)
        assert baseline_score(Query("q", np.array([0.0, 1.0])), "a", store) == pytest.approx(0.0)

    def test_baseline_score_matches_recomputation(self):
        rng = np.random.default_rng(11)
        vec, q = rng.normal(size=6), rng.normal(size=6)
        store = EmbeddingStore()
        store.add_text_vector("a", vec)
        want = float(np.dot(vec, q) / (np.linalg.norm(vec) * np.linalg.norm(q)))
        assert baseline_score(Query("x", q), "a", store) == pytest.approx(want, abs=1e-12)

    def test_missing_levels_error(self):
        store = EmbeddingStore()
        store.add_text_vector("a", np.ones(3))
        with pytest.raises(MissingEmbeddingError):
            concept_score(Query("q", np.ones(3)), "a", store)


class TestRetrieveTopK:
    def test_single_paper_any_k(self):
        rng = np.random.default_rng(0)
        store = random_store(1, 4, rng)
        q = Query("x", rng.normal(size=4))
        result = retrieve_top_k(q, store, k=5)
        assert len(result.ranked) == 1
        assert result.ranked[0][1] == pytest.approx(concept_score(q, "p0000", store))

    def test_matches_full_sort_oracle(self):
        rng = np.random.default_rng(42)
        store = random_store(100, 8, rng)
        qv = rng.normal(size=8)
        ids, matrix = store.concept_matrix()
        want = brute_force_rank(ids, matrix.tolist(), qv.tolist())[:10]
        got = retrieve_top_k(Query("x", qv), store, k=10)
        assert got.ids() == [pid for pid, _ in want]
        for (gid, gscore), (wid, wscore) in zip(got.ranked, want):
            assert gscore == pytest.approx(wscore, abs=1e-9)

    def test_baseline_method_matches_oracle(self):
        rng = np.random.default_rng(43)
        store = random_store(60, 8, rng)
        qv = rng.normal(size=8)
        ids, matrix = store.text_matrix()
        want = brute_force_rank(ids, matrix.tolist(), qv.tolist())[:7]
        got = retrieve_top_k(Query("x", qv), store, k=7, method="baseline")
        assert got.ids() == [pid for pid, _ in want]

    def test_equal_scores_tie_by_ascending_id(self):
        store = EmbeddingStore()
        v = np.array([1.0, 1.0])
        # identical mean vectors for z and a: tie broken by id
        store.add_concept_vectors("z", np.stack([v, v, v]))
        store.add_concept_vectors("a", np.stack([v, v, v]))
        store.add_concept_vectors("m", np.stack([-v, -v, -v]))
        got = retrieve_top_k(Query("q", v), store, k=2)
        assert got.ids() == ["a", "z"]

    def test_tie_at_boundary_exact(self):
        # three tied papers at the cut: the two smallest ids must win
        store = EmbeddingStore()
        v = np.array([1.0, 0.0])
        for pid in ("c", "b", "d"):
            store.add_concept_vectors(pid, np.stack([v, v, v]))
        store.add_concept_vectors("a", np.stack([np.array([0.0, 1.0])] * 3))
        got = retrieve_top_k(Query("q", v), store, k=2)
        assert got.ids() == ["b", "c"]

    def test_k_exceeding_size_truncates_with_warning(self, caplog):
        rng = np.random.default_rng(1)
        store = random_store(3, 4, rng)
        with caplog.at_level("WARNING"):
            got = retrieve_top_k(Query("q", rng.normal(size=4)), store, k=10)
        assert len(got.ranked) == 3
        assert any("truncating" in r.message for r in caplog.records)

    def test_scaling_store_vector_preserves_ranking(self):
        rng = np.random.default_rng(9)
        store1 = random_store(30, 6, rng)
        store2 = EmbeddingStore()
        for pid in store1.ids():
            store2.add_concept_vectors(pid, store1.level_vectors(pid) * 37.5)
        qv = rng.normal(size=6)
        r1 = retrieve_top_k(Query("q", qv), store1, k=30)
        r2 = retrieve_top_k(Query("q", qv), store2, k=30)
        assert r1.ids() == r2.ids()

    def test_empty_store_error(self):
        with pytest.raises(EmptyStoreError):
            retrieve_top_k(Query("q", np.ones(2)), EmbeddingStore(), k=1)

    def test_bad_k(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            retrieve_top_k(Query("q", np.ones(4)), random_store(2, 4, rng), k=0)


class TestHistogram:
    def test_all_scores_identical_single_bin(self):
        store = EmbeddingStore()
        v = np.array([1.0, 2.0])
        for pid in ("a", "b", "c"):
            store.add_concept_vectors(pid, np.stack([v, v, v]))
        hist = similarity_histogram(Query("q", v), store, bins=10)
        assert hist.counts.sum() == 3
        assert (hist.counts > 0).sum() == 1

    def test_counts_sum_to_corpus_size(self):
        rng = np.random.default_rng(3)
        store = random_store(250, 8, rng)
        hist = similarity_histogram(Query("q", rng.normal(size=8)), store, bins=100)
        assert hist.counts.sum() == 250

    def test_uniform_scores_spread_within_binomial_noise(self):
        # RNG oracle: uniform scores over [0,1] in 10 bins, n/10 each +- 3 sigma
        rng = np.random.default_rng(12)
        n, bins = 5000, 10
        store = EmbeddingStore()
        # 2-d vectors at angles mapping cosine to near-uniform scores
        scores = rng.uniform(0.0, 1.0, size=n)
        angles = np.arccos(scores)
        q = np.array([1.0, 0.0])
        for i, theta in enumerate(angles):
            v = np.array([np.cos(theta), np.sin(theta)])
            store.add_concept_vectors(f"p{i:05d}", np.stack([v, v, v]))
        hist = similarity_histogram(Query("q", q), store, bins=bins)
        expected = n / bins
        sigma = math.sqrt(n * (1 / bins) * (1 - 1 / bins))
        assert np.all(np.abs(hist.counts - expected) <= 3 * sigma)

    def test_csv_shape(self):
        rng = np.random.default_rng(4)
        store = random_store(20, 4, rng)
        hist = similarity_histogram(Query("q", rng.normal(size=4)), store, bins=5)
        lines = hist.to_csv().strip().splitlines()
        assert lines[0] == "bin_lo,bin_hi,count"
        assert len(lines) == 6

    def test_empty_store_error(self):
        with pytest.raises(EmptyStoreError):
            similarity_histogram(Query("q", np.ones(2)), EmbeddingStore(), bins=10)


class TestRecall:
    def test_full_overlap(self):
        assert recall_at_k(_fake_result(["a", "b"]), {"a", "b"}) == 1.0

    def test_disjoint(self):
        assert recall_at_k(_fake_result(["a", "b"]), {"c", "d"}) == 0.0

    def test_half_overlap_ten_items(self):
        truth = {f"t{i}" for i in range(10)}
        retrieved = [f"t{i}" for i in range(5)] + [f"x{i}" for i in range(5)]
        assert recall_at_k(_fake_result(retrieved), truth) == 0.5

    def test_monotone_in_k(self):
        rng = np.random.default_rng(21)
        store = random_store(50, 6, rng)
        q = Query("q", rng.normal(size=6))
        truth = set(rng.choice(store.ids(), size=10, replace=False).tolist())
        values = [
            recall_at_k(retrieve_top_k(q, store, k=k), truth) for k in (1, 5, 10, 25, 50)
        ]
        assert values == sorted(values)

    def test_empty_truth_rejected(self):
        with pytest.raises(ValueError):
            recall_at_k(_fake_result(["a"]), set())


def _fake_result(ids):
    from litgraph.retriever import RetrievalResult

    return RetrievalResult(ranked=[(pid, 0.0) for pid in ids], k=len(ids), method="concept")
