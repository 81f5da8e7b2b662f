"""Channel construction, parameter validation, sampling statistics.

Statistical checks use fixed seeds and 5-sigma binomial bounds, so they
are deterministic in practice; the oracle moments are computed inline
from the defining probabilities.
"""

import math

import numpy as np
import pytest

from dbm_lab.model import (
    ChannelSpec,
    DbmParams,
    Graph,
    degree_profile,
    degree_profile_matrix,
    erased_channel,
    exponent_channel,
    load_sample,
    noisy_channel,
    sample_dbm,
    save_sample,
    split_graph,
)


def symmetric_params(n, a, b, alpha, clip=False):
    return DbmParams(
        n=n,
        prior=np.array([0.5, 0.5]),
        q=np.array([[a, b], [b, a]], dtype=float),
        channel=erased_channel(alpha, n, k=2),
        clip_edge_probs=clip,
    )


class TestChannelSpec:
    def test_rejects_bad_columns(self):
        with pytest.raises(ValueError):
            ChannelSpec(np.array([[0.5, 0.5], [0.4, 0.5]]))
        with pytest.raises(ValueError):
            ChannelSpec(np.array([[1.1, 1.0], [-0.1, 0.0]]))
        with pytest.raises(ValueError):
            ChannelSpec(np.array([0.5, 0.5]))

    def test_rejects_bad_erasure_symbol(self):
        with pytest.raises(ValueError):
            ChannelSpec(np.eye(2), erasure_symbol=2)

    def test_shape_accessors_and_immutability(self):
        ch = erased_channel(0.3, 1000, k=2)
        assert ch.num_symbols == 3 and ch.num_communities == 2
        assert ch.erasure_symbol == 2
        with pytest.raises(ValueError):
            ch.cond_probs[0, 0] = 0.5

    def test_erased_channel_exact_masses(self):
        n, alpha = 1000, 0.3
        eps = float(n) ** (-alpha)
        ch = erased_channel(alpha, n, k=2)
        for x in range(2):
            assert ch.cond_probs[x, x] == 1.0 - eps
            assert ch.cond_probs[2, x] == eps
            assert ch.cond_probs[1 - x, x] == 0.0

    def test_noisy_channel_exact_masses(self):
        n, alpha, k = 1000, 0.5, 3
        eps = float(n) ** (-alpha)
        ch = noisy_channel(alpha, n, k=k)
        assert ch.erasure_symbol is None
        for x in range(k):
            assert ch.cond_probs[x, x] == 1.0 - (k - 1) * eps
            for u in range(k):
                if u != x:
                    assert ch.cond_probs[u, x] == eps

    def test_noisy_channel_rejects_saturated_alphabet(self):
        with pytest.raises(ValueError):
            noisy_channel(0.0, 2, k=5)

    def test_exponent_channel_matches_dedicated_constructors(self):
        n, alpha = 1000, 0.4
        inf = math.inf
        erased = exponent_channel(
            [[0.0, inf], [inf, 0.0], [alpha, alpha]], n, erasure_symbol=2
        )
        # residual-mass arithmetic can differ from 1 - eps by one ulp
        assert np.allclose(
            erased.cond_probs, erased_channel(alpha, n).cond_probs, rtol=0, atol=1e-15
        )
        assert erased.erasure_symbol == 2
        noisy = exponent_channel([[0.0, alpha], [alpha, 0.0]], n)
        assert np.allclose(
            noisy.cond_probs, noisy_channel(alpha, n).cond_probs, rtol=0, atol=1e-15
        )

    def test_exponent_channel_rejects_bad_tables(self):
        with pytest.raises(ValueError):
            exponent_channel([[0.1, 0.5], [0.5, 0.0]], 1000)  # nonzero diagonal
        with pytest.raises(ValueError):
            exponent_channel([[0.0, 0.0]], 1000, erasure_symbol=None)  # rows < k is fine, shape (1,2) is not
        with pytest.raises(ValueError):
            # off-label mass 2 > 1 in column 0
            exponent_channel([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]], 1000)


class TestDbmParams:
    def test_accessors(self):
        params = symmetric_params(1000, 20.0, 10.0, 0.3)
        assert params.k == 2
        log_n = math.log(1000)
        assert np.allclose(params.mean_profile_rate(0), [10.0, 5.0])
        assert np.allclose(params.mean_profile(0), np.array([10.0, 5.0]) * log_n)
        assert np.allclose(
            params.edge_prob_matrix(),
            np.array([[20.0, 10.0], [10.0, 20.0]]) * log_n / 1000,
        )

    def test_rejects_invalid_inputs(self):
        ch = erased_channel(0.3, 1000, k=2)
        with pytest.raises(ValueError):
            DbmParams(1000, np.array([0.5, 0.6]), np.eye(2), ch)
        with pytest.raises(ValueError):
            DbmParams(1000, np.array([1.0, 0.0]), np.eye(2), ch)
        with pytest.raises(ValueError):
            DbmParams(1000, np.array([0.5, 0.5]), np.array([[1.0, 2.0], [1.0, 1.0]]), ch)
        with pytest.raises(ValueError):
            DbmParams(1000, np.array([0.5, 0.5]), -np.eye(2), ch)
        with pytest.raises(ValueError):
            DbmParams(1000, np.array([0.5, 0.5]), np.eye(3), ch)

    def test_edge_probability_cap(self):
        with pytest.raises(ValueError):
            symmetric_params(10, 30.0, 1.0, 0.3)
        clipped = symmetric_params(10, 30.0, 1.0, 0.3, clip=True)
        w = clipped.edge_prob_matrix()
        assert w[0, 0] == 1.0 and w[0, 1] < 1.0

    def test_arrays_read_only(self):
        params = symmetric_params(1000, 20.0, 10.0, 0.3)
        with pytest.raises(ValueError):
            params.prior[0] = 0.9
        with pytest.raises(ValueError):
            params.q[0, 0] = 5.0


class TestGraph:
    def test_from_edges_builds_sorted_symmetric_adjacency(self):
        g = Graph.from_edges(5, [(3, 1), (0, 1), (2, 4)])
        assert g.num_edges == 3
        assert list(g.neighbors(1)) == [0, 3]
        assert list(g.neighbors(4)) == [2]
        assert np.array_equal(g.degrees(), [1, 2, 1, 1, 1])
        g.validate()

    def test_rejects_malformed_edges(self):
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(0, 0)])
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(0, 1), (1, 0)])
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(0, 3)])
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(-1, 0)])

    def test_edge_list_roundtrip(self):
        g = Graph.from_edges(6, [(5, 0), (2, 1), (3, 4), (0, 2)])
        edges = g.edge_list()
        assert np.all(edges[:, 0] < edges[:, 1])
        again = Graph.from_edges(6, edges)
        assert np.array_equal(again.indptr, g.indptr)
        assert np.array_equal(again.indices, g.indices)

    def test_empty_graph(self):
        g = Graph.from_edges(4, np.zeros((0, 2), dtype=np.int64))
        assert g.num_edges == 0
        assert g.edge_list().shape == (0, 2)
        assert np.array_equal(g.degrees(), [0, 0, 0, 0])
        g.validate()

    def test_csr_is_symmetric(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 4)])
        m = g.to_csr().toarray()
        assert np.array_equal(m, m.T)
        assert m.diagonal().sum() == 0


class TestSampleDbm:
    def test_deterministic_given_seed(self):
        params = symmetric_params(300, 12.0, 6.0, 0.3)
        s1 = sample_dbm(params, 42)
        s2 = sample_dbm(params, 42)
        assert np.array_equal(s1.labels, s2.labels)
        assert np.array_equal(s1.attributes, s2.attributes)
        assert np.array_equal(s1.graph.indptr, s2.graph.indptr)
        assert np.array_equal(s1.graph.indices, s2.graph.indices)
        s3 = sample_dbm(params, 43)
        assert not np.array_equal(s1.graph.indices, s3.graph.indices)

    def test_zero_rate_matrix_gives_empty_graph(self):
        params = DbmParams(
            n=200,
            prior=np.array([0.5, 0.5]),
            q=np.zeros((2, 2)),
            channel=erased_channel(0.3, 200),
        )
        sample = sample_dbm(params, 0)
        assert sample.graph.num_edges == 0

    def test_huge_alpha_reveals_all_labels(self):
        params = symmetric_params(100, 5.0, 2.0, 50.0)
        sample = sample_dbm(params, 3)
        assert np.array_equal(sample.attributes, sample.labels)

    def test_sampled_graph_is_valid(self):
        sample = sample_dbm(symmetric_params(500, 15.0, 7.0, 0.3), 7)
        sample.graph.validate()

    def test_attributes_respect_channel_support(self):
        params = symmetric_params(1000, 20.0, 10.0, 0.3)
        sample = sample_dbm(params, 1)
        for c in range(2):
            symbols = set(sample.attributes[sample.labels == c])
            assert symbols <= {c, 2}  # own label or the erasure symbol

    def test_erasure_rate_within_five_sigma(self):
        n, alpha = 1000, 0.3
        params = symmetric_params(n, 20.0, 10.0, alpha)
        sample = sample_dbm(params, 1)
        eps = float(n) ** (-alpha)
        for c in range(2):
            m = int((sample.labels == c).sum())
            erased = int((sample.attributes[sample.labels == c] == 2).sum())
            bound = 5.0 * math.sqrt(m * eps * (1.0 - eps))
            assert abs(erased - m * eps) <= bound

    def test_community_sizes_concentrate(self):
        n = 1000
        params = symmetric_params(n, 20.0, 10.0, 0.3)
        bound = 5.0 * math.sqrt(0.25 / n)
        failures = sum(
            1
            for seed in range(100)
            if abs(np.mean(sample_dbm(params, seed).labels) - 0.5) > bound
        )
        assert failures <= 1

    def test_mean_degree_matches_binomial_moment(self):
        n, a, b = 1000, 20.0, 10.0
        params = symmetric_params(n, a, b, 0.3)
        log_n = math.log(n)
        expected = ((a + b) / 2.0) * log_n * (n - 1) / n
        p_bar = ((a + b) / 2.0) * log_n / n
        pairs = n * (n - 1) / 2
        sigma_edges = math.sqrt(pairs * p_bar * (1 - p_bar))
        seeds = 100
        sigma_avg = (2.0 * sigma_edges / n) / math.sqrt(seeds)
        avg = np.mean(
            [2.0 * sample_dbm(params, s).graph.num_edges / n for s in range(seeds)]
        )
        assert abs(avg - expected) <= 5.0 * sigma_avg

    def test_block_edge_counts_match_binomial_given_labels(self):
        n, a, b = 1000, 20.0, 10.0
        params = symmetric_params(n, a, b, 0.3)
        sample = sample_dbm(params, 11)
        w = params.edge_prob_matrix()
        groups = [np.flatnonzero(sample.labels == c) for c in range(2)]
        edges = sample.graph.edge_list()
        ci, cj = sample.labels[edges[:, 0]], sample.labels[edges[:, 1]]
        for x in range(2):
            for y in range(x, 2):
                if x == y:
                    total = groups[x].size * (groups[x].size - 1) // 2
                    count = int(((ci == x) & (cj == x)).sum())
                else:
                    total = groups[x].size * groups[y].size
                    count = int((ci != cj).sum())
                p = float(w[x, y])
                assert abs(count - total * p) <= 5.0 * math.sqrt(total * p * (1 - p))


class TestSplitGraph:
    def _sample(self):
        return sample_dbm(symmetric_params(1000, 20.0, 10.0, 0.3), 5)

    def test_partitions_edge_set(self):
        sample = self._sample()
        g1, g2 = split_graph(sample, 0.3, 9)
        assert g1.num_edges + g2.num_edges == sample.graph.num_edges
        combined = np.concatenate([g1.edge_list(), g2.edge_list()])
        combined = combined[np.lexsort((combined[:, 1], combined[:, 0]))]
        assert np.array_equal(combined, sample.graph.edge_list())

    def test_deterministic_and_accepts_bare_graph(self):
        sample = self._sample()
        a1, b1 = split_graph(sample, 0.3, 9)
        a2, b2 = split_graph(sample.graph, 0.3, 9)
        assert np.array_equal(a1.indices, a2.indices)
        assert np.array_equal(b1.indices, b2.indices)

    def test_half_split_within_five_sigma(self):
        sample = self._sample()
        m = sample.graph.num_edges
        assert m >= 10_000
        g1, _ = split_graph(sample, 0.5, 21)
        assert abs(g1.num_edges - 0.5 * m) <= 5.0 * math.sqrt(m * 0.25)

    def test_tiny_gamma_empties_first_part(self):
        sample = self._sample()
        g1, g2 = split_graph(sample, 1e-12, 0)
        assert g1.num_edges == 0
        assert g2.num_edges == sample.graph.num_edges

    @pytest.mark.parametrize("gamma", [0.0, 1.0, -0.5, 1.5])
    def test_rejects_bad_gamma(self, gamma):
        with pytest.raises(ValueError):
            split_graph(self._sample(), gamma, 0)


class TestDegreeProfiles:
    def test_isolated_vertex_and_star(self):
        g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3)])
        labels = np.array([0, 1, 1, 1, 0])
        assert np.array_equal(degree_profile(g, labels, 4, 2), [0, 0])
        assert np.array_equal(degree_profile(g, labels, 0, 2), [0, 3])

    def test_matrix_matches_per_vertex_recount(self):
        sample = sample_dbm(symmetric_params(400, 12.0, 6.0, 0.3), 13)
        rng = np.random.default_rng(2)
        labels = rng.integers(0, 3, size=400)
        mat = degree_profile_matrix(sample.graph, labels, 3)
        assert np.array_equal(mat.sum(axis=1), sample.graph.degrees())
        for v in rng.choice(400, size=20, replace=False):
            manual = np.zeros(3, dtype=np.int64)
            for u in sample.graph.neighbors(v):
                manual[labels[u]] += 1
            assert np.array_equal(mat[v], manual)
            assert np.array_equal(degree_profile(sample.graph, labels, v, 3), manual)


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        sample = sample_dbm(symmetric_params(30, 5.0, 2.0, 0.5), 17)
        prefix = tmp_path / "case"
        save_sample(sample, prefix)
        back = load_sample(prefix)
        assert np.array_equal(back.labels, sample.labels)
        assert np.array_equal(back.attributes, sample.attributes)
        assert np.array_equal(back.graph.edge_list(), sample.graph.edge_list())

    def test_serialized_labels_are_one_based(self, tmp_path):
        sample = sample_dbm(symmetric_params(30, 5.0, 2.0, 0.5), 17)
        prefix = tmp_path / "case"
        save_sample(sample, prefix)
        rows = np.loadtxt(
            f"{prefix}.vertices.csv", delimiter=",", skiprows=1, dtype=np.int64
        )
        assert rows[:, 1].min() >= 1 and rows[:, 2].min() >= 1
        assert np.array_equal(rows[:, 1] - 1, sample.labels)

    def test_empty_graph_roundtrip(self, tmp_path):
        params = DbmParams(
            n=5,
            prior=np.array([0.5, 0.5]),
            q=np.zeros((2, 2)),
            channel=erased_channel(0.5, 5),
        )
        sample = sample_dbm(params, 0)
        prefix = tmp_path / "empty"
        save_sample(sample, prefix)
        back = load_sample(prefix)
        assert back.graph.num_edges == 0
        assert np.array_equal(back.labels, sample.labels)
