"""Weight functions, the weighted graph container, and elbow truncation."""

import math

import numpy as np
import pytest

from bnsl.data import DiscreteDataset
from bnsl.errors import InvalidInput
from bnsl.weights import (WEIGHT_FUNCTIONS, WeightedGraph, elbow_truncate,
                          entropy, load_weighted_graph, mutual_information,
                          pagerank, save_weighted_graph, weight_matrix)

from oracles import entropy_of, mutual_information_of, pagerank_of


def random_dataset(rng, n_rows, n_vars, max_card=4):
    cards = [int(rng.integers(2, max_card + 1)) for _ in range(n_vars)]
    cols = [rng.integers(0, c, size=n_rows) for c in cards]
    # force every state to appear so cardinalities stay declared
    for j, c in enumerate(cards):
        cols[j][:c] = np.arange(c)
    samples = np.column_stack(cols).astype(np.int32)
    return DiscreteDataset([f"v{k}" for k in range(n_vars)], cards, samples)


def random_graph(rng, n, p=0.4, lo=0.1, hi=5.0):
    g = WeightedGraph(n)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                g.add_edge(i, j, float(rng.uniform(lo, hi)))
    return g


class TestEntropy:
    def test_frozen_value(self):
        assert entropy((3, 1)) == pytest.approx(0.5623351446188083, abs=1e-12)

    def test_uniform_is_log_k(self):
        assert entropy((5, 5, 5, 5)) == pytest.approx(math.log(4), abs=1e-12)

    def test_zero_counts_ignored(self):
        assert entropy((0, 0, 4)) == pytest.approx(0.0, abs=1e-12)

    def test_matches_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            counts = rng.integers(0, 20, size=int(rng.integers(2, 8)))
            if counts.sum() == 0:
                continue
            assert entropy(tuple(counts)) == pytest.approx(
                entropy_of(tuple(counts)), abs=1e-12)

    def test_rejects_empty_and_negative(self):
        with pytest.raises(InvalidInput):
            entropy(())
        with pytest.raises(InvalidInput):
            entropy((3, -1))


class TestMutualInformation:
    def test_matches_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(40):
            data = random_dataset(rng, int(rng.integers(10, 200)), 2)
            got = mutual_information(data, 0, 1)
            want = mutual_information_of(data.column(0).tolist(),
                                         data.column(1).tolist())
            assert got == pytest.approx(want, abs=1e-12)

    def test_symmetric_and_nonnegative(self):
        rng = np.random.default_rng(3)
        data = random_dataset(rng, 80, 3)
        for i in range(3):
            for j in range(i + 1, 3):
                assert mutual_information(data, i, j) == pytest.approx(
                    mutual_information(data, j, i), abs=1e-12)
                assert mutual_information(data, i, j) >= 0.0

    def test_identical_columns_give_entropy(self):
        col = np.array([0, 1, 1, 0, 1, 2, 2, 0], dtype=np.int32)
        data = DiscreteDataset(["x", "y"], [3, 3],
                               np.column_stack([col, col]))
        h = entropy(tuple(np.bincount(col)))
        assert mutual_information(data, 0, 1) == pytest.approx(h, abs=1e-12)


class TestWeightMatrix:
    def test_all_pairs_present(self):
        rng = np.random.default_rng(4)
        data = random_dataset(rng, 60, 5)
        for fn in WEIGHT_FUNCTIONS:
            g = weight_matrix(data, fn)
            assert g.m == 10, fn

    def test_mi_graph_values(self):
        rng = np.random.default_rng(5)
        data = random_dataset(rng, 100, 4)
        g = weight_matrix(data, "MI")
        for i, j in g.edges():
            assert g.weight(i, j) == pytest.approx(
                mutual_information(data, i, j), abs=1e-12)

    def test_normalized_variants_formulas(self):
        rng = np.random.default_rng(6)
        data = random_dataset(rng, 150, 4)
        h = [entropy(tuple(np.bincount(data.column(k)))) for k in range(4)]
        plus = weight_matrix(data, "MI_plus")
        sqrt = weight_matrix(data, "MI_sqrt")
        for i, j in plus.edges():
            mi = mutual_information(data, i, j)
            assert plus.weight(i, j) == pytest.approx(
                2.0 * mi / (h[i] + h[j]), abs=1e-12)
            assert sqrt.weight(i, j) == pytest.approx(
                mi / math.sqrt(h[i] * h[j]), abs=1e-12)

    def test_pagerank_variant_formula(self):
        rng = np.random.default_rng(7)
        data = random_dataset(rng, 150, 4)
        mi_graph = weight_matrix(data, "MI")
        pr = pagerank_of(mi_graph)
        got = weight_matrix(data, "MI_pr")
        for i, j in got.edges():
            mi = mutual_information(data, i, j)
            assert got.weight(i, j) == pytest.approx(
                mi / (math.sqrt(pr[i]) * math.sqrt(pr[j])), abs=1e-8)

    def test_standardized_variants(self):
        rng = np.random.default_rng(8)
        data = random_dataset(rng, 120, 5)
        raw = weight_matrix(data, "MI")
        values = np.array([raw.weight(i, j) for i, j in raw.edges()])
        mean, std = values.mean(), values.std()
        sn = weight_matrix(data, "MI_sn")
        for i, j in raw.edges():
            assert sn.weight(i, j) == pytest.approx(
                (raw.weight(i, j) - mean) / std, abs=1e-10)

    def test_pearson_against_corrcoef(self):
        rng = np.random.default_rng(9)
        data = random_dataset(rng, 200, 3)
        g = weight_matrix(data, "Pearson")
        for i, j in g.edges():
            rho = np.corrcoef(data.column(i), data.column(j))[0, 1]
            assert g.weight(i, j) == pytest.approx(abs(rho), abs=1e-12)

    def test_zero_entropy_column_rejected_for_normalized(self):
        samples = np.column_stack([
            np.zeros(50, dtype=np.int32),
            (np.arange(50) % 2).astype(np.int32)])
        flat = DiscreteDataset(["a", "b"], [2, 2], samples)
        with pytest.raises(InvalidInput):
            weight_matrix(flat, "MI_plus")
        with pytest.raises(InvalidInput):
            weight_matrix(flat, "MI_sqrt")

    def test_unknown_function_rejected(self):
        rng = np.random.default_rng(10)
        data = random_dataset(rng, 30, 2)
        with pytest.raises(InvalidInput):
            weight_matrix(data, "nope")


class TestPagerank:
    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            g = random_graph(rng, int(rng.integers(3, 13)))
            got = pagerank(g)
            want = pagerank_of(g)
            assert np.allclose(got, want, atol=1e-8)

    def test_sums_to_one(self):
        rng = np.random.default_rng(12)
        g = random_graph(rng, 9, p=0.5)
        assert pagerank(g).sum() == pytest.approx(1.0, abs=1e-12)

    def test_scale_invariant(self):
        rng = np.random.default_rng(13)
        g = random_graph(rng, 8, p=0.6)
        scaled = WeightedGraph(8)
        for i, j in g.edges():
            scaled.add_edge(i, j, 17.0 * g.weight(i, j))
        assert np.allclose(pagerank(g), pagerank(scaled), atol=1e-10)

    def test_dangling_nodes_share_mass(self):
        g = WeightedGraph(4)
        g.add_edge(0, 1, 2.0)  # nodes 2, 3 are dangling
        v = pagerank(g)
        assert v.sum() == pytest.approx(1.0, abs=1e-12)
        assert v[2] == pytest.approx(v[3], abs=1e-12)
        assert np.allclose(v, pagerank_of(g), atol=1e-8)


class TestElbowTruncate:
    def test_frozen_example(self):
        g = WeightedGraph(6)
        weights = [10.0, 9.5, 9.0, 0.1, 0.05]
        for (i, j), w in zip([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)],
                             weights):
            g.add_edge(i, j, w)
        r = elbow_truncate(g)
        assert r.threshold == 9.0
        assert r.pruned.m == 3
        assert not r.degenerate
        assert {e for e in r.pruned.edges()} == {(0, 1), (1, 2), (2, 3)}

    def test_threshold_weight_is_kept(self):
        g = WeightedGraph(4)
        for (i, j), w in zip([(0, 1), (1, 2), (2, 3)], [5.0, 5.0, 1.0]):
            g.add_edge(i, j, w)
        r = elbow_truncate(g)
        assert all(g.weight(i, j) >= r.threshold for i, j in r.pruned.edges())

    def test_all_equal_is_degenerate_and_unchanged(self):
        g = WeightedGraph(3)
        for e in [(0, 1), (1, 2), (0, 2)]:
            g.add_edge(*e, 1.5)
        r = elbow_truncate(g)
        assert r.degenerate
        assert r.pruned is g

    def test_single_edge_degenerate(self):
        g = WeightedGraph(2)
        g.add_edge(0, 1, 2.0)
        r = elbow_truncate(g)
        assert r.degenerate
        assert r.pruned.m == 1

    def test_empty_graph_rejected(self):
        with pytest.raises(InvalidInput):
            elbow_truncate(WeightedGraph(3))

    def test_keep_everything_cut_flags_degenerate(self):
        # a convex-down curve whose knee lies at the last point keeps all
        g = WeightedGraph(4)
        for (i, j), w in zip([(0, 1), (1, 2), (2, 3)], [9.0, 8.9, 8.8]):
            g.add_edge(i, j, w)
        r = elbow_truncate(g)
        if r.pruned.m == g.m:
            assert r.degenerate


class TestWeightedGraph:
    def test_add_edge_canonicalizes(self):
        g = WeightedGraph(3)
        g.add_edge(2, 0, 1.25)
        assert g.has_edge(0, 2)
        assert g.weight(0, 2) == 1.25
        assert g.edges() == [(0, 2)]

    def test_duplicate_add_overwrites(self):
        g = WeightedGraph(3)
        g.add_edge(0, 1, 1.0)
        g.add_edge(1, 0, 2.0)
        assert g.m == 1
        assert g.weight(0, 1) == 2.0

    def test_rejects_bad_edges(self):
        g = WeightedGraph(3)
        with pytest.raises(InvalidInput):
            g.add_edge(0, 0, 1.0)
        with pytest.raises(InvalidInput):
            g.add_edge(0, 3, 1.0)
        with pytest.raises(InvalidInput):
            g.add_edge(0, 1, float("nan"))

    def test_neighbors_sorted(self):
        g = WeightedGraph(5)
        g.add_edge(2, 4, 1.0)
        g.add_edge(2, 0, 1.0)
        g.add_edge(2, 3, 1.0)
        assert list(g.neighbors(2)) == [0, 3, 4]

    def test_subgraph_preserves_n(self):
        rng = np.random.default_rng(14)
        g = random_graph(rng, 8, p=0.7)
        sub = g.subgraph([0, 1, 2, 3])
        assert sub.n == g.n
        for i, j in sub.edges():
            assert {i, j} <= {0, 1, 2, 3}
            assert sub.weight(i, j) == g.weight(i, j)
        for i, j in g.edges():
            if {i, j} <= {0, 1, 2, 3}:
                assert sub.has_edge(i, j)

    def test_degree_and_adjacency(self):
        g = WeightedGraph(4)
        g.add_edge(0, 1, 2.0)
        g.add_edge(0, 2, 3.0)
        assert g.degree(0) == 2
        assert g.adjacency(0) == {1: 2.0, 2: 3.0}
        assert g.adjacency(3) == {}

    def test_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(15)
        g = random_graph(rng, 7, p=0.5)
        path = tmp_path / "g.tsv"
        save_weighted_graph(g, path)
        assert load_weighted_graph(path) == g
