"""Structure combination: ensembles, triplet repair, pool merging."""

import numpy as np
import pytest

from bnsl.averaging import LearnerConfig, LocalStructure
from bnsl.data import DiscreteDataset
from bnsl.errors import InvalidInput
from bnsl.merge import (MergeResult, collect_triplets,
                        ensemble_subcommunities, jaccard, merge_all, resolve)
from bnsl.weights import WeightedGraph

from oracles import naive_merge_sequence


def empty_structure(nodes):
    return LocalStructure(tuple(nodes), (), {})


def dummy_dataset(n_vars, n_rows=8, seed=0):
    rng = np.random.default_rng(seed)
    cols = [rng.integers(0, 2, n_rows) for _ in range(n_vars)]
    for c in cols:
        c[:2] = (0, 1)
    arr = np.column_stack(cols).astype(np.int32)
    return DiscreteDataset([f"v{k}" for k in range(n_vars)], [2] * n_vars, arr)


class TestJaccard:
    def test_basic_values(self):
        assert jaccard((1, 2), (2, 3)) == pytest.approx(1.0 / 3.0)
        assert jaccard((0, 1), (0, 1)) == 1.0
        assert jaccard((0,), (1,)) == 0.0

    def test_duplicates_collapse(self):
        assert jaccard((1, 1, 2), (2, 3)) == pytest.approx(1.0 / 3.0)

    def test_empty_rejected(self):
        with pytest.raises(InvalidInput):
            jaccard((), (1,))
        with pytest.raises(InvalidInput):
            jaccard((1,), ())


class TestEnsembleSubcommunities:
    def test_union_of_edges(self):
        s1 = LocalStructure((0, 1), ((0, 1),), {(0, 1): 1.0})
        s2 = LocalStructure((1, 2), ((1, 2),), {(1, 2): 1.0})
        out = ensemble_subcommunities([s1, s2])
        assert out.nodes == (0, 1, 2)
        assert set(out.edges) == {(0, 1), (1, 2)}

    def test_support_is_mean_over_voters(self):
        s1 = LocalStructure((0, 1), ((0, 1),), {(0, 1): 0.8})
        s2 = LocalStructure((0, 1), ((0, 1),), {(0, 1): 0.4})
        out = ensemble_subcommunities([s1, s2])
        assert out.support[(0, 1)] == pytest.approx(0.6)

    def test_conflict_keeps_higher_mean(self):
        s1 = LocalStructure((0, 1), ((0, 1),), {(0, 1): 0.9})
        s2 = LocalStructure((0, 1), ((1, 0),), {(1, 0): 0.5})
        conflicts = []
        out = ensemble_subcommunities([s1, s2], conflicts)
        assert out.edges == ((0, 1),)
        assert conflicts == [{"kept": (0, 1), "dropped": (1, 0),
                              "support_kept": 0.9, "support_dropped": 0.5}]

    def test_conflict_tie_keeps_lexicographic(self):
        s1 = LocalStructure((0, 1), ((1, 0),), {(1, 0): 0.7})
        s2 = LocalStructure((0, 1), ((0, 1),), {(0, 1): 0.7})
        out = ensemble_subcommunities([s1, s2])
        assert out.edges == ((0, 1),)

    def test_missing_support_defaults_to_one(self):
        s1 = LocalStructure((0, 1), ((0, 1),), {})
        out = ensemble_subcommunities([s1])
        assert out.support[(0, 1)] == 1.0

    def test_empty_pool_rejected(self):
        with pytest.raises(InvalidInput):
            ensemble_subcommunities([])


class TestCollectTriplets:
    def _graph(self):
        g = WeightedGraph(5)
        g.add_edge(0, 1, 1.0)
        g.add_edge(1, 2, 0.9)
        g.add_edge(0, 2, 0.8)
        g.add_edge(2, 3, 0.7)  # dangling, no triangle
        return g

    def test_single_triangle(self):
        trip = collect_triplets(self._graph(), 0.5)
        assert trip.triangles == ((0, 1, 2),)
        assert set(trip.graph.edges()) == {(0, 1), (0, 2), (1, 2)}
        assert trip.graph.weight(1, 2) == pytest.approx(0.9)

    def test_threshold_is_strict(self):
        trip = collect_triplets(self._graph(), 0.8)
        # the 0-2 edge sits exactly at the threshold and is excluded
        assert trip.triangles == ()
        assert trip.graph.m == 0

    def test_triangles_sorted(self):
        g = WeightedGraph(4)
        for a, b in ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (0, 3)):
            g.add_edge(a, b, 1.0)
        trip = collect_triplets(g, 0.5)
        assert trip.triangles == ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))

    def test_no_edges(self):
        trip = collect_triplets(WeightedGraph(4), 0.0)
        assert trip.triangles == ()
        assert trip.graph.m == 0


class TestResolve:
    def test_empty_substrate_returns_structure_unchanged(self, chain_data):
        s = LocalStructure((0, 1, 2), ((0, 2),), {(0, 2): 1.0})
        out = resolve(s, WeightedGraph(3), chain_data,
                      LearnerConfig(learner="greedy"))
        assert out is s

    def test_no_triangles_returns_structure_unchanged(self, chain_data):
        g = WeightedGraph(3)
        g.add_edge(0, 1, 1.0)
        g.add_edge(1, 2, 0.9)
        s = LocalStructure((0, 1, 2), ((0, 1), (1, 2)), {})
        out = resolve(s, g, chain_data, LearnerConfig(learner="greedy"),
                      t_tri=0.5)
        assert out is s

    def test_spurious_triangle_edge_removed(self, chain_data):
        # data follow a chain a -> b -> c; the structure carries an extra
        # 0 -> 2 edge inside a tight triangle, which re-learning drops
        g = WeightedGraph(3)
        g.add_edge(0, 1, 1.0)
        g.add_edge(1, 2, 0.9)
        g.add_edge(0, 2, 0.8)
        s = LocalStructure((0, 1, 2), ((0, 1), (1, 2), (0, 2)),
                           {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0})
        out = resolve(s, g, chain_data, LearnerConfig(learner="greedy"),
                      t_tri=0.5)
        assert out.skeleton() == {frozenset({0, 1}), frozenset({1, 2})}
        assert out.nodes == (0, 1, 2)

    def test_edges_outside_clusters_pass_through(self, chain_data):
        g = WeightedGraph(4)
        g.add_edge(0, 1, 1.0)
        g.add_edge(1, 2, 0.9)
        g.add_edge(0, 2, 0.8)
        s = LocalStructure((0, 1, 2, 3), ((0, 1), (1, 2), (0, 2), (3, 0)),
                           {(3, 0): 0.42})
        out = resolve(s, g, chain_data, LearnerConfig(learner="greedy"),
                      t_tri=0.5)
        assert (3, 0) in out.edges
        assert out.support[(3, 0)] == pytest.approx(0.42)

    def test_provenance_preserved(self, chain_data):
        g = WeightedGraph(3)
        g.add_edge(0, 1, 1.0)
        g.add_edge(1, 2, 0.9)
        g.add_edge(0, 2, 0.8)
        s = LocalStructure((0, 1, 2), ((0, 2),), {}, provenance="pool")
        out = resolve(s, g, chain_data, LearnerConfig(learner="greedy"),
                      t_tri=0.5)
        assert out.provenance == "pool"


class TestMergeAll:
    def _run(self, node_sets, n_universe):
        pool = [empty_structure(ns) for ns in node_sets]
        g = WeightedGraph(n_universe)
        data = dummy_dataset(n_universe)
        return merge_all(pool, g, data, LearnerConfig(learner="greedy"))

    def test_sequence_matches_full_rescan_oracle(self):
        rng = np.random.default_rng(61)
        for _ in range(20):
            n_universe = 12
            node_sets = []
            for _ in range(6):
                size = int(rng.integers(2, 6))
                node_sets.append(tuple(sorted(
                    rng.choice(n_universe, size=size, replace=False))))
            result = self._run(node_sets, n_universe)
            want, _ = naive_merge_sequence(node_sets)
            assert list(result.merge_sequence) == want

    def test_eval_budget(self):
        rng = np.random.default_rng(62)
        node_sets = [tuple(sorted(rng.choice(20, size=4, replace=False)))
                     for _ in range(10)]
        result = self._run(node_sets, 20)
        n = len(node_sets)
        assert result.jaccard_evaluations <= 2 * n * (n - 1)

    def test_exact_eval_count_three_structures(self):
        # 3 initial pairs, then 1 comparison against the merged entry
        result = self._run([(0, 1), (1, 2), (5, 6)], 8)
        assert result.jaccard_evaluations == 4
        assert len(result.merge_sequence) == 2

    def test_disjoint_sets_still_merge(self):
        result = self._run([(0, 1), (2, 3)], 4)
        assert result.structure.nodes == (0, 1, 2, 3)
        assert result.merge_sequence == (((0, 1), (2, 3)),)

    def test_single_structure_returned_as_is(self):
        result = self._run([(0, 1, 2)], 4)
        assert result.merge_sequence == ()
        assert result.jaccard_evaluations == 0
        assert result.structure.nodes == (0, 1, 2)

    def test_conflicts_surface_in_result(self, chain_data):
        s1 = LocalStructure((0, 1), ((0, 1),), {(0, 1): 0.9})
        s2 = LocalStructure((0, 1, 2), ((1, 0), (1, 2)),
                            {(1, 0): 0.2, (1, 2): 0.8})
        result = merge_all([s1, s2], WeightedGraph(3), chain_data,
                           LearnerConfig(learner="greedy"))
        assert isinstance(result, MergeResult)
        assert result.conflicts
        assert result.conflicts[0]["kept"] == (0, 1)
        assert (0, 1) in result.structure.edges
        assert (1, 0) not in result.structure.edges

    def test_empty_pool_rejected(self, chain_data):
        with pytest.raises(InvalidInput):
            merge_all([], WeightedGraph(2), chain_data,
                      LearnerConfig(learner="greedy"))
