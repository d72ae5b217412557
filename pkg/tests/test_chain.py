"""
Tests des matrices de Markov et des distributions stationnaires
"""

import numpy as np
import pytest

from btl_spectral.bench.metrics import kendall_tau
from btl_spectral.core.chain import (
    build_canonical_markov,
    build_empirical_markov,
    rank_centrality,
    rank_order,
    stationary_distribution,
    stationary_exact,
    stationary_with_fallback,
)
from btl_spectral.core.errors import (
    EdgeSetMismatch,
    EmptyGraph,
    NoConvergence,
    NotConnected,
    SizeMismatch,
)
from btl_spectral.core.graphs import ComparisonGraph
from btl_spectral.core.model import (
    ComparisonDataset,
    expected_comparisons,
    generate_scores,
    new_btl_model,
    sample_comparisons,
)

from conftest import random_connected_graph


class TestMarkovConstruction:

    def test_k3_uniform(self, k3, uniform3):
        markov = build_canonical_markov(k3, uniform3)
        expected = np.array([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]])
        np.testing.assert_allclose(markov.S, expected, atol=1e-15)
        assert markov.d == 2.0
        assert markov.provenance == 'canonical'

    def test_weighted_normalizer(self, uniform3):
        graph = ComparisonGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)], {(0, 2): 0.5, (1, 2): 0.5})
        markov = build_canonical_markov(graph, uniform3)
        assert markov.d == pytest.approx(1.5)
        assert markov.S[0, 1] == pytest.approx(1 / 3)
        np.testing.assert_allclose(markov.S.sum(axis=1), 1.0, atol=1e-12)

    def test_read_only(self, k3, uniform3):
        markov = build_canonical_markov(k3, uniform3)
        with pytest.raises(ValueError):
            markov.S[0, 0] = 1.0

    def test_entries_are_probabilities(self, random_instances):
        for graph, model in random_instances[:20]:
            S = build_canonical_markov(graph, model).S
            assert S.min() >= 0.0
            np.testing.assert_allclose(S.sum(axis=1), 1.0, atol=1e-10)

    def test_errors(self, k3, uniform3):
        with pytest.raises(SizeMismatch):
            build_canonical_markov(ComparisonGraph.complete(4), uniform3)
        with pytest.raises(EmptyGraph):
            build_canonical_markov(ComparisonGraph(n=3), uniform3)

    def test_empirical_needs_same_edges(self, k3, uniform3):
        dataset = sample_comparisons(uniform3, ComparisonGraph.from_edges(3, [(0, 1), (1, 2)]), 10, 0)
        with pytest.raises(EdgeSetMismatch):
            build_empirical_markov(k3, dataset)

    def test_empirical_matches_canonical_on_exact_data(self):
        model = new_btl_model([1, 1, 2])
        graph = ComparisonGraph.complete(3)
        empirical = build_empirical_markov(graph, expected_comparisons(model, graph, 6))
        np.testing.assert_allclose(empirical.S, build_canonical_markov(graph, model).S, atol=1e-15)

    def test_reversible(self, model123, k3):
        markov = build_canonical_markov(k3, model123)
        assert markov.is_reversible(model123.pi)
        assert not markov.is_reversible(np.full(3, 1 / 3))

    def test_to_csv(self, tmp_path, k3, uniform3):
        path = tmp_path / 'S.csv'
        build_canonical_markov(k3, uniform3).to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[:2] == ['n,d', '3,2']
        assert lines[2] == '0.5,0.25,0.25'
        assert len(lines) == 5

    def test_empirical_approaches_canonical(self):
        rng = np.random.default_rng(12)
        graph = random_connected_graph(rng, 20, p=0.25, weighted=True)
        model = generate_scores(20, 4.0, seed=3)
        canonical = build_canonical_markov(graph, model).S
        gaps = [np.abs(build_empirical_markov(graph, sample_comparisons(model, graph, k, seed=5)).S - canonical).max()
                for k in (100, 1000, 10_000)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert 0.05 <= gaps[2] / gaps[0] <= 0.2

    def test_relabelling_permutes_stationary(self):
        rng = np.random.default_rng(14)
        for _ in range(10):
            n = int(rng.integers(5, 15))
            graph = random_connected_graph(rng, n, p=0.3, weighted=True)
            model = generate_scores(n, 4.0, seed=int(rng.integers(1000)))
            dataset = sample_comparisons(model, graph, 32, seed=1)
            sigma = rng.permutation(n)

            edges, weights, Z = [], {}, {}
            for (i, j), z in dataset.Z.items():
                a, b = int(sigma[i]), int(sigma[j])
                edge = (min(a, b), max(a, b))
                edges.append(edge)
                weights[edge] = graph.weight(i, j)
                Z[edge] = z if a < b else dataset.k - z
            relabelled = ComparisonGraph.from_edges(n, edges, weights)
            relabelled_data = ComparisonDataset(n=n, k=dataset.k, edges=tuple(edges), Z=Z)

            original = stationary_exact(build_empirical_markov(graph, dataset))
            permuted = stationary_exact(build_empirical_markov(relabelled, relabelled_data))
            np.testing.assert_allclose(permuted[sigma], original, rtol=0, atol=1e-10)


class TestStationaryDistribution:

    def test_k3_uniform(self, k3, uniform3):
        v = stationary_distribution(build_canonical_markov(k3, uniform3))
        np.testing.assert_allclose(v, [1 / 3] * 3, atol=1e-12)

    def test_k3_canonical_is_pi(self, k3, model123):
        v = stationary_distribution(build_canonical_markov(k3, model123))
        np.testing.assert_allclose(v, [1 / 6, 1 / 3, 1 / 2], atol=1e-9)

    def test_exact_oracle(self, k3, model123):
        np.testing.assert_allclose(stationary_exact(build_canonical_markov(k3, model123)),
                                   [1 / 6, 1 / 3, 1 / 2], atol=1e-12)

    def test_disconnected(self, uniform3):
        model = new_btl_model([1, 2, 3, 4])
        graph = ComparisonGraph.from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(NotConnected):
            stationary_distribution(build_canonical_markov(graph, model))

    def test_no_convergence_and_fallback(self, k3, model123):
        markov = build_canonical_markov(k3, model123)
        with pytest.raises(NoConvergence) as excinfo:
            stationary_distribution(markov, max_iters=1)
        assert excinfo.value.iterations == 1
        np.testing.assert_allclose(stationary_with_fallback(markov, max_iters=1), model123.pi, atol=1e-12)

    def test_invalid_tolerance(self, k3, uniform3):
        with pytest.raises(ValueError):
            stationary_distribution(build_canonical_markov(k3, uniform3), tol=0.0)

    def test_canonical_stationary_is_pi(self, random_instances):
        for graph, model in random_instances:
            markov = build_canonical_markov(graph, model)
            np.testing.assert_allclose(stationary_exact(markov), model.pi, rtol=0, atol=1e-8)
            np.testing.assert_allclose(stationary_distribution(markov, tol=1e-13), model.pi, rtol=0, atol=1e-8)

    def test_power_matches_dense_solver(self):
        rng = np.random.default_rng(17)
        for index in range(100):
            graph = random_connected_graph(rng, 20, p=0.2, weighted=bool(index % 2))
            model = generate_scores(20, 3.0, seed=index)
            markov = build_empirical_markov(graph, sample_comparisons(model, graph, 64, seed=index))
            np.testing.assert_allclose(stationary_distribution(markov, tol=1e-13),
                                       stationary_exact(markov), rtol=0, atol=1e-8)


class TestRankCentrality:

    def test_rank_order_ties(self):
        np.testing.assert_array_equal(rank_order(np.array([0.2, 0.5, 0.2, 0.1])), [1, 0, 2, 3])

    def test_exact_data_recovers_pi(self):
        model = new_btl_model([1, 1, 2])
        graph = ComparisonGraph.complete(3)
        pi_hat, ranking = rank_centrality(graph, expected_comparisons(model, graph, 6))
        np.testing.assert_allclose(pi_hat, model.pi, atol=1e-9)
        assert ranking[0] == 2

    def test_many_comparisons_recover_ranking(self):
        model = new_btl_model([1, 2, 4])
        graph = ComparisonGraph.complete(3)
        taus = []
        for seed in range(50):
            pi_hat, ranking = rank_centrality(graph, sample_comparisons(model, graph, 10_000, seed))
            taus.append(kendall_tau(pi_hat, model.pi))
            assert ranking.tolist() == [2, 1, 0]
        assert np.median(taus) == 1.0

    def test_disconnected_graph(self):
        model = new_btl_model([1, 2, 3, 4])
        graph = ComparisonGraph.from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(NotConnected):
            rank_centrality(graph, sample_comparisons(model, graph, 5, 0))
