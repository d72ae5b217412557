"""
Tests des trous spectraux, valeurs de Fiedler et inégalités de comparaison
"""

import math

import networkx as nx
import numpy as np
import pytest
import scipy.linalg

from btl_spectral.core.chain import build_canonical_markov, build_empirical_markov
from btl_spectral.core.errors import IsolatedVertex, NotConnected
from btl_spectral.core.graphs import ComparisonGraph
from btl_spectral.core.model import expected_comparisons, new_btl_model
from btl_spectral.core.spectra import (
    CSV_HEADER,
    comparison_bound,
    fiedler_value,
    laplacian,
    markov_spectral_gap,
    normalized_laplacian_gap,
    paradox_graphs,
    pi_weighted_fiedler,
    rw_spectral_gap,
    sandwich_bounds,
    spectral_report,
)

from conftest import random_connected_graph


class TestMarkovGap:

    def test_k3_uniform(self, k3, uniform3):
        assert markov_spectral_gap(build_canonical_markov(k3, uniform3)) == pytest.approx(0.75, abs=1e-12)

    def test_general_solver_matches_symmetrized(self):
        model = new_btl_model([1, 1, 2])
        graph = ComparisonGraph.complete(3)
        empirical = build_empirical_markov(graph, expected_comparisons(model, graph, 6))
        assert empirical.pi is None
        assert markov_spectral_gap(empirical) == pytest.approx(
            markov_spectral_gap(build_canonical_markov(graph, model), model), abs=1e-9)

    def test_gap_in_unit_interval(self, random_instances):
        for graph, model in random_instances[:30]:
            gap = markov_spectral_gap(build_canonical_markov(graph, model), model)
            assert 0.0 < gap <= 1.0


class TestLaplacians:

    def test_complete_graph_fiedler(self):
        for n in (3, 4, 7):
            assert fiedler_value(ComparisonGraph.complete(n)) == pytest.approx(n, abs=1e-10)

    def test_disconnected_fiedler_is_zero(self):
        assert fiedler_value(ComparisonGraph.from_edges(4, [(0, 1), (2, 3)])) == 0.0
        assert fiedler_value(ComparisonGraph.from_edges(3, [(0, 1), (1, 2)], {(1, 2): 0.0})) == 0.0

    def test_fiedler_is_rayleigh_minimum(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            n = int(rng.integers(3, 9))
            graph = random_connected_graph(rng, n, p=0.4, weighted=True)
            basis = scipy.linalg.null_space(np.ones((1, n)))
            rayleigh = scipy.linalg.eigvalsh(basis.T @ laplacian(graph) @ basis)[0]
            assert fiedler_value(graph) == pytest.approx(rayleigh, abs=1e-6)

    def test_weights_scale_fiedler(self):
        graph = ComparisonGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        half = graph.with_weights({e: 0.5 for e in graph.edges})
        assert fiedler_value(half) == pytest.approx(fiedler_value(graph) / 2, abs=1e-12)

    def test_laplacian_matches_networkx(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            n = int(rng.integers(4, 30))
            graph = random_connected_graph(rng, n, p=0.3, weighted=True)
            expected = nx.laplacian_matrix(graph.to_networkx(), nodelist=range(n), weight='weight').toarray()
            np.testing.assert_allclose(laplacian(graph), expected, rtol=0, atol=1e-12)
            assert fiedler_value(graph) == pytest.approx(
                nx.algebraic_connectivity(graph.to_networkx(), weight='weight', method='tracemin_lu', tol=1e-10),
                rel=1e-6)

    def test_paradox(self):
        left, right = paradox_graphs()
        before = normalized_laplacian_gap(left)
        after = normalized_laplacian_gap(right)
        assert before == pytest.approx(0.423, abs=0.003)
        assert after == pytest.approx(0.346, abs=0.003)
        assert after < before

    def test_isolated_vertex(self):
        graph = ComparisonGraph.from_edges(3, [(0, 1)])
        with pytest.raises(IsolatedVertex):
            normalized_laplacian_gap(graph)
        with pytest.raises(IsolatedVertex):
            rw_spectral_gap(graph)


class TestRandomWalkGap:

    def test_k4(self, k4):
        assert rw_spectral_gap(k4) == pytest.approx(2 / 3, abs=1e-12)

    def test_bipartite_has_no_gap(self):
        cycle = ComparisonGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        assert rw_spectral_gap(cycle) == pytest.approx(0.0, abs=1e-12)

    def test_disconnected(self):
        with pytest.raises(NotConnected):
            rw_spectral_gap(ComparisonGraph.from_edges(4, [(0, 1), (2, 3)]))

    def test_matches_normalized_laplacian_extremes(self):
        rng = np.random.default_rng(50)
        for index in range(50):
            n = int(rng.integers(3, 25))
            graph = random_connected_graph(rng, n, p=float(rng.uniform(0.1, 0.6)), weighted=bool(index % 2))
            L_sym = nx.normalized_laplacian_matrix(graph.to_networkx(), nodelist=range(n), weight='weight').toarray()
            eigenvalues = np.linalg.eigvalsh(L_sym)
            second = max(abs(1.0 - eigenvalues[1]), abs(1.0 - eigenvalues[-1]))
            assert 1.0 - rw_spectral_gap(graph) == pytest.approx(second, abs=1e-10)


class TestPiWeighted:

    def test_uniform_scores(self):
        graph = ComparisonGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)])
        model = new_btl_model([1.0] * 5)
        assert pi_weighted_fiedler(graph, model) == pytest.approx(fiedler_value(graph) / 10, abs=1e-12)

    def test_sandwich(self, random_instances):
        for graph, model in random_instances:
            lower, value, upper = sandwich_bounds(graph, model)
            assert lower <= value + 1e-10
            assert value <= upper + 1e-10

    def test_comparison_with_random_walk(self, random_instances):
        for graph, model in random_instances:
            gap, bound = comparison_bound(graph, model)
            assert gap >= bound - 1e-10


class TestSpectralReport:

    def test_with_model(self, k4):
        report = spectral_report(k4, model=new_btl_model([1.0] * 4), seed=42)
        assert report.markov_gap == pytest.approx(2 / 3, abs=1e-12)
        assert report.fiedler == pytest.approx(4.0, abs=1e-12)
        assert report.pi_fiedler == pytest.approx(0.5, abs=1e-12)
        fields = report.to_row().split(',')
        assert len(fields) == len(CSV_HEADER.split(','))
        assert fields[:2] == ['4', '42']

    def test_without_model(self, k4):
        report = spectral_report(k4)
        assert math.isnan(report.markov_gap)
        assert report.pi_fiedler is None
        assert report.to_row().split(',')[1] == ''
        assert report.to_row().endswith(',')

    def test_disconnected_graph(self):
        report = spectral_report(ComparisonGraph.from_edges(4, [(0, 1), (2, 3)]))
        assert report.fiedler == 0.0
        assert report.normalized_gap == 0.0
        assert math.isnan(report.rw_gap)
