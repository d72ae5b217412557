"""
Fixtures partagées et option --runslow
"""

import numpy as np
import pytest

from btl_spectral.core.graphs import ComparisonGraph
from btl_spectral.core.model import generate_scores, new_btl_model


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='Exécuter aussi les balayages marqués slow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='balayage long: utiliser --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


def random_connected_graph(rng: np.random.Generator, n: int, p: float = 0.3,
                           weighted: bool = False) -> ComparisonGraph:
    """Graphe G(n, p) auquel on ajoute un chemin hamiltonien aléatoire (toujours connexe)."""
    order = rng.permutation(n)
    edges = {(min(a, b), max(a, b)) for a, b in zip(order[:-1].tolist(), order[1:].tolist())}
    for j in range(n):
        for i in range(j):
            if rng.random() < p:
                edges.add((i, j))
    edges = sorted(edges)
    weights = {e: float(rng.uniform(0.1, 1.0)) for e in edges} if weighted else None
    return ComparisonGraph.from_edges(n, edges, weights)


@pytest.fixture
def k3():
    return ComparisonGraph.complete(3)


@pytest.fixture
def k4():
    return ComparisonGraph.complete(4)


@pytest.fixture
def uniform3():
    return new_btl_model([1.0, 1.0, 1.0])


@pytest.fixture
def model123():
    return new_btl_model([1.0, 2.0, 3.0])


@pytest.fixture
def random_instances():
    """100 couples (graphe connexe, modèle) avec n dans [5, 50] et h <= 10."""
    rng = np.random.default_rng(2024)
    instances = []
    for index in range(100):
        n = int(rng.integers(5, 51))
        graph = random_connected_graph(rng, n, p=float(rng.uniform(0.05, 0.5)), weighted=bool(index % 2))
        model = generate_scores(n, float(rng.uniform(1.0, 10.0)), seed=index)
        instances.append((graph, model))
    return instances
