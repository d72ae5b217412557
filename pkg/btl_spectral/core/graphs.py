"""
Graphes d'observation - Générateurs semi-aléatoires, Erdős-Rényi et SBM

Tous les générateurs seuillent les mêmes uniformes U_ij (voir rng.py):
une paire (i, j) est présente si U_ij < q_ij. Le couplage monotone
entre un graphe Erdős-Rényi et un graphe semi-aléatoire en découle.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .. import config
from .errors import BlockSizeError, ConfigError, InvalidPlan, WeightOutOfRange
from .rng import pair_uniforms

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


def _normalize_edge(i: int, j: int) -> Edge:
    i, j = int(i), int(j)
    if i == j:
        raise ValueError(f"Self-loop ({i}, {i}) is not allowed")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class ComparisonGraph:
    """
    Graphe non orienté simple avec un poids w_ij dans [0, 1] par arête.

    Les arêtes de poids nul restent dans l'ensemble d'arêtes mais n'ont
    aucun effet sur les calculs pondérés.

    Attributs:
        n: Nombre de sommets
        edges: Paires (i, j), i < j, triées
        weights: Poids par arête (1.0 par défaut)
    """
    n: int
    edges: Tuple[Edge, ...] = ()
    weights: Mapping[Edge, float] = field(default_factory=dict)

    def __post_init__(self):
        edges = tuple(sorted(set(_normalize_edge(i, j) for i, j in self.edges)))
        for i, j in edges:
            if j >= self.n or i < 0:
                raise ValueError(f"Edge ({i}, {j}) outside [0, {self.n})")
        weights = {e: 1.0 for e in edges}
        for (i, j), w in self.weights.items():
            edge = _normalize_edge(i, j)
            if edge not in weights:
                raise ValueError(f"Weight given for absent edge {edge}")
            w = float(w)
            if not 0.0 <= w <= 1.0:
                raise WeightOutOfRange(f"Weight {w} on edge {edge} is outside [0, 1]")
            weights[edge] = w
        object.__setattr__(self, 'edges', edges)
        object.__setattr__(self, 'weights', weights)

    # ==================== Constructeurs ====================

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge],
                   weights: Optional[Mapping[Edge, float]] = None) -> 'ComparisonGraph':
        return cls(n=n, edges=tuple(edges), weights=dict(weights or {}))

    @classmethod
    def complete(cls, n: int) -> 'ComparisonGraph':
        return cls(n=n, edges=tuple((i, j) for j in range(n) for i in range(j)))

    @classmethod
    def from_adjacency(cls, A: np.ndarray) -> 'ComparisonGraph':
        """Graphe pondéré depuis une matrice symétrique (triangle supérieur non nul)."""
        rows, cols = np.nonzero(np.triu(A, k=1))
        edges = tuple(zip(rows.tolist(), cols.tolist()))
        return cls(n=A.shape[0], edges=edges,
                   weights={e: float(A[e]) for e in edges})

    # ==================== Accès ====================

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def weight(self, i: int, j: int) -> float:
        """Poids de la paire (0 si absente)."""
        return self.weights.get(_normalize_edge(i, j), 0.0)

    def edge_array(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(rows, cols, weights) avec rows < cols."""
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, np.zeros(0)
        rows, cols = (np.array(x, dtype=np.int64) for x in zip(*self.edges))
        return rows, cols, np.array([self.weights[e] for e in self.edges])

    @cached_property
    def _adjacency(self) -> np.ndarray:
        if self.n > config.DENSE_MAX_N:
            raise ValueError(f"Dense storage is limited to n <= {config.DENSE_MAX_N}")
        A = np.zeros((self.n, self.n))
        rows, cols, w = self.edge_array()
        A[rows, cols] = w
        A[cols, rows] = w
        A.setflags(write=False)
        return A

    def adjacency(self) -> np.ndarray:
        """Matrice d'adjacence pondérée dense (lecture seule)."""
        return self._adjacency

    @cached_property
    def _neighbors(self) -> List[List[int]]:
        lists: List[List[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            lists[i].append(j)
            lists[j].append(i)
        return lists

    def neighbors(self, i: int) -> List[int]:
        """Voisins de i dans l'ensemble d'arêtes (poids nuls compris)."""
        return self._neighbors[i]

    def weighted_degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def positive_edges(self) -> List[Edge]:
        return [e for e in self.edges if self.weights[e] > 0]

    def with_weights(self, weights: Mapping[Edge, float]) -> 'ComparisonGraph':
        """Même ensemble d'arêtes, poids remplacés."""
        return ComparisonGraph(n=self.n, edges=self.edges, weights=weights)

    def with_edge(self, i: int, j: int, w: float = 1.0) -> 'ComparisonGraph':
        edge = _normalize_edge(i, j)
        weights = dict(self.weights)
        weights[edge] = w
        return ComparisonGraph(n=self.n, edges=self.edges + (edge,), weights=weights)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_weighted_edges_from((i, j, self.weights[(i, j)]) for i, j in self.edges)
        return graph

    def __repr__(self) -> str:
        return f"ComparisonGraph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """
    Probabilités d'échantillonnage q_ij dans [base_p, 1] (matrice symétrique).

    Un base_p nul est accepté avec un avertissement (plan.warnings).
    """
    n: int
    base_p: float
    q: np.ndarray
    warnings: Tuple[str, ...] = field(init=False, default=())

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.shape != (self.n, self.n):
            raise InvalidPlan(f"q must be {self.n}x{self.n}, got shape {q.shape}")
        if not 0.0 <= self.base_p <= 1.0:
            raise InvalidPlan(f"base_p must lie in [0, 1], got {self.base_p}")
        if not np.allclose(q, q.T, rtol=0.0, atol=0.0):
            raise InvalidPlan("q must be symmetric")
        off = q[~np.eye(self.n, dtype=bool)]
        if off.size and (off.min() < self.base_p or off.max() > 1.0):
            raise InvalidPlan(
                f"Every q_ij must lie in [base_p={self.base_p}, 1]; "
                f"found range [{off.min():.6g}, {off.max():.6g}]"
            )
        np.fill_diagonal(q, 0.0)
        q.setflags(write=False)
        object.__setattr__(self, 'q', q)

        warnings = []
        if self.base_p == 0.0:
            warnings.append("base probability is 0: the plan is semi-random only in the degenerate sense")
            logger.warning(f"SamplingPlan with base_p = 0 (n={self.n})")
        object.__setattr__(self, 'warnings', tuple(warnings))

    @classmethod
    def uniform(cls, n: int, p: float) -> 'SamplingPlan':
        q = np.full((n, n), float(p))
        return cls(n=n, base_p=float(p), q=q)

    @classmethod
    def from_matrix(cls, q: np.ndarray, base_p: Optional[float] = None) -> 'SamplingPlan':
        """Plan depuis une matrice; base_p par défaut = min hors diagonale."""
        q = np.asarray(q, dtype=float)
        n = q.shape[0]
        if base_p is None:
            off = q[~np.eye(n, dtype=bool)]
            base_p = float(off.min()) if off.size else 0.0
        return cls(n=n, base_p=base_p, q=q)

    def row_probabilities(self, i: int) -> np.ndarray:
        """q_ij pour j != i."""
        return np.delete(self.q[i], i)


@dataclass(frozen=True, eq=False)
class SbmSpec:
    """
    Modèle à blocs stochastiques à blocs contigus B_1 = {0..n/m-1}, ...

    Forme assortative: p entre blocs, q_l dans le bloc l (q_1 > p, q croissant).
    Forme généralisée: matrice de blocs P symétrique dans [0, 1].
    """
    n: int
    m: int
    p: Optional[float] = None
    q: Optional[Tuple[float, ...]] = None
    P: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.m < 2 or self.n % self.m != 0 or self.n // self.m < 2:
            raise BlockSizeError(
                f"n={self.n} must be a multiple of m={self.m} >= 2 with at least 2 nodes per block"
            )
        if self.P is not None:
            P = np.array(self.P, dtype=float)
            if P.shape != (self.m, self.m):
                raise InvalidPlan(f"Block matrix must be {self.m}x{self.m}, got {P.shape}")
            if not np.array_equal(P, P.T) or P.min() < 0.0 or P.max() > 1.0:
                raise InvalidPlan("Block matrix must be symmetric with entries in [0, 1]")
            P.setflags(write=False)
            object.__setattr__(self, 'P', P)
            return

        if self.p is None or self.q is None or len(self.q) != self.m:
            raise InvalidPlan("Assortative SBM needs p and m within-block probabilities q")
        q = tuple(float(x) for x in self.q)
        if any(b < a for a, b in zip(q, q[1:])):
            raise InvalidPlan(f"Within-block probabilities must be sorted ascending, got {q}")
        if not q[0] > self.p:
            raise InvalidPlan(f"Assortative SBM needs q_1 > p, got q_1={q[0]}, p={self.p}")
        object.__setattr__(self, 'q', q)

    @classmethod
    def assortative(cls, n: int, m: int, p: float, q: Sequence[float]) -> 'SbmSpec':
        return cls(n=n, m=m, p=float(p), q=tuple(q))

    @classmethod
    def generalized(cls, n: int, P: np.ndarray) -> 'SbmSpec':
        P = np.asarray(P, dtype=float)
        return cls(n=n, m=P.shape[0], P=P)

    @property
    def block_size(self) -> int:
        return self.n // self.m

    def block_of(self, i: int) -> int:
        return i // self.block_size

    def block_matrix(self) -> np.ndarray:
        if self.P is not None:
            return self.P
        P = np.full((self.m, self.m), float(self.p))
        np.fill_diagonal(P, self.q)
        return P

    def to_plan(self) -> SamplingPlan:
        """Plan semi-aléatoire équivalent (base_p = plus petite entrée de la matrice de blocs)."""
        labels = np.arange(self.n) // self.block_size
        P = self.block_matrix()
        q = P[labels[:, None], labels[None, :]]
        return SamplingPlan(n=self.n, base_p=float(P.min()), q=q)


def experiment1_block_matrix(n: int) -> np.ndarray:
    """Matrice de blocs 3x3 de l'expérience SBM: entrées 1, 1, 0 et 2 log(n)/n."""
    r = min(1.0, 2.0 * np.log(n) / n)
    return np.array([
        [1.0, 1.0, 0.0],
        [1.0, r, r],
        [0.0, r, r],
    ])


# ==================== Générateurs ====================

def _graph_from_mask(n: int, rows: np.ndarray, cols: np.ndarray, mask: np.ndarray) -> ComparisonGraph:
    edges = tuple(zip(rows[mask].tolist(), cols[mask].tolist()))
    return ComparisonGraph(n=n, edges=edges)


def gen_semi_random(plan: SamplingPlan, seed: int) -> ComparisonGraph:
    """
    Graphe semi-aléatoire: (i, j) présent indépendamment avec probabilité q_ij.

    Args:
        plan: Plan d'échantillonnage validé
        seed: Graine 64 bits

    Returns:
        ComparisonGraph de poids 1
    """
    rows, cols, u = pair_uniforms(seed, plan.n)
    graph = _graph_from_mask(plan.n, rows, cols, u < plan.q[rows, cols])
    logger.debug(f"Semi-random graph: n={plan.n}, {graph.num_edges} edges (seed={seed})")
    return graph


def gen_er(n: int, p: float, seed: int) -> ComparisonGraph:
    """Graphe Erdős-Rényi G(n, p): gen_semi_random avec q_ij = p partout."""
    if not 0.0 <= p <= 1.0:
        raise InvalidPlan(f"Edge probability must lie in [0, 1], got {p}")
    return gen_semi_random(SamplingPlan.uniform(n, p), seed)


def gen_sbm(spec: SbmSpec, seed: int) -> ComparisonGraph:
    """Graphe SBM (assortatif ou généralisé) à blocs contigus."""
    return gen_semi_random(spec.to_plan(), seed)


def monotone_coupling(plan: SamplingPlan, seed: int) -> Tuple[ComparisonGraph, ComparisonGraph]:
    """
    Couple un graphe Erdős-Rényi G(n, base_p) et le graphe semi-aléatoire du plan.

    Une seule uniforme U_ij par paire: arête ER si U_ij < base_p, arête
    semi-aléatoire si U_ij < q_ij. Le graphe ER est donc toujours un
    sous-graphe du graphe semi-aléatoire.

    Returns:
        (er_graph, sr_graph)
    """
    rows, cols, u = pair_uniforms(seed, plan.n)
    er_graph = _graph_from_mask(plan.n, rows, cols, u < plan.base_p)
    sr_graph = _graph_from_mask(plan.n, rows, cols, u < plan.q[rows, cols])
    return er_graph, sr_graph


def coupled_subgraph_weights(er_graph: ComparisonGraph, sr_graph: ComparisonGraph) -> Dict[Edge, float]:
    """Poids indicateurs du sous-graphe ER sur les arêtes du graphe semi-aléatoire."""
    er_edges = set(er_graph.edges)
    return {e: (1.0 if e in er_edges else 0.0) for e in sr_graph.edges}


# ==================== Connexité et degrés ====================

def is_connected(graph: ComparisonGraph) -> bool:
    """Connexité sur les arêtes de poids strictement positif."""
    if graph.n <= 1:
        return True
    A = csr_matrix(graph.adjacency() > 0)
    n_components, _ = connected_components(A, directed=False)
    return n_components == 1


def degree_stats(graph: ComparisonGraph) -> Tuple[float, float, float]:
    """
    Degrés pondérés.

    Returns:
        (d_min, d_max, degré moyen)
    """
    degrees = graph.weighted_degrees()
    return float(degrees.min()), float(degrees.max()), float(degrees.mean())


# ==================== Format liste d'arêtes ====================

def write_edge_list(graph: ComparisonGraph, path: Union[str, Path]) -> None:
    """
    Écrit le graphe: ligne 'n <count>' puis une ligne 'i j w' par arête.

    Indices à partir de 0, poids avec 12 chiffres significatifs au moins.
    """
    digits = max(config.CSV_DIGITS, 12)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(f"n {graph.n}\n")
        for i, j in graph.edges:
            f.write(f"{i} {j} {graph.weights[(i, j)]:.{digits}g}\n")


def read_edge_list(path: Union[str, Path]) -> ComparisonGraph:
    """
    Lit un fichier liste d'arêtes.

    Raises:
        ConfigError: Si l'en-tête ou une ligne est mal formé
        WeightOutOfRange: Si un poids sort de [0, 1]
    """
    with open(path, 'r', encoding='utf-8') as f:
        lines = [line.strip() for line in f if line.strip()]
    if not lines or not lines[0].startswith('n '):
        raise ConfigError(f"{path}: missing 'n <count>' header")
    try:
        n = int(lines[0].split()[1])
        triples = []
        for number, line in enumerate(lines[1:], start=2):
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {number}: expected 'i j w', got {line!r}")
            triples.append((int(parts[0]), int(parts[1]), float(parts[2])))
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e

    edges = [(i, j) for i, j, _ in triples]
    weights = {_normalize_edge(i, j): w for i, j, w in triples}
    return ComparisonGraph(n=n, edges=tuple(edges), weights=weights)
