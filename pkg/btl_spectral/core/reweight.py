"""
Repondération - Poids d'arêtes maximisant la valeur de Fiedler

Problème:
---------
    maximiser  lambda_{n-1}(L^W)
    sur        w dans [0, 1]^E
    avec       degré pondéré <= degree_cap partout
               degré pondéré >= degree_floor (drapeau feasible)

Algorithme:
-----------
Poids multiplicatifs matriciels (MMWU) sur l'orthogonal Q de 1_n. À l'itération t:

    Y_t   = exp(-eta * sum_{s<t} Q^T L(w_s) Q / rho) / trace     (rho = 2 * degree_cap)
    w_t   = oracle glouton maximisant <L(w), Q Y_t Q^T>

L'exponentielle est calculée exactement par diagonalisation. Les candidats
(moyenne des w_t, meilleur w_t, poids unitaires ramenés sous le plafond) sont
réparés vers le plancher, dilatés jusqu'à saturer une contrainte, puis
complétés arête par arête en servant d'abord les sommets de faible degré.
Le meilleur candidat faisable est retenu (à défaut, le meilleur tout court).
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
import scipy.linalg

from ..config import (
    CAP_ESTIMATOR,
    CSV_DIGITS,
    MMWU_DEGREE_FLOOR,
    MMWU_ITERATIONS,
    MMWU_MIN_WEIGHT,
    MMWU_STEP_SCALE,
)
from .chain import (
    build_canonical_markov,
    build_empirical_markov,
    rank_order,
    stationary_with_fallback,
)
from .errors import ConfigError, EigensolveFailure, Infeasible, NotConnected, UnknownEdge, WeightOutOfRange
from .graphs import ComparisonGraph, is_connected, write_edge_list
from .model import BtlModel, ComparisonDataset
from .spectra import SpectralReport, spectral_report

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

CAP_ESTIMATORS = ('mean_degree', 'lower_quartile_degree')


@dataclass(frozen=True)
class ReweightConfig:
    """
    Paramètres de l'optimiseur.

    Attributs:
        degree_cap: Plafond du degré pondéré (2 n p̂_eff par défaut, voir for_graph)
        degree_floor: Plancher du degré pondéré (>= 1)
        iterations: Itérations MMWU
        step_size: Pas eta (0.5 / sqrt(iterations) si None)
        oracle: Oracle interne ('greedy')
        min_weight: Poids plancher sur l'arbre couvrant si la pondération déconnecte
        cap_estimator: Estimateur ayant produit degree_cap (métadonnées)
    """
    degree_cap: float
    degree_floor: float = MMWU_DEGREE_FLOOR
    iterations: int = MMWU_ITERATIONS
    step_size: Optional[float] = None
    oracle: str = 'greedy'
    min_weight: float = MMWU_MIN_WEIGHT
    cap_estimator: Optional[str] = None

    def __post_init__(self):
        if self.step_size is None:
            object.__setattr__(self, 'step_size', MMWU_STEP_SCALE / math.sqrt(max(self.iterations, 1)))
        if self.degree_floor < 1.0:
            raise ConfigError(f"degree_floor must be >= 1, got {self.degree_floor}")
        if not self.degree_cap > self.degree_floor:
            raise ConfigError(
                f"degree_cap ({self.degree_cap}) must exceed degree_floor ({self.degree_floor})"
            )
        if self.iterations < 1:
            raise ConfigError(f"iterations must be a positive integer, got {self.iterations}")
        if self.step_size <= 0:
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if self.oracle != 'greedy':
            raise ConfigError(f"Unknown oracle {self.oracle!r}; only 'greedy' is available")

    @classmethod
    def for_graph(cls, graph: ComparisonGraph, cap_estimator: str = CAP_ESTIMATOR,
                  **overrides) -> 'ReweightConfig':
        """
        Configuration par défaut pour un graphe: degree_cap = 2 n p̂_eff.

        Args:
            graph: Graphe d'observation
            cap_estimator: 'mean_degree' (p̂_eff = degré moyen / n) ou
                           'lower_quartile_degree' (p̂_eff = premier quartile des degrés / n)
            **overrides: Autres champs de ReweightConfig
        """
        if cap_estimator not in CAP_ESTIMATORS:
            raise ConfigError(f"Unknown cap estimator {cap_estimator!r}; expected one of {CAP_ESTIMATORS}")
        degrees = np.array([len(graph.neighbors(i)) for i in range(graph.n)], dtype=float)
        if cap_estimator == 'mean_degree':
            p_eff = degrees.mean() / graph.n
        else:
            p_eff = np.percentile(degrees, 25) / graph.n
        floor = overrides.get('degree_floor', MMWU_DEGREE_FLOOR)
        cap = max(2.0 * graph.n * p_eff, 2.0 * floor)
        return cls(degree_cap=float(cap), cap_estimator=cap_estimator, **overrides)

    def to_dict(self) -> Dict[str, object]:
        return {
            'degree_cap': self.degree_cap,
            'degree_floor': self.degree_floor,
            'iterations': self.iterations,
            'step_size': self.step_size,
            'oracle': self.oracle,
            'min_weight': self.min_weight,
            'cap_estimator': self.cap_estimator,
        }


@dataclass(frozen=True)
class ReweightResult:
    """
    Poids retenus et valeur de Fiedler atteinte.

    Attributs:
        weights: Poids par arête du graphe d'entrée, dans [0, 1]
        achieved_fiedler: lambda_{n-1}(L^W) pour ces poids
        iterations_used: Itérations MMWU effectuées
        feasible: Le degré pondéré minimal atteint degree_floor
        candidate: Candidat retenu ('average', 'best_iterate', 'clipped_ones')
        candidate_scores: (valeur de Fiedler, faisable) de chaque candidat
    """
    weights: Dict[Edge, float]
    achieved_fiedler: float
    iterations_used: int
    feasible: bool
    candidate: str = field(default='average')
    candidate_scores: Dict[str, Tuple[float, bool]] = field(default_factory=dict)


# ==================== Algèbre sur les arêtes ====================

class _EdgeSystem:
    """Arêtes d'un graphe sous forme de tableaux, pour les calculs vectorisés."""

    def __init__(self, graph: ComparisonGraph):
        self.n = graph.n
        self.edges = graph.edges
        self.rows = np.array([i for i, _ in graph.edges], dtype=np.int64)
        self.cols = np.array([j for _, j in graph.edges], dtype=np.int64)

    def laplacian(self, w: np.ndarray) -> np.ndarray:
        L = np.zeros((self.n, self.n))
        L[self.rows, self.cols] = -w
        L[self.cols, self.rows] = -w
        L[np.diag_indices(self.n)] = self.degrees(w)
        return L

    def degrees(self, w: np.ndarray) -> np.ndarray:
        return np.bincount(self.rows, weights=w, minlength=self.n) + \
            np.bincount(self.cols, weights=w, minlength=self.n)

    def fiedler(self, w: np.ndarray) -> float:
        try:
            return float(scipy.linalg.eigvalsh(self.laplacian(w))[1])
        except (scipy.linalg.LinAlgError, ValueError) as e:
            raise EigensolveFailure(f"Laplacian eigensolve failed on {self.n} nodes: {e}") from e


def _density_matrix(accumulated: np.ndarray, eta: float, width: float) -> np.ndarray:
    """exp(-eta * accumulated / width) normalisée à trace 1."""
    values, vectors = scipy.linalg.eigh(accumulated)
    exponent = np.exp(-eta * (values - values.min()) / width)
    Y = (vectors * exponent) @ vectors.T
    return Y / np.trace(Y)


def _greedy_oracle(system: _EdgeSystem, gains: np.ndarray, cap: float) -> np.ndarray:
    """Arêtes par gain décroissant (égalités: plus petite arête), poids au plus près du plafond."""
    order = np.lexsort((system.cols, system.rows, -gains))
    degrees = np.zeros(system.n)
    w = np.zeros(len(system.edges))
    for e in order:
        i, j = system.rows[e], system.cols[e]
        value = min(1.0, cap - degrees[i], cap - degrees[j])
        if value > 0.0:
            w[e] = value
            degrees[i] += value
            degrees[j] += value
    return w


def _repair_floor(system: _EdgeSystem, w: np.ndarray, cap: float, floor: float) -> np.ndarray:
    """Relève les poids incidents aux sommets sous le plancher, sans dépasser le plafond."""
    w = w.copy()
    degrees = system.degrees(w)
    for v in np.flatnonzero(degrees < floor):
        for e in np.flatnonzero((system.rows == v) | (system.cols == v)):
            if degrees[v] >= floor:
                break
            u = system.cols[e] if system.rows[e] == v else system.rows[e]
            raise_by = min(1.0 - w[e], floor - degrees[v], cap - degrees[u])
            if raise_by > 0.0:
                w[e] += raise_by
                degrees[v] += raise_by
                degrees[u] += raise_by
    return w


def _fill_low_degree(system: _EdgeSystem, w: np.ndarray, cap: float,
                     support_degrees: np.ndarray) -> np.ndarray:
    """
    Relève chaque arête vers 1 dans la marge laissée par le plafond, en
    commençant par les arêtes dont l'extrémité la moins connectée a le plus
    petit degré. L^W croît avec w: la valeur de Fiedler ne baisse pas.
    """
    w = w.copy()
    degrees = system.degrees(w)
    low = np.minimum(support_degrees[system.rows], support_degrees[system.cols])
    high = np.maximum(support_degrees[system.rows], support_degrees[system.cols])
    for e in np.lexsort((system.cols, system.rows, high, low)):
        i, j = system.rows[e], system.cols[e]
        raise_by = min(1.0 - w[e], cap - degrees[i], cap - degrees[j])
        if raise_by > 0.0:
            w[e] += raise_by
            degrees[i] += raise_by
            degrees[j] += raise_by
    return w


def _scale_up(system: _EdgeSystem, w: np.ndarray, cap: float) -> np.ndarray:
    """Dilate w jusqu'à saturer la boîte ou le plafond (L^W est linéaire en w)."""
    if not np.any(w > 0):
        return w
    factor = min(1.0 / w.max(), cap / system.degrees(w).max())
    if factor <= 1.0:
        return w
    return np.minimum(w * factor, 1.0)


# ==================== Optimiseur ====================

def mmwu_reweight(graph: ComparisonGraph, config: ReweightConfig) -> ReweightResult:
    """
    Calcule des poids d'arêtes maximisant (approximativement) la valeur de Fiedler.

    Déterministe pour (graph, config).

    Args:
        graph: Graphe d'observation connexe
        config: Paramètres de l'optimiseur

    Returns:
        ReweightResult avec poids dans [0, 1] et degrés pondérés <= degree_cap

    Raises:
        Infeasible: Si un sommet a moins de degree_floor arêtes
        NotConnected: Si le graphe n'est pas connexe
    """
    support = graph.with_weights({})
    unweighted = np.array([len(graph.neighbors(i)) for i in range(graph.n)], dtype=float)
    short = np.flatnonzero(unweighted < config.degree_floor)
    if short.size:
        raise Infeasible(
            f"Vertex {short[0]} has {int(unweighted[short[0]])} edges; no weighting reaches "
            f"degree_floor={config.degree_floor}. Drop the vertex or lower the floor."
        )
    if not is_connected(support):
        raise NotConnected("Reweighting needs a connected observation graph")

    system = _EdgeSystem(graph)
    cap = config.degree_cap
    width = 2.0 * cap
    basis = scipy.linalg.null_space(np.ones((1, graph.n)))

    accumulated = np.zeros((graph.n - 1, graph.n - 1))
    total = np.zeros(len(graph.edges))
    best_iterate, best_iterate_value = None, -np.inf

    for t in range(config.iterations):
        Y = basis @ _density_matrix(accumulated, config.step_size, width) @ basis.T
        gains = Y[system.rows, system.rows] + Y[system.cols, system.cols] - 2.0 * Y[system.rows, system.cols]
        w = _greedy_oracle(system, gains, cap)

        accumulated += basis.T @ system.laplacian(w) @ basis
        total += w
        value = system.fiedler(w)
        if value > best_iterate_value:
            best_iterate, best_iterate_value = w, value
        if t % 50 == 0:
            logger.debug(f"MMWU iteration {t}: iterate Fiedler value {value:.6g}")

    top_degree = unweighted.max()
    candidates = {
        'clipped_ones': np.full(len(graph.edges), min(1.0, cap / top_degree)),
        'average': total / config.iterations,
        'best_iterate': best_iterate,
    }

    # Un candidat faisable l'emporte toujours sur un candidat infaisable
    best: Optional[Tuple[bool, float, str, np.ndarray]] = None
    scores: Dict[str, Tuple[float, bool]] = {}
    for name, w in candidates.items():
        w = _scale_up(system, _repair_floor(system, w, cap, config.degree_floor), cap)
        w = np.clip(_fill_low_degree(system, w, cap, unweighted), 0.0, 1.0)
        value = system.fiedler(w)
        feasible = bool(system.degrees(w).min() >= config.degree_floor - 1e-12)
        scores[name] = (value, feasible)
        logger.debug(f"Candidate '{name}': Fiedler value {value:.6g}, feasible={feasible}")
        if best is None or (feasible, value) > (best[0], best[1]):
            best = (feasible, value, name, w)

    feasible, value, name, w = best
    logger.debug(f"Reweighting kept candidate '{name}' (Fiedler value {value:.6g})")
    if not feasible:
        logger.warning(f"Reweighting could not reach degree_floor={config.degree_floor} on every vertex")

    return ReweightResult(
        weights={e: float(x) for e, x in zip(graph.edges, w)},
        achieved_fiedler=value,
        iterations_used=config.iterations,
        feasible=feasible,
        candidate=name,
        candidate_scores=scores,
    )


# ==================== Application des poids ====================

def apply_weights(graph: ComparisonGraph, weights: Mapping[Edge, float]) -> ComparisonGraph:
    """
    Remplace les poids du graphe (arêtes absentes du mapping: poids 0).

    Raises:
        UnknownEdge: Si un poids porte sur une paire absente du graphe
        WeightOutOfRange: Si un poids sort de [0, 1]
    """
    edge_set = set(graph.edges)
    normalized: Dict[Edge, float] = {e: 0.0 for e in graph.edges}
    for (i, j), w in weights.items():
        edge = (min(i, j), max(i, j))
        if edge not in edge_set:
            raise UnknownEdge(f"Weight given for pair {edge}, which is not an edge of the graph")
        if not 0.0 <= w <= 1.0:
            raise WeightOutOfRange(f"Weight {w} on edge {edge} is outside [0, 1]")
        normalized[edge] = float(w)
    return graph.with_weights(normalized)


def ensure_connected_weights(graph: ComparisonGraph, weights: Mapping[Edge, float],
                             floor: float = MMWU_MIN_WEIGHT) -> Dict[Edge, float]:
    """
    Relève à floor les poids d'un arbre couvrant si les arêtes de poids > 0
    ne connectent pas le graphe.

    L'arbre est un arbre couvrant de poids maximal: il réutilise les arêtes
    déjà pondérées.
    """
    result = {e: float(weights.get(e, 0.0)) for e in graph.edges}
    weighted = graph.with_weights(result)
    if is_connected(weighted):
        return result

    raised = 0
    for i, j in nx.maximum_spanning_tree(weighted.to_networkx()).edges():
        edge = (min(i, j), max(i, j))
        if result[edge] < floor:
            result[edge] = floor
            raised += 1
    logger.warning(f"Weighting disconnected the graph; floored {raised} spanning-tree edges at {floor:g}")
    return result


def weighted_rank_centrality(graph: ComparisonGraph, dataset: ComparisonDataset,
                             config: Optional[ReweightConfig] = None,
                             model: Optional[BtlModel] = None,
                             result: Optional[ReweightResult] = None
                             ) -> Tuple[np.ndarray, np.ndarray, SpectralReport]:
    """
    Méthode spectrale pondérée.

    mmwu_reweight -> apply_weights -> build_empirical_markov -> distribution stationnaire.

    Args:
        graph: Graphe d'observation connexe
        dataset: Comparaisons observées sur ce graphe
        config: Paramètres (ReweightConfig.for_graph(graph) si None)
        model: Vrai modèle; le rapport porte alors le trou spectral de la
               matrice canonique pondérée et pi_fiedler
        result: Poids déjà calculés (évite de relancer l'optimiseur)

    Returns:
        (pi_hat, ranking, report)
    """
    if not is_connected(graph.with_weights({})):
        raise NotConnected(f"Observation graph with {graph.n} nodes is disconnected")
    if result is None:
        if config is None:
            config = ReweightConfig.for_graph(graph)
        result = mmwu_reweight(graph, config)
    floor = config.min_weight if config is not None else MMWU_MIN_WEIGHT

    weighted = apply_weights(graph, ensure_connected_weights(graph, result.weights, floor))
    pi_hat = stationary_with_fallback(build_empirical_markov(weighted, dataset))

    if model is not None:
        markov = build_canonical_markov(weighted, model)
    else:
        markov = build_empirical_markov(weighted, dataset)
    report = spectral_report(weighted, model=model, markov=markov, seed=dataset.seed)
    return pi_hat, rank_order(pi_hat), report


# ==================== Exports ====================

def export_weights(graph: ComparisonGraph, weights: Mapping[Edge, float], path: Union[str, Path]) -> None:
    """Écrit les poids au format liste d'arêtes."""
    write_edge_list(apply_weights(graph, weights), path)


def export_heatmap(n: int, weights: Mapping[Edge, float], path: Union[str, Path]) -> None:
    """
    Écrit les triplets (i, j, w) pour toutes les paires i < j (0 hors graphe).

    En-tête 'i,j,w', ordre lexicographique.
    """
    digits = CSV_DIGITS
    lines: List[str] = ["i,j,w"]
    for i in range(n):
        for j in range(i + 1, n):
            lines.append(f"{i},{j},{float(weights.get((i, j), 0.0)):.{digits}g}")
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write("\n".join(lines) + "\n")
