"""
Chaînes de Markov - Matrices canoniques et empiriques, distributions stationnaires

La méthode spectrale (rank centrality) estime pi comme la distribution
stationnaire de la matrice de Markov empirique:

    S_ij = p̂_ij w_ij / d          si (i, j) est une arête
    S_ii = 1 - (1/d) sum_l p̂_il w_il
    d    = degré pondéré maximal
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .. import config
from .errors import (
    EdgeSetMismatch,
    EmptyGraph,
    NoConvergence,
    NotConnected,
    SingularSystem,
    SizeMismatch,
)
from .graphs import ComparisonGraph, degree_stats, is_connected
from .model import BtlModel, ComparisonDataset

logger = logging.getLogger(__name__)

CANONICAL = 'canonical'
EMPIRICAL = 'empirical'


@dataclass(frozen=True, eq=False)
class MarkovMatrix:
    """
    Matrice stochastique (lignes de somme 1), immuable après construction.

    Attributs:
        n: Nombre d'états
        S: Matrice dense n x n (lecture seule)
        d: Normalisation (degré pondéré maximal du graphe)
        provenance: 'canonical' ou 'empirical'
        pi: Vecteur de scores d'origine (matrices canoniques seulement)
    """
    n: int
    S: np.ndarray
    d: float
    provenance: str
    pi: Optional[np.ndarray] = None

    def is_reversible(self, pi: np.ndarray, atol: float = 1e-12) -> bool:
        """Vérifie l'équilibre détaillé pi_i S_ij = pi_j S_ji."""
        flow = pi[:, None] * self.S
        return bool(np.allclose(flow, flow.T, rtol=0.0, atol=atol))

    def to_csv(self, path: Union[str, Path]) -> None:
        """Écrit 'n,d', leurs valeurs, puis les lignes de S (12 chiffres significatifs)."""
        digits = config.CSV_DIGITS
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write("n,d\n")
            f.write(f"{self.n},{self.d:.{digits}g}\n")
            for row in self.S:
                f.write(",".join(f"{x:.{digits}g}" for x in row) + "\n")

    def __repr__(self) -> str:
        return f"MarkovMatrix(n={self.n}, d={self.d:.6g}, {self.provenance})"


def _build_markov(graph: ComparisonGraph, P: np.ndarray, provenance: str,
                  pi: Optional[np.ndarray] = None) -> MarkovMatrix:
    if not graph.positive_edges():
        raise EmptyGraph("The observation graph has no edge with positive weight")
    _, d, _ = degree_stats(graph)

    S = P * graph.adjacency() / d
    np.fill_diagonal(S, 0.0)
    np.fill_diagonal(S, 1.0 - S.sum(axis=1))
    S.setflags(write=False)
    return MarkovMatrix(n=graph.n, S=S, d=d, provenance=provenance, pi=pi)


def build_canonical_markov(graph: ComparisonGraph, model: BtlModel) -> MarkovMatrix:
    """
    Matrice de Markov canonique construite avec les vraies probabilités p_ij.

    Sa distribution stationnaire est exactement pi.

    Raises:
        SizeMismatch: Si graph.n != model.n
        EmptyGraph: Si aucune arête n'a un poids positif
    """
    if graph.n != model.n:
        raise SizeMismatch(f"Graph has {graph.n} nodes but the model has {model.n} items")
    return _build_markov(graph, model.pref_matrix(), CANONICAL, pi=model.pi)


def build_empirical_markov(graph: ComparisonGraph, dataset: ComparisonDataset) -> MarkovMatrix:
    """
    Matrice de Markov empirique construite avec p̂_ij = Z_ij / k.

    Raises:
        EdgeSetMismatch: Si les paires du jeu de données diffèrent des arêtes du graphe
    """
    if dataset.n != graph.n or set(dataset.edges) != set(graph.edges):
        missing = len(set(graph.edges) - set(dataset.edges))
        extra = len(set(dataset.edges) - set(graph.edges))
        raise EdgeSetMismatch(
            f"Dataset pairs do not match graph edges ({missing} missing, {extra} extra); "
            f"sample the dataset on this graph."
        )
    return _build_markov(graph, dataset.win_matrix(), EMPIRICAL)


# ==================== Distributions stationnaires ====================

def _support_connected(S: np.ndarray) -> bool:
    off = S.copy()
    np.fill_diagonal(off, 0.0)
    n_components, _ = connected_components(csr_matrix((off + off.T) > 0), directed=False)
    return n_components == 1


def stationary_distribution(markov: MarkovMatrix, tol: float = config.POWER_TOL,
                            max_iters: int = config.POWER_MAX_ITERS) -> np.ndarray:
    """
    Distribution stationnaire par la méthode de la puissance.

    Départ uniforme; arrêt quand ||v^T S - v^T||_1 <= tol.

    Args:
        markov: Matrice de Markov
        tol: Tolérance sur le résidu l1 (> 0)
        max_iters: Nombre maximal d'itérations

    Returns:
        Vecteur de probabilité v

    Raises:
        NotConnected: Si le graphe sous-jacent à S n'est pas connexe
        NoConvergence: Si le résidu dépasse tol après max_iters itérations
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    S = markov.S
    if markov.n > 1 and not _support_connected(S):
        raise NotConnected("The chain's underlying graph is disconnected; its stationary distribution is not unique")

    v = np.full(markov.n, 1.0 / markov.n)
    residual = np.inf
    for iteration in range(max_iters):
        w = v @ S
        residual = float(np.abs(w - v).sum())
        if residual <= tol:
            logger.debug(f"Power iteration converged in {iteration + 1} iterations")
            return v / v.sum()
        v = w

    raise NoConvergence(max_iters, residual)


def stationary_exact(markov: MarkovMatrix) -> np.ndarray:
    """
    Distribution stationnaire par résolution directe de v^T (S - I) = 0, sum(v) = 1.

    Sert d'oracle pour stationary_distribution.

    Raises:
        SingularSystem: Si la chaîne a plusieurs classes fermées
    """
    n = markov.n
    if n > config.EXACT_MAX_N:
        raise ValueError(f"stationary_exact is limited to n <= {config.EXACT_MAX_N}, got {n}")

    M = markov.S.T - np.eye(n)
    M[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0

    if np.linalg.cond(M) > 1e12:
        raise SingularSystem("The stationary system is singular: the chain is reducible")
    try:
        v = scipy.linalg.solve(M, b)
    except scipy.linalg.LinAlgError as e:
        raise SingularSystem(f"The stationary system is singular: {e}") from e

    # Bruit d'arrondi sur les états transitoires
    v = np.where(np.abs(v) < 1e-15, 0.0, v)
    return v / v.sum()


# ==================== Rank centrality ====================

def rank_order(scores: np.ndarray) -> np.ndarray:
    """Permutation triant par score décroissant (égalités: indice croissant)."""
    scores = np.asarray(scores)
    return np.lexsort((np.arange(scores.shape[0]), -scores))


def stationary_with_fallback(markov: MarkovMatrix, tol: float = config.POWER_TOL,
                             max_iters: int = config.POWER_MAX_ITERS) -> np.ndarray:
    """Méthode de la puissance, puis solveur dense si elle ne converge pas."""
    try:
        return stationary_distribution(markov, tol=tol, max_iters=max_iters)
    except NoConvergence as e:
        logger.warning(f"{e} Falling back to the dense solver.")
        return stationary_exact(markov)


def rank_centrality(graph: ComparisonGraph, dataset: ComparisonDataset,
                    tol: float = config.POWER_TOL, max_iters: int = config.POWER_MAX_ITERS,
                    fallback: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Estimateur spectral: distribution stationnaire de la matrice empirique.

    Args:
        graph: Graphe d'observation (connexe)
        dataset: Comparaisons observées sur ce graphe
        fallback: Utiliser le solveur dense si la méthode de la puissance échoue

    Returns:
        (pi_hat, ranking) avec ranking trié par pi_hat décroissant

    Raises:
        NotConnected: Si le graphe n'est pas connexe
    """
    if not is_connected(graph):
        raise NotConnected(f"Observation graph with {graph.n} nodes is disconnected")

    markov = build_empirical_markov(graph, dataset)
    if fallback:
        pi_hat = stationary_with_fallback(markov, tol=tol, max_iters=max_iters)
    else:
        pi_hat = stationary_distribution(markov, tol=tol, max_iters=max_iters)
    return pi_hat, rank_order(pi_hat)
