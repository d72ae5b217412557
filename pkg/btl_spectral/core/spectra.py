"""
Spectres - Trous spectraux des chaînes de Markov et valeurs de Fiedler

Conventions d'ordre:
- Matrices de Markov et de marche aléatoire: valeurs propres triées par
  module décroissant (lambda_1 = 1, gap = 1 - |lambda_2|).
- Laplaciens: valeurs propres triées par valeur croissante (lambda_{n-1}
  est la deuxième plus petite, dite valeur de Fiedler).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.linalg

from .. import config
from .chain import MarkovMatrix, build_canonical_markov
from .errors import BtlSpectralError, EigensolveFailure, IsolatedVertex, NotConnected
from .graphs import ComparisonGraph, degree_stats, is_connected
from .model import BtlModel

logger = logging.getLogger(__name__)

CSV_HEADER = "n,seed,markov_gap,fiedler,normalized_gap,rw_gap,pi_fiedler"


@dataclass(frozen=True)
class SpectralReport:
    """
    Diagnostics spectraux d'un graphe (et éventuellement d'un modèle).

    Les quantités non définies sur l'entrée valent NaN.

    Attributs:
        markov_gap: 1 - |lambda_2(S)| (ordre par module)
        fiedler: lambda_{n-1}(L^W) (ordre croissant)
        normalized_gap: lambda_{n-1}(L^sym)
        rw_gap: 1 - |lambda_2(D^-1 A)|
        pi_fiedler: lambda_{n-1}(L_pi^W), None sans modèle
    """
    n: int
    seed: Optional[int]
    markov_gap: float
    fiedler: float
    normalized_gap: float
    rw_gap: float
    pi_fiedler: Optional[float] = None

    def to_row(self) -> str:
        """Ligne CSV alignée sur CSV_HEADER."""
        digits = config.CSV_DIGITS

        def fmt(x: Optional[float]) -> str:
            return "" if x is None else f"{x:.{digits}g}"

        seed = "" if self.seed is None else str(self.seed)
        values = [self.markov_gap, self.fiedler, self.normalized_gap, self.rw_gap, self.pi_fiedler]
        return ",".join([str(self.n), seed] + [fmt(v) for v in values])


# ==================== Aides ====================

def _eigvalsh(M: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.eigvalsh(M)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise EigensolveFailure(f"Symmetric eigensolve failed on a {M.shape[0]}x{M.shape[0]} matrix: {e}") from e


def _second_by_modulus(eigenvalues: np.ndarray) -> float:
    moduli = np.sort(np.abs(eigenvalues))[::-1]
    return float(moduli[1])


def _snap_zero(value: float) -> float:
    return 0.0 if abs(value) <= config.EIG_ZERO_ATOL else float(value)


def _laplacian_of(A: np.ndarray) -> np.ndarray:
    return np.diag(A.sum(axis=1)) - A


def _inverse_sqrt_degrees(graph: ComparisonGraph) -> np.ndarray:
    degrees = graph.weighted_degrees()
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        raise IsolatedVertex(f"Vertex {isolated[0]} has zero weighted degree")
    return 1.0 / np.sqrt(degrees)


# ==================== Chaînes de Markov ====================

def markov_spectral_gap(markov: MarkovMatrix, model: Optional[BtlModel] = None) -> float:
    """
    Trou spectral 1 - |lambda_2(S)|.

    Si S est réversible par rapport à pi (matrice canonique), le calcul passe
    par la symétrisation D_pi^{1/2} S D_pi^{-1/2}; sinon par un solveur
    général (valeurs propres éventuellement complexes, comparées en module).

    Args:
        markov: Matrice stochastique
        model: Modèle fournissant pi (par défaut markov.pi)

    Raises:
        EigensolveFailure: Si le solveur échoue
    """
    if markov.n < 2:
        return 1.0
    pi = model.pi if model is not None else markov.pi

    if pi is not None and markov.is_reversible(pi):
        root = np.sqrt(pi)
        sym = root[:, None] * markov.S / root[None, :]
        eigenvalues = _eigvalsh((sym + sym.T) / 2.0)
    else:
        try:
            eigenvalues = scipy.linalg.eigvals(markov.S)
        except (scipy.linalg.LinAlgError, ValueError) as e:
            raise EigensolveFailure(f"General eigensolve failed: {e}") from e

    return 1.0 - _second_by_modulus(eigenvalues)


# ==================== Laplaciens ====================

def laplacian(graph: ComparisonGraph) -> np.ndarray:
    """L^W = sum_{i<j} w_ij (e_i - e_j)(e_i - e_j)^T."""
    return _laplacian_of(graph.adjacency())


def fiedler_value(graph: ComparisonGraph) -> float:
    """
    Deuxième plus petite valeur propre de L^W.

    Nulle exactement lorsque le graphe pondéré n'est pas connexe.
    """
    if graph.n < 2:
        raise ValueError(f"The Fiedler value needs n >= 2, got {graph.n}")
    if not is_connected(graph):
        return 0.0
    return _snap_zero(_eigvalsh(laplacian(graph))[1])


def normalized_laplacian_gap(graph: ComparisonGraph) -> float:
    """
    lambda_{n-1} de L^sym = I - D^{-1/2} A D^{-1/2}.

    Raises:
        IsolatedVertex: Si un sommet a un degré pondéré nul
    """
    scale = _inverse_sqrt_degrees(graph)
    L_sym = np.eye(graph.n) - scale[:, None] * graph.adjacency() * scale[None, :]
    return _snap_zero(_eigvalsh(L_sym)[1])


def rw_spectral_gap(graph: ComparisonGraph) -> float:
    """
    1 - |lambda_2(D^{-1} A)|, via la matrice semblable D^{-1/2} A D^{-1/2}.

    Raises:
        IsolatedVertex: Si un sommet a un degré pondéré nul
        NotConnected: Si le graphe n'est pas connexe
    """
    scale = _inverse_sqrt_degrees(graph)
    if not is_connected(graph):
        raise NotConnected("The random-walk gap is undefined on a disconnected graph")
    M = scale[:, None] * graph.adjacency() * scale[None, :]
    return 1.0 - _second_by_modulus(_eigvalsh(M))


def pi_weighted_laplacian(graph: ComparisonGraph, model: BtlModel) -> np.ndarray:
    """L_pi^W: chaque arête pondérée par w_ij * pi_i pi_j / (pi_i + pi_j)."""
    pi = model.pi
    factors = (pi[:, None] * pi[None, :]) / (pi[:, None] + pi[None, :])
    return _laplacian_of(factors * graph.adjacency())


def pi_weighted_fiedler(graph: ComparisonGraph, model: BtlModel) -> float:
    if graph.n < 2:
        raise ValueError(f"The Fiedler value needs n >= 2, got {graph.n}")
    if not is_connected(graph):
        return 0.0
    return _snap_zero(_eigvalsh(pi_weighted_laplacian(graph, model))[1])


# ==================== Inégalités ====================

def sandwich_bounds(graph: ComparisonGraph, model: BtlModel) -> Tuple[float, float, float]:
    """
    Encadrement de la valeur de Fiedler pi-pondérée.

        (|pi|_inf / 2h) lambda(L^W) <= lambda(L_pi^W) <= (|pi|_inf / 2) lambda(L^W)

    Returns:
        (borne inférieure, valeur, borne supérieure)
    """
    fiedler = fiedler_value(graph)
    top = float(model.pi.max())
    return top / (2.0 * model.h) * fiedler, pi_weighted_fiedler(graph, model), top / 2.0 * fiedler


def comparison_bound(graph: ComparisonGraph, model: BtlModel) -> Tuple[float, float]:
    """
    Comparaison avec la marche aléatoire simple.

        gap(S) >= (d_min / d_max) * (1 / 2h^2) * gap(D^-1 A)

    Returns:
        (trou spectral de la matrice canonique, borne inférieure)
    """
    gap = markov_spectral_gap(build_canonical_markov(graph, model), model)
    d_min, d_max, _ = degree_stats(graph)
    bound = (d_min / d_max) / (2.0 * model.h ** 2) * rw_spectral_gap(graph)
    return gap, bound


# ==================== Rapport ====================

def _guarded(name: str, compute: Callable[[], float]) -> float:
    try:
        return compute()
    except (BtlSpectralError, ValueError) as e:
        logger.warning(f"Spectral quantity '{name}' undefined on this input: {e}")
        return math.nan


def spectral_report(graph: ComparisonGraph, model: Optional[BtlModel] = None,
                    markov: Optional[MarkovMatrix] = None, seed: Optional[int] = None) -> SpectralReport:
    """
    Calcule toutes les quantités spectrales d'un graphe.

    Args:
        graph: Graphe d'observation (pondéré)
        model: Modèle BTL; active pi_fiedler et la matrice canonique par défaut
        markov: Matrice de Markov à analyser (sinon la canonique si model est donné)
        seed: Graine à reporter dans la ligne CSV

    Returns:
        SpectralReport (NaN pour les quantités non définies)
    """
    if markov is None and model is not None:
        try:
            markov = build_canonical_markov(graph, model)
        except BtlSpectralError as e:
            logger.warning(f"Canonical Markov matrix undefined on this input: {e}")

    markov_gap = math.nan
    if markov is not None:
        markov_gap = _guarded('markov_gap', lambda: markov_spectral_gap(markov, model))

    pi_fiedler = None
    if model is not None:
        pi_fiedler = _guarded('pi_fiedler', lambda: pi_weighted_fiedler(graph, model))

    return SpectralReport(
        n=graph.n,
        seed=seed,
        markov_gap=markov_gap,
        fiedler=_guarded('fiedler', lambda: fiedler_value(graph)),
        normalized_gap=_guarded('normalized_gap', lambda: normalized_laplacian_gap(graph)),
        rw_gap=_guarded('rw_gap', lambda: rw_spectral_gap(graph)),
        pi_fiedler=pi_fiedler,
    )


def paradox_graphs() -> Tuple[ComparisonGraph, ComparisonGraph]:
    """
    Deux graphes à 5 sommets: ajouter l'arête (1, 2) au premier diminue
    son trou spectral normalisé (0.423 -> 0.346).
    """
    left = ComparisonGraph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])
    return left, left.with_edge(1, 2)

