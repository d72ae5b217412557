"""
Modèle BTL - Scores, probabilités de préférence et tirage des comparaisons

Le modèle de Bradley-Terry-Luce associe à chaque objet i un score alpha_i > 0.
L'objet j bat l'objet i avec probabilité p_ij = alpha_j / (alpha_i + alpha_j).
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .. import config
from .errors import ConfigError, NonPositiveScore, SameItem, SizeMismatch, TooFewItems
from .graphs import ComparisonGraph
from .rng import stream_generator

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class BtlModel:
    """
    Modèle BTL normalisé.

    Attributs:
        alpha: Scores strictement positifs
        pi: Vecteur canonique alpha / sum(alpha)
        h: Plage dynamique max(alpha) / min(alpha)
    """
    alpha: np.ndarray
    pi: np.ndarray = field(init=False)
    h: float = field(init=False)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        alpha.setflags(write=False)
        pi = alpha / alpha.sum()
        pi.setflags(write=False)
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'pi', pi)
        object.__setattr__(self, 'h', float(alpha.max() / alpha.min()))

    @property
    def n(self) -> int:
        return int(self.alpha.shape[0])

    def pref_matrix(self) -> np.ndarray:
        """
        Matrice dense P avec P_ij = p_ij (diagonale nulle).

        Le triangle supérieur est calculé, l'inférieur vaut 1 - P_ji.
        """
        a = self.alpha
        upper = np.triu(a[None, :] / (a[:, None] + a[None, :]), k=1)
        lower = np.tril(1.0 - upper.T, k=-1)
        return upper + lower

    def scaled(self, factor: float) -> 'BtlModel':
        """Même modèle avec alpha multiplié par factor > 0."""
        return new_btl_model(self.alpha * factor)

    def to_dict(self) -> Dict[str, Any]:
        return {'alpha': [float(a) for a in self.alpha]}

    def __repr__(self) -> str:
        return f"BtlModel(n={self.n}, h={self.h:.4g})"


@dataclass(frozen=True)
class ComparisonDataset:
    """
    Résultats des comparaisons: Z[(i, j)] = nombre de victoires de j sur i.

    Attributs:
        n: Nombre d'objets
        k: Comparaisons par paire observée
        edges: Paires (i, j) avec i < j, triées
        Z: Compteurs de victoires de j sur i
        seed: Graine utilisée pour le tirage
    """
    n: int
    k: int
    edges: Tuple[Edge, ...]
    Z: Mapping[Edge, int]
    seed: Optional[int] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        edges = tuple(sorted((min(i, j), max(i, j)) for i, j in self.edges))
        if set(edges) != set(self.Z.keys()):
            raise ValueError("Z must be defined exactly on the edge set")
        for edge, z in self.Z.items():
            if not 0 <= z <= self.k:
                raise ValueError(f"Win count {z} for pair {edge} outside [0, {self.k}]")
        object.__setattr__(self, 'edges', edges)
        object.__setattr__(self, 'Z', dict(self.Z))

    def p_hat(self, i: int, j: int) -> float:
        """
        Probabilité empirique que j batte i.

        Raises:
            KeyError: Si la paire n'est pas observée
        """
        if i < j:
            return self.Z[(i, j)] / self.k
        return 1.0 - self.Z[(j, i)] / self.k

    def win_matrix(self) -> np.ndarray:
        """Matrice dense des p̂_ij sur les arêtes (0 ailleurs)."""
        P = np.zeros((self.n, self.n))
        for (i, j), z in self.Z.items():
            P[i, j] = z / self.k
            P[j, i] = 1.0 - P[i, j]
        return P

    # ==================== Sérialisation ====================

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'k': self.k,
            'seed': self.seed,
            'comparisons': [[i, j, int(self.Z[(i, j)])] for i, j in self.edges],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ComparisonDataset':
        try:
            triples = [(int(i), int(j), int(z)) for i, j, z in data['comparisons']]
            return cls(
                n=int(data['n']),
                k=int(data['k']),
                edges=tuple((min(i, j), max(i, j)) for i, j, _ in triples),
                Z={(i, j) if i < j else (j, i): (z if i < j else int(data['k']) - z)
                   for i, j, z in triples},
                seed=data.get('seed'),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Malformed comparison dataset: {e}") from e

    def save(self, path: Path) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, path: Path) -> 'ComparisonDataset':
        with open(path, 'r', encoding='utf-8') as f:
            return cls.from_dict(json.load(f))


# ==================== Construction du modèle ====================

def new_btl_model(alpha: Sequence[float]) -> BtlModel:
    """
    Construit un modèle BTL à partir de scores positifs.

    Args:
        alpha: Scores (au moins deux, tous > 0 et finis)

    Returns:
        BtlModel avec pi et h calculés

    Raises:
        TooFewItems: Si moins de deux scores
        NonPositiveScore: Si un score est <= 0 ou non fini
    """
    values = np.asarray(alpha, dtype=float).ravel()
    if values.shape[0] < 2:
        raise TooFewItems(f"A BTL model needs at least 2 items, got {values.shape[0]}")
    bad = np.flatnonzero(~np.isfinite(values) | (values <= 0))
    if bad.size:
        raise NonPositiveScore(
            f"Scores must be strictly positive and finite; alpha[{bad[0]}] = {values[bad[0]]}"
        )
    return BtlModel(values)


def generate_scores(n: int, h: float, seed: int) -> BtlModel:
    """
    Générateur 'uniform_log': log(alpha_i) uniforme sur [0, log h].

    Args:
        n: Nombre d'objets
        h: Plage dynamique visée (>= 1)
        seed: Graine du flux 'model'
    """
    if h < 1:
        raise ValueError(f"Dynamic range h must be >= 1, got {h}")
    log_scores = stream_generator(seed, 'model').uniform(0.0, np.log(h), size=n)
    return new_btl_model(np.exp(log_scores))


def load_model(document: Mapping[str, Any], seed: Optional[int] = None) -> BtlModel:
    """
    Lit une spécification de modèle JSON.

    Formats acceptés:
        {"alpha": [...]}
        {"n": N, "alpha_gen": {"kind": "uniform_log", "h": H, "seed": S}}

    Args:
        document: Document déjà décodé
        seed: Graine à utiliser si alpha_gen n'en fournit pas

    Raises:
        ConfigError: Si le document est mal formé
    """
    if 'alpha' in document:
        return new_btl_model(document['alpha'])

    generator = document.get('alpha_gen')
    if not isinstance(generator, Mapping) or 'n' not in document:
        raise ConfigError("Model spec needs 'alpha' or both 'n' and 'alpha_gen'")
    if generator.get('kind') != 'uniform_log':
        raise ConfigError(f"Unknown score generator kind: {generator.get('kind')!r}")

    gen_seed = generator.get('seed', seed)
    if gen_seed is None:
        raise ConfigError("'alpha_gen' needs a 'seed' when no seed is supplied")
    return generate_scores(int(document['n']), float(generator.get('h', config.DEFAULT_SCORE_RANGE)),
                           int(gen_seed))


def load_model_file(path: Union[str, Path]) -> BtlModel:
    """Lit une spécification de modèle depuis un fichier JSON."""
    with open(path, 'r', encoding='utf-8') as f:
        return load_model(json.load(f))


# ==================== Probabilités et tirages ====================

def pref_prob(model: BtlModel, i: int, j: int) -> float:
    """
    Probabilité que j batte i: alpha_j / (alpha_i + alpha_j).

    Pour i > j la valeur est 1 - pref_prob(j, i), ce qui garantit
    p_ij + p_ji = 1 exactement.

    Raises:
        SameItem: Si i == j
    """
    if i == j:
        raise SameItem(f"Preference probability undefined for i == j == {i}")
    if not (0 <= i < model.n and 0 <= j < model.n):
        raise IndexError(f"Items ({i}, {j}) outside [0, {model.n})")
    if i > j:
        return 1.0 - pref_prob(model, j, i)
    a = model.alpha
    return float(a[j] / (a[i] + a[j]))


def _binomial_draw(rng: np.random.Generator, k: int, p: float) -> int:
    if k <= config.BERNOULLI_MAX_K:
        return int(np.count_nonzero(rng.random(k) < p))
    return int(rng.binomial(k, p))


def sample_comparisons(model: BtlModel, graph: ComparisonGraph, k: int, seed: int) -> ComparisonDataset:
    """
    Tire Z_ij ~ Binomiale(k, p_ij) pour chaque arête (i, j), i < j.

    Chaque paire a son propre flux Philox dérivé de (seed, i, j): le
    résultat ne dépend pas de l'ordre de parcours des arêtes.

    Args:
        model: Modèle BTL
        graph: Graphe d'observation (même nombre de sommets)
        k: Comparaisons par paire (>= 1)
        seed: Graine 64 bits

    Returns:
        ComparisonDataset

    Raises:
        SizeMismatch: Si graph.n != model.n
    """
    if graph.n != model.n:
        raise SizeMismatch(f"Graph has {graph.n} nodes but the model has {model.n} items")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    Z: Dict[Edge, int] = {}
    for i, j in graph.edges:
        rng = stream_generator(seed, 'comparisons', i, j)
        Z[(i, j)] = _binomial_draw(rng, k, pref_prob(model, i, j))

    logger.debug(f"Sampled {len(Z)} pairs with k={k} (seed={seed})")
    return ComparisonDataset(n=graph.n, k=k, edges=tuple(graph.edges), Z=Z, seed=seed)


def expected_comparisons(model: BtlModel, graph: ComparisonGraph, k: int) -> ComparisonDataset:
    """
    Jeu de données synthétique Z_ij = round(k * p_ij).

    Exact (p̂ = p) lorsque k * p_ij est entier pour toutes les arêtes.
    """
    if graph.n != model.n:
        raise SizeMismatch(f"Graph has {graph.n} nodes but the model has {model.n} items")
    Z = {(i, j): int(round(k * pref_prob(model, i, j))) for i, j in graph.edges}
    return ComparisonDataset(n=graph.n, k=k, edges=tuple(graph.edges), Z=Z, seed=None)


def empirical_errors(model: BtlModel, dataset: ComparisonDataset) -> List[float]:
    """Écarts |p̂_ij - p_ij| sur toutes les paires observées."""
    return [abs(dataset.p_hat(i, j) - pref_prob(model, i, j)) for i, j in dataset.edges]
