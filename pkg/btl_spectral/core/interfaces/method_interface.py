"""
Interface pour les méthodes d'estimation

Une méthode reçoit un graphe d'observation et les comparaisons observées,
et retourne une estimation de pi. Le harnais d'expériences retrouve les
méthodes par leur id dans le Register.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..graphs import ComparisonGraph
from ..model import BtlModel, ComparisonDataset


@dataclass(frozen=True, eq=False)
class MethodOutcome:
    """
    Résultat d'une méthode sur un essai.

    Attributs:
        pi_hat: Estimation de pi (vecteur de probabilité)
        ranking: Objets triés par pi_hat décroissant
        markov_gap: Trou spectral de la matrice canonique (vraies probabilités)
                    sur le graphe effectivement utilisé
        fiedler: Valeur de Fiedler de ce graphe
        weights: Poids d'arêtes utilisés (None pour les poids unitaires)
    """
    pi_hat: np.ndarray
    ranking: np.ndarray
    markov_gap: float
    fiedler: float
    weights: Optional[Dict[Tuple[int, int], float]] = None


class IRankingMethod(ABC):
    """
    Interface pour les méthodes d'estimation de scores BTL.

    Une méthode:
    - Construit sa matrice de Markov à partir du graphe et des comparaisons
    - Calcule sa distribution stationnaire
    - Rapporte les diagnostics spectraux du graphe utilisé
    """

    @property
    @abstractmethod
    def id(self) -> str:
        """
        Identifiant unique de la méthode.

        Returns:
            str: ID de la méthode (ex: 'unweighted', 'weighted')
        """
        pass

    @abstractmethod
    def estimate(self, graph: ComparisonGraph, dataset: ComparisonDataset,
                 model: Optional[BtlModel] = None) -> MethodOutcome:
        """
        Estime pi sur un essai.

        Args:
            graph: Graphe d'observation connexe
            dataset: Comparaisons observées sur ce graphe
            model: Vrai modèle (diagnostics uniquement, jamais utilisé pour estimer)

        Returns:
            MethodOutcome

        Raises:
            NotConnected: Si le graphe n'est pas connexe
        """
        pass

    def configure(self, settings: Dict[str, Any]) -> None:
        """
        Reçoit les réglages propres à la méthode (optionnel).

        Args:
            settings: Section de la configuration d'expérience
        """
        pass

    def describe(self) -> Dict[str, Any]:
        """Paramètres à consigner dans les métadonnées (optionnel)."""
        return {}
