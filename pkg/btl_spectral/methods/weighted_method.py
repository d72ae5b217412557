"""
Méthode spectrale pondérée (poids MMWU)

Réglages acceptés (section 'reweight' de la configuration):
    cap_estimator, degree_cap, degree_floor, iterations, step_size, min_weight
"""

import logging
from typing import Any, Dict, Optional

from ..config import CAP_ESTIMATOR
from ..core.errors import ConfigError
from ..core.graphs import ComparisonGraph
from ..core.interfaces.method_interface import IRankingMethod, MethodOutcome
from ..core.model import BtlModel, ComparisonDataset
from ..core.reweight import ReweightConfig, mmwu_reweight, weighted_rank_centrality

logger = logging.getLogger(__name__)

SETTINGS_KEYS = ('cap_estimator', 'degree_cap', 'degree_floor', 'iterations', 'step_size', 'min_weight')


class WeightedSpectralMethod(IRankingMethod):
    """Rank centrality sur le graphe repondéré pour maximiser sa valeur de Fiedler."""

    def __init__(self):
        self.cap_estimator = CAP_ESTIMATOR
        self.overrides: Dict[str, Any] = {}

    @property
    def id(self) -> str:
        return 'weighted'

    def configure(self, settings: Dict[str, Any]) -> None:
        unknown = sorted(set(settings) - set(SETTINGS_KEYS))
        if unknown:
            raise ConfigError(f"Unknown reweight settings: {unknown}")
        settings = dict(settings)
        self.cap_estimator = settings.pop('cap_estimator', CAP_ESTIMATOR)
        self.overrides = settings

    def describe(self) -> Dict[str, Any]:
        return {'cap_estimator': self.cap_estimator, **self.overrides}

    def reweight_config(self, graph: ComparisonGraph) -> ReweightConfig:
        """Configuration de l'optimiseur pour ce graphe (plafond fixe ou estimé)."""
        if 'degree_cap' in self.overrides:
            return ReweightConfig(**self.overrides)
        return ReweightConfig.for_graph(graph, cap_estimator=self.cap_estimator, **self.overrides)

    def estimate(self, graph: ComparisonGraph, dataset: ComparisonDataset,
                 model: Optional[BtlModel] = None) -> MethodOutcome:
        config = self.reweight_config(graph)
        result = mmwu_reweight(graph, config)
        logger.debug(f"Weighted method: cap={config.degree_cap:.4g}, "
                     f"Fiedler {result.achieved_fiedler:.6g} ({result.candidate})")

        pi_hat, ranking, report = weighted_rank_centrality(graph, dataset, config, model=model, result=result)
        return MethodOutcome(
            pi_hat=pi_hat,
            ranking=ranking,
            markov_gap=report.markov_gap,
            fiedler=report.fiedler,
            weights=result.weights,
        )
