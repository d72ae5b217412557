"""
Méthode spectrale non pondérée (rank centrality)
"""

from typing import Optional

from ..core.chain import build_canonical_markov, build_empirical_markov, rank_centrality
from ..core.graphs import ComparisonGraph
from ..core.interfaces.method_interface import IRankingMethod, MethodOutcome
from ..core.model import BtlModel, ComparisonDataset
from ..core.spectra import fiedler_value, markov_spectral_gap


class UnweightedSpectralMethod(IRankingMethod):
    """Distribution stationnaire de la matrice empirique sur le graphe observé."""

    @property
    def id(self) -> str:
        return 'unweighted'

    def estimate(self, graph: ComparisonGraph, dataset: ComparisonDataset,
                 model: Optional[BtlModel] = None) -> MethodOutcome:
        pi_hat, ranking = rank_centrality(graph, dataset)
        if model is not None:
            markov_gap = markov_spectral_gap(build_canonical_markov(graph, model), model)
        else:
            markov_gap = markov_spectral_gap(build_empirical_markov(graph, dataset))
        return MethodOutcome(
            pi_hat=pi_hat,
            ranking=ranking,
            markov_gap=markov_gap,
            fiedler=fiedler_value(graph),
        )
