"""
Méthodes d'estimation - Implémentations de IRankingMethod

Chaque méthode est découverte par le MethodLoader et enregistrée sous son id.
"""

from .unweighted_method import UnweightedSpectralMethod
from .weighted_method import WeightedSpectralMethod

__all__ = [
    'UnweightedSpectralMethod',
    'WeightedSpectralMethod',
]
