"""
Interfaces du noyau
"""

from .method_interface import IRankingMethod, MethodOutcome

__all__ = [
    'IRankingMethod',
    'MethodOutcome',
]
