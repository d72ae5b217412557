"""
btl_spectral - Estimation spectrale de scores BTL sur graphes semi-aléatoires

Méthode spectrale (rank centrality), méthode pondérée par MMWU,
diagnostics spectraux et expériences Monte Carlo reproductibles.
"""

__version__ = '1.0.0'
