"""
Core - Modèle, graphes, chaînes de Markov, spectres et repondération
"""
