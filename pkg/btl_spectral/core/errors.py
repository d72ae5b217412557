"""
Erreurs - Hiérarchie des exceptions de btl_spectral

Toutes les erreurs levées par la bibliothèque dérivent de BtlSpectralError.
Les erreurs de paramètres dérivent aussi de ValueError.
"""

from typing import List, Optional


class BtlSpectralError(Exception):
    """Erreur de base de la bibliothèque."""
    pass


# ==================== Modèle ====================

class NonPositiveScore(BtlSpectralError, ValueError):
    """Un score alpha_i est nul, négatif ou non fini."""
    pass


class TooFewItems(BtlSpectralError, ValueError):
    """Moins de deux objets."""
    pass


class SameItem(BtlSpectralError, ValueError):
    """Probabilité de préférence demandée pour i == j."""
    pass


class SizeMismatch(BtlSpectralError, ValueError):
    """Le graphe et le modèle n'ont pas le même nombre d'objets."""
    pass


# ==================== Graphes ====================

class InvalidPlan(BtlSpectralError, ValueError):
    """Une probabilité q_ij sort de [base_p, 1]."""
    pass


class BlockSizeError(BtlSpectralError, ValueError):
    """m ne divise pas n, ou n/m < 2."""
    pass


class EmptyGraph(BtlSpectralError, ValueError):
    """Le graphe n'a aucune arête de poids positif."""
    pass


class NotConnected(BtlSpectralError):
    """Le graphe pondéré (arêtes de poids > 0) n'est pas connexe."""
    pass


class IsolatedVertex(BtlSpectralError, ValueError):
    """Un sommet a un degré pondéré nul."""
    pass


class WeightOutOfRange(BtlSpectralError, ValueError):
    """Un poids sort de [0, 1]."""
    pass


class UnknownEdge(BtlSpectralError, ValueError):
    """Un poids est donné pour une paire absente du graphe."""
    pass


# ==================== Chaînes et spectres ====================

class EdgeSetMismatch(BtlSpectralError, ValueError):
    """Les arêtes du jeu de données diffèrent de celles du graphe."""
    pass


class NoConvergence(BtlSpectralError):
    """La méthode de la puissance n'a pas atteint la tolérance."""

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"Power iteration did not converge after {iterations} iterations "
            f"(l1 residual {residual:.3e}). Increase max_iters or use stationary_exact()."
        )


class SingularSystem(BtlSpectralError):
    """Le système linéaire du vecteur stationnaire est singulier (chaîne réductible)."""
    pass


class EigensolveFailure(BtlSpectralError):
    """Le solveur de valeurs propres a échoué."""
    pass


# ==================== Repondération ====================

class Infeasible(BtlSpectralError):
    """Aucune pondération ne peut respecter le degré plancher."""
    pass


# ==================== Harnais ====================

class LengthMismatch(BtlSpectralError, ValueError):
    """Deux vecteurs de scores n'ont pas la même longueur."""
    pass


class ConfigError(BtlSpectralError, ValueError):
    """Configuration invalide (porte la liste des problèmes détectés)."""

    def __init__(self, message: str, issues: Optional[List['LintIssue']] = None):
        self.issues = list(issues or [])
        if self.issues:
            details = "; ".join(str(issue) for issue in self.issues)
            message = f"{message}: {details}"
        super().__init__(message)
