"""
Métriques - Erreurs relatives, condition de variation et lois d'échelle
"""

from typing import Sequence, Tuple

import numpy as np
from scipy import stats

from ..core.errors import LengthMismatch
from ..core.graphs import SamplingPlan


def _pair(pi_hat: Sequence[float], pi: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    pi_hat = np.asarray(pi_hat, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if pi_hat.shape != pi.shape:
        raise LengthMismatch(f"Score vectors have lengths {pi_hat.shape[0]} and {pi.shape[0]}")
    if not np.any(pi):
        raise ValueError("The reference vector pi must be nonzero")
    return pi_hat, pi


def rel_linf_error(pi_hat: Sequence[float], pi: Sequence[float]) -> float:
    """||pi_hat - pi||_inf / ||pi||_inf."""
    pi_hat, pi = _pair(pi_hat, pi)
    return float(np.max(np.abs(pi_hat - pi)) / np.max(np.abs(pi)))


def rel_l2_error(pi_hat: Sequence[float], pi: Sequence[float]) -> float:
    """||pi_hat - pi||_2 / ||pi||_2."""
    pi_hat, pi = _pair(pi_hat, pi)
    return float(np.linalg.norm(pi_hat - pi) / np.linalg.norm(pi))


def kendall_tau(pi_hat: Sequence[float], pi: Sequence[float]) -> float:
    """Accord des classements induits (tau de Kendall)."""
    pi_hat, pi = _pair(pi_hat, pi)
    return float(stats.kendalltau(pi_hat, pi)[0])


# ==================== Condition de variation ====================

def _row_ratios(plan: SamplingPlan) -> np.ndarray:
    q = plan.q
    sums = q.sum(axis=1)
    squares = (q ** 2).sum(axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        ratios = plan.n * squares / sums ** 2
    return np.where(sums > 0, ratios, np.inf)


def check_variation_condition(plan: SamplingPlan, s: float) -> Tuple[bool, float]:
    """
    Vérifie n * sum_j q_ij^2 <= s * (sum_j q_ij)^2 pour chaque ligne i.

    Args:
        plan: Plan d'échantillonnage
        s: Constante (> 1)

    Returns:
        (holds, worst_ratio) avec worst_ratio = max_i n sum q^2 / (sum q)^2
    """
    if s <= 1:
        raise ValueError(f"s must be > 1, got {s}")
    worst = float(_row_ratios(plan).max())
    return worst <= s, worst


def variation_angle(plan: SamplingPlan) -> np.ndarray:
    """Angle (radians) entre chaque ligne q_i et le vecteur 1_n."""
    ratios = _row_ratios(plan)
    cosines = np.where(np.isfinite(ratios), 1.0 / np.sqrt(ratios), 0.0)
    return np.arccos(np.clip(cosines, -1.0, 1.0))


# ==================== Lois d'échelle ====================

def theoretical_rate(n: int, p: float, k: int) -> float:
    """sqrt(log(n) / (n p k)), à constante près."""
    return float(np.sqrt(np.log(n) / (n * p * k)))


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """
    Pente de la droite des moindres carrés de log(y) en fonction de log(x).

    Raises:
        LengthMismatch: Si xs et ys n'ont pas la même longueur
        ValueError: Moins de deux points, ou valeurs non positives
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise LengthMismatch(f"Got {xs.shape[0]} abscissas and {ys.shape[0]} ordinates")
    if xs.shape[0] < 2:
        raise ValueError("A slope needs at least two points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("Log-log fit needs positive values")
    return float(stats.linregress(np.log(xs), np.log(ys)).slope)
