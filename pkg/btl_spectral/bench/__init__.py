"""
Bench - Métriques, balayages Monte Carlo et presets
"""

from .experiment import ExperimentConfig, ExperimentResult, TrialRecord, run_experiment, scaling_probe, trial_seed
from .metrics import check_variation_condition, rel_l2_error, rel_linf_error
from .presets import get_preset

__all__ = [
    'ExperimentConfig',
    'ExperimentResult',
    'TrialRecord',
    'run_experiment',
    'scaling_probe',
    'trial_seed',
    'check_variation_condition',
    'rel_l2_error',
    'rel_linf_error',
    'get_preset',
]
