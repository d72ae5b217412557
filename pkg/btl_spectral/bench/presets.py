"""
Presets - Expériences de référence

- experiment1: SBM généralisé à 3 blocs (blocs denses + blocs à 2 log(n)/n)
- experiment2: Erdős-Rényi avec p = 2 log(n)/n
- scaling:     Erdős-Rényi n=100, p=0.2, pour la sonde en k
"""

from typing import Callable, Dict, Tuple

from ..config import DEFAULT_BASE_SEED, DEFAULT_K, DEFAULT_TRIALS, EXPERIMENT_N_GRID
from ..core.errors import ConfigError
from .experiment import ExperimentConfig

SCALING_K_GRID: Tuple[int, ...] = (16, 64, 256)

_LOG2 = {'log_factor': 2.0}


def experiment1(**overrides) -> ExperimentConfig:
    """SBM de matrice [[1, 1, 0], [1, r, r], [0, r, r]] avec r = 2 log(n)/n."""
    settings = dict(
        name='experiment1',
        graph_spec={'kind': 'generalized_sbm', 'P': [[1.0, 1.0, 0.0], [1.0, _LOG2, _LOG2], [0.0, _LOG2, _LOG2]]},
        n_grid=tuple(EXPERIMENT_N_GRID),
        k=DEFAULT_K,
        trials=DEFAULT_TRIALS,
        methods=('unweighted', 'weighted'),
        base_seed=DEFAULT_BASE_SEED,
        # Le degré moyen est tiré vers le haut par les blocs denses
        reweight={'cap_estimator': 'lower_quartile_degree'},
    )
    settings.update(overrides)
    return ExperimentConfig(**settings)


def experiment2(**overrides) -> ExperimentConfig:
    """Erdős-Rényi G(n, 2 log(n)/n)."""
    settings = dict(
        name='experiment2',
        graph_spec={'kind': 'er', 'p': _LOG2},
        n_grid=tuple(EXPERIMENT_N_GRID),
        k=DEFAULT_K,
        trials=DEFAULT_TRIALS,
        methods=('unweighted', 'weighted'),
        base_seed=DEFAULT_BASE_SEED,
        reweight={'cap_estimator': 'mean_degree'},
    )
    settings.update(overrides)
    return ExperimentConfig(**settings)


def scaling(**overrides) -> ExperimentConfig:
    """Erdős-Rényi n=100, p=0.2, 50 essais (k fixé par la sonde)."""
    settings = dict(
        name='scaling',
        graph_spec={'kind': 'er', 'p': 0.2},
        n_grid=(100,),
        k=SCALING_K_GRID[0],
        trials=50,
        methods=('unweighted',),
        base_seed=DEFAULT_BASE_SEED,
    )
    settings.update(overrides)
    return ExperimentConfig(**settings)


PRESETS: Dict[str, Callable[..., ExperimentConfig]] = {
    'experiment1': experiment1,
    'experiment2': experiment2,
    'scaling': scaling,
}


def get_preset(name: str, **overrides) -> ExperimentConfig:
    """
    Configuration d'un preset, avec surcharges éventuelles (k, trials, n_grid...).

    Raises:
        ConfigError: Si le preset est inconnu
    """
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    config = PRESETS[name](**overrides)
    config.validate_plans()
    return config
