"""
Expériences - Balayages Monte Carlo reproductibles

Pour chaque (n, essai):
    seed   = trial_seed(base_seed, n, essai)
    graphe = gen_semi_random(plan(n), seed)
    modèle = scores du model_spec (flux 'model' de seed)
    Z      = comparaisons (flux 'comparisons' de seed)
puis chaque méthode estime pi. Les essais dont le graphe n'est pas connexe
sont écartés; les agrégats sont des médianes sur les essais retenus.
"""

import dataclasses
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from .. import __version__
from ..config import (
    CSV_DIGITS,
    DEFAULT_BASE_SEED,
    DEFAULT_K,
    DEFAULT_SCORE_RANGE,
    DEFAULT_TRIALS,
    MMWU_ITERATIONS,
    MMWU_STEP_SCALE,
)
from ..core.errors import BlockSizeError, BtlSpectralError, ConfigError, InvalidPlan, NotConnected
from ..core.graphs import SamplingPlan, SbmSpec, gen_semi_random, is_connected
from ..core.linting import check_config, experiment_linter
from ..core.model import BtlModel, expected_comparisons, generate_scores, new_btl_model, sample_comparisons
from ..core.register import Register, default_register
from .metrics import fit_loglog_slope, kendall_tau, rel_l2_error, rel_linf_error, theoretical_rate

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    'experiment', 'n', 'method', 'median_rel_linf', 'median_rel_l2',
    'median_markov_gap', 'median_fiedler', 'trials_used', 'trials_discarded',
)
METRICS = ('rel_linf', 'rel_l2', 'markov_gap', 'fiedler')


def _fmt(value: float) -> str:
    return f"{value:.{CSV_DIGITS}g}"


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


# ==================== Configuration ====================

def resolve_probability(value: Any, n: int) -> float:
    """Un nombre, ou {"log_factor": c} pour c log(n) / n (borné à 1)."""
    if isinstance(value, Mapping):
        return min(1.0, float(value['log_factor']) * math.log(n) / n)
    return float(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Configuration d'un balayage, miroir champ pour champ du document JSON.

    Attributs:
        name: Nom de l'expérience (préfixe des fichiers de sortie)
        graph_spec: {"kind": "er" | "sbm" | "generalized_sbm" | "plan", ...}
        model_spec: {"alpha": [...]} ou {"alpha_gen": {"kind": "uniform_log", "h": H}}
        n_grid: Tailles de graphe
        k: Comparaisons par paire observée
        trials: Essais par taille
        methods: Identifiants des méthodes (voir Register)
        base_seed: Graine de base
        reweight: Réglages de la méthode pondérée
        dataset_mode: 'sampled' (binomial) ou 'expected' (Z = round(k p))
    """
    name: str
    graph_spec: Dict[str, Any]
    n_grid: Tuple[int, ...]
    model_spec: Dict[str, Any] = field(
        default_factory=lambda: {'alpha_gen': {'kind': 'uniform_log', 'h': DEFAULT_SCORE_RANGE}})
    k: int = DEFAULT_K
    trials: int = DEFAULT_TRIALS
    methods: Tuple[str, ...] = ('unweighted', 'weighted')
    base_seed: int = DEFAULT_BASE_SEED
    reweight: Dict[str, Any] = field(default_factory=dict)
    dataset_mode: str = 'sampled'
    lint_warnings: Tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def from_dict(cls, document: Mapping[str, Any], method_ids: Optional[Sequence[str]] = None) -> 'ExperimentConfig':
        """
        Valide puis construit une configuration (clés inconnues interdites).

        Raises:
            ConfigError: Si le document contient une erreur
        """
        warnings = check_config(document, experiment_linter(method_ids or ('unweighted', 'weighted')))
        values = dict(document)
        values['n_grid'] = tuple(values['n_grid'])
        if 'methods' in values:
            values['methods'] = tuple(values['methods'])
        config = cls(lint_warnings=tuple(str(w) for w in warnings), **values)
        config.validate_plans()
        return config

    @classmethod
    def load(cls, path: Union[str, Path], method_ids: Optional[Sequence[str]] = None) -> 'ExperimentConfig':
        try:
            with open(path, 'r', encoding='utf-8') as f:
                document = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        return cls.from_dict(document, method_ids)

    def to_dict(self) -> Dict[str, Any]:
        document = dataclasses.asdict(self)
        document.pop('lint_warnings')
        document['n_grid'] = list(self.n_grid)
        document['methods'] = list(self.methods)
        return document

    def replace(self, **changes) -> 'ExperimentConfig':
        return dataclasses.replace(self, **changes)

    def validate_plans(self) -> None:
        """Construit le plan de chaque n; traduit les erreurs en ConfigError."""
        if self.trials < 1 or not self.n_grid:
            raise ConfigError("trials must be >= 1 and n_grid nonempty")
        for n in self.n_grid:
            try:
                build_plan(self.graph_spec, n)
            except (InvalidPlan, BlockSizeError, KeyError, TypeError) as e:
                raise ConfigError(f"graph_spec is invalid for n={n}: {e}") from e


def build_plan(graph_spec: Mapping[str, Any], n: int) -> SamplingPlan:
    """
    Plan d'échantillonnage d'un graph_spec pour n sommets.

    Raises:
        ConfigError: Si une clé manque ou si le type est inconnu
    """
    try:
        return _build_plan(graph_spec, n)
    except (KeyError, TypeError) as e:
        raise ConfigError(f"Malformed graph_spec {dict(graph_spec)!r}: {e}") from e


def _build_plan(graph_spec: Mapping[str, Any], n: int) -> SamplingPlan:
    kind = graph_spec['kind']
    if kind == 'er':
        return SamplingPlan.uniform(n, resolve_probability(graph_spec['p'], n))
    if kind == 'sbm':
        q = [resolve_probability(x, n) for x in graph_spec['q']]
        return SbmSpec.assortative(n, graph_spec['m'], resolve_probability(graph_spec['p'], n), q).to_plan()
    if kind == 'generalized_sbm':
        P = np.array([[resolve_probability(x, n) for x in row] for row in graph_spec['P']])
        return SbmSpec.generalized(n, P).to_plan()
    if kind == 'plan':
        return SamplingPlan.from_matrix(np.array(graph_spec['q'], dtype=float), graph_spec.get('base_p'))
    raise ConfigError(f"Unknown graph kind {kind!r}")


def build_model(model_spec: Mapping[str, Any], n: int, seed: int) -> BtlModel:
    """Modèle BTL d'un model_spec (scores générés depuis le flux 'model' de seed; alpha_gen.seed est ignoré)."""
    if 'alpha' in model_spec:
        return new_btl_model(model_spec['alpha'])
    generator = model_spec['alpha_gen']
    return generate_scores(n, float(generator.get('h', DEFAULT_SCORE_RANGE)), seed)


def trial_seed(base_seed: int, n: int, trial: int) -> int:
    """Graine d'un essai: 8 premiers octets de blake2b("base_seed:n:trial"), petit-boutiste."""
    digest = hashlib.blake2b(f"{base_seed}:{n}:{trial}".encode('ascii')).digest()
    return int.from_bytes(digest[:8], 'little')


# ==================== Essais ====================

@dataclass(frozen=True)
class MethodMetrics:
    rel_linf: float
    rel_l2: float
    markov_gap: float
    fiedler: float
    kendall_tau: float

    def value(self, metric: str) -> float:
        return getattr(self, metric)


@dataclass(frozen=True)
class TrialRecord:
    """
    Résultat d'un essai.

    Attributs:
        n: Taille du graphe
        trial_index: Numéro de l'essai
        seed: Graine de l'essai
        connected: Graphe connexe (sinon essai écarté)
        results: Métriques par méthode (vide si écarté)
        wall_time: Durée en secondes (hors CSV)
        error: Message d'une erreur fatale, None sinon
    """
    n: int
    trial_index: int
    seed: int
    connected: bool
    results: Dict[str, MethodMetrics] = field(default_factory=dict)
    wall_time: float = 0.0
    error: Optional[str] = None

    @property
    def discarded(self) -> bool:
        return not self.connected


def run_trial(config: ExperimentConfig, register: Register, n: int, trial: int) -> TrialRecord:
    """
    Exécute un essai; ne lève jamais d'exception.

    NotConnected marque l'essai comme écarté; toute autre erreur (de la
    bibliothèque ou non) est consignée dans TrialRecord.error.
    """
    seed = trial_seed(config.base_seed, n, trial)
    start = time.perf_counter()
    try:
        graph = gen_semi_random(build_plan(config.graph_spec, n), seed)
        if not is_connected(graph):
            logger.warning(f"Discarding trial {trial} at n={n}: graph is disconnected")
            return TrialRecord(n, trial, seed, connected=False, wall_time=time.perf_counter() - start)

        model = build_model(config.model_spec, n, seed)
        if config.dataset_mode == 'expected':
            dataset = expected_comparisons(model, graph, config.k)
        else:
            dataset = sample_comparisons(model, graph, config.k, seed)

        results: Dict[str, MethodMetrics] = {}
        for method_id in config.methods:
            outcome = register.get_method(method_id).estimate(graph, dataset, model)
            results[method_id] = MethodMetrics(
                rel_linf=rel_linf_error(outcome.pi_hat, model.pi),
                rel_l2=rel_l2_error(outcome.pi_hat, model.pi),
                markov_gap=outcome.markov_gap,
                fiedler=outcome.fiedler,
                kendall_tau=kendall_tau(outcome.pi_hat, model.pi),
            )
    except NotConnected as e:
        logger.warning(f"Discarding trial {trial} at n={n}: {e}")
        return TrialRecord(n, trial, seed, connected=False, wall_time=time.perf_counter() - start)
    except BtlSpectralError as e:
        logger.error(f"Trial {trial} at n={n} failed: {e}")
        return TrialRecord(n, trial, seed, connected=True, wall_time=time.perf_counter() - start,
                           error=f"{type(e).__name__}: {e}")
    except Exception as e:
        # Erreur hors bibliothèque (numpy, scipy...): consignée, le balayage continue
        logger.exception(f"Trial {trial} at n={n} raised an unexpected error")
        return TrialRecord(n, trial, seed, connected=True, wall_time=time.perf_counter() - start,
                           error=f"{type(e).__name__}: {e}")

    elapsed = time.perf_counter() - start
    logger.info(f"Trial {trial} at n={n} done in {elapsed:.2f}s")
    return TrialRecord(n, trial, seed, connected=True, results=results, wall_time=elapsed)


# ==================== Agrégation ====================

@dataclass(frozen=True)
class SummaryRow:
    experiment: str
    n: int
    method: str
    median_rel_linf: float
    median_rel_l2: float
    median_markov_gap: float
    median_fiedler: float
    trials_used: int
    trials_discarded: int

    def as_tuple(self) -> Tuple[Any, ...]:
        return tuple(getattr(self, column) for column in CSV_COLUMNS)


def _values(records: Sequence[TrialRecord], method: str, metric: str) -> np.ndarray:
    return np.array([r.results[method].value(metric) for r in records if method in r.results])


def _median(values: np.ndarray) -> float:
    return float(np.median(values)) if values.size else math.nan


@dataclass
class ExperimentResult:
    """
    Résultat d'un balayage: essais (triés par (n, essai)), médianes et métadonnées.
    """
    name: str
    config: ExperimentConfig
    records: List[TrialRecord]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def _cells(self):
        for n in self.config.n_grid:
            cell = [r for r in self.records if r.n == n]
            for method in self.config.methods:
                yield n, method, cell

    @property
    def rows(self) -> List[SummaryRow]:
        rows = []
        for n, method, cell in self._cells():
            used = [r for r in cell if method in r.results]
            rows.append(SummaryRow(
                experiment=self.name,
                n=n,
                method=method,
                median_rel_linf=_median(_values(used, method, 'rel_linf')),
                median_rel_l2=_median(_values(used, method, 'rel_l2')),
                median_markov_gap=_median(_values(used, method, 'markov_gap')),
                median_fiedler=_median(_values(used, method, 'fiedler')),
                trials_used=len(used),
                trials_discarded=sum(1 for r in cell if r.discarded),
            ))
        return rows

    def median(self, n: int, method: str, metric: str) -> float:
        """Médiane d'une métrique ('rel_linf', 'rel_l2', 'markov_gap', 'fiedler')."""
        return _median(_values([r for r in self.records if r.n == n], method, metric))

    @property
    def fatal_errors(self) -> List[TrialRecord]:
        return [r for r in self.records if r.error is not None]

    def to_csv(self) -> str:
        """Table des médianes (schéma stable)."""
        return _csv(CSV_COLUMNS, [row.as_tuple() for row in self.rows])

    def trials_csv(self) -> str:
        header = ('n', 'trial', 'seed', 'connected', 'method', 'rel_linf', 'rel_l2',
                  'markov_gap', 'fiedler', 'kendall_tau', 'error')
        rows = []
        for r in self.records:
            if not r.results:
                rows.append((r.n, r.trial_index, r.seed, int(r.connected), '', '', '', '', '', '', r.error or ''))
            for method, m in r.results.items():
                rows.append((r.n, r.trial_index, r.seed, int(r.connected), method,
                             m.rel_linf, m.rel_l2, m.markov_gap, m.fiedler, m.kendall_tau, ''))
        return _csv(header, rows)

    def diagnostics_csv(self) -> str:
        """Moyennes et écarts interquartiles (diagnostic uniquement)."""
        header = ['experiment', 'n', 'method']
        for metric in METRICS:
            header += [f'mean_{metric}', f'iqr_{metric}']
        rows = []
        for n, method, cell in self._cells():
            row: List[Any] = [self.name, n, method]
            for metric in METRICS:
                values = _values(cell, method, metric)
                if values.size:
                    q1, q3 = np.percentile(values, [25, 75])
                    row += [float(values.mean()), float(q3 - q1)]
                else:
                    row += [math.nan, math.nan]
            rows.append(row)
        return _csv(header, rows)


def _decisions(config: ExperimentConfig, register: Register) -> Dict[str, Any]:
    iterations = config.reweight.get('iterations', MMWU_ITERATIONS)
    return {
        'k': config.k,
        'score_generator': config.model_spec.get('alpha_gen', 'explicit alpha'),
        'aggregation': 'median over connected trials',
        'mmwu_iterations': iterations,
        'mmwu_step_size': config.reweight.get('step_size', MMWU_STEP_SCALE / math.sqrt(iterations)),
        'methods': {m: register.get_method(m).describe() for m in config.methods},
        'trial_seed': 'blake2b(base_seed:n:trial), first 8 bytes little-endian',
    }


def run_experiment(config: ExperimentConfig, register: Optional[Register] = None,
                   threads: int = 1, progress: bool = False) -> ExperimentResult:
    """
    Exécute un balayage complet.

    Déterministe pour une configuration donnée: les essais sont indépendants
    et rangés par (n, essai) avant agrégation, quel que soit l'ordre
    d'achèvement.

    Args:
        config: Configuration validée
        register: Méthodes disponibles (default_register() si None)
        threads: Nombre de threads d'exécution des essais
        progress: Afficher une barre de progression

    Raises:
        ConfigError: Si une méthode demandée n'est pas enregistrée
    """
    register = register or default_register()
    for method_id in config.methods:
        method = register.get_method(method_id)
        if method is None:
            raise ConfigError(f"Method {method_id!r} is not registered ({register.get_registered_ids()})")
        if method_id == 'weighted':
            method.configure(config.reweight)

    tasks = [(n, trial) for n in config.n_grid for trial in range(config.trials)]
    seeds = [trial_seed(config.base_seed, n, trial) for n, trial in tasks]
    if len(set(seeds)) != len(seeds):
        raise ConfigError(f"Trial seed collision for base_seed={config.base_seed}; choose another base seed")

    logger.info(f"Running {config.name}: {len(tasks)} trials on {threads} threads")
    records: Dict[Tuple[int, int], TrialRecord] = {}
    with tqdm(total=len(tasks), desc=config.name, disable=not progress) as bar:
        if threads <= 1:
            for n, trial in tasks:
                records[(n, trial)] = run_trial(config, register, n, trial)
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                futures = {executor.submit(run_trial, config, register, n, trial): (n, trial) for n, trial in tasks}
                for future in as_completed(futures):
                    records[futures[future]] = future.result()
                    bar.update(1)

    ordered = [records[key] for key in sorted(records)]
    metadata = {
        'name': config.name,
        'config': config.to_dict(),
        'decisions': _decisions(config, register),
        'lint_warnings': list(config.lint_warnings),
        'fatal_errors': [{'n': r.n, 'trial': r.trial_index, 'error': r.error} for r in ordered if r.error],
        'version': __version__,
    }
    return ExperimentResult(name=config.name, config=config, records=ordered, metadata=metadata)


# ==================== Sonde d'échelle en k ====================

@dataclass
class ScalingResult:
    """Médianes de l'erreur l_inf en fonction de k, et pente log-log ajustée."""
    name: str
    k_grid: Tuple[int, ...]
    experiments: List[ExperimentResult]
    slopes: Dict[Tuple[int, str], float]
    rates: Dict[Tuple[int, int], float]

    def median_errors(self, n: int, method: str) -> List[float]:
        return [result.median(n, method, 'rel_linf') for result in self.experiments]

    def to_csv(self) -> str:
        header = ('experiment', 'n', 'method', 'k', 'median_rel_linf', 'theoretical_rate', 'trials_used')
        rows = []
        for k, result in zip(self.k_grid, self.experiments):
            for row in result.rows:
                rows.append((self.name, row.n, row.method, k, row.median_rel_linf,
                             self.rates.get((row.n, k), math.nan), row.trials_used))
        return _csv(header, rows)

    def slopes_csv(self) -> str:
        rows = [(self.name, n, method, slope) for (n, method), slope in sorted(self.slopes.items())]
        return _csv(('experiment', 'n', 'method', 'loglog_slope'), rows)


def scaling_probe(config: ExperimentConfig, k_grid: Sequence[int], register: Optional[Register] = None,
                  threads: int = 1, progress: bool = False) -> ScalingResult:
    """
    Relance l'expérience pour chaque k et ajuste la pente log-log de l'erreur.

    Les graphes et modèles sont identiques d'un k à l'autre (même base_seed).

    Raises:
        ConfigError: Si k_grid a moins de deux valeurs ou n'est pas croissante
    """
    k_grid = tuple(int(k) for k in k_grid)
    if len(k_grid) < 2:
        raise ConfigError(f"k_grid needs at least two values, got {list(k_grid)}")
    if any(b <= a for a, b in zip(k_grid, k_grid[1:])):
        raise ConfigError(f"k_grid must be strictly ascending, got {list(k_grid)}")

    register = register or default_register()
    experiments = [
        run_experiment(config.replace(k=k, name=f"{config.name}_k{k}"), register, threads, progress)
        for k in k_grid
    ]

    slopes: Dict[Tuple[int, str], float] = {}
    for n in config.n_grid:
        for method in config.methods:
            medians = [result.median(n, method, 'rel_linf') for result in experiments]
            if all(np.isfinite(medians)) and all(m > 0 for m in medians):
                slopes[(n, method)] = fit_loglog_slope(k_grid, medians)
            else:
                logger.warning(f"No slope for n={n}, {method}: some medians are missing or zero")

    rates: Dict[Tuple[int, int], float] = {}
    if config.graph_spec.get('kind') == 'er':
        for n in config.n_grid:
            p = resolve_probability(config.graph_spec['p'], n)
            for k in k_grid:
                rates[(n, k)] = theoretical_rate(n, p, k)

    return ScalingResult(name=config.name, k_grid=k_grid, experiments=experiments, slopes=slopes, rates=rates)
