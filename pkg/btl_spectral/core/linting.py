"""
Système de linting pour les configurations d'expériences.
Chaque section du document JSON est validée par ses propres règles.
"""

import logging
import numbers
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Protocol, Sequence

from .errors import ConfigError

logger = logging.getLogger(__name__)


class LintSeverity(Enum):
    """Niveau de sévérité d'un problème de linting."""
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


class LintIssue:
    """Représente un problème détecté par le linter."""

    def __init__(
        self,
        location: str,
        severity: LintSeverity,
        message: str,
        details: Optional[str] = None
    ):
        self.location = location
        self.severity = severity
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        return {
            'location': self.location,
            'severity': self.severity.value,
            'message': self.message,
            'details': self.details,
        }

    def __repr__(self) -> str:
        return f"LintIssue({self.severity.value}: {self.message} @ {self.location})"

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


class ILintRule(Protocol):
    """
    Interface pour les règles de validation d'une section.

    Une règle reçoit la valeur de sa section et le contexte du document
    (n_grid, méthodes connues) et retourne les problèmes détectés.
    """

    def validate(self, value: Any, context: Dict[str, Any]) -> List[LintIssue]:
        ...


# ==================== Aides ====================

def _is_int(value: Any) -> bool:
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _error(location: str, message: str, details: Optional[str] = None) -> LintIssue:
    return LintIssue(location, LintSeverity.ERROR, message, details)


def _warning(location: str, message: str, details: Optional[str] = None) -> LintIssue:
    return LintIssue(location, LintSeverity.WARNING, message, details)


def _check_probability(location: str, value: Any) -> List[LintIssue]:
    """Un nombre dans [0, 1] ou {"log_factor": c} avec c >= 0."""
    if _is_number(value):
        if not 0.0 <= value <= 1.0:
            return [_error(location, f"Probability {value} is outside [0, 1]")]
        return []
    if isinstance(value, Mapping) and set(value) == {'log_factor'} and _is_number(value['log_factor']):
        if value['log_factor'] < 0:
            return [_error(location, f"log_factor must be >= 0, got {value['log_factor']}")]
        return []
    return [_error(location, f"Expected a probability or {{\"log_factor\": c}}, got {value!r}")]


def _is_zero(value: Any) -> bool:
    if _is_number(value):
        return value == 0
    return isinstance(value, Mapping) and value.get('log_factor') == 0


def _check_keys(location: str, value: Mapping, allowed: Iterable[str],
                required: Iterable[str] = ()) -> List[LintIssue]:
    issues = []
    for key in sorted(set(value) - set(allowed)):
        issues.append(_error(f"{location}.{key}", f"Unknown key '{key}'",
                             f"Allowed keys: {', '.join(sorted(allowed))}"))
    for key in required:
        if key not in value:
            issues.append(_error(location, f"Missing required key '{key}'"))
    return issues


# ==================== Règles ====================

class GraphSpecRule:
    """Sections graph_spec: er, sbm, generalized_sbm, plan."""

    KINDS = {
        'er': ({'kind', 'p'}, {'p'}),
        'sbm': ({'kind', 'm', 'p', 'q'}, {'m', 'p', 'q'}),
        'generalized_sbm': ({'kind', 'P'}, {'P'}),
        'plan': ({'kind', 'q', 'base_p'}, {'q'}),
    }

    def validate(self, value: Any, context: Dict[str, Any]) -> List[LintIssue]:
        location = 'graph_spec'
        if not isinstance(value, Mapping):
            return [_error(location, "graph_spec must be an object")]
        kind = value.get('kind')
        if kind not in self.KINDS:
            return [_error(f"{location}.kind", f"Unknown graph kind {kind!r}",
                           f"Expected one of {sorted(self.KINDS)}")]

        allowed, required = self.KINDS[kind]
        issues = _check_keys(location, value, allowed, required)
        if issues:
            return issues

        n_grid = context.get('n_grid', [])
        if kind == 'er':
            issues += _check_probability(f"{location}.p", value['p'])
            if _is_zero(value['p']):
                issues.append(_warning(f"{location}.p", "Base probability is 0",
                                       "Every graph will be empty."))

        elif kind == 'sbm':
            m = value['m']
            if not _is_int(m) or m < 2:
                return issues + [_error(f"{location}.m", f"m must be an integer >= 2, got {m!r}")]
            issues += self._check_blocks(location, m, n_grid)
            issues += _check_probability(f"{location}.p", value['p'])
            q = value['q']
            if not isinstance(q, Sequence) or len(q) != m:
                issues.append(_error(f"{location}.q", f"q must list {m} within-block probabilities"))
            else:
                for index, entry in enumerate(q):
                    issues += _check_probability(f"{location}.q[{index}]", entry)
            if _is_zero(value['p']):
                issues.append(_warning(f"{location}.p", "Base probability is 0"))

        elif kind == 'generalized_sbm':
            P = value['P']
            if (not isinstance(P, Sequence) or len(P) < 2
                    or any(not isinstance(row, Sequence) or len(row) != len(P) for row in P)):
                return issues + [_error(f"{location}.P", "P must be a square matrix with at least 2 blocks")]
            for a, row in enumerate(P):
                for b, entry in enumerate(row):
                    issues += _check_probability(f"{location}.P[{a}][{b}]", entry)
                    if entry != P[b][a]:
                        issues.append(_error(f"{location}.P[{a}][{b}]", "P must be symmetric"))
            issues += self._check_blocks(location, len(P), n_grid)
            if any(_is_zero(entry) for row in P for entry in row):
                issues.append(_warning(f"{location}.P", "Base probability is 0",
                                       "The plan is semi-random only in the degenerate sense."))

        else:
            q = value['q']
            if not isinstance(q, Sequence) or any(not isinstance(row, Sequence) or len(row) != len(q) for row in q):
                return issues + [_error(f"{location}.q", "q must be a square matrix")]
            if any(n != len(q) for n in n_grid):
                issues.append(_error(location, f"An explicit plan fixes n={len(q)}; n_grid must only contain {len(q)}"))
            base_p = value.get('base_p', 0.0)
            if _is_number(base_p) and base_p == 0:
                issues.append(_warning(f"{location}.base_p", "Base probability is 0"))

        return issues

    @staticmethod
    def _check_blocks(location: str, m: int, n_grid: Sequence[int]) -> List[LintIssue]:
        issues = []
        for n in n_grid:
            if _is_int(n) and (n % m != 0 or n // m < 2):
                issues.append(_error(location, f"n={n} is not compatible with {m} blocks",
                                     "Every n must be a multiple of m with at least 2 nodes per block."))
        return issues


class ModelSpecRule:
    """Section model_spec: {"alpha": [...]} ou {"alpha_gen": {"kind": "uniform_log", "h": H, "seed": S}}.

    alpha_gen.seed est accepté mais sans effet dans une expérience:
    les scores de chaque essai sont tirés depuis la graine de l'essai.
    """

    def validate(self, value: Any, context: Dict[str, Any]) -> List[LintIssue]:
        location = 'model_spec'
        if not isinstance(value, Mapping):
            return [_error(location, "model_spec must be an object")]
        issues = _check_keys(location, value, {'alpha', 'alpha_gen'})
        if ('alpha' in value) == ('alpha_gen' in value):
            return issues + [_error(location, "Give exactly one of 'alpha' and 'alpha_gen'")]

        if 'alpha' in value:
            alpha = value['alpha']
            if not isinstance(alpha, Sequence) or not all(_is_number(a) and a > 0 for a in alpha):
                return issues + [_error(f"{location}.alpha", "alpha must be a list of positive numbers")]
            for n in context.get('n_grid', []):
                if n != len(alpha):
                    issues.append(_error(f"{location}.alpha", f"alpha has {len(alpha)} scores but n_grid contains {n}"))
            return issues

        generator = value['alpha_gen']
        if not isinstance(generator, Mapping):
            return issues + [_error(f"{location}.alpha_gen", "alpha_gen must be an object")]
        issues += _check_keys(f"{location}.alpha_gen", generator, {'kind', 'h', 'seed'}, {'kind'})
        if generator.get('kind') != 'uniform_log':
            issues.append(_error(f"{location}.alpha_gen.kind", f"Unknown generator {generator.get('kind')!r}"))
        h = generator.get('h', 1.0)
        if not _is_number(h) or h < 1:
            issues.append(_error(f"{location}.alpha_gen.h", f"h must be a number >= 1, got {h!r}"))
        if 'seed' in generator:
            # La graine d'essai prime sur alpha_gen.seed
            if not _is_int(generator['seed']) or generator['seed'] < 0:
                issues.append(_error(f"{location}.alpha_gen.seed", f"seed must be a non-negative integer, got {generator['seed']!r}"))
            else:
                issues.append(_warning(f"{location}.alpha_gen.seed", "Ignored in experiments: scores are drawn from each trial seed"))
        return issues


class ReweightRule:
    """Section reweight: réglages de la méthode pondérée."""

    KEYS = {'cap_estimator', 'degree_cap', 'degree_floor', 'iterations', 'step_size', 'min_weight'}

    def validate(self, value: Any, context: Dict[str, Any]) -> List[LintIssue]:
        location = 'reweight'
        if not isinstance(value, Mapping):
            return [_error(location, "reweight must be an object")]
        issues = _check_keys(location, value, self.KEYS)
        estimator = value.get('cap_estimator', 'mean_degree')
        if estimator not in ('mean_degree', 'lower_quartile_degree'):
            issues.append(_error(f"{location}.cap_estimator", f"Unknown cap estimator {estimator!r}"))
        if 'iterations' in value and (not _is_int(value['iterations']) or value['iterations'] < 1):
            issues.append(_error(f"{location}.iterations", "iterations must be a positive integer"))
        for key in ('degree_cap', 'degree_floor', 'step_size', 'min_weight'):
            if key in value and (not _is_number(value[key]) or value[key] <= 0):
                issues.append(_error(f"{location}.{key}", f"{key} must be a positive number"))
        if _is_number(value.get('degree_floor', 1.0)) and value.get('degree_floor', 1.0) < 1:
            issues.append(_error(f"{location}.degree_floor", "degree_floor must be >= 1"))
        return issues


# ==================== Moteur ====================

class LintEngine:
    """
    Moteur de linting qui parcourt un document de configuration et collecte
    tous les problèmes.
    """

    TOP_LEVEL_KEYS = (
        'name', 'graph_spec', 'model_spec', 'n_grid', 'k', 'trials',
        'methods', 'base_seed', 'reweight', 'dataset_mode',
    )
    DATASET_MODES = ('sampled', 'expected')

    def __init__(self, method_ids: Iterable[str] = ('unweighted', 'weighted')):
        self.method_ids = sorted(method_ids)
        self.rules: Dict[str, ILintRule] = {}

    def register_rule(self, section: str, rule: ILintRule) -> None:
        """Enregistre une règle pour une section du document."""
        self.rules[section] = rule

    def lint_config(self, document: Any) -> List[LintIssue]:
        """
        Analyse un document complet et retourne tous les problèmes détectés.

        Args:
            document: Document JSON décodé

        Returns:
            Liste de tous les LintIssue trouvés
        """
        if not isinstance(document, Mapping):
            return [_error('<root>', "The configuration must be a JSON object")]

        all_issues = _check_keys('<root>', document, self.TOP_LEVEL_KEYS, ('name', 'graph_spec', 'n_grid'))
        all_issues += self._validate_run(document)
        context = self._build_context(document)

        for section, rule in self.rules.items():
            if section not in document:
                continue
            try:
                all_issues.extend(rule.validate(document[section], context))
            except (TypeError, ValueError, KeyError) as e:
                all_issues.append(_error(section, f"Validation failed: {e}", f"Error in {section} validation"))

        return all_issues

    def _validate_run(self, document: Mapping[str, Any]) -> List[LintIssue]:
        issues = []
        if 'name' in document and not isinstance(document['name'], str):
            issues.append(_error('name', "name must be a string"))
        n_grid = document.get('n_grid', [])
        if not isinstance(n_grid, Sequence) or not n_grid:
            issues.append(_error('n_grid', "n_grid must be a nonempty list"))
        elif not all(_is_int(n) and n >= 2 for n in n_grid):
            issues.append(_error('n_grid', "Every n must be an integer >= 2"))
        for key in ('k', 'trials'):
            if key in document and (not _is_int(document[key]) or document[key] < 1):
                issues.append(_error(key, f"{key} must be a positive integer, got {document[key]!r}"))
        if 'base_seed' in document and (not _is_int(document['base_seed']) or document['base_seed'] < 0):
            issues.append(_error('base_seed', "base_seed must be a nonnegative integer"))
        methods = document.get('methods', self.method_ids)
        if not isinstance(methods, Sequence) or isinstance(methods, str) or not methods:
            issues.append(_error('methods', "methods must be a nonempty list"))
        else:
            for method in methods:
                if method not in self.method_ids:
                    issues.append(_error('methods', f"Unknown method {method!r}",
                                         f"Registered methods: {', '.join(self.method_ids)}"))
        mode = document.get('dataset_mode', 'sampled')
        if mode not in self.DATASET_MODES:
            issues.append(_error('dataset_mode', f"Unknown dataset mode {mode!r}"))
        return issues

    @staticmethod
    def _build_context(document: Mapping[str, Any]) -> Dict[str, Any]:
        n_grid = document.get('n_grid', [])
        if not isinstance(n_grid, Sequence):
            n_grid = []
        return {'n_grid': [n for n in n_grid if _is_int(n)]}


def experiment_linter(method_ids: Iterable[str] = ('unweighted', 'weighted')) -> LintEngine:
    """LintEngine avec les règles de toutes les sections."""
    engine = LintEngine(method_ids)
    engine.register_rule('graph_spec', GraphSpecRule())
    engine.register_rule('model_spec', ModelSpecRule())
    engine.register_rule('reweight', ReweightRule())
    return engine


def check_config(document: Any, engine: Optional[LintEngine] = None) -> List[LintIssue]:
    """
    Valide un document et lève ConfigError s'il contient une erreur.

    Returns:
        Les avertissements (déjà journalisés)

    Raises:
        ConfigError: Avec la liste des problèmes de sévérité ERROR
    """
    engine = engine or experiment_linter()
    issues = engine.lint_config(document)
    errors = [issue for issue in issues if issue.severity == LintSeverity.ERROR]
    if errors:
        raise ConfigError("Invalid experiment configuration", errors)
    warnings = [issue for issue in issues if issue.severity == LintSeverity.WARNING]
    for issue in warnings:
        logger.warning(f"Configuration warning at {issue.location}: {issue.message}")
    return warnings
