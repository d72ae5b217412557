"""
Tests du linter de configurations
"""

import pytest

from btl_spectral.core.errors import ConfigError
from btl_spectral.core.linting import (
    LintEngine,
    LintIssue,
    LintSeverity,
    check_config,
    experiment_linter,
)

VALID = {
    'name': 'demo',
    'graph_spec': {'kind': 'generalized_sbm', 'P': [[1, 1, 0], [1, {'log_factor': 2}, {'log_factor': 2}],
                                                    [0, {'log_factor': 2}, {'log_factor': 2}]]},
    'model_spec': {'alpha_gen': {'kind': 'uniform_log', 'h': 4}},
    'n_grid': [30, 45],
    'k': 32,
    'trials': 25,
    'methods': ['unweighted', 'weighted'],
    'base_seed': 7,
    'reweight': {'cap_estimator': 'lower_quartile_degree', 'iterations': 100},
}


def _errors(document):
    return [i for i in experiment_linter().lint_config(document) if i.severity == LintSeverity.ERROR]


def _with(**changes):
    document = dict(VALID)
    document.update(changes)
    return document


class TestLintEngine:

    def test_valid_document(self):
        issues = experiment_linter().lint_config(VALID)
        assert not [i for i in issues if i.severity == LintSeverity.ERROR]
        assert [i.location for i in issues] == ['graph_spec.P']

    def test_not_an_object(self):
        assert _errors([1, 2])[0].location == '<root>'

    def test_missing_required_keys(self):
        messages = [i.message for i in _errors({'k': 3})]
        assert "Missing required key 'name'" in messages
        assert "Missing required key 'graph_spec'" in messages

    def test_unknown_keys(self):
        assert _errors(_with(seed=3))[0].location == '<root>.seed'
        assert _errors(_with(reweight={'iterations': 10, 'cap': 3}))[0].location == 'reweight.cap'

    @pytest.mark.parametrize('changes, location', [
        ({'k': 0}, 'k'),
        ({'trials': 2.5}, 'trials'),
        ({'n_grid': []}, 'n_grid'),
        ({'methods': ['mle']}, 'methods'),
        ({'dataset_mode': 'oracle'}, 'dataset_mode'),
        ({'base_seed': -1}, 'base_seed'),
        ({'n_grid': [31]}, 'graph_spec'),
        ({'graph_spec': {'kind': 'er', 'p': 1.5}}, 'graph_spec.p'),
        ({'graph_spec': {'kind': 'sbm', 'm': 3, 'p': 0.1, 'q': [0.3, 0.4]}}, 'graph_spec.q'),
        ({'graph_spec': {'kind': 'ring'}}, 'graph_spec.kind'),
        ({'model_spec': {'alpha': [1, 2]}}, 'model_spec.alpha'),
        ({'model_spec': {'alpha_gen': {'kind': 'uniform_log', 'h': 0.5}}}, 'model_spec.alpha_gen.h'),
        ({'reweight': {'cap_estimator': 'max_degree'}}, 'reweight.cap_estimator'),
        ({'reweight': {'degree_floor': 0.5}}, 'reweight.degree_floor'),
    ])
    def test_errors(self, changes, location):
        assert location in [i.location for i in _errors(_with(**changes))]

    def test_asymmetric_block_matrix(self):
        document = _with(graph_spec={'kind': 'generalized_sbm', 'P': [[0.5, 0.2], [0.3, 0.5]]}, n_grid=[10])
        assert any('symmetric' in i.message for i in _errors(document))

    def test_explicit_plan_fixes_n(self):
        document = _with(graph_spec={'kind': 'plan', 'q': [[0, 1], [1, 0]], 'base_p': 1.0}, n_grid=[2, 4],
                         model_spec={'alpha_gen': {'kind': 'uniform_log'}})
        assert [i.location for i in _errors(document)] == ['graph_spec']

    def test_custom_method_ids(self):
        engine = LintEngine(method_ids=['unweighted'])
        issues = engine.lint_config(_with(methods=['weighted']))
        assert any(i.location == 'methods' for i in issues)

    def test_generator_seed_is_accepted_with_warning(self):
        issues = experiment_linter().lint_config(_with(model_spec={'alpha_gen': {'kind': 'uniform_log', 'h': 4, 'seed': 1}}))
        assert [i for i in issues if i.severity == LintSeverity.ERROR] == []
        assert {i.location for i in issues if i.severity == LintSeverity.WARNING} == {'graph_spec.P', 'model_spec.alpha_gen.seed'}

    def test_generator_seed_must_be_non_negative_integer(self):
        document = _with(model_spec={'alpha_gen': {'kind': 'uniform_log', 'seed': -3}})
        assert 'model_spec.alpha_gen.seed' in [i.location for i in _errors(document)]


class TestCheckConfig:

    def test_raises_with_issues(self):
        with pytest.raises(ConfigError) as excinfo:
            check_config(_with(k=-1, trials=0))
        assert len(excinfo.value.issues) == 2
        assert 'k: k must be a positive integer' in str(excinfo.value)

    def test_returns_warnings(self):
        warnings = check_config(_with(graph_spec={'kind': 'er', 'p': 0}))
        assert [w.location for w in warnings] == ['graph_spec.p']


class TestLintIssue:

    def test_rendering(self):
        issue = LintIssue('graph_spec.p', LintSeverity.WARNING, 'Base probability is 0', 'details')
        assert str(issue) == 'graph_spec.p: Base probability is 0'
        assert issue.to_dict()['severity'] == 'warning'
        assert 'warning' in repr(issue)
