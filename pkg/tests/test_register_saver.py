"""
Tests du registre des méthodes et de l'écriture des résultats
"""

import json

import numpy as np
import pytest

from btl_spectral.bench.experiment import ExperimentConfig, run_experiment
from btl_spectral.core.errors import ConfigError
from btl_spectral.core.graphs import ComparisonGraph
from btl_spectral.core.interfaces import IRankingMethod, MethodOutcome
from btl_spectral.core.model import expected_comparisons, new_btl_model
from btl_spectral.core.register import MethodLoader, Register, default_register
from btl_spectral.core.saver import ResultSaver
from btl_spectral.methods import UnweightedSpectralMethod, WeightedSpectralMethod


class UniformMethod(IRankingMethod):
    """Méthode de référence: pi_hat uniforme."""

    @property
    def id(self) -> str:
        return 'uniform'

    def estimate(self, graph, dataset, model=None) -> MethodOutcome:
        pi_hat = np.full(graph.n, 1.0 / graph.n)
        return MethodOutcome(pi_hat=pi_hat, ranking=np.arange(graph.n), markov_gap=0.0, fiedler=0.0)


class TestRegister:

    def test_default_register(self):
        register = default_register()
        assert register.get_registered_ids() == ['unweighted', 'weighted']
        assert isinstance(register.get_method('weighted'), WeightedSpectralMethod)

    def test_loader_finds_concrete_classes(self):
        loader = MethodLoader()
        classes = loader.load_methods()
        assert set(classes) == {UnweightedSpectralMethod, WeightedSpectralMethod}
        register = Register()
        assert loader.register_methods(register) == 2

    def test_register_and_unregister(self):
        register = Register()
        register.register_method(UniformMethod())
        assert register.has_method('uniform')
        assert 'uniform → UniformMethod' in str(register)
        assert register.unregister_method('uniform')
        assert not register.unregister_method('uniform')
        assert register.get_method('uniform') is None

    def test_custom_method_in_experiment(self):
        register = default_register()
        register.register_method(UniformMethod())
        config = ExperimentConfig(name='uniform', graph_spec={'kind': 'er', 'p': 1.0}, n_grid=(4,),
                                  model_spec={'alpha': [1, 1, 1, 1]}, trials=1, methods=('uniform',))
        result = run_experiment(config, register)
        assert result.median(4, 'uniform', 'rel_linf') == 0.0


class TestMethods:

    def test_unweighted_on_exact_data(self):
        model = new_btl_model([1, 2, 1, 2])
        graph = ComparisonGraph.complete(4)
        outcome = UnweightedSpectralMethod().estimate(graph, expected_comparisons(model, graph, 6), model)
        np.testing.assert_allclose(outcome.pi_hat, model.pi, atol=1e-9)
        assert outcome.fiedler == pytest.approx(4.0)
        assert outcome.weights is None

    def test_weighted_settings(self):
        method = WeightedSpectralMethod()
        method.configure({'cap_estimator': 'lower_quartile_degree', 'iterations': 10})
        assert method.describe() == {'cap_estimator': 'lower_quartile_degree', 'iterations': 10}
        graph = ComparisonGraph.complete(5)
        assert method.reweight_config(graph).iterations == 10
        method.configure({'degree_cap': 2.5})
        assert method.reweight_config(graph).degree_cap == 2.5
        with pytest.raises(ConfigError):
            method.configure({'cap': 3})

    def test_weighted_outcome(self):
        model = new_btl_model([1, 2, 1, 2, 3])
        graph = ComparisonGraph.complete(5)
        method = WeightedSpectralMethod()
        method.configure({'iterations': 20})
        outcome = method.estimate(graph, expected_comparisons(model, graph, 12), model)
        assert set(outcome.weights) == set(graph.edges)
        assert outcome.pi_hat.sum() == pytest.approx(1.0)
        assert 0.0 < outcome.markov_gap <= 1.0


class TestResultSaver:

    def test_table_and_metadata(self, tmp_path):
        saver = ResultSaver(tmp_path / 'out')
        path = saver.save_table('t.csv', 'a,b\n1,2\n')
        assert path.read_bytes() == b'a,b\n1,2\n'
        saver.save_metadata('m.json', {'b': 1, 'a': 2})
        text = (tmp_path / 'out' / 'm.json').read_text()
        assert text.index('"a"') < text.index('"b"')
        assert saver.load_metadata('m.json')['format_version'] == '1.0'
        assert 'written_at' not in saver.load_metadata('m.json')
        assert saver.load_metadata('missing.json') is None

    def test_timestamp_is_optional(self, tmp_path):
        saver = ResultSaver(tmp_path)
        saver.save_metadata('m.json', {}, timestamp=True)
        assert 'written_at' in json.loads((tmp_path / 'm.json').read_text())

    def test_weights_and_heatmap(self, tmp_path):
        saver = ResultSaver(tmp_path)
        graph = ComparisonGraph.from_edges(3, [(0, 1)])
        saver.save_weights('w.txt', graph, {(0, 1): 0.5})
        saver.save_heatmap('h.csv', 3, {(0, 1): 0.5})
        assert saver.has_output('w.txt') and saver.has_output('h.csv')
        assert (tmp_path / 'h.csv').read_text().splitlines()[1] == '0,1,0.5'

    def test_save_experiment(self, tmp_path):
        config = ExperimentConfig(name='tiny', graph_spec={'kind': 'er', 'p': 1.0}, n_grid=(4,),
                                  trials=2, methods=('unweighted',))
        paths = ResultSaver(tmp_path).save_experiment(run_experiment(config))
        assert [p.name for p in paths] == ['tiny.csv', 'tiny_trials.csv', 'tiny_diagnostics.csv', 'tiny.json']
        metadata = json.loads((tmp_path / 'tiny.json').read_text())
        assert metadata['decisions']['k'] == 32
        assert metadata['config']['n_grid'] == [4]
