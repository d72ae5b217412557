"""
btl_spectral - Ligne de commande

Usage:
    python -m btl_spectral.main [options globales] <commande> [arguments]

Commandes:
    generate         Graphe aléatoire -> liste d'arêtes
    rank             Liste d'arêtes + comparaisons -> scores
    reweight         Liste d'arêtes -> poids MMWU
    spectra          Liste d'arêtes -> ligne SpectralReport
    experiment       Preset ou fichier de configuration -> CSV
    probe-k          Sonde d'échelle de l'erreur en k
    check-variation  Condition de variation d'un plan

Codes de sortie: 0 succès, 2 erreur de configuration, 3 essai en échec.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import CAP_ESTIMATOR, DEFAULT_BASE_SEED, DEFAULT_K
from .core.chain import rank_centrality
from .core.errors import BlockSizeError, BtlSpectralError, ConfigError, InvalidPlan
from .core.graphs import gen_semi_random, read_edge_list, write_edge_list
from .core.model import ComparisonDataset, load_model_file, sample_comparisons
from .core.reweight import (
    ReweightConfig,
    export_heatmap,
    export_weights,
    mmwu_reweight,
    weighted_rank_centrality,
)
from .core.saver import ResultSaver
from .core.spectra import CSV_HEADER, spectral_report
from .bench.experiment import ExperimentConfig, build_plan, run_experiment, scaling_probe
from .bench.metrics import check_variation_condition, variation_angle
from .bench.presets import PRESETS, SCALING_K_GRID, get_preset

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_TRIAL = 3


def _load_json_argument(value: str) -> dict:
    """Document JSON en ligne ou chemin vers un fichier JSON."""
    try:
        if value.lstrip().startswith('{'):
            return json.loads(value)
        with open(value, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON argument {value!r}: {e}") from e


def _write_or_print(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        print(f"✓ {out}")
    else:
        sys.stdout.write(text)


# ==================== Commandes ====================

def _seed(args: argparse.Namespace) -> int:
    return DEFAULT_BASE_SEED if args.seed is None else args.seed


def cmd_generate(args: argparse.Namespace) -> int:
    spec = _load_json_argument(args.graph_spec) if args.graph_spec else {'kind': 'er', 'p': args.p}
    graph = gen_semi_random(build_plan(spec, args.n), _seed(args))
    if args.out:
        write_edge_list(graph, args.out)
        print(f"✓ {graph.num_edges} edges written to {args.out}")
    else:
        sys.stdout.write(f"n {graph.n}\n")
        for i, j in graph.edges:
            sys.stdout.write(f"{i} {j} 1\n")
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    graph = read_edge_list(args.edges)
    if args.dataset:
        dataset = ComparisonDataset.load(Path(args.dataset))
    elif args.model:
        dataset = sample_comparisons(load_model_file(args.model), graph, args.k, _seed(args))
    else:
        raise ConfigError("rank needs --dataset or --model")

    if args.weighted:
        config = ReweightConfig.for_graph(graph, cap_estimator=args.cap_estimator)
        pi_hat, ranking, _ = weighted_rank_centrality(graph, dataset, config)
    else:
        pi_hat, ranking = rank_centrality(graph, dataset)

    position = {int(item): rank for rank, item in enumerate(ranking, start=1)}
    lines = ["item,score,rank"] + [f"{i},{pi_hat[i]:.12g},{position[i]}" for i in range(graph.n)]
    _write_or_print("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_reweight(args: argparse.Namespace) -> int:
    graph = read_edge_list(args.edges)
    overrides = {'iterations': args.iterations} if args.iterations else {}
    if args.cap:
        config = ReweightConfig(degree_cap=args.cap, **overrides)
    else:
        config = ReweightConfig.for_graph(graph, cap_estimator=args.cap_estimator, **overrides)
    result = mmwu_reweight(graph, config)
    print(f"✓ Fiedler value {result.achieved_fiedler:.6g} (cap {config.degree_cap:.6g}, "
          f"feasible={result.feasible}, candidate={result.candidate})")
    if not result.feasible:
        print(f"⚠️  degree_floor={config.degree_floor} not reached on every vertex")

    if args.out:
        export_weights(graph, result.weights, args.out)
        print(f"✓ {args.out}")
    if args.heatmap:
        export_heatmap(graph.n, result.weights, args.heatmap)
        print(f"✓ {args.heatmap}")
    return EXIT_OK


def cmd_spectra(args: argparse.Namespace) -> int:
    graph = read_edge_list(args.edges)
    model = load_model_file(args.model) if args.model else None
    report = spectral_report(graph, model=model, seed=_seed(args))
    _write_or_print(CSV_HEADER + "\n" + report.to_row() + "\n", args.out)
    return EXIT_OK


def _experiment_config(args: argparse.Namespace, preset: Optional[str]) -> ExperimentConfig:
    overrides = {}
    if args.k is not None:
        overrides['k'] = args.k
    if args.trials is not None:
        overrides['trials'] = args.trials
    if args.seed is not None:
        overrides['base_seed'] = args.seed

    if args.config:
        config = ExperimentConfig.load(args.config)
        return config.replace(**overrides) if overrides else config
    if preset is None:
        raise ConfigError("Give a preset name or --config <json>")
    return get_preset(preset, **overrides)


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _experiment_config(args, args.preset)
    result = run_experiment(config, threads=args.threads, progress=not args.quiet)
    saver = ResultSaver(args.out)
    for path in saver.save_experiment(result):
        print(f"✓ {path}")

    if result.fatal_errors:
        print(f"❌ {len(result.fatal_errors)} trial(s) failed; see {config.name}_trials.csv")
        return EXIT_TRIAL
    return EXIT_OK


def cmd_probe_k(args: argparse.Namespace) -> int:
    config = _experiment_config(args, args.preset)
    probe = scaling_probe(config, args.k_grid, threads=args.threads, progress=not args.quiet)
    saver = ResultSaver(args.out)
    print(f"✓ {saver.save_table(f'{config.name}_probe_k.csv', probe.to_csv())}")
    print(f"✓ {saver.save_table(f'{config.name}_slopes.csv', probe.slopes_csv())}")
    for (n, method), slope in sorted(probe.slopes.items()):
        print(f"  n={n} {method}: slope {slope:.4f}")

    if any(result.fatal_errors for result in probe.experiments):
        print("❌ Some trials failed")
        return EXIT_TRIAL
    return EXIT_OK


def cmd_check_variation(args: argparse.Namespace) -> int:
    plan = build_plan(_load_json_argument(args.graph_spec), args.n)
    holds, worst = check_variation_condition(plan, args.s)
    angles = variation_angle(plan)
    marker = "✓" if holds else "❌"
    print(f"{marker} s={args.s}: worst ratio {worst:.6g} (max angle {angles.max():.4f} rad)")
    return EXIT_OK


# ==================== Analyse des arguments ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='btl_spectral',
        description='Estimation spectrale de scores BTL sur graphes semi-aléatoires',
    )
    parser.add_argument('--seed', type=int, default=None,
                        help=f'Graine (graphe, modèle, comparaisons); remplace base_seed de --config (défaut {DEFAULT_BASE_SEED})')
    parser.add_argument('--out', type=str, default=None, help='Fichier ou dossier de sortie')
    parser.add_argument('--config', type=str, default=None, help="Configuration d'expérience JSON")
    parser.add_argument('--threads', type=int, default=1, help="Threads pour les essais")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', '-v', action='store_true', help='Journalisation DEBUG')
    verbosity.add_argument('--quiet', '-q', action='store_true', help='Sans barre de progression ni avertissements')

    commands = parser.add_subparsers(dest='command', required=True)

    generate = commands.add_parser('generate', help='Graphe aléatoire -> liste d\'arêtes')
    generate.add_argument('--n', type=int, required=True)
    source = generate.add_mutually_exclusive_group(required=True)
    source.add_argument('--p', type=float, help='Probabilité Erdős-Rényi')
    source.add_argument('--graph-spec', type=str, help='graph_spec JSON (en ligne ou fichier)')
    generate.set_defaults(handler=cmd_generate)

    rank = commands.add_parser('rank', help='Scores spectraux')
    rank.add_argument('edges', type=str)
    rank.add_argument('--dataset', type=str, help='Comparaisons JSON')
    rank.add_argument('--model', type=str, help='Modèle JSON (les comparaisons sont tirées)')
    rank.add_argument('--k', type=int, default=DEFAULT_K)
    rank.add_argument('--weighted', action='store_true', help='Méthode pondérée (MMWU)')
    rank.add_argument('--cap-estimator', type=str, default=CAP_ESTIMATOR)
    rank.set_defaults(handler=cmd_rank)

    reweight = commands.add_parser('reweight', help='Poids MMWU')
    reweight.add_argument('edges', type=str)
    reweight.add_argument('--cap', type=float, default=None, help='Plafond de degré pondéré')
    reweight.add_argument('--cap-estimator', type=str, default=CAP_ESTIMATOR)
    reweight.add_argument('--iterations', type=int, default=None)
    reweight.add_argument('--heatmap', type=str, default=None, help='CSV i,j,w sur toutes les paires')
    reweight.set_defaults(handler=cmd_reweight)

    spectra = commands.add_parser('spectra', help='Diagnostics spectraux')
    spectra.add_argument('edges', type=str)
    spectra.add_argument('--model', type=str, default=None)
    spectra.set_defaults(handler=cmd_spectra)

    for name, handler in (('experiment', cmd_experiment), ('probe-k', cmd_probe_k)):
        sub = commands.add_parser(name, help=f'{name} (preset ou --config)')
        sub.add_argument('preset', type=str, nargs='?', choices=sorted(PRESETS),
                         default='scaling' if name == 'probe-k' else None)
        sub.add_argument('--k', type=int, default=None)
        sub.add_argument('--trials', type=int, default=None)
        if name == 'probe-k':
            sub.add_argument('--k-grid', type=int, nargs='+', default=list(SCALING_K_GRID))
        sub.set_defaults(handler=handler)

    variation = commands.add_parser('check-variation', help='Condition de variation')
    variation.add_argument('--graph-spec', type=str, required=True)
    variation.add_argument('--n', type=int, required=True)
    variation.add_argument('--s', type=float, required=True)
    variation.set_defaults(handler=cmd_check_variation)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Point d'entrée principal"""
    args = build_parser().parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

    if args.command in ('experiment', 'probe-k') and args.out is None:
        args.out = 'results'

    try:
        return args.handler(args)
    except (ConfigError, InvalidPlan, BlockSizeError) as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except BtlSpectralError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
