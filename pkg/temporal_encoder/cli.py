# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Command line interface for embedding time-series graphs and tracking their dynamics."""

import argparse
from contextlib import contextmanager
from dataclasses import asdict, dataclass, replace
import logging
import os
from pathlib import Path
import platform
import sys
import time

import numpy as np
import pandas as pd
import scipy
import yaml

from . import __version__
from .submodules.benchmark import loglog_slope, run_benchmark, write_benchmark
from .submodules.dynamics import (
    compute_dynamics, default_bin_edges, DEFAULT_BINS, DEFAULT_INLIER_THRESHOLD,
    DEFAULT_OUTLIER_THRESHOLD, histogram, inactive_mask, max_window_dynamic, outlier_recall,
    rank_by_dynamic, threshold_summary, vertex_dynamic, write_community_dynamics,
    write_graph_dynamics, write_histogram, write_ranking, write_threshold_summary,
    write_vertex_dynamics)
from .submodules.encoder import (
    read_embedding, read_embedding_binary, temporal_encoder_embedding, write_embedding,
    write_embedding_binary)
from .submodules.exceptions import GraphIOError, TemporalEncoderError, ValidationError
from .submodules.graph_core import (
    infer_k, load_label_series, read_label_rows, read_temporal_graph, VertexRegistry,
    write_labels, write_temporal_graph)
from .submodules.graph_util import write_table
from .submodules.spectral import (
    DEFAULT_DIM, spectral_outlier_measure, unfolded_spectral_embed, write_spectral_embedding)
from .submodules.synth import (
    inject_outliers, load_params, OUTLIER_MODES, OutlierSpec, preset_path,
    simulate_temporal_graph)

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one command-line run."""

    command: str
    out: str
    edges: tuple = ()
    labels: tuple = ()
    embedding: str = None
    planted: str = None
    params: str = None
    preset: str = None
    k: int = None
    ref_time: int = 1
    previous_step: bool = False
    time: int = None
    window: tuple = None
    threshold_outlier: float = DEFAULT_OUTLIER_THRESHOLD
    threshold_inlier: float = DEFAULT_INLIER_THRESHOLD
    bins: int = DEFAULT_BINS
    undirected: bool = None
    allow_negative: bool = False
    label_policy: str = 'reference'
    dim: int = DEFAULT_DIM
    seed: int = None
    threads: int = 1
    replicates: int = 10
    count: int = 10
    injection_time: int = None
    mode: str = 'overwrite'
    one_sided: bool = False
    grid_n: tuple = ()
    grid_t: tuple = ()
    spectral: bool = False
    binary: bool = False

    @classmethod
    def from_args(cls, args):
        """Build a config from parsed arguments, resolving every path."""
        def resolve(path):
            return None if path is None else str(Path(path).expanduser().resolve())

        values = {name: getattr(args, name) for name in cls.__dataclass_fields__
                  if hasattr(args, name)}
        values['command'] = args.command
        values['out'] = resolve(args.out)
        for name in ('embedding', 'planted', 'params'):
            if values.get(name) is not None:
                values[name] = resolve(values[name])
        for name in ('edges', 'labels'):
            values[name] = tuple(resolve(path) for path in values.get(name) or ())
        for name in ('window', 'grid_n', 'grid_t'):
            if values.get(name) is not None:
                values[name] = tuple(values[name])
        if values.get('threads') is None:
            values['threads'] = os.cpu_count() or 1
        return cls(**values)

    def to_mapping(self):
        """Return the config as plain YAML-friendly values."""
        return {name: list(value) if isinstance(value, tuple) else value
                for name, value in asdict(self).items()}


class TemporalEncoderInterface(object):
    """Runs one command and writes its artifacts into the output directory."""

    def __init__(self, config):
        self._config = config
        self._out = Path(config.out)
        self._timings = {}
        self._results = {}

        self._command_dictionary = {
            'embed': self._embed,
            'dynamics': self._dynamics,
            'simulate': self._simulate,
            'inject-outliers': self._inject_outliers,
            'spectral': self._spectral,
            'benchmark': self._benchmark,
            'compare': self._compare,
        }

    @contextmanager
    def _timed(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self._timings[name] = time.perf_counter() - start

    def _path(self, name):
        return str(self._out / name)

    def _seed(self, default=0):
        return default if self._config.seed is None else self._config.seed

    def _load_graph(self, need_labels=True):
        """Read the edge and label files named by the config."""
        config = self._config
        if not config.edges:
            raise ValidationError('no edge files given; pass --edges')
        if need_labels and not config.labels:
            raise ValidationError('no label file given; pass --labels')
        graph, registry, label_rows = read_temporal_graph(
            config.edges, config.labels, undirected=config.undirected,
            allow_negative=config.allow_negative, threads=config.threads)
        labels = None
        if label_rows:
            K = config.k if config.k is not None else max(infer_k(rows) for rows in label_rows)
            labels = load_label_series(label_rows, registry, K, config.label_policy,
                                       config.ref_time)
        self._results['undirected'] = graph.undirected
        print(f'Loaded {graph.n} vertices, {graph.T} time steps and {graph.total_edges} edges.')
        return graph, registry, labels

    def _labels_for(self, registry):
        """Read label files against an existing registry, or return None without any."""
        config = self._config
        if not config.labels:
            return None
        label_rows = [read_label_rows(path) for path in config.labels]
        K = config.k if config.k is not None else max(infer_k(rows) for rows in label_rows)
        return load_label_series(label_rows, registry, K, config.label_policy,
                                 config.ref_time)

    def _time_step(self, T):
        t = T if self._config.time is None else self._config.time
        if not 1 <= t <= T:
            raise ValidationError(f'time step {t} outside [1, {T}]')
        return t

    def _embed(self):
        """Embed every time step and write the embedding."""
        with self._timed('ingest'):
            graph, registry, labels = self._load_graph()
        with self._timed('embed'):
            series = temporal_encoder_embedding(graph, labels, threads=self._config.threads)
        with self._timed('write'):
            write_embedding(self._path('embedding.csv'), series, registry)
            if self._config.binary:
                write_embedding_binary(self._path('embedding.bin'), series)
        self._results['shape'] = {'T': series.T, 'n': series.n, 'K': series.K}
        print(f'Embedded {series.T} x {series.n} vertices into {series.K} dimensions '
              f'in {self._timings["embed"]:.3f} s.')

    def _load_series(self):
        """Return an embedding series, its registry and labels for the dynamics."""
        config = self._config
        if config.embedding is not None:
            path = Path(config.embedding)
            if path.is_dir():
                path = path / 'embedding.csv'
            if not path.exists():
                raise GraphIOError(
                    'embedding not found; run `temporal-encoder embed` first', path=path)
            if path.suffix == '.bin':
                series = read_embedding_binary(str(path))
                _LOGGER.warning('Binary embedding carries no vertex ids; using positions')
                registry = VertexRegistry(tuple(str(i) for i in range(series.n)))
            else:
                series, registry = read_embedding(str(path))
            return series, registry, self._labels_for(registry)
        if not config.edges:
            raise ValidationError(
                'no embedding found; run `temporal-encoder embed` first and pass '
                '--embedding, or pass --edges and --labels')
        graph, registry, labels = self._load_graph()
        series = temporal_encoder_embedding(graph, labels, threads=config.threads)
        return series, registry, labels

    def _dynamics(self):
        """Compute the dynamics and their summaries and write them."""
        config = self._config
        with self._timed('load'):
            series, registry, labels = self._load_series()
        t = self._time_step(series.T)
        with self._timed('dynamics'):
            if labels is None:
                _LOGGER.warning('No labels given; community dynamics are skipped')
            ref_time = None if config.previous_step else config.ref_time
            report = compute_dynamics(series, labels, ref_time)
            values = report.vertex_dynamic
            edges = default_bin_edges(config.bins)
            counts = histogram(values, t, edges)
            summary = threshold_summary(values, t, config.threshold_outlier,
                                        config.threshold_inlier)
            ranking = rank_by_dynamic(values, t, report.inactive)
            t_a, t_b = config.window if config.window else (1, series.T)
            window_max = max_window_dynamic(values, t_a, t_b)
        with self._timed('write'):
            write_vertex_dynamics(self._path('vertex_dynamics.csv'), report, registry)
            if report.community_dynamic is not None:
                write_community_dynamics(self._path('community_dynamics.csv'), report)
            write_graph_dynamics(self._path('graph_dynamics.csv'), report)
            write_histogram(self._path('histogram.csv'), counts, edges)
            write_threshold_summary(self._path('threshold_summary.csv'), summary, registry)
            write_ranking(self._path('ranking.csv'), ranking, values[t - 1], registry)
            write_ranking(self._path('max_dynamics.csv'), rank_by_dynamic(window_max),
                          window_max, registry)
        self._results['threshold'] = {
            't': t, 'outlier_fraction': summary.outlier_fraction,
            'inlier_fraction': summary.inlier_fraction}
        print(f'At t={t}: {summary.outlier_fraction:.2%} of vertices above '
              f'{config.threshold_outlier}, {summary.inlier_fraction:.2%} below '
              f'{config.threshold_inlier}.')

    def _simulate(self):
        """Generate a synthetic graph with labels and an outlier manifest."""
        config = self._config
        if config.params is None and config.preset is None:
            raise ValidationError('pass --params or --preset')
        params = load_params(config.params or preset_path(config.preset))
        if config.seed is not None:
            params = replace(params, sbm=replace(params.sbm, seed=config.seed))
            if params.outliers is not None:
                params = replace(params, outliers=replace(params.outliers, seed=config.seed + 1))
        with self._timed('simulate'):
            graph, labels = simulate_temporal_graph(params.sbm, params.evolution,
                                                    threads=config.threads)
        planted, spec = [], params.outliers
        if spec is not None:
            with self._timed('inject'):
                graph, planted = inject_outliers(graph, spec, labels)
        registry = VertexRegistry(tuple(str(i) for i in range(graph.n)))
        with self._timed('write'):
            write_temporal_graph(self._path('edges.csv'), graph, registry)
            write_labels(self._path('labels.csv'), labels, registry)
            self._write_planted(planted, spec, graph.T, registry)
        self._results['parameters'] = params.source
        print(f'Simulated {graph.T} time steps with {graph.total_edges} edges; '
              f'planted {len(planted)} outliers.')

    def _write_planted(self, planted, spec, T, registry):
        manifest = {
            'count': len(planted),
            'injection_time': None if spec is None else (spec.injection_time or T),
            'seed': None if spec is None else spec.seed,
            'mode': None if spec is None else spec.mode,
            'one_sided': None if spec is None else spec.one_sided,
            'vertices': [registry.token(i) for i in planted],
        }
        _write_yaml(self._path('outliers.yaml'), manifest)

    def _inject_outliers(self):
        """Plant outliers into an existing graph."""
        config = self._config
        graph, registry, labels = self._load_graph(need_labels=False)
        spec = OutlierSpec(count=config.count, injection_time=config.injection_time,
                           seed=self._seed(), mode=config.mode, one_sided=config.one_sided)
        with self._timed('inject'):
            graph, planted = inject_outliers(graph, spec, labels)
        write_temporal_graph(self._path('edges.csv'), graph, registry)
        self._write_planted(planted, spec, graph.T, registry)
        print(f'Planted {len(planted)} outliers at t={spec.injection_time or graph.T}.')

    def _spectral(self):
        """Run the unfolded spectral baseline and write its embedding and distances."""
        config = self._config
        with self._timed('ingest'):
            graph, registry, _ = self._load_graph(need_labels=False)
        t = self._time_step(graph.T)
        with self._timed('embed'):
            embedding = unfolded_spectral_embed(graph, d=config.dim, seed=self._seed(),
                                                threads=config.threads)
        distance = spectral_outlier_measure(embedding, config.ref_time, t)
        with self._timed('write'):
            write_spectral_embedding(self._path('embedding.csv'), embedding, registry)
            frame = pd.DataFrame({'vertex': list(registry.tokens), 'distance': distance})
            frame.insert(0, 't', t)
            write_table(self._path('spectral_distance.csv'), frame)
        self._results['singular_values'] = embedding.singular_values.tolist()
        print(f'Spectral embedding into {embedding.d} dimensions in '
              f'{self._timings["embed"]:.3f} s.')

    def _benchmark(self):
        """Time the embeddings over the configured grid."""
        config = self._config
        if not config.grid_n or not config.grid_t:
            raise ValidationError('pass --grid-n and --grid-t')
        K = 20 if config.k is None else config.k
        with self._timed('benchmark'):
            cells = run_benchmark(config.grid_n, config.grid_t, K=K,
                                  replicates=config.replicates,
                                  include_spectral=config.spectral, dim=config.dim,
                                  seed=self._seed(), threads=config.threads)
        write_benchmark(self._path('benchmark.csv'), cells)
        encoder = [cell for cell in cells if cell.method == 'encoder']
        for cell in cells:
            print(f'n={cell.n:>8} T={cell.T:>4} {cell.method:>8}: '
                  f'{cell.mean_seconds:.4f} +/- {cell.std_seconds:.4f} s')
        if len(set(cell.n for cell in encoder)) > 1 and len(config.grid_t) == 1:
            slope = loglog_slope([cell.n for cell in encoder],
                                 [cell.mean_seconds for cell in encoder])
            self._results['encoder_loglog_slope'] = slope
            print(f'Encoder log-log slope against n: {slope:.3f}')

    def _compare(self):
        """Rank vertices by the encoder dynamic and the spectral distance side by side."""
        config = self._config
        with self._timed('ingest'):
            graph, registry, labels = self._load_graph()
        t = self._time_step(graph.T)
        with self._timed('encoder'):
            series = temporal_encoder_embedding(graph, labels, threads=config.threads)
            dynamic = vertex_dynamic(series, config.ref_time)[t - 1]
            silent = inactive_mask(series, config.ref_time)[t - 1]
        with self._timed('spectral'):
            embedding = unfolded_spectral_embed(graph, d=config.dim, seed=self._seed(),
                                                threads=config.threads)
            distance = spectral_outlier_measure(embedding, config.ref_time, t)
        encoder_ranking = rank_by_dynamic(dynamic, inactive=silent)
        spectral_ranking = rank_by_dynamic(distance)
        encoder_rank = np.empty(graph.n, dtype=np.int64)
        encoder_rank[encoder_ranking] = np.arange(1, graph.n + 1)
        spectral_rank = np.empty(graph.n, dtype=np.int64)
        spectral_rank[spectral_ranking] = np.arange(1, graph.n + 1)
        frame = pd.DataFrame({
            'vertex': list(registry.tokens),
            'encoder_dynamic': dynamic,
            'encoder_rank': encoder_rank,
            'encoder_inactive': silent.astype(np.int64),
            'spectral_distance': distance,
            'spectral_rank': spectral_rank,
        }).sort_values('encoder_rank', kind='stable')
        write_table(self._path('compare.csv'), frame)
        if config.planted is not None:
            tokens = _read_planted(config.planted)
            unknown = [token for token in tokens if token not in registry]
            if unknown:
                raise ValidationError(f'planted vertices not in the graph: {unknown[:5]}')
            planted = [registry[token] for token in tokens]
            recall = {}
            for k in (10, 50):
                recall[f'encoder_top{k}'] = outlier_recall(encoder_ranking, planted, k)
                recall[f'spectral_top{k}'] = outlier_recall(spectral_ranking, planted, k)
            self._results['recall'] = recall
            print('Recall of planted outliers: ' + ', '.join(
                f'{name} {value:.2f}' for name, value in recall.items()))

    def _manifest(self, status):
        return {
            'command': self._config.command,
            'status': status,
            'seed': self._config.seed,
            'config': self._config.to_mapping(),
            'versions': {
                'temporal_encoder': __version__,
                'python': platform.python_version(),
                'numpy': np.__version__,
                'scipy': scipy.__version__,
                'pandas': pd.__version__,
                'pyyaml': yaml.__version__,
            },
            'timings': {name: round(seconds, 6) for name, seconds in self._timings.items()},
            'results': self._results,
        }

    def run(self):
        """Run the configured command and write config.yaml and manifest.yaml."""
        try:
            self._out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise GraphIOError(f'cannot create output directory ({exc.strerror})',
                               path=self._out) from exc
        _write_yaml(self._path('config.yaml'), self._config.to_mapping())
        cmd_func = self._command_dictionary[self._config.command]
        try:
            with self._timed('total'):
                cmd_func()
        except TemporalEncoderError as exc:
            self._results['error'] = {'type': type(exc).__name__, 'message': str(exc),
                                      'exit_code': exc.exit_code}
            _write_yaml(self._path('manifest.yaml'), self._manifest('failed'))
            raise
        _write_yaml(self._path('manifest.yaml'), self._manifest('ok'))
        return 0


def _write_yaml(path, mapping):
    try:
        with open(path, 'w', encoding='utf-8') as yaml_file:
            yaml.safe_dump(_plain(mapping), yaml_file, sort_keys=False)
    except OSError as exc:
        raise GraphIOError(f'cannot write file ({exc.strerror})', path=path) from exc


def _plain(value):
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _read_planted(path):
    try:
        with open(path, 'r', encoding='utf-8') as yaml_file:
            manifest = yaml.safe_load(yaml_file) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise GraphIOError(f'cannot read outlier manifest ({exc})', path=path) from exc
    return [str(token) for token in manifest.get('vertices', [])]


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', required=True, help='Output directory of the run')
    common.add_argument('--seed', type=int, default=None, help='Random seed')
    common.add_argument('--threads', type=int, default=None,
                        help='Worker threads (default: available cores; 1 is canonical)')
    common.add_argument('--verbose', '-v', action='store_true', help='Debug logging')

    graph_input = argparse.ArgumentParser(add_help=False)
    graph_input.add_argument('--edges', nargs='+', default=(),
                             help='One edge file per time step, or one file with a t column')
    graph_input.add_argument('--labels', nargs='+', default=(),
                             help='Label file, or one label file per time step')
    graph_input.add_argument('--k', type=int, default=None,
                             help='Number of communities (default: largest label)')
    graph_input.add_argument('--ref-time', type=int, default=1, help='Reference time step')
    graph_input.add_argument('--time', type=int, default=None,
                             help='Evaluated time step (default: last)')
    direction = graph_input.add_mutually_exclusive_group()
    direction.add_argument('--undirected', dest='undirected', action='store_true',
                           default=None,
                           help='Treat edges as undirected (default unless the edge '
                           'file header says directed)')
    direction.add_argument('--directed', dest='undirected', action='store_false',
                           default=None, help='Treat edges as directed')
    graph_input.add_argument('--allow-negative', action='store_true',
                             help='Accept negative weights; dynamics may leave [0, 1]')
    graph_input.add_argument('--label-policy', choices=('reference', 'latest'),
                             default='reference',
                             help='Which per-time label file to use for all steps')

    parser = argparse.ArgumentParser(prog='temporal-encoder', description=__doc__)
    subparsers = parser.add_subparsers(dest='command', required=True)

    embed = subparsers.add_parser('embed', parents=[common, graph_input],
                                  help='Temporal encoder embedding')
    embed.add_argument('--binary', action='store_true', help='Also write embedding.bin')

    dynamics = subparsers.add_parser('dynamics', parents=[common, graph_input],
                                     help='Vertex, community and graph dynamics')
    dynamics.add_argument('--embedding', default=None,
                          help='embedding.csv or the output directory of an embed run')
    dynamics.add_argument('--threshold-outlier', type=float,
                          default=DEFAULT_OUTLIER_THRESHOLD)
    dynamics.add_argument('--threshold-inlier', type=float, default=DEFAULT_INLIER_THRESHOLD)
    dynamics.add_argument('--bins', type=int, default=DEFAULT_BINS)
    dynamics.add_argument('--window', type=int, nargs=2, default=None,
                          metavar=('T_A', 'T_B'), help='Window of the maximum dynamic')
    dynamics.add_argument('--previous-step', action='store_true',
                          help='Compare every step with the one before it, not --ref-time')

    simulate = subparsers.add_parser('simulate', parents=[common],
                                     help='Generate a synthetic time-series graph')
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument('--params', default=None, help='YAML parameter file')
    source.add_argument('--preset', default=None,
                        help='Shipped preset: dcsbm_stability or outlier_injection')

    inject = subparsers.add_parser('inject-outliers', parents=[common, graph_input],
                                   help='Plant outlier vertices into a graph')
    inject.add_argument('--count', type=int, default=10)
    inject.add_argument('--injection-time', type=int, default=None)
    inject.add_argument('--mode', choices=OUTLIER_MODES, default='overwrite',
                        help='Overwrite existing edge weights or add new edges')
    inject.add_argument('--one-sided', action='store_true',
                        help='Write outlier weights on outgoing arcs only; output is directed')

    spectral = subparsers.add_parser('spectral', parents=[common, graph_input],
                                     help='Unfolded spectral embedding baseline')
    spectral.add_argument('--dim', type=int, default=DEFAULT_DIM)

    benchmark = subparsers.add_parser('benchmark', parents=[common],
                                      help='Timing table over a grid of sizes')
    benchmark.add_argument('--grid-n', type=int, nargs='+', required=True)
    benchmark.add_argument('--grid-t', type=int, nargs='+', required=True)
    benchmark.add_argument('--k', type=int, default=20)
    benchmark.add_argument('--replicates', type=int, default=10)
    benchmark.add_argument('--spectral', action='store_true',
                           help='Also time the spectral baseline')
    benchmark.add_argument('--dim', type=int, default=3)

    compare = subparsers.add_parser('compare', parents=[common, graph_input],
                                    help='Encoder dynamic and spectral distance rankings')
    compare.add_argument('--dim', type=int, default=DEFAULT_DIM)
    compare.add_argument('--planted', default=None,
                         help='outliers.yaml of planted vertices to score')
    return parser


def main(argv=None):
    """Run the command-line interface."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        config = RunConfig.from_args(args)
        return TemporalEncoderInterface(config).run()
    except TemporalEncoderError as exc:
        print(f'Error: {exc}', file=sys.stderr)
        return exc.exit_code


if __name__ == '__main__':
    sys.exit(main())
