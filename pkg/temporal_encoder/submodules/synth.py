# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Synthetic time-series graphs for validating the embedding and its dynamics.

The base graph is a (degree-corrected) stochastic block model, later steps
perturb a fixed share of the edge weights, and a few outlier vertices can be
planted at one step. All randomness comes from numpy's PCG64 generator seeded
through `SeedSequence`, so equal seeds give bit-identical graphs.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import logging
from pathlib import Path

import numpy as np
import yaml

from .exceptions import GraphIOError, ValidationError
from .graph_core import EdgeList, LabelVector, TemporalGraph

_LOGGER = logging.getLogger(__name__)

BLOCK_ROWS = 256
ASSIGNMENTS = ('round_robin', 'categorical')
OUTLIER_MODES = ('overwrite', 'add')
PRESET_DIR = Path(__file__).resolve().parent.parent / 'presets'


def _seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def child_seeds(seed, count):
    """Return `count` child seed sequences of `seed`."""
    # Children depend only on the parent's entropy and key, never on earlier spawns.
    parent = _seed_sequence(seed)
    return [np.random.SeedSequence(parent.entropy, spawn_key=parent.spawn_key + (index,))
            for index in range(count)]


def _check_range(pair, what, low=None):
    lo, hi = pair
    if lo > hi:
        raise ValidationError(f'{what} range [{lo}, {hi}] is empty')
    if low is not None and lo < low:
        raise ValidationError(f'{what} range must start at or above {low}')


@dataclass(frozen=True, eq=False)
class SbmParams:
    """Block model parameters; `degree` (alpha, beta) turns on Beta degree parameters."""

    n: int
    K: int
    B: np.ndarray
    degree: tuple = None
    theta: np.ndarray = None
    prior: tuple = None
    assignment: str = 'round_robin'
    weight_range: tuple = (1, 100)
    seed: object = 0

    def __post_init__(self):
        B = np.array(self.B, dtype=np.float64)
        object.__setattr__(self, 'B', B)
        if self.n < 1 or self.K < 1:
            raise ValidationError('n and K must be positive')
        if B.shape != (self.K, self.K):
            raise ValidationError(f'block matrix must be {self.K} x {self.K}')
        if not np.array_equal(B, B.T):
            raise ValidationError('block matrix must be symmetric')
        if B.min() < 0 or B.max() > 1:
            raise ValidationError('block probabilities must lie in [0, 1]')
        if self.assignment not in ASSIGNMENTS:
            raise ValidationError(f'unknown label assignment {self.assignment!r}')
        if self.prior is not None:
            prior = np.asarray(self.prior, dtype=np.float64)
            if prior.shape != (self.K,) or prior.min() < 0 or abs(prior.sum() - 1) > 1e-9:
                raise ValidationError('prior must hold K non-negative values summing to 1')
        if self.degree is not None and min(self.degree) <= 0:
            raise ValidationError('Beta degree parameters must be positive')
        if self.theta is not None:
            theta = np.array(self.theta, dtype=np.float64)
            if theta.shape != (self.n,) or theta.min() < 0:
                raise ValidationError('theta must hold n non-negative values')
            object.__setattr__(self, 'theta', theta)
        _check_range(self.weight_range, 'weight', low=0)

    @classmethod
    def balanced(cls, n, K, within, between, **kwargs):
        """Return parameters with `within` on the block diagonal and `between` elsewhere."""
        B = np.full((K, K), float(between))
        np.fill_diagonal(B, float(within))
        return cls(n=n, K=K, B=B, **kwargs)


@dataclass(frozen=True)
class EvolutionParams:
    """Weight perturbation rule applied from one time step to the next."""

    T: int
    change_fraction: float = 0.5
    perturbation: tuple = (-20.0, 20.0)
    clamp_at_zero: bool = True

    def __post_init__(self):
        if self.T < 1:
            raise ValidationError(f'T must be at least 1, got {self.T}')
        if not 0 <= self.change_fraction <= 1:
            raise ValidationError('change fraction must lie in [0, 1]')
        _check_range(self.perturbation, 'perturbation')


@dataclass(frozen=True)
class OutlierSpec:
    """Outlier vertices planted at one time step."""

    count: int = 10
    injection_time: int = None
    edges_per_outlier: tuple = (1, 2)
    weight_range: tuple = (500.0, 1000.0)
    seed: object = 0
    mode: str = 'overwrite'
    one_sided: bool = False

    def __post_init__(self):
        if self.count < 0:
            raise ValidationError('outlier count must be non-negative')
        if self.mode not in OUTLIER_MODES:
            raise ValidationError(f'unknown outlier mode {self.mode!r}')
        _check_range(self.edges_per_outlier, 'edges per outlier', low=1)
        _check_range(self.weight_range, 'outlier weight', low=0)


@dataclass(frozen=True)
class SimulationParams:
    """Everything a simulation run needs, as read from a parameter file."""

    sbm: SbmParams
    evolution: EvolutionParams
    outliers: OutlierSpec = None
    source: dict = field(default_factory=dict)


def assign_labels(n, K, prior=None, mode='round_robin', rng=None):
    """Return labels in 1..K, either round-robin or drawn i.i.d. from `prior`."""
    if mode == 'round_robin':
        return LabelVector(np.arange(n) % K + 1, K)
    if mode != 'categorical':
        raise ValidationError(f'unknown label assignment {mode!r}')
    rng = np.random.default_rng() if rng is None else rng
    p = None if prior is None else np.asarray(prior, dtype=np.float64)
    return LabelVector(rng.choice(K, size=n, p=p) + 1, K)


def sample_degree_params(n, alpha=1.0, beta=4.0, seed=None):
    """Return n i.i.d. Beta(alpha, beta) degree parameters."""
    if alpha <= 0 or beta <= 0:
        raise ValidationError('Beta parameters must be positive')
    return np.random.default_rng(_seed_sequence(seed)).beta(alpha, beta, size=n)


def _check_probabilities(B, theta, labels):
    column = labels.labels - 1
    top = np.zeros(labels.K)
    np.maximum.at(top, column, theta)
    worst = np.outer(top, top) * B
    if worst.max() > 1:
        row, col = np.unravel_index(int(np.argmax(worst)), worst.shape)
        raise ValidationError(
            f'edge probability theta_i * theta_j * B({row + 1},{col + 1}) = '
            f'{worst[row, col]:.6g} exceeds 1')


def _sample_block(start, seed, params, theta, column):
    n = params.n
    stop = min(start + BLOCK_ROWS, n)
    rng = np.random.default_rng(seed)
    rows = np.arange(start, stop)
    cols = np.arange(start + 1, n)
    if cols.size == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)
    probability = theta[rows, None] * theta[None, cols] * params.B[column[rows]][:, column[cols]]
    hit = (rng.random(probability.shape) < probability) & (cols[None, :] > rows[:, None])
    i, j = np.nonzero(hit)
    lo, hi = params.weight_range
    weight = rng.integers(int(lo), int(hi) + 1, size=i.size).astype(np.float64)
    return rows[i], cols[j], weight


def generate_dcsbm(params, threads=1):
    """Sample one undirected weighted graph and its labels from `params`.

    Every unordered pair i < j is drawn once with probability
    theta_i * theta_j * B(Y_i, Y_j); there are no self-loops. Pairs are sampled
    in blocks of BLOCK_ROWS rows, each with its own child seed, so the result
    does not depend on `threads`.
    """
    label_seed, theta_seed, pair_seed = child_seeds(params.seed, 3)
    labels = assign_labels(params.n, params.K, params.prior, params.assignment,
                           np.random.default_rng(label_seed))
    if params.theta is not None:
        theta = params.theta
    elif params.degree is not None:
        theta = sample_degree_params(params.n, *params.degree, seed=theta_seed)
    else:
        theta = np.ones(params.n)
    _check_probabilities(params.B, theta, labels)

    starts = range(0, params.n, BLOCK_ROWS)
    seeds = child_seeds(pair_seed, len(starts))
    column = labels.labels - 1

    def sample(item):
        return _sample_block(item[0], item[1], params, theta, column)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        blocks = list(executor.map(sample, zip(starts, seeds)))
    src = np.concatenate([block[0] for block in blocks])
    dst = np.concatenate([block[1] for block in blocks])
    weight = np.concatenate([block[2] for block in blocks])
    _LOGGER.info('Sampled %d edges among %d vertices in %d communities',
                 src.size, params.n, params.K)
    return EdgeList(src, dst, weight), labels


def evolve_weights(edges_prev, evolution, step_seed, return_selection=False):
    """Perturb a fixed share of the edge weights, keeping the edge set.

    Exactly round(change_fraction * s) edges, chosen without replacement, get a
    U[perturbation] increment; weights are then clamped at zero when requested.
    """
    s = len(edges_prev)
    if s == 0:
        raise ValidationError('cannot evolve an empty edgelist')
    rng = np.random.default_rng(_seed_sequence(step_seed))
    count = int(np.floor(evolution.change_fraction * s + 0.5))
    chosen = rng.choice(s, size=count, replace=False)
    weight = edges_prev.weight.copy()
    lo, hi = evolution.perturbation
    weight[chosen] += rng.uniform(lo, hi, size=count)
    if evolution.clamp_at_zero:
        np.maximum(weight, 0.0, out=weight)
    evolved = edges_prev.with_weights(weight)
    if return_selection:
        selection = np.zeros(s, dtype=bool)
        selection[chosen] = True
        return evolved, selection
    return evolved


def simulate_temporal_graph(sbm, evolution, threads=1):
    """Return a T-step graph grown from one block model sample and its labels."""
    base_seed, evolution_seed = child_seeds(sbm.seed, 2)
    edges, labels = generate_dcsbm(replace(sbm, seed=base_seed), threads=threads)
    edgelists = [edges]
    for step_seed in child_seeds(evolution_seed, evolution.T - 1):
        edgelists.append(evolve_weights(edgelists[-1], evolution, step_seed))
    _LOGGER.info('Simulated %d time steps', evolution.T)
    return TemporalGraph(sbm.n, tuple(edgelists), undirected=True), labels


def _neighbour_communities(sources, targets, labels, n):
    """Return the number of distinct known communities each vertex sends edges into."""
    K = labels.K
    community = labels.labels[targets]
    keep = community > 0
    pairs = np.unique(sources[keep] * (K + 1) + community[keep])
    return np.bincount(pairs // (K + 1), minlength=n)


def inject_outliers(graph, spec, labels=None):
    """Plant `spec.count` outlier vertices at one time step.

    Vertices are drawn uniformly without replacement among those with at least
    one edge at the injection time; any other draw is skipped and the draw moves
    on to the next candidate. Each outlier gets 1 or 2 (by default) of its edge
    weights replaced in 'overwrite' mode, or that many new edges to random
    non-neighbours in 'add' mode, with U[weight_range] values.

    With `spec.one_sided` the graph is first stored as opposite arc pairs and
    only the arcs leaving an outlier are written, so the outlier's own row moves
    while its partners' rows stay put. With `labels`, overwrite mode also skips
    vertices whose edges all lead into one community, and add mode prefers
    partners in communities the vertex does not reach yet.
    Return the new graph and the planted vertex indices.
    """
    t = graph.T if spec.injection_time is None else spec.injection_time
    graph.edges_at(t)
    if spec.count == 0:
        return graph, []
    if spec.count > graph.n:
        raise ValidationError(f'cannot plant {spec.count} outliers among {graph.n} vertices')
    if labels is not None and labels.n != graph.n:
        raise ValidationError(
            f'graph has {graph.n} vertices but the label vector has {labels.n}')
    if spec.one_sided:
        graph = graph.to_directed()
    rng = np.random.default_rng(_seed_sequence(spec.seed))
    edges = graph.edges_at(t)
    if graph.undirected:
        sources = np.concatenate([edges.src, edges.dst])
        targets = np.concatenate([edges.dst, edges.src])
    else:
        sources, targets = edges.src, edges.dst

    eligible = np.bincount(sources, minlength=graph.n) > 0
    if spec.mode == 'overwrite' and labels is not None:
        eligible &= _neighbour_communities(sources, targets, labels, graph.n) >= 2
    order = rng.permutation(graph.n)
    order = order[eligible[order]]
    if order.size < spec.count:
        raise ValidationError(
            f'only {order.size} vertices can carry outlier edges at time {t}')
    planted = order[:spec.count]

    weight = edges.weight.copy()
    extra_src, extra_dst, extra_weight = [], [], []
    lo_edges, hi_edges = spec.edges_per_outlier
    lo_weight, hi_weight = spec.weight_range
    for vertex in planted:
        wanted = int(rng.integers(lo_edges, hi_edges + 1))
        if spec.mode == 'overwrite':
            outgoing = edges.src == vertex
            if graph.undirected:
                outgoing |= edges.dst == vertex
            incident = np.flatnonzero(outgoing)
            picked = rng.choice(incident, size=min(wanted, incident.size), replace=False)
            weight[picked] = rng.uniform(lo_weight, hi_weight, size=picked.size)
            continue
        neighbours = np.union1d(edges.dst[edges.src == vertex], edges.src[edges.dst == vertex])
        candidates = np.setdiff1d(np.arange(graph.n), np.append(neighbours, vertex))
        if labels is not None:
            candidates = candidates[labels.labels[candidates] > 0]
            reached = labels.labels[targets[sources == vertex]]
            fresh = candidates[~np.isin(labels.labels[candidates], reached)]
            if fresh.size:
                candidates = fresh
        partners = rng.choice(candidates, size=min(wanted, candidates.size), replace=False)
        extra_src.extend([int(vertex)] * partners.size)
        extra_dst.extend(partners.tolist())
        extra_weight.extend(rng.uniform(lo_weight, hi_weight, size=partners.size).tolist())

    injected = EdgeList(np.concatenate([edges.src, np.asarray(extra_src, np.int64)]),
                        np.concatenate([edges.dst, np.asarray(extra_dst, np.int64)]),
                        np.concatenate([weight, np.asarray(extra_weight, np.float64)]))
    _LOGGER.info('Planted %d outliers at time step %d (%s, %s)', planted.size, t, spec.mode,
                 'one-sided' if spec.one_sided else 'both endpoints')
    return graph.replace(t, injected), planted.tolist()


def random_edgelist(n, s, seed=None, weight_range=(1, 100)):
    """Return s uniformly random edges without self-loops and integer weights."""
    if n < 2:
        raise ValidationError('a random edgelist needs at least two vertices')
    rng = np.random.default_rng(_seed_sequence(seed))
    src = rng.integers(0, n, size=s)
    dst = (src + rng.integers(1, n, size=s)) % n
    lo, hi = weight_range
    weight = rng.integers(int(lo), int(hi) + 1, size=s).astype(np.float64)
    return EdgeList(src, dst, weight)


def _block_matrix(K, block):
    if 'matrix' in block:
        return np.asarray(block['matrix'], dtype=np.float64)
    B = np.full((K, K), float(block['between']))
    np.fill_diagonal(B, float(block['within']))
    return B


def params_from_mapping(mapping):
    """Build `SimulationParams` from a parsed parameter file."""
    try:
        sbm = dict(mapping['sbm'])
        evolution = dict(mapping.get('evolution') or {'T': 1})
        outliers = mapping.get('outliers')
        degree = sbm.get('degree')
        sbm_params = SbmParams(
            n=int(sbm['n']), K=int(sbm['K']),
            B=_block_matrix(int(sbm['K']), sbm['block']),
            degree=None if degree is None else (float(degree['alpha']), float(degree['beta'])),
            prior=None if sbm.get('prior') is None else tuple(sbm['prior']),
            assignment=sbm.get('assignment', 'round_robin'),
            weight_range=tuple(sbm.get('weight_range', (1, 100))),
            seed=int(sbm.get('seed', 0)))
        evolution_params = EvolutionParams(
            T=int(evolution['T']),
            change_fraction=float(evolution.get('change_fraction', 0.5)),
            perturbation=tuple(float(v) for v in evolution.get('perturbation', (-20, 20))),
            clamp_at_zero=bool(evolution.get('clamp_at_zero', True)))
        outlier_spec = None
        if outliers:
            outlier_spec = OutlierSpec(
                count=int(outliers.get('count', 10)),
                injection_time=outliers.get('injection_time'),
                edges_per_outlier=tuple(outliers.get('edges_per_outlier', (1, 2))),
                weight_range=tuple(float(v) for v in outliers.get('weight_range', (500, 1000))),
                seed=int(outliers.get('seed', 0)),
                mode=outliers.get('mode', 'overwrite'),
                one_sided=bool(outliers.get('one_sided', False)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f'invalid simulation parameters: {exc!r}') from exc
    return SimulationParams(sbm_params, evolution_params, outlier_spec, dict(mapping))


def preset_path(name):
    """Return the path of a shipped parameter preset."""
    path = PRESET_DIR / f'{name}.yaml'
    if not path.is_file():
        available = ', '.join(sorted(p.stem for p in PRESET_DIR.glob('*.yaml')))
        raise ValidationError(f'unknown preset {name!r}; available: {available}')
    return path


def load_params(path):
    """Read a YAML parameter file into `SimulationParams`."""
    try:
        with open(path, 'r', encoding='utf-8') as params_file:
            mapping = yaml.safe_load(params_file)
    except OSError as exc:
        raise GraphIOError(f'cannot read parameter file ({exc.strerror})', path=path) from exc
    except yaml.YAMLError as exc:
        raise GraphIOError(f'malformed parameter file ({exc})', path=path) from exc
    if not isinstance(mapping, dict):
        raise ValidationError(f'{path}: parameter file must hold a mapping')
    return params_from_mapping(mapping)
