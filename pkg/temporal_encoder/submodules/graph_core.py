# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Vertex registry, edgelists, label vectors and their text file formats."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from .exceptions import GraphIOError, ValidationError
from .graph_util import leading_comment, parse_integers, parse_reals, read_table, write_table

_LOGGER = logging.getLogger(__name__)

EDGE_COLUMNS = ('src', 'dst', 'weight')
LABEL_COLUMNS = ('vertex', 'community')
LABEL_POLICIES = ('reference', 'latest')
DIRECTION_HINTS = {'(undirected)': True, '(directed)': False}


def _frozen(values, dtype):
    array = np.asarray(values, dtype=dtype)
    if array.flags.writeable:
        array = array.copy()
        array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class VertexRegistry:
    """Bijection between external vertex tokens and dense internal indices."""

    tokens: tuple

    def __post_init__(self):
        index = pd.Index(self.tokens, dtype=object)
        if not index.is_unique:
            raise ValidationError('vertex tokens must be unique')
        object.__setattr__(self, '_index', index)

    @property
    def n(self):
        return len(self.tokens)

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self._index

    def __getitem__(self, token):
        """Return the internal index of an external token."""
        return int(self._index.get_loc(token))

    def token(self, index):
        """Return the external token registered at an internal index."""
        return self.tokens[index]

    def indexer(self, tokens):
        """Map a sequence of tokens to internal indices, -1 for unknown tokens."""
        return self._index.get_indexer(np.asarray(tokens, dtype=object))


def register_vertices(raw_ids, registry=None):
    """Register external tokens, extending `registry` when one is given.

    Tokens keep the order of their first appearance, so repeated tokens map to
    the index assigned on first sight and indices stay dense in [0, n).
    """
    raw_ids = np.asarray(raw_ids, dtype=object)
    if not raw_ids.size and registry is None:
        raise ValidationError('cannot register an empty vertex list')
    unique = pd.unique(raw_ids)
    if registry is None:
        return VertexRegistry(tuple(unique))
    unique = unique[registry.indexer(unique) < 0]
    return VertexRegistry(registry.tokens + tuple(unique))


@dataclass(frozen=True, eq=False)
class EdgeList:
    """Edgelist of one time step as parallel arrays of internal indices and weights."""

    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        src = _frozen(self.src, np.int64)
        dst = _frozen(self.dst, np.int64)
        weight = _frozen(self.weight, np.float64)
        if not src.shape == dst.shape == weight.shape or src.ndim != 1:
            raise ValidationError('edge columns must be one-dimensional and equally long')
        object.__setattr__(self, 'src', src)
        object.__setattr__(self, 'dst', dst)
        object.__setattr__(self, 'weight', weight)

    @classmethod
    def empty(cls):
        """Return an edgelist without edges."""
        return cls(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))

    def __len__(self):
        return self.src.shape[0]

    def rows(self):
        """Return the edges as a list of (source, target, weight) tuples."""
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))

    def with_weights(self, weight):
        """Return a copy with the same connectivity and new weights."""
        return EdgeList(self.src, self.dst, weight)


@dataclass(frozen=True, eq=False)
class TemporalGraph:
    """Weighted edgelists over T time steps sharing one vertex set of size n."""

    n: int
    edgelists: tuple
    undirected: bool = True

    def __post_init__(self):
        edgelists = tuple(self.edgelists)
        if not edgelists:
            raise ValidationError('a temporal graph needs at least one time step')
        for step, edges in enumerate(edgelists, start=1):
            if len(edges) == 0:
                continue
            low = min(edges.src.min(), edges.dst.min())
            high = max(edges.src.max(), edges.dst.max())
            if low < 0 or high >= self.n:
                raise ValidationError(
                    f'time step {step} has an endpoint outside [0, {self.n})')
        object.__setattr__(self, 'edgelists', edgelists)

    @property
    def T(self):
        return len(self.edgelists)

    @property
    def total_edges(self):
        return sum(len(edges) for edges in self.edgelists)

    def edges_at(self, t):
        """Return the edgelist of 1-based time step `t`."""
        if not 1 <= t <= self.T:
            raise ValidationError(f'time step {t} outside [1, {self.T}]')
        return self.edgelists[t - 1]

    def replace(self, t, edges):
        """Return a graph whose time step `t` carries `edges` instead."""
        self.edges_at(t)
        edgelists = list(self.edgelists)
        edgelists[t - 1] = edges
        return TemporalGraph(self.n, tuple(edgelists), self.undirected)

    def to_directed(self):
        """Return the graph with every undirected edge stored as two opposite arcs.

        Both the encoder rows and the adjacency blocks are unchanged by the
        conversion; an undirected self-loop becomes two loop arcs.
        """
        if not self.undirected:
            return self
        edgelists = tuple(
            EdgeList(np.concatenate([edges.src, edges.dst]),
                     np.concatenate([edges.dst, edges.src]),
                     np.concatenate([edges.weight, edges.weight]))
            for edges in self.edgelists)
        return TemporalGraph(self.n, edgelists, undirected=False)


@dataclass(frozen=True, eq=False)
class LabelVector:
    """Community of every vertex in {0, 1, ..., K}; 0 marks an unknown label."""

    labels: np.ndarray
    K: int

    def __post_init__(self):
        labels = _frozen(self.labels, np.int64)
        if self.K < 1:
            raise ValidationError(f'K must be at least 1, got {self.K}')
        if labels.ndim != 1:
            raise ValidationError('labels must be a one-dimensional array')
        if labels.size and (labels.min() < 0 or labels.max() > self.K):
            raise ValidationError(f'labels must lie in [0, {self.K}]')
        object.__setattr__(self, 'labels', labels)
        counts = np.bincount(labels, minlength=self.K + 1)
        counts.setflags(write=False)
        object.__setattr__(self, '_counts', counts)

    @property
    def n(self):
        return self.labels.shape[0]

    @property
    def class_counts(self):
        """Return n_k for k = 1..K as an array of length K."""
        return self._counts[1:]

    @property
    def unknown_count(self):
        return int(self._counts[0])

    def permuted(self, sigma):
        """Return labels relabelled by `sigma`, a permutation of 1..K given as a mapping."""
        table = np.zeros(self.K + 1, dtype=np.int64)
        for old, new in dict(sigma).items():
            table[old] = new
        return LabelVector(table[self.labels], self.K)


def ingest_edgelist(rows, registry, allow_negative=False, path=None):
    """Convert (source token, target token, weight) rows to an `EdgeList`.

    Row numbers in error messages are 1-based data rows: the frame index plus
    one for a frame read by `read_table`, positions in `rows` otherwise. Input
    order is preserved and duplicate pairs are kept, so they sum at embedding time.
    """
    if isinstance(rows, pd.DataFrame):
        src_tokens = rows['src'].to_numpy(dtype=object)
        dst_tokens = rows['dst'].to_numpy(dtype=object)
        weight_cells = rows['weight'].to_numpy()
        row_numbers = rows.index.to_numpy() + 1
    else:
        rows = list(rows)
        if not rows:
            return EdgeList.empty()
        src_tokens, dst_tokens, weight_cells = (
            np.asarray(column, dtype=object) for column in zip(*rows))
        row_numbers = np.arange(1, len(rows) + 1)
    if not src_tokens.size:
        return EdgeList.empty()

    src = registry.indexer(src_tokens)
    dst = registry.indexer(dst_tokens)
    unknown = np.flatnonzero((src < 0) | (dst < 0))
    if unknown.size:
        at = int(unknown[0])
        token = src_tokens[at] if src[at] < 0 else dst_tokens[at]
        raise ValidationError(_located(
            f'vertex {token!r} is not registered', path, row_numbers[at]))

    try:
        weight = parse_reals(weight_cells, path=path, rows=row_numbers)
    except GraphIOError as exc:
        raise ValidationError(str(exc)) from None
    bad = np.flatnonzero(~np.isfinite(weight))
    if bad.size:
        at = int(bad[0])
        raise ValidationError(_located(
            f'weight {float(weight[at])!r} is not finite', path, row_numbers[at]))
    if not allow_negative:
        negative = np.flatnonzero(weight < 0)
        if negative.size:
            at = int(negative[0])
            raise ValidationError(_located(
                f'weight {float(weight[at])!r} is negative; edge weights must be '
                'non-negative for dynamics to stay in [0, 1] (pass allow_negative to '
                'override)', path, row_numbers[at]))
    return EdgeList(src, dst, weight)


def _located(message, path, row):
    prefix = f'{path}, ' if path is not None else ''
    return f'{prefix}row {row}: {message}'


def load_labels(rows, registry, K):
    """Build a `LabelVector` from (vertex token, community) rows.

    Vertices missing from `rows` get label 0. A vertex listed twice must carry
    the same community both times.
    """
    labels = np.zeros(registry.n, dtype=np.int64)
    assigned = {}
    for row_number, (token, community) in enumerate(rows, start=1):
        try:
            community = int(str(community).strip())
        except ValueError:
            raise ValidationError(
                f'row {row_number}: community {community!r} is not an integer') from None
        if not 1 <= community <= K:
            raise ValidationError(
                f'row {row_number}: community {community} of vertex {token!r} '
                f'outside [1, {K}]')
        if token not in registry:
            raise ValidationError(f'row {row_number}: vertex {token!r} is not registered')
        previous = assigned.get(token)
        if previous is not None and previous != community:
            raise ValidationError(
                f'row {row_number}: vertex {token!r} labelled both {previous} '
                f'and {community}')
        assigned[token] = community
        labels[registry[token]] = community
    return LabelVector(labels, K)


def load_label_series(per_time_rows, registry, K, policy='reference', ref_time=1):
    """Collapse per-time label rows into the single label vector used for all steps.

    `policy` 'reference' keeps the labels of `ref_time`, 'latest' the last ones.
    Every vector is validated even though only one is returned.
    """
    if policy not in LABEL_POLICIES:
        raise ValidationError(f'unknown label policy {policy!r}')
    vectors = [load_labels(rows, registry, K) for rows in per_time_rows]
    if not vectors:
        raise ValidationError('no label vectors given')
    if policy == 'latest':
        return vectors[-1]
    if len(vectors) == 1:
        return vectors[0]
    if not 1 <= ref_time <= len(vectors):
        raise ValidationError(f'reference time {ref_time} outside [1, {len(vectors)}]')
    return vectors[ref_time - 1]


def infer_k(label_rows):
    """Return the largest community found in label rows."""
    communities = [int(str(community).strip()) for _, community in label_rows]
    if not communities:
        raise ValidationError('label file contains no rows; pass K explicitly')
    return max(communities)


def read_edge_frames(edge_paths):
    """Read edge files into one frame per time step.

    One path with a fourth `t` column splits by time; otherwise every path is
    one time step in the order given.
    """
    edge_paths = list(edge_paths)
    if not edge_paths:
        raise ValidationError('no edge files given')
    if len(edge_paths) == 1:
        path = edge_paths[0]
        frame = read_table(path, EDGE_COLUMNS, optional_columns=('t',), numeric=('weight',))
        if 't' in frame.columns:
            times = parse_integers(frame['t'].to_numpy(), what='time step', path=path)
            if times.size and times.min() < 1:
                row = int(np.flatnonzero(times < 1)[0]) + 1
                raise GraphIOError(f'time step {times[row - 1]} must be >= 1',
                                   path=path, row=row)
            T = int(times.max()) if times.size else 1
            frames = [frame.loc[times == t, list(EDGE_COLUMNS)]
                      for t in range(1, T + 1)]
            return frames, [path] * T
        return [frame], [path]
    frames = [read_table(path, EDGE_COLUMNS, numeric=('weight',)) for path in edge_paths]
    return frames, edge_paths


def read_label_rows(label_path):
    """Read a `vertex,community` file into a list of (token, community) rows."""
    frame = read_table(label_path, LABEL_COLUMNS)
    return list(zip(frame['vertex'].tolist(), frame['community'].tolist()))


def edge_file_direction(path):
    """Return the direction a `write_temporal_graph` header declares: True, False or None."""
    header = leading_comment(path)
    if not header:
        return None
    return DIRECTION_HINTS.get(header.split()[-1])


def read_temporal_graph(edge_paths, label_paths=(), undirected=None,
                        allow_negative=False, threads=1, registry=None):
    """Read edge and label files into a graph, its registry and raw label rows.

    The registry is built in one sequential pass, label files first and then
    every time step in order, extending `registry` when one is given. Edgelists
    are ingested concurrently afterwards. With `undirected` None the direction
    comes from the file headers: directed when any file says so, else undirected.
    """
    edge_paths = list(edge_paths)
    if undirected is None:
        hints = [edge_file_direction(path) for path in edge_paths]
        undirected = False not in hints
        _LOGGER.debug('Edge file headers give direction hints %s', hints)
    frames, sources = read_edge_frames(edge_paths)
    label_rows = [read_label_rows(path) for path in label_paths]

    parts = [np.asarray([token for token, _ in rows], dtype=object) for rows in label_rows]
    for frame in frames:
        # src and dst interleaved row by row
        parts.append(frame[['src', 'dst']].to_numpy(dtype=object).ravel())
    tokens = np.concatenate(parts) if parts else np.empty(0, dtype=object)
    if not tokens.size and registry is None:
        raise ValidationError('edge and label files contain no vertices')
    registry = register_vertices(tokens, registry)
    _LOGGER.info('Registered %d vertices over %d time steps', registry.n, len(frames))

    def ingest(item):
        frame, path = item
        return ingest_edgelist(frame, registry, allow_negative=allow_negative, path=path)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        edgelists = tuple(executor.map(ingest, zip(frames, sources)))
    graph = TemporalGraph(registry.n, edgelists, undirected)
    _LOGGER.info('Ingested %d edges', graph.total_edges)
    return graph, registry, label_rows


def write_temporal_graph(path, graph, registry):
    """Write every time step to one `src,dst,weight,t` file headed by its direction."""
    tokens = np.array(registry.tokens, dtype=object)
    columns = {name: [] for name in ('src', 'dst', 'weight', 't')}
    for t, edges in enumerate(graph.edgelists, start=1):
        columns['src'].append(tokens[edges.src])
        columns['dst'].append(tokens[edges.dst])
        columns['weight'].append(edges.weight)
        columns['t'].append(np.full(len(edges), t, dtype=np.int64))
    frame = pd.DataFrame({name: np.concatenate(parts) for name, parts in columns.items()})
    direction = 'undirected' if graph.undirected else 'directed'
    write_table(path, frame, comment=f'src,dst,weight,t ({direction})')


def write_labels(path, labels, registry):
    """Write the known labels as a `vertex,community` file."""
    known = np.flatnonzero(labels.labels > 0)
    frame = pd.DataFrame({
        'vertex': [registry.token(i) for i in known],
        'community': labels.labels[known],
    })
    write_table(path, frame, comment='vertex,community')
