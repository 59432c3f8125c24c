# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Temporal encoder embedding computed by iterating over edgelists.

Every time step is embedded as Z_t = A_t W, where W is the one-hot label
matrix with each column divided by its class size, and each non-zero row of
Z_t is then scaled to unit Euclidean norm. The adjacency A_t is never built:
one pass over the edges accumulates Z_t directly, so the whole series costs
O(nKT + sum of edge counts).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from .exceptions import GraphIOError, ValidationError
from .graph_core import LabelVector, VertexRegistry
from .graph_util import parse_integers, parse_reals, read_table, write_table

_LOGGER = logging.getLogger(__name__)

_BINARY_HEADER = np.dtype('<u8')
_BINARY_VALUES = np.dtype('<f8')


@dataclass(frozen=True, eq=False)
class EncoderMatrix:
    """Column-normalized one-hot matrix stored as one (label, 1/n_label) per vertex."""

    labels: LabelVector

    def __post_init__(self):
        counts = self.labels.class_counts
        column = self.labels.labels - 1
        known = column >= 0
        values = np.zeros(self.labels.n, dtype=np.float64)
        values[known] = 1.0 / counts[column[known]]
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'column', column)

    @property
    def n(self):
        return self.labels.n

    @property
    def K(self):
        return self.labels.K

    def dense(self):
        """Return W as a dense n x K array."""
        matrix = np.zeros((self.n, self.K), dtype=np.float64)
        known = np.flatnonzero(self.column >= 0)
        matrix[known, self.column[known]] = self.values[known]
        return matrix


@dataclass(frozen=True, eq=False)
class EmbeddingSeries:
    """Row-normalized embeddings Z_t stacked as a T x n x K array."""

    Z: np.ndarray
    normalized: np.ndarray

    def __post_init__(self):
        if self.Z.ndim != 3 or self.normalized.shape != self.Z.shape[:2]:
            raise ValidationError('embedding must be T x n x K with T x n flags')
        self.Z.setflags(write=False)
        self.normalized.setflags(write=False)

    @property
    def T(self):
        return self.Z.shape[0]

    @property
    def n(self):
        return self.Z.shape[1]

    @property
    def K(self):
        return self.Z.shape[2]

    def at(self, t):
        """Return the n x K embedding of 1-based time step `t`."""
        if not 1 <= t <= self.T:
            raise ValidationError(f'time step {t} outside [1, {self.T}]')
        return self.Z[t - 1]


def build_encoder_matrix(labels):
    """Return the encoder matrix W of a label vector.

    Vertex i with label k > 0 holds 1/n_k in column k; label 0 rows stay zero and
    communities without members give an all-zero column.
    """
    if labels.K < 1:
        raise ValidationError('K must be at least 1')
    return EncoderMatrix(labels)


def _accumulate(src, dst, weight, encoder, undirected):
    n, K = encoder.n, encoder.K
    column = encoder.column
    flat = np.zeros(n * K, dtype=np.float64)

    # Z(u, Y(v)) += W(v, Y(v)) * w
    target = column[dst]
    keep = target >= 0
    flat += np.bincount(src[keep] * K + target[keep],
                        weights=weight[keep] * encoder.values[dst[keep]],
                        minlength=n * K)
    if undirected:
        # Z(v, Y(u)) += W(u, Y(u)) * w
        source = column[src]
        keep = source >= 0
        flat += np.bincount(dst[keep] * K + source[keep],
                            weights=weight[keep] * encoder.values[src[keep]],
                            minlength=n * K)
    return flat.reshape(n, K)


def embed_time_step(edges, encoder, undirected=True, chunk_size=None, executor=None):
    """Return the un-normalized embedding A_t W of one edgelist.

    With `chunk_size`, edges are split into fixed-size chunks accumulated into
    private buffers that are summed in chunk order, optionally on `executor`.
    A self-loop in undirected mode receives both updates.
    """
    if len(edges) and max(edges.src.max(), edges.dst.max()) >= encoder.n:
        raise ValidationError(f'edge endpoint outside [0, {encoder.n})')
    if chunk_size is None or len(edges) <= chunk_size:
        return _accumulate(edges.src, edges.dst, edges.weight, encoder, undirected)
    if chunk_size < 1:
        raise ValidationError(f'chunk size must be positive, got {chunk_size}')

    bounds = range(0, len(edges), chunk_size)

    def chunk(start):
        stop = start + chunk_size
        return _accumulate(edges.src[start:stop], edges.dst[start:stop],
                           edges.weight[start:stop], encoder, undirected)

    parts = executor.map(chunk, bounds) if executor is not None else map(chunk, bounds)
    total = np.zeros((encoder.n, encoder.K), dtype=np.float64)
    for part in parts:
        total += part
    return total


def normalize_rows(Z):
    """Scale every row with positive Euclidean norm to unit norm.

    Return the normalized copy and a boolean flag per row; zero rows are left
    untouched and flagged False.
    """
    Z = np.array(Z, dtype=np.float64)
    norms = np.linalg.norm(Z, axis=1)
    flags = norms > 0
    Z[flags] /= norms[flags, None]
    return Z, flags


def temporal_encoder_embedding(graph, labels, threads=1, chunk_size=None):
    """Embed every time step of `graph` with one label vector.

    Time steps run on a thread pool of `threads` workers and are stored by
    index, so the result does not depend on the thread count.
    """
    if graph.n != labels.n:
        raise ValidationError(
            f'graph has {graph.n} vertices but the label vector has {labels.n}')
    encoder = build_encoder_matrix(labels)
    Z = np.empty((graph.T, graph.n, labels.K), dtype=np.float64)
    normalized = np.empty((graph.T, graph.n), dtype=bool)

    def embed(step):
        raw = embed_time_step(graph.edgelists[step], encoder, graph.undirected, chunk_size)
        Z[step], normalized[step] = normalize_rows(raw)
        _LOGGER.debug('Embedded time step %d (%d edges)', step + 1, len(graph.edgelists[step]))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        list(executor.map(embed, range(graph.T)))
    _LOGGER.info('Embedded %d time steps of %d vertices into %d dimensions',
                 graph.T, graph.n, labels.K)
    return EmbeddingSeries(Z, normalized)


def embedding_frame(Z, normalized, registry, method=None):
    """Return a T x n x d array as a long table with one row per (t, vertex)."""
    T, n, d = Z.shape
    frame = pd.DataFrame({
        't': np.repeat(np.arange(1, T + 1), n),
        'vertex': np.tile(np.array(registry.tokens, dtype=object), T),
    })
    values = Z.reshape(T * n, d)
    for k in range(d):
        frame[f'z_{k + 1}'] = values[:, k]
    frame['normalized'] = normalized.reshape(T * n).astype(np.int64)
    if method is not None:
        frame['method'] = method
    return frame


def write_embedding(path, series, registry, method=None):
    """Write an embedding series as `t,vertex,z_1..z_K,normalized` text."""
    write_table(path, embedding_frame(series.Z, series.normalized, registry, method))


def read_embedding(path):
    """Read an embedding text file back into a series and its vertex registry."""
    frame = read_table(path, ('t', 'vertex', 'normalized'), header=True)
    z_columns = [name for name in frame.columns if name.startswith('z_')]
    if not z_columns or frame.empty:
        raise GraphIOError('no embedding values found', path=path)
    times = parse_integers(frame['t'].to_numpy(), what='time step', path=path)
    T = int(times.max())
    registry = VertexRegistry(tuple(pd.unique(frame['vertex'])))
    if len(frame) != T * registry.n:
        raise GraphIOError(
            f'expected {T} x {registry.n} rows, found {len(frame)}', path=path)
    rows = (times - 1) * registry.n + registry.indexer(frame['vertex'])
    Z = np.zeros((T * registry.n, len(z_columns)), dtype=np.float64)
    flags = np.zeros(T * registry.n, dtype=bool)
    for k, name in enumerate(z_columns):
        Z[rows, k] = parse_reals(frame[name].to_numpy(), what=name, path=path)
    flags[rows] = parse_integers(frame['normalized'].to_numpy(), path=path) > 0
    return (EmbeddingSeries(Z.reshape(T, registry.n, -1), flags.reshape(T, registry.n)),
            registry)


def write_embedding_binary(path, series):
    """Write n, K, T as little-endian uint64 followed by T*n*K little-endian float64."""
    header = np.array([series.n, series.K, series.T], dtype=_BINARY_HEADER)
    try:
        with open(path, 'wb') as binary_file:
            binary_file.write(header.tobytes())
            binary_file.write(np.ascontiguousarray(series.Z, dtype=_BINARY_VALUES).tobytes())
    except OSError as exc:
        raise GraphIOError(f'cannot write file ({exc.strerror})', path=path) from exc


def read_embedding_binary(path):
    """Read the flat binary layout written by `write_embedding_binary`."""
    try:
        with open(path, 'rb') as binary_file:
            data = binary_file.read()
    except OSError as exc:
        raise GraphIOError(f'cannot read file ({exc.strerror})', path=path) from exc
    header_size = 3 * _BINARY_HEADER.itemsize
    if len(data) < header_size:
        raise GraphIOError('truncated header', path=path)
    n, K, T = (int(value) for value in np.frombuffer(data[:header_size], _BINARY_HEADER))
    values = np.frombuffer(data[header_size:], _BINARY_VALUES)
    if values.size != T * n * K:
        raise GraphIOError(f'expected {T * n * K} values, found {values.size}', path=path)
    Z = values.reshape(T, n, K).copy()
    return EmbeddingSeries(Z, np.linalg.norm(Z, axis=2) > 0)
