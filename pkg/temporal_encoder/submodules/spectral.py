# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Unfolded spectral embedding baseline.

The unfolding [A_1 | ... | A_T] is an n x nT operator. Its top-d singular
triplets come from ARPACK through `scipy.sparse.linalg.svds`, driven by
products that stream over the per-time sparse adjacency blocks; the unfolding
itself is never formed.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, svds

from .exceptions import ConvergenceError, ScaleLimitError, ValidationError
from .encoder import embedding_frame
from .graph_util import write_table

_LOGGER = logging.getLogger(__name__)

DEFAULT_DIM = 10
DEFAULT_TOL = 1e-8
MAX_VERTICES = 20000
DENSE_LIMIT = 2000


@dataclass(frozen=True, eq=False)
class UnfoldedEmbedding:
    """Anchor U (n x d), singular values and per-time embeddings A_t^T U (T x n x d)."""

    singular_values: np.ndarray
    anchor: np.ndarray
    per_time: np.ndarray

    @property
    def d(self):
        return self.anchor.shape[1]

    @property
    def T(self):
        return self.per_time.shape[0]

    @property
    def n(self):
        return self.anchor.shape[0]

    def at(self, t):
        """Return the n x d embedding of 1-based time step `t`."""
        if not 1 <= t <= self.T:
            raise ValidationError(f'time step {t} outside [1, {self.T}]')
        return self.per_time[t - 1]


def adjacency_blocks(graph):
    """Return the sparse adjacency of every time step, symmetrized when undirected.

    Duplicate edges sum; an undirected self-loop lands twice on the diagonal, as
    in the encoder's two-sided update.
    """
    blocks = []
    for edges in graph.edgelists:
        block = sparse.coo_matrix((edges.weight, (edges.src, edges.dst)),
                                  shape=(graph.n, graph.n)).tocsr()
        if graph.undirected:
            block = (block + block.T).tocsr()
        blocks.append(block)
    return blocks


class _UnfoldedOperator(LinearOperator):
    """Implicit [A_1 | ... | A_T] with products over time blocks."""

    def __init__(self, blocks, executor=None):
        n = blocks[0].shape[0]
        super().__init__(dtype=np.float64, shape=(n, n * len(blocks)))
        self._blocks = blocks
        self._transposed = [block.T.tocsr() for block in blocks]
        self._executor = executor

    def _map(self, func, items):
        if self._executor is None:
            return list(map(func, items))
        return list(self._executor.map(func, items))

    def _matmat(self, X):
        n = self.shape[0]
        parts = self._map(lambda step: self._blocks[step] @ X[step * n:(step + 1) * n],
                          range(len(self._blocks)))
        total = np.zeros((n, X.shape[1]), dtype=np.float64)
        for part in parts:
            total += part
        return total

    def _matvec(self, x):
        return self._matmat(x.reshape(-1, 1)).ravel()

    def _rmatmat(self, Y):
        return np.vstack(self._map(lambda block: block @ Y, self._transposed))

    def _rmatvec(self, y):
        return self._rmatmat(y.reshape(-1, 1)).ravel()


def _eigen_residual(operator, values, vectors):
    try:
        gram = operator.matmat(operator.rmatmat(vectors))
        return float(np.max(np.linalg.norm(gram - vectors * values[None, :], axis=0)))
    except (ValueError, TypeError):
        return float('nan')


def _zero_embedding(n, T, d):
    anchor = np.eye(n, d)
    return UnfoldedEmbedding(np.zeros(d), anchor, np.zeros((T, n, d)))


def unfolded_spectral_embed(graph, d=DEFAULT_DIM, tol=DEFAULT_TOL, maxiter=None, seed=0,
                            max_n=MAX_VERTICES, threads=1):
    """Return the top-d unfolded spectral embedding of `graph`.

    The per-time embedding of step t is A_t^T U, the t-th block of V S. The
    iteration is capped at `maxiter` (default max(1000, 10 n)) restarts.
    """
    n, T = graph.n, graph.T
    if not 1 <= d <= n:
        raise ValidationError(f'dimension {d} outside [1, {n}]')
    if max_n is not None and n > max_n:
        raise ScaleLimitError(
            f'{n} vertices exceed the spectral baseline limit of {max_n}; '
            'use the encoder embedding for graphs of this size')
    blocks = adjacency_blocks(graph)
    if all(block.nnz == 0 or not np.any(block.data) for block in blocks):
        _LOGGER.info('Graph carries no weight; spectral embedding is zero')
        return _zero_embedding(n, T, d)

    if d >= n:
        if n > DENSE_LIMIT:
            raise ValidationError(f'dimension {d} needs a dense SVD of {n} vertices')
        unfolded = np.hstack([block.toarray() for block in blocks])
        U, S, _ = np.linalg.svd(unfolded, full_matrices=False)
        anchor, values = U[:, :d], S[:d]
    else:
        maxiter = max(1000, 10 * n) if maxiter is None else maxiter
        v0 = np.random.default_rng(seed).standard_normal(n)
        with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            operator = _UnfoldedOperator(blocks, executor if threads > 1 else None)
            try:
                U, S, _ = svds(operator, k=d, tol=tol, maxiter=maxiter, v0=v0,
                               solver='arpack')
            except ArpackNoConvergence as exc:
                residual = _eigen_residual(operator, exc.eigenvalues, exc.eigenvectors)
                raise ConvergenceError(
                    f'ARPACK did not reach tolerance {tol:g} within {maxiter} iterations; '
                    f'{len(exc.eigenvalues)} of {d} values converged, largest residual '
                    f'{residual:.3g}', residual=residual, iterations=maxiter) from exc
        order = np.argsort(-S, kind='stable')
        anchor, values = U[:, order], S[order]

    anchor = np.ascontiguousarray(anchor)
    per_time = np.stack([block.T @ anchor for block in blocks])
    _LOGGER.info('Unfolded spectral embedding: n=%d, T=%d, d=%d, top singular value %.6g',
                 n, T, d, values[0])
    return UnfoldedEmbedding(values, anchor, per_time)


def spectral_outlier_measure(embedding, ref_time, t):
    """Return the per-vertex Euclidean distance between steps `t` and `ref_time`."""
    return np.linalg.norm(embedding.at(t) - embedding.at(ref_time), axis=1)


def write_spectral_embedding(path, embedding, registry):
    """Write the per-time embeddings in the embedding text layout tagged 'spectral'."""
    normalized = np.linalg.norm(embedding.per_time, axis=2) > 0
    write_table(path, embedding_frame(embedding.per_time, normalized, registry, 'spectral'))
