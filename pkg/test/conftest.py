# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

import numpy as np
import pytest

from temporal_encoder.submodules.graph_core import EdgeList, LabelVector, TemporalGraph


def random_edges(rng, n, s, self_loops=True):
    src = rng.integers(0, n, size=s)
    dst = rng.integers(0, n, size=s)
    if not self_loops:
        dst = (src + rng.integers(1, n, size=s)) % n
    return EdgeList(src, dst, rng.uniform(0.0, 10.0, size=s))


def random_labels(rng, n, K, unknown=0.0):
    labels = rng.integers(1, K + 1, size=n)
    labels[rng.random(n) < unknown] = 0
    return LabelVector(labels, K)


def random_graph(rng, n, T, s, undirected=True):
    return TemporalGraph(n, tuple(random_edges(rng, n, s) for _ in range(T)), undirected)


def dense_adjacency(edges, n, undirected=True):
    A = np.zeros((n, n))
    for i, j, w in edges.rows():
        A[i, j] += w
        if undirected:
            A[j, i] += w
    return A


def dense_encoder(labels):
    W = np.zeros((labels.n, labels.K))
    counts = labels.class_counts
    for i, label in enumerate(labels.labels):
        if label > 0:
            W[i, label - 1] = 1.0 / counts[label - 1]
    return W


def dense_embedding(edges, labels, undirected=True):
    Z = dense_adjacency(edges, labels.n, undirected) @ dense_encoder(labels)
    norms = np.linalg.norm(Z, axis=1)
    Z[norms > 0] /= norms[norms > 0, None]
    return Z


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)
