# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

from conftest import dense_adjacency, random_graph
import numpy as np
import pandas as pd
import pytest
from scipy.linalg import subspace_angles

from temporal_encoder.submodules.exceptions import ScaleLimitError, ValidationError
from temporal_encoder.submodules.graph_core import EdgeList, TemporalGraph, VertexRegistry
from temporal_encoder.submodules.spectral import (
    adjacency_blocks, spectral_outlier_measure, unfolded_spectral_embed,
    write_spectral_embedding)


def _two_blocks(sizes=(15, 25)):
    src, dst, start = [], [], 0
    for size in sizes:
        members = range(start, start + size)
        src += [i for i in members for j in members if i < j]
        dst += [j for i in members for j in members if i < j]
        start += size
    return EdgeList(src, dst, np.ones(len(src)))


def _oracle(graph):
    unfolded = np.hstack([dense_adjacency(edges, graph.n, graph.undirected)
                          for edges in graph.edgelists])
    return np.linalg.svd(unfolded, full_matrices=False)


def test_adjacency_blocks_match_dense(rng):
    graph = random_graph(rng, 20, 2, 50)
    for edges, block in zip(graph.edgelists, adjacency_blocks(graph)):
        assert np.allclose(block.toarray(), dense_adjacency(edges, 20))


def test_block_graph_matches_dense_svd():
    graph = TemporalGraph(40, (_two_blocks(),))
    embedding = unfolded_spectral_embed(graph, d=2)
    U, S, _ = _oracle(graph)
    assert np.allclose(embedding.singular_values, S[:2], rtol=0, atol=1e-6)
    assert np.max(subspace_angles(embedding.anchor, U[:, :2])) < 1e-4


def test_random_graphs_match_dense_svd(rng):
    for _ in range(5):
        graph = random_graph(rng, 60, 3, 300)
        embedding = unfolded_spectral_embed(graph, d=4, seed=1)
        U, S, _ = _oracle(graph)
        assert np.allclose(embedding.singular_values, S[:4], rtol=0, atol=1e-6)
        if S[3] - S[4] > 1.0:
            assert np.max(subspace_angles(embedding.anchor, U[:, :4])) < 1e-4


def test_anchor_is_orthonormal(rng):
    embedding = unfolded_spectral_embed(random_graph(rng, 80, 2, 400), d=5)
    gram = embedding.anchor.T @ embedding.anchor
    assert np.allclose(gram, np.eye(5), rtol=0, atol=1e-8)


def test_per_time_embedding_is_block_of_right_factor(rng):
    graph = random_graph(rng, 30, 2, 100)
    embedding = unfolded_spectral_embed(graph, d=3)
    for t, edges in enumerate(graph.edgelists, start=1):
        expected = dense_adjacency(edges, 30).T @ embedding.anchor
        assert np.allclose(embedding.at(t), expected, rtol=0, atol=1e-8)


def test_identical_steps_embed_identically():
    edges = _two_blocks()
    embedding = unfolded_spectral_embed(TemporalGraph(40, (edges, edges, edges)), d=2)
    assert np.allclose(embedding.at(1), embedding.at(3), rtol=0, atol=1e-8)
    assert np.allclose(spectral_outlier_measure(embedding, 1, 2), 0.0, atol=1e-8)


def test_outlier_measure_matches_loop(rng):
    embedding = unfolded_spectral_embed(random_graph(rng, 25, 3, 80), d=3)
    measure = spectral_outlier_measure(embedding, 1, 3)
    for i in range(25):
        difference = embedding.at(3)[i] - embedding.at(1)[i]
        assert measure[i] == pytest.approx(np.sqrt(np.sum(difference ** 2)))


def test_full_dimension_uses_dense_path(rng):
    graph = random_graph(rng, 6, 2, 12)
    embedding = unfolded_spectral_embed(graph, d=6)
    _, S, _ = _oracle(graph)
    assert np.allclose(embedding.singular_values, S, rtol=0, atol=1e-10)


def test_empty_graph_gives_zero_embedding():
    graph = TemporalGraph(5, (EdgeList.empty(), EdgeList.empty()))
    embedding = unfolded_spectral_embed(graph, d=2)
    assert embedding.singular_values.tolist() == [0.0, 0.0]
    assert not np.any(embedding.per_time)


def test_limits():
    graph = TemporalGraph(50, (EdgeList([0], [1], [1.0]),))
    with pytest.raises(ScaleLimitError) as info:
        unfolded_spectral_embed(graph, d=2, max_n=10)
    assert info.value.exit_code == 2
    with pytest.raises(ValidationError):
        unfolded_spectral_embed(graph, d=0)


def test_write_tags_method(tmp_path, rng):
    embedding = unfolded_spectral_embed(random_graph(rng, 10, 2, 30), d=2)
    path = tmp_path / 'embedding.csv'
    write_spectral_embedding(str(path), embedding, VertexRegistry(tuple('abcdefghij')))
    frame = pd.read_csv(path)
    assert list(frame.columns) == ['t', 'vertex', 'z_1', 'z_2', 'normalized', 'method']
    assert set(frame['method']) == {'spectral'}
    assert len(frame) == 20
