# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

from concurrent.futures import ThreadPoolExecutor

from conftest import dense_embedding, dense_encoder, random_edges, random_graph, random_labels
import numpy as np
import pytest

from temporal_encoder.submodules.encoder import (
    build_encoder_matrix, embed_time_step, normalize_rows, read_embedding,
    read_embedding_binary, temporal_encoder_embedding, write_embedding,
    write_embedding_binary)
from temporal_encoder.submodules.exceptions import GraphIOError, ValidationError
from temporal_encoder.submodules.graph_core import (
    EdgeList, LabelVector, TemporalGraph, VertexRegistry)
from temporal_encoder.submodules.synth import generate_dcsbm, SbmParams


def test_encoder_matrix_matches_dense_definition(rng):
    labels = random_labels(rng, 40, 5, unknown=0.2)
    encoder = build_encoder_matrix(labels)
    assert np.array_equal(encoder.dense(), dense_encoder(labels))
    assert np.allclose(encoder.dense().sum(axis=0)[labels.class_counts > 0], 1.0)


def test_empty_community_gives_zero_column():
    encoder = build_encoder_matrix(LabelVector([1, 1, 3], 3))
    assert np.array_equal(encoder.dense()[:, 1], np.zeros(3))


def test_embedding_matches_dense_oracle(rng):
    for _ in range(100):
        n = int(rng.integers(2, 201))
        K = int(rng.integers(1, 9))
        labels = random_labels(rng, n, K, unknown=0.1)
        edges = random_edges(rng, n, int(rng.integers(0, 4 * n)))
        for undirected in (True, False):
            Z, _ = normalize_rows(embed_time_step(edges, build_encoder_matrix(labels),
                                                  undirected))
            assert np.allclose(Z, dense_embedding(edges, labels, undirected),
                               rtol=0, atol=1e-10)


def test_undirected_self_loop_counts_twice():
    labels = LabelVector([1, 2], 2)
    raw = embed_time_step(EdgeList([0], [0], [3.0]), build_encoder_matrix(labels))
    assert raw.tolist() == [[6.0, 0.0], [0.0, 0.0]]


def test_normalize_rows():
    Z, flags = normalize_rows(np.array([[3.0, 4.0], [0.0, 0.0]]))
    assert np.allclose(Z[0], [0.6, 0.8])
    assert Z[1].tolist() == [0.0, 0.0]
    assert flags.tolist() == [True, False]


def test_normalized_rows_have_unit_norm(rng):
    Z, flags = normalize_rows(rng.exponential(size=(200, 6)) * (rng.random((200, 1)) < 0.8))
    norms = np.linalg.norm(Z, axis=1)
    assert np.all(np.abs(norms[flags] - 1.0) <= 1e-12)
    assert np.all(norms[~flags] == 0)


def test_series_matches_oracle_per_step(rng):
    graph = random_graph(rng, 50, 3, 150)
    labels = random_labels(rng, 50, 4)
    series = temporal_encoder_embedding(graph, labels)
    assert (series.T, series.n, series.K) == (3, 50, 4)
    for t in range(1, 4):
        assert np.allclose(series.at(t), dense_embedding(graph.edges_at(t), labels),
                           rtol=0, atol=1e-10)


def test_weight_scaling_leaves_embedding_unchanged(rng):
    edges = random_edges(rng, 80, 300)
    labels = random_labels(rng, 80, 5)
    encoder = build_encoder_matrix(labels)
    Z, _ = normalize_rows(embed_time_step(edges, encoder))
    scaled, _ = normalize_rows(embed_time_step(edges.with_weights(edges.weight * 7.5), encoder))
    assert np.allclose(Z, scaled, rtol=0, atol=1e-10)


def test_label_permutation_permutes_columns(rng):
    edges = random_edges(rng, 60, 200)
    labels = random_labels(rng, 60, 4)
    sigma = {1: 3, 2: 4, 3: 1, 4: 2}
    Z, _ = normalize_rows(embed_time_step(edges, build_encoder_matrix(labels)))
    permuted, _ = normalize_rows(embed_time_step(edges, build_encoder_matrix(
        labels.permuted(sigma))))
    for old, new in sigma.items():
        assert np.allclose(permuted[:, new - 1], Z[:, old - 1], rtol=0, atol=1e-12)


def test_chunked_accumulation_is_deterministic(rng):
    edges = random_edges(rng, 100, 1000)
    encoder = build_encoder_matrix(random_labels(rng, 100, 6))
    whole = embed_time_step(edges, encoder)
    serial = embed_time_step(edges, encoder, chunk_size=64)
    with ThreadPoolExecutor(max_workers=4) as executor:
        threaded = embed_time_step(edges, encoder, chunk_size=64, executor=executor)
    assert np.array_equal(serial, threaded)
    assert np.allclose(whole, serial, rtol=1e-12, atol=1e-12)


def test_thread_count_does_not_change_result(rng):
    graph = random_graph(rng, 120, 5, 400)
    labels = random_labels(rng, 120, 3)
    one = temporal_encoder_embedding(graph, labels, threads=1)
    many = temporal_encoder_embedding(graph, labels, threads=4)
    assert np.array_equal(one.Z, many.Z)
    assert np.array_equal(one.normalized, many.normalized)


def test_isolated_vertex_is_flagged():
    graph = TemporalGraph(3, (EdgeList([0], [1], [1.0]),))
    series = temporal_encoder_embedding(graph, LabelVector([1, 2, 1], 2))
    assert series.normalized.tolist() == [[True, True, False]]
    assert series.at(1)[2].tolist() == [0.0, 0.0]


def test_embedding_rejects_mismatched_labels(rng):
    with pytest.raises(ValidationError):
        temporal_encoder_embedding(random_graph(rng, 5, 1, 4), LabelVector([1, 1], 1))


def test_text_round_trip(tmp_path, rng):
    graph = random_graph(rng, 30, 2, 40)
    series = temporal_encoder_embedding(graph, random_labels(rng, 30, 3))
    registry = VertexRegistry(tuple(f'node-{i}' for i in range(30)))
    path = str(tmp_path / 'embedding.csv')
    write_embedding(path, series, registry)
    again, again_registry = read_embedding(path)
    assert again_registry.tokens == registry.tokens
    assert np.array_equal(again.Z, series.Z)
    assert np.array_equal(again.normalized, series.normalized)


def test_binary_layout(tmp_path, rng):
    series = temporal_encoder_embedding(random_graph(rng, 10, 2, 20), random_labels(rng, 10, 2))
    path = tmp_path / 'embedding.bin'
    write_embedding_binary(str(path), series)
    data = path.read_bytes()
    assert np.frombuffer(data[:24], '<u8').tolist() == [10, 2, 2]
    assert len(data) == 24 + 8 * 10 * 2 * 2
    assert np.array_equal(read_embedding_binary(str(path)).Z, series.Z)
    path.write_bytes(data[:-8])
    with pytest.raises(GraphIOError):
        read_embedding_binary(str(path))


@pytest.mark.slow
def test_rows_converge_to_normalized_block_rows():
    B = np.array([[0.5, 0.1, 0.1], [0.1, 0.5, 0.1], [0.1, 0.1, 0.5]])
    target = B / np.linalg.norm(B, axis=1, keepdims=True)
    errors = []
    for n in (500, 2000, 4000):
        per_seed = []
        for seed in range(3):
            params = SbmParams.balanced(n, 3, within=0.5, between=0.1, seed=seed)
            edges, labels = generate_dcsbm(params)
            Z, _ = normalize_rows(embed_time_step(edges, build_encoder_matrix(labels)))
            gap = np.linalg.norm(Z - target[labels.labels - 1], axis=1)
            per_seed.append(gap.mean())
        errors.append(np.mean(per_seed))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 0.05
