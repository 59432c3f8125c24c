# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Statistical and scaling checks on synthetic graphs; deselect with -m "not slow"."""

from dataclasses import replace
import time

import numpy as np
import pytest

from temporal_encoder.submodules.benchmark import benchmark_graph, loglog_slope, run_benchmark
from temporal_encoder.submodules.dynamics import (
    graph_dynamic, inactive_mask, outlier_recall, rank_by_dynamic, vertex_dynamic)
from temporal_encoder.submodules.encoder import temporal_encoder_embedding
from temporal_encoder.submodules.graph_core import (
    read_temporal_graph, TemporalGraph, VertexRegistry, write_temporal_graph)
from temporal_encoder.submodules.spectral import (
    spectral_outlier_measure, unfolded_spectral_embed)
from temporal_encoder.submodules.synth import (
    generate_dcsbm, inject_outliers, load_params, preset_path, SbmParams,
    simulate_temporal_graph)


def _two_step_graph(first, second):
    edges_1, labels = generate_dcsbm(first)
    edges_2, _ = generate_dcsbm(second)
    return TemporalGraph(first.n, (edges_1, edges_2)), labels


@pytest.mark.slow
def test_scaled_connectivity_keeps_vertices_still():
    first = SbmParams.balanced(2000, 4, within=0.5, between=0.1, seed=1)
    second = SbmParams.balanced(2000, 4, within=0.25, between=0.05, seed=2)
    graph, labels = _two_step_graph(first, second)
    series = temporal_encoder_embedding(graph, labels)
    means = graph_dynamic(vertex_dynamic(series), inactive_mask(series))
    assert means[1] < 0.02


@pytest.mark.slow
def test_disjoint_connectivity_turns_vertices_orthogonal():
    K = 4
    first = SbmParams(n=2000, K=K, B=np.eye(K) * 0.2, seed=1)
    shifted = np.zeros((K, K))
    for k in range(K):
        shifted[k, (k + 2) % K] = 0.2
    second = SbmParams(n=2000, K=K, B=shifted, seed=2)
    graph, labels = _two_step_graph(first, second)
    series = temporal_encoder_embedding(graph, labels)
    means = graph_dynamic(vertex_dynamic(series), inactive_mask(series))
    assert means[1] > 0.98


@pytest.mark.slow
def test_planted_outliers_rank_above_spectral_baseline():
    params = load_params(preset_path('outlier_injection'))
    encoder_recall = {10: [], 50: []}
    spectral_recall = {10: [], 50: []}
    for seed in range(10):
        graph, labels = simulate_temporal_graph(replace(params.sbm, seed=seed),
                                                params.evolution)
        graph, planted = inject_outliers(graph, replace(params.outliers, seed=100 + seed),
                                         labels)
        series = temporal_encoder_embedding(graph, labels)
        ranking = rank_by_dynamic(vertex_dynamic(series), graph.T, inactive_mask(series))
        embedding = unfolded_spectral_embed(graph, d=10, seed=seed)
        baseline = rank_by_dynamic(spectral_outlier_measure(embedding, 1, graph.T))
        for k in (10, 50):
            encoder_recall[k].append(outlier_recall(ranking, planted, k))
            spectral_recall[k].append(outlier_recall(baseline, planted, k))
    assert np.mean(encoder_recall[10]) >= 0.7
    assert np.mean(encoder_recall[50]) >= 0.9
    for k in (10, 50):
        assert np.mean(encoder_recall[k]) > np.mean(spectral_recall[k])


@pytest.mark.slow
def test_weight_drift_grows_slowly():
    sbm = SbmParams.balanced(5000, 20, within=0.5, between=0.1, degree=(1, 4), seed=0)
    params = load_params(preset_path('dcsbm_stability'))
    graph, labels = simulate_temporal_graph(sbm, replace(params.evolution, T=24))
    series = temporal_encoder_embedding(graph, labels)
    values, inactive = vertex_dynamic(series), inactive_mask(series)
    means = graph_dynamic(values, inactive)
    assert means[0] == 0.0
    assert means[1] < 0.005
    active = ~inactive[-1]
    assert np.mean(values[-1][active] > 0.25) < 0.02
    moving = np.convolve(means[1:], np.ones(5) / 5, mode='valid')
    assert moving[-1] > moving[0]
    assert np.all(np.diff(moving) > -1e-3)


@pytest.mark.slow
def test_encoder_time_grows_linearly():
    grid = [5000, 10000, 20000, 40000]
    cells = run_benchmark(grid, [3], K=20, replicates=10)
    slope = loglog_slope(grid, [cell.mean_seconds for cell in cells])
    assert 0.8 <= slope <= 1.3


@pytest.mark.slow
def test_encoder_is_faster_than_spectral():
    cells = run_benchmark([5000, 10000], [3], K=20, replicates=3, include_spectral=True)
    for encoder, spectral in zip(cells[::2], cells[1::2]):
        assert encoder.method == 'encoder' and spectral.method == 'spectral'
        assert encoder.mean_seconds < spectral.mean_seconds


@pytest.mark.slow
def test_ingest_keeps_pace_with_large_files(tmp_path):
    registry = VertexRegistry(tuple(f'v{i}' for i in range(100000)))
    graph = benchmark_graph(100000, 2, average_degree=20, seed=4)
    path = str(tmp_path / 'edges.csv')
    write_temporal_graph(path, graph, registry)
    start = time.perf_counter()
    again, _, _ = read_temporal_graph([path], registry=registry)
    seconds = time.perf_counter() - start
    assert again.total_edges == graph.total_edges == 2000000
    assert np.array_equal(again.edges_at(2).weight, graph.edges_at(2).weight)
    assert seconds < 20.0
