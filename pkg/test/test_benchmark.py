# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

import numpy as np
import pandas as pd
import pytest

from temporal_encoder.submodules.benchmark import (
    benchmark_graph, loglog_slope, run_benchmark, time_replicates, write_benchmark)
from temporal_encoder.submodules.exceptions import ValidationError


def test_benchmark_graph_size():
    graph = benchmark_graph(200, 3, average_degree=10, seed=1)
    assert graph.T == 3
    assert graph.total_edges == 3 * 1000
    again = benchmark_graph(200, 3, average_degree=10, seed=1)
    assert np.array_equal(graph.edges_at(2).src, again.edges_at(2).src)


def test_time_replicates_counts_calls():
    calls = []
    seconds = time_replicates(lambda: calls.append(1), 4)
    assert len(seconds) == 4 and len(calls) == 4
    assert min(seconds) >= 0


def test_run_benchmark_grid(tmp_path):
    cells = run_benchmark([100, 200], [2], K=5, replicates=2, include_spectral=True,
                          average_degree=6)
    assert [(cell.n, cell.method) for cell in cells] == [
        (100, 'encoder'), (100, 'spectral'), (200, 'encoder'), (200, 'spectral')]
    assert all(cell.replicates == 2 and cell.mean_seconds > 0 for cell in cells)
    path = tmp_path / 'benchmark.csv'
    write_benchmark(str(path), cells)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ['n', 'T', 'K', 'edges', 'method', 'mean_seconds',
                                   'std_seconds', 'replicates']
    with pytest.raises(ValidationError):
        run_benchmark([100], [1], replicates=0)


def test_loglog_slope():
    sizes = np.array([1000, 2000, 4000, 8000])
    assert loglog_slope(sizes, 3e-6 * sizes) == pytest.approx(1.0)
    assert loglog_slope(sizes, 1e-9 * sizes ** 2) == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        loglog_slope([10], [1.0])
