# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Wall-clock timing of the encoder and spectral embeddings over a grid of graph sizes."""

from dataclasses import asdict, dataclass
import itertools
import logging
import time

import numpy as np
import pandas as pd

from .encoder import temporal_encoder_embedding
from .exceptions import ValidationError
from .graph_core import TemporalGraph
from .graph_util import write_table
from .spectral import unfolded_spectral_embed
from .synth import assign_labels, child_seeds, random_edgelist

_LOGGER = logging.getLogger(__name__)

DEFAULT_AVERAGE_DEGREE = 20


@dataclass(frozen=True)
class BenchmarkCell:
    """Mean and standard deviation of the wall-clock seconds of one method on one graph."""

    n: int
    T: int
    K: int
    edges: int
    method: str
    mean_seconds: float
    std_seconds: float
    replicates: int


def time_replicates(func, replicates):
    """Return the wall-clock seconds of `replicates` calls of `func`."""
    seconds = []
    for _ in range(replicates):
        start = time.perf_counter()
        func()
        seconds.append(time.perf_counter() - start)
    return seconds


def benchmark_graph(n, T, average_degree=DEFAULT_AVERAGE_DEGREE, seed=0):
    """Return a T-step random graph with about `average_degree` edges per vertex."""
    s = max(1, n * average_degree // 2)
    edgelists = tuple(random_edgelist(n, s, seed=step_seed)
                      for step_seed in child_seeds(seed, T))
    return TemporalGraph(n, edgelists, undirected=True)


def _summarize(n, T, K, edges, method, seconds):
    spread = float(np.std(seconds, ddof=1)) if len(seconds) > 1 else 0.0
    return BenchmarkCell(n=n, T=T, K=K, edges=edges, method=method,
                         mean_seconds=float(np.mean(seconds)), std_seconds=spread,
                         replicates=len(seconds))


def run_benchmark(grid_n, grid_t, K=20, replicates=10, include_spectral=False, dim=3,
                  average_degree=DEFAULT_AVERAGE_DEGREE, seed=0, threads=1):
    """Time the embeddings on every (n, T) cell of the grid.

    Each cell is one random graph embedded `replicates` times; the spectral
    baseline runs without its size limit since the grid is chosen by the caller.
    """
    if replicates < 1:
        raise ValidationError('replicates must be at least 1')
    cells = []
    for n, T in itertools.product(grid_n, grid_t):
        graph = benchmark_graph(n, T, average_degree, seed)
        labels = assign_labels(n, K)
        seconds = time_replicates(
            lambda: temporal_encoder_embedding(graph, labels, threads=threads), replicates)
        cells.append(_summarize(n, T, K, graph.total_edges, 'encoder', seconds))
        _LOGGER.info('n=%d T=%d encoder %.4fs', n, T, cells[-1].mean_seconds)
        if include_spectral:
            seconds = time_replicates(
                lambda: unfolded_spectral_embed(graph, d=dim, seed=seed, max_n=None,
                                                threads=threads), replicates)
            cells.append(_summarize(n, T, dim, graph.total_edges, 'spectral', seconds))
            _LOGGER.info('n=%d T=%d spectral %.4fs', n, T, cells[-1].mean_seconds)
    return cells


def loglog_slope(sizes, seconds):
    """Return the slope of a least-squares line through (log size, log seconds)."""
    if len(sizes) < 2:
        raise ValidationError('a slope needs at least two sizes')
    slope, _ = np.polyfit(np.log(sizes), np.log(seconds), 1)
    return float(slope)


def write_benchmark(path, cells):
    """Write the benchmark cells as a table."""
    write_table(path, pd.DataFrame([asdict(cell) for cell in cells]))
