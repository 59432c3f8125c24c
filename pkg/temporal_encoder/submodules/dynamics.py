# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Vertex, community and graph temporal dynamics of an embedding series.

The vertex dynamic at time t is 1 - <Z_t(i), Z_ref(i)>. It lies in [0, 1] for
non-negative weights: 0 means the connectivity pattern is unchanged, 1 means it
turned orthogonal or went silent at one of the two times. In angle terms the
value is 1 - cos(theta), so 0.5 is a 60 degree turn.
"""

from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd
from scipy import sparse

from .exceptions import ValidationError
from .graph_util import write_table

_LOGGER = logging.getLogger(__name__)

CLAMP_TOLERANCE = 1e-12
DEFAULT_OUTLIER_THRESHOLD = 0.5
DEFAULT_INLIER_THRESHOLD = 0.1
DEFAULT_BINS = 20


@dataclass(frozen=True, eq=False)
class DynamicsReport:
    """Vertex, community and graph dynamics against one reference time.

    `reference_time` is None for dynamics against the previous step, and
    `community_dynamic` is None when no labels were given.
    """

    vertex_dynamic: np.ndarray
    inactive: np.ndarray
    community_dynamic: np.ndarray
    graph_dynamic: np.ndarray
    reference_time: int

    @property
    def T(self):
        return self.vertex_dynamic.shape[0]

    @property
    def n(self):
        return self.vertex_dynamic.shape[1]


@dataclass(frozen=True)
class ThresholdSummary:
    """Outlier and inlier vertices of one time step."""

    t: int
    outlier_threshold: float
    inlier_threshold: float
    outliers: tuple
    inliers: tuple
    outlier_fraction: float
    inlier_fraction: float


def _check_time(t, T, what='time step'):
    if not 1 <= t <= T:
        raise ValidationError(f'{what} {t} outside [1, {T}]')


def _dynamic_against(Z, reference, reference_active):
    inner = np.einsum('tik,ik->ti', Z, reference)
    values = 1.0 - inner
    # Absorb float dust only; genuine negatives (negative weights) stay visible.
    values[(values < 0) & (values >= -CLAMP_TOLERANCE)] = 0.0
    values[(values > 1) & (values <= 1 + CLAMP_TOLERANCE)] = 1.0
    identical = np.all(Z == reference[None], axis=2) & reference_active[None]
    values[identical] = 0.0
    return values


def vertex_dynamic(series, ref_time=1):
    """Return the T x n vertex dynamics against 1-based `ref_time`.

    A vertex whose row is zero at either time gets 1, and a vertex whose
    non-zero row is identical at both times gets exactly 0.
    """
    _check_time(ref_time, series.T, 'reference time')
    reference = series.Z[ref_time - 1]
    return _dynamic_against(series.Z, reference, series.normalized[ref_time - 1])


def inactive_mask(series, ref_time=1):
    """Return a T x n mask of vertices with a zero row at t or at `ref_time`."""
    _check_time(ref_time, series.T, 'reference time')
    return ~(series.normalized & series.normalized[ref_time - 1][None])


def previous_step_dynamic(series):
    """Return dynamics of each step against the step before it.

    The first step has no predecessor and is compared with itself.
    """
    values = np.empty((series.T, series.n), dtype=np.float64)
    values[0] = _dynamic_against(series.Z[:1], series.Z[0], series.normalized[0])[0]
    for step in range(1, series.T):
        values[step] = _dynamic_against(
            series.Z[step:step + 1], series.Z[step - 1], series.normalized[step - 1])[0]
    return values


def previous_step_inactive(series):
    """Return a T x n mask of vertices with a zero row at t or at t - 1."""
    inactive = ~series.normalized
    inactive[1:] |= ~series.normalized[:-1]
    return inactive


def community_dynamic(vertex_dyn, labels):
    """Return the T x K mean vertex dynamic per community; NaN marks empty ones."""
    if labels.n != vertex_dyn.shape[1]:
        raise ValidationError(
            f'dynamics cover {vertex_dyn.shape[1]} vertices, labels {labels.n}')
    known = np.flatnonzero(labels.labels > 0)
    membership = sparse.csr_matrix(
        (np.ones(known.size), (known, labels.labels[known] - 1)),
        shape=(labels.n, labels.K))
    sums = np.asarray(membership.T @ vertex_dyn.T).T
    counts = labels.class_counts.astype(np.float64)
    with np.errstate(invalid='ignore', divide='ignore'):
        means = sums / counts[None, :]
    means[:, counts == 0] = np.nan
    return means


def graph_dynamic(vertex_dyn, inactive=None):
    """Return the mean vertex dynamic of every time step.

    With an `inactive` mask the mean runs over active entries only; a step
    without any active vertex gives NaN.
    """
    if inactive is None:
        return vertex_dyn.mean(axis=1)
    active = ~np.asarray(inactive, dtype=bool)
    counts = active.sum(axis=1)
    sums = np.where(active, vertex_dyn, 0.0).sum(axis=1)
    with np.errstate(invalid='ignore', divide='ignore'):
        means = sums / counts
    means[counts == 0] = np.nan
    return means


def max_window_dynamic(vertex_dyn, t_a, t_b):
    """Return each vertex's largest dynamic over the 1-based window [t_a, t_b]."""
    T = vertex_dyn.shape[0]
    if not 1 <= t_a <= t_b <= T:
        raise ValidationError(f'window [{t_a}, {t_b}] must satisfy 1 <= t_a <= t_b <= {T}')
    return vertex_dyn[t_a - 1:t_b].max(axis=0)


def threshold_summary(vertex_dyn, t, outlier_thresh=DEFAULT_OUTLIER_THRESHOLD,
                      inlier_thresh=DEFAULT_INLIER_THRESHOLD):
    """Return vertices above the outlier threshold and below the inlier threshold at `t`."""
    _check_time(t, vertex_dyn.shape[0])
    for value in (outlier_thresh, inlier_thresh):
        if not 0 <= value <= 1:
            raise ValidationError(f'threshold {value} outside [0, 1]')
    values = vertex_dyn[t - 1]
    outliers = np.flatnonzero(values > outlier_thresh)
    inliers = np.flatnonzero(values < inlier_thresh)
    n = values.shape[0]
    return ThresholdSummary(
        t=t, outlier_threshold=outlier_thresh, inlier_threshold=inlier_thresh,
        outliers=tuple(outliers.tolist()), inliers=tuple(inliers.tolist()),
        outlier_fraction=outliers.size / n if n else 0.0,
        inlier_fraction=inliers.size / n if n else 0.0)


def default_bin_edges(bins=DEFAULT_BINS):
    """Return `bins` equal-width bin edges over [0, 1]."""
    return np.linspace(0.0, 1.0, bins + 1)


def histogram(vertex_dyn, t, bin_edges=None):
    """Return the count of vertex dynamics at `t` per bin; the last bin is closed.

    Values outside the edges, possible only with negative weights, count in the
    first or last bin, so the counts always sum to n.
    """
    _check_time(t, vertex_dyn.shape[0])
    edges = default_bin_edges() if bin_edges is None else np.asarray(bin_edges, np.float64)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValidationError('bin edges must be strictly increasing')
    if edges[0] > 0 or edges[-1] < 1:
        raise ValidationError('bin edges must span [0, 1]')
    values = np.clip(vertex_dyn[t - 1], edges[0], edges[-1])
    counts, _ = np.histogram(values, bins=edges)
    return counts


def rank_by_dynamic(values, t=None, inactive=None):
    """Return vertex indices by descending value; ties keep ascending index.

    `values` is a T x n dynamics matrix read at 1-based `t`, or a length-n
    measure when `t` is None. Vertices flagged in `inactive` (same shape as
    `values`) are ranked after every active one.
    """
    values = np.asarray(values)
    if t is not None:
        _check_time(t, values.shape[0])
        values = values[t - 1]
        if inactive is not None:
            inactive = np.asarray(inactive)[t - 1]
    order = np.argsort(-values, kind='stable')
    if inactive is None:
        return order
    silent = np.asarray(inactive, dtype=bool)[order]
    return np.concatenate([order[~silent], order[silent]])


def outlier_recall(ranking, planted, k):
    """Return the fraction of `planted` vertices found among the first `k` of `ranking`."""
    planted = set(int(vertex) for vertex in planted)
    if not planted:
        return 0.0
    top = set(np.asarray(ranking)[:k].tolist())
    return len(planted & top) / len(planted)


def compute_dynamics(series, labels=None, ref_time=1):
    """Return the full `DynamicsReport` of a series against `ref_time`.

    A `ref_time` of None compares every step with the one before it. Without
    `labels` the community dynamics are skipped.
    """
    if ref_time is None:
        values, inactive = previous_step_dynamic(series), previous_step_inactive(series)
    else:
        values, inactive = vertex_dynamic(series, ref_time), inactive_mask(series, ref_time)
    report = DynamicsReport(
        vertex_dynamic=values,
        inactive=inactive,
        community_dynamic=None if labels is None else community_dynamic(values, labels),
        graph_dynamic=graph_dynamic(values),
        reference_time=ref_time)
    _LOGGER.info('Computed dynamics of %d vertices over %d steps against %s',
                 report.n, report.T,
                 'the previous step' if ref_time is None else f't={ref_time}')
    return report


def write_vertex_dynamics(path, report, registry):
    """Write `t,vertex,dynamic,inactive` rows."""
    T, n = report.vertex_dynamic.shape
    frame = pd.DataFrame({
        't': np.repeat(np.arange(1, T + 1), n),
        'vertex': np.tile(np.array(registry.tokens, dtype=object), T),
        'dynamic': report.vertex_dynamic.reshape(T * n),
        'inactive': report.inactive.reshape(T * n).astype(np.int64),
    })
    write_table(path, frame)


def write_community_dynamics(path, report):
    """Write `t,community,dynamic` rows; empty communities are left blank."""
    T, K = report.community_dynamic.shape
    frame = pd.DataFrame({
        't': np.repeat(np.arange(1, T + 1), K),
        'community': np.tile(np.arange(1, K + 1), T),
        'dynamic': report.community_dynamic.reshape(T * K),
    })
    write_table(path, frame)


def write_graph_dynamics(path, report):
    """Write `t,dynamic,active_dynamic` rows; the last column skips inactive vertices."""
    frame = pd.DataFrame({
        't': np.arange(1, report.T + 1),
        'dynamic': report.graph_dynamic,
        'active_dynamic': graph_dynamic(report.vertex_dynamic, report.inactive),
    })
    write_table(path, frame)


def write_histogram(path, counts, bin_edges):
    """Write `bin_lo,bin_hi,count` rows."""
    frame = pd.DataFrame({
        'bin_lo': bin_edges[:-1],
        'bin_hi': bin_edges[1:],
        'count': counts,
    })
    write_table(path, frame)


def write_threshold_summary(path, summary, registry):
    """Write one `vertex,kind` row per outlier and inlier plus the fractions."""
    rows = [('fraction', 'outlier', summary.outlier_fraction),
            ('fraction', 'inlier', summary.inlier_fraction)]
    rows += [('vertex', 'outlier', registry.token(i)) for i in summary.outliers]
    rows += [('vertex', 'inlier', registry.token(i)) for i in summary.inliers]
    frame = pd.DataFrame(rows, columns=['record', 'kind', 'value'])
    frame.insert(0, 't', summary.t)
    write_table(path, frame)


def write_ranking(path, ranking, values, registry):
    """Write `rank,vertex,value` rows for a ranking of a length-n measure."""
    frame = pd.DataFrame({
        'rank': np.arange(1, ranking.size + 1),
        'vertex': [registry.token(i) for i in ranking],
        'value': np.asarray(values)[ranking],
    })
    write_table(path, frame)
