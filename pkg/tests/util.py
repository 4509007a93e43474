"""Shared helpers for the test suite: random graphs, admissible draws,
on-manifold states, and small numeric oracles."""

import numpy as np

from cbpursuit import CBParams, SystemState, validate_graph, wrap_angle
from cbpursuit.shape import headings_on_manifold


def random_graph(rng, n_max=8, m_max=5):
    """Random cycle-with-branches targets (0-based)."""
    m = int(rng.integers(2, m_max + 1))
    n_branch = int(rng.integers(0, max(1, n_max - m + 1)))
    n = m + n_branch
    targets = [(i + 1) % m for i in range(m)]
    targets += [int(rng.integers(0, m)) for _ in range(n_branch)]
    return validate_graph(targets)


def random_manifold_state(rng, graph, params, box=5.0, min_sep=0.3):
    """Random positions (pairwise separated) with zero-bearing-error headings."""
    n = graph.n
    while True:
        positions = rng.uniform(-box, box, size=(n, 2))
        diffs = positions[:, None] - positions[None, :]
        dist = np.hypot(diffs[..., 0], diffs[..., 1])
        dist[np.arange(n), np.arange(n)] = np.inf
        if dist.min() > min_sep:
            break
    return SystemState(positions, headings_on_manifold(positions, graph, params))


def draw_rectilinear(rng, graph):
    """Bearing angles admitting a rectilinear equilibrium on this graph."""
    base = rng.uniform(-np.pi, np.pi)
    n = graph.n
    m = len(graph.cycle_members)
    # need both orientation classes on the cycle
    while True:
        flips = rng.integers(0, 2, size=n).astype(bool)
        if 0 < flips[:m].sum() < m:
            break
    alpha = np.where(flips, wrap_angle(base + np.pi), base)
    return CBParams(alpha)


def draw_circling(rng, graph, margin=0.1):
    """Bearing angles admitting a circling equilibrium (all sines positive,
    cycle sum a multiple of pi)."""
    m = len(graph.cycle_members)
    n = graph.n
    while True:
        alpha = rng.uniform(margin, np.pi - margin, size=n)
        total = alpha[:m - 1].sum()
        last = wrap_angle(-total) % np.pi
        if not margin < last < np.pi - margin:
            continue
        alpha[m - 1] = last
        return CBParams(alpha)


def draw_pure_shape(rng, graph, margin=0.1):
    """Bearing angles with at least one admissible spiral (nonzero scale rate)."""
    from cbpursuit import pure_shape_equilibria

    while True:
        alpha = rng.uniform(-np.pi + margin, np.pi - margin, size=graph.n)
        params = CBParams(alpha)
        reports = pure_shape_equilibria(params, graph)
        good = [r for r in reports if r.admissible and abs(r.log_scale_rate) > 1e-3]
        if good:
            return params, good


def central_difference(samples, dt):
    """Interior central differences; shape (k-2, ...) aligned to samples[1:-1]."""
    samples = np.asarray(samples, dtype=float)
    return (samples[2:] - samples[:-2]) / (2.0 * dt)
