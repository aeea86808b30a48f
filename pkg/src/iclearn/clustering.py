"""K-means over latent vectors: k-means++ seeding, Lloyd iterations, restarts.

Deterministic for a given generator.  Each restart runs Lloyd's algorithm to
convergence (or max_iter); the assignment with the lowest inertia wins.  An
iteration that empties a cluster repairs it by moving the point farthest from
its current centroid into the empty slot, so every result has exactly k
non-empty clusters whenever n >= k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray  # (k, dim)
    assignments: np.ndarray  # (n,) int
    inertia: float
    inertia_trace: tuple[float, ...]  # per Lloyd iteration of the winning restart


def _squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # (n, k) without materializing the (n, k, dim) difference tensor
    x_sq = np.einsum("nd,nd->n", x, x)[:, None]
    c_sq = np.einsum("kd,kd->k", centroids, centroids)[None, :]
    d = x_sq + c_sq - 2.0 * (x @ centroids.T)
    np.maximum(d, 0.0, out=d)
    return d


def plus_plus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seed centroids with probability proportional to squared distance from
    the nearest centroid chosen so far."""
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]))
    centroids[0] = x[rng.integers(n)]
    closest = _squared_distances(x, centroids[:1]).ravel()
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            centroids[i] = x[rng.integers(n)]
            continue
        centroids[i] = x[rng.choice(n, p=closest / total)]
        closest = np.minimum(closest, _squared_distances(x, centroids[i : i + 1]).ravel())
    return centroids


def _lloyd(
    x: np.ndarray, centroids: np.ndarray, max_iter: int
) -> tuple[np.ndarray, np.ndarray, float, list[float]]:
    k = centroids.shape[0]
    centroids = centroids.copy()
    assignments = np.full(x.shape[0], -1)
    trace: list[float] = []
    for _ in range(max_iter):
        d = _squared_distances(x, centroids)
        new_assignments = d.argmin(axis=1)
        for c in range(k):
            members = new_assignments == c
            if members.any():
                centroids[c] = x[members].mean(axis=0)
            else:
                # steal the point currently worst-served by its own centroid
                farthest = int(d[np.arange(len(x)), new_assignments].argmax())
                centroids[c] = x[farthest]
                new_assignments[farthest] = c
        d = _squared_distances(x, centroids)
        new_assignments = d.argmin(axis=1)
        inertia = float(d[np.arange(len(x)), new_assignments].sum())
        trace.append(inertia)
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
    return centroids, assignments, trace[-1], trace


def kmeans(
    x: np.ndarray,
    k: int,
    rng: np.random.Generator,
    restarts: int = 10,
    max_iter: int = 300,
) -> KMeansResult:
    """Best of `restarts` seeded runs by final inertia."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected (n, dim) data, got shape {x.shape}")
    if not 1 <= k <= x.shape[0]:
        raise ValueError(f"k must be in [1, {x.shape[0]}], got {k}")
    best: KMeansResult | None = None
    for _ in range(restarts):
        init = plus_plus_init(x, k, rng)
        centroids, assignments, inertia, trace = _lloyd(x, init, max_iter)
        if best is None or inertia < best.inertia:
            best = KMeansResult(
                centroids=centroids,
                assignments=assignments,
                inertia=inertia,
                inertia_trace=tuple(trace),
            )
    return best


def cluster_members(assignments: np.ndarray, k: int) -> list[np.ndarray]:
    """Index arrays per cluster, each ascending."""
    return [np.flatnonzero(assignments == c) for c in range(k)]
