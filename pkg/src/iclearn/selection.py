"""Query selection: choosing which unlabeled sequences to send for annotation.

Two per-sample scores drive everything, both computed from the head's
probability vector p:

    max probability  P = max_j p_j          (1/C <= P <= 1)
    entropy          H = -sum_j p_j ln p_j  (0 <= H <= ln C, 0 ln 0 = 0)

Six strategies.  Two rank the whole unlabeled pool: "pb" takes the lowest P,
"ep" the highest H.  Four spread the same budget across latent-space clusters,
asking each cluster for ceil(per * cluster_size) of its members (sizes count
labeled members too, candidates never include them): "kr" picks uniformly at
random, "kt" picks closest to the centroid, "kep" highest entropy, "kpb"
lowest P.  A "random" rule (uniform over the whole pool) exists for baselines.

Every iteration is capped at `cap` selections, by default twice the number of
clusters.  Cluster strategies fill the cap round-robin, best-ranked candidate
of each cluster first, so truncation trims depth before coverage.  Ties break
toward the lower index, and callers pass id-sorted arrays, so results are
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clustering import cluster_members

STRATEGIES = ("pb", "ep", "kr", "kt", "kep", "kpb")
GLOBAL_STRATEGIES = ("pb", "ep")
CLUSTER_STRATEGIES = ("kr", "kt", "kep", "kpb")

StrategyKind = str


def max_probability(probs: np.ndarray) -> np.ndarray:
    """P(x) = max_j p_j for each row; low values mean an uncertain head."""
    probs = np.asarray(probs, dtype=np.float64)
    return probs.max(axis=-1)


def entropy(probs: np.ndarray) -> np.ndarray:
    """H(x) = -sum p ln p per row, with the 0 ln 0 = 0 convention."""
    probs = np.asarray(probs, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(probs > 0.0, probs * np.log(probs), 0.0)
    return -terms.sum(axis=-1)


@dataclass(frozen=True)
class SelectionState:
    """Everything one round of selection looks at, aligned by position."""

    latents: np.ndarray  # (n, L)
    probs: np.ndarray  # (n, C)
    max_prob: np.ndarray  # (n,)
    entropies: np.ndarray  # (n,)
    assignments: np.ndarray  # (n,) cluster index
    centroids: np.ndarray  # (k, L)
    labeled: np.ndarray  # (n,) bool

    def __post_init__(self):
        n = self.latents.shape[0]
        for name in ("probs", "max_prob", "entropies", "assignments", "labeled"):
            if getattr(self, name).shape[0] != n:
                raise ValueError(f"{name} is not aligned with latents (n={n})")

    @classmethod
    def compute(
        cls,
        latents: np.ndarray,
        probs: np.ndarray,
        assignments: np.ndarray,
        centroids: np.ndarray,
        labeled: np.ndarray,
    ) -> "SelectionState":
        probs = np.asarray(probs, dtype=np.float64)
        return cls(
            latents=np.asarray(latents, dtype=np.float64),
            probs=probs,
            max_prob=max_probability(probs),
            entropies=entropy(probs),
            assignments=np.asarray(assignments, dtype=np.int64),
            centroids=np.asarray(centroids, dtype=np.float64),
            labeled=np.asarray(labeled, dtype=bool),
        )

    @property
    def n_clusters(self) -> int:
        return self.centroids.shape[0]


def _rank(pool: np.ndarray, key: np.ndarray) -> np.ndarray:
    """Pool entries ordered by ascending pool-aligned key, lower index on ties."""
    order = np.lexsort((pool, key))
    return pool[order]


def _ranked_pool(state: SelectionState, strategy: str, pool: np.ndarray, rng) -> np.ndarray:
    if strategy in ("pb", "kpb"):
        return _rank(pool, state.max_prob[pool])
    if strategy in ("ep", "kep"):
        return _rank(pool, -state.entropies[pool])
    if strategy in ("random", "kr"):
        if rng is None:
            raise ValueError(f"strategy {strategy!r} needs a random generator")
        return pool[rng.permutation(len(pool))]
    if strategy == "kt":
        diff = state.latents[pool] - state.centroids[state.assignments[pool]]
        return _rank(pool, np.einsum("nd,nd->n", diff, diff))
    raise ValueError(f"unknown strategy {strategy!r}")


def select(
    state: SelectionState,
    strategy: StrategyKind,
    per: float,
    rng: np.random.Generator | None = None,
    cap: int | None = None,
) -> np.ndarray:
    """Indices to annotate next, in priority order, at most `cap` of them."""
    if strategy not in STRATEGIES and strategy != "random":
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if not 0.0 < per <= 1.0:
        raise ValueError(f"per must be in (0, 1], got {per}")
    if cap is None:
        cap = 2 * state.n_clusters
    if cap < 0:
        raise ValueError("cap must be >= 0")
    n = state.latents.shape[0]
    unlabeled = ~state.labeled

    if strategy in GLOBAL_STRATEGIES or strategy == "random":
        pool = np.flatnonzero(unlabeled)
        if len(pool) == 0:
            return np.empty(0, dtype=np.int64)
        count = min(math.ceil(per * n), len(pool), cap)
        return _ranked_pool(state, strategy, pool, rng)[:count]

    # Cluster strategies: quota per cluster, then round-robin by rank.
    ranked: list[np.ndarray] = []
    for members in cluster_members(state.assignments, state.n_clusters):
        pool = members[unlabeled[members]]
        quota = min(math.ceil(per * len(members)), len(pool)) if len(members) else 0
        ranked.append(_ranked_pool(state, strategy, pool, rng)[:quota])
    total = min(sum(len(r) for r in ranked), cap)
    chosen: list[int] = []
    depth = 0
    while len(chosen) < total:
        for r in ranked:
            if depth < len(r):
                chosen.append(int(r[depth]))
                if len(chosen) == total:
                    break
        depth += 1
    return np.asarray(chosen, dtype=np.int64)
