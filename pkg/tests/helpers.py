"""Shared test utilities: randomized selection cases and invariant checks."""

import math

import numpy as np

from iclearn.selection import SelectionState


def make_selection_case(rng):
    """One randomized selection scenario: (state, per, cap).

    Covers small pools, empty and fully labeled clusters, near one-hot and
    exactly uniform probability rows, explicit caps (including zero), and
    the default-cap path (cap=None).
    """
    n = int(rng.integers(1, 41))
    n_classes = int(rng.integers(2, 7))
    k = int(rng.integers(1, 7))
    latent_dim = int(rng.integers(2, 9))
    latents = rng.normal(size=(n, latent_dim))
    logits = rng.normal(size=(n, n_classes))
    style = int(rng.integers(0, 3))
    if style == 1:
        logits *= 8.0  # near one-hot rows
    elif style == 2:
        logits[: max(1, n // 2)] = 0.0  # exactly uniform rows
    probs = np.exp(logits - logits.max(axis=1, keepdims=True))
    probs /= probs.sum(axis=1, keepdims=True)
    assignments = rng.integers(0, k, size=n)
    labeled = rng.random(n) < rng.uniform(0.0, 1.0)
    if rng.random() < 0.1:
        labeled[:] = True
    state = SelectionState.compute(
        latents=latents,
        probs=probs,
        assignments=assignments,
        centroids=rng.normal(size=(k, latent_dim)),
        labeled=labeled,
    )
    per = 1.0 if rng.random() < 0.1 else float(rng.uniform(0.02, 1.0))
    cap = None if rng.random() < 0.7 else int(rng.integers(0, 2 * k + 3))
    return state, per, cap


def check_selection_invariants(state, strategy, per, cap, chosen):
    """Assert every selection contract on one (case, strategy) outcome."""
    n = len(state.labeled)
    n_classes = state.probs.shape[1]
    assert np.all(state.entropies >= -1e-12)
    assert np.all(state.entropies <= np.log(n_classes) + 1e-9)
    assert np.all(state.max_prob >= 1.0 / n_classes - 1e-12)
    assert np.all(state.max_prob <= 1.0 + 1e-12)

    assert chosen.ndim == 1 and np.issubdtype(chosen.dtype, np.integer)
    if len(chosen):
        assert chosen.min() >= 0 and chosen.max() < n
    assert len(np.unique(chosen)) == len(chosen)  # no duplicates
    assert not state.labeled[chosen].any()  # never relabels

    cap_eff = 2 * state.n_clusters if cap is None else cap
    assert len(chosen) <= cap_eff
    unlabeled = ~state.labeled

    if strategy in ("pb", "ep", "random"):
        pool = np.flatnonzero(unlabeled)
        assert len(chosen) == min(math.ceil(per * n), len(pool), cap_eff)
        return

    # cluster strategies: quota accounting and exact coverage
    quotas = np.zeros(state.n_clusters, dtype=int)
    for c in range(state.n_clusters):
        members = np.flatnonzero(state.assignments == c)
        pool = members[unlabeled[members]]
        if len(members):
            quotas[c] = min(math.ceil(per * len(members)), len(pool))
    total = min(int(quotas.sum()), cap_eff)
    assert len(chosen) == total
    covered = len(np.unique(state.assignments[chosen])) if len(chosen) else 0
    assert covered == min(total, int(np.count_nonzero(quotas)))
    for c in range(state.n_clusters):
        assert np.sum(state.assignments[chosen] == c) <= quotas[c]
