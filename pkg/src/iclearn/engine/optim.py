"""Adam with bias correction and a stepped learning-rate decay.

Update rule per parameter, with per-parameter step counters so tensors that
start training late (or resume from a checkpoint) stay consistent:

    m = b1*m + (1-b1)*g        mhat = m / (1 - b1^t)
    v = b2*v + (1-b2)*g^2      vhat = v / (1 - b2^t)
    p -= lr * mhat / (sqrt(vhat) + eps)

The epsilon sits outside the square root.  The learning rate follows
lr0 * decay^floor(epoch / interval), i.e. a 5% cut every 50 epochs under the
defaults used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: dict[str, int] = field(default_factory=dict)


def lr_at_epoch(lr0: float, epoch: int, decay: float = 0.95, interval: int = 50) -> float:
    """Stepped schedule: lr0 * decay^floor(epoch / interval), epoch counted from 0."""
    if epoch < 0:
        raise ValueError("epoch must be >= 0")
    return float(lr0) * float(decay) ** (epoch // interval)


def global_norm(grads: dict[str, np.ndarray]) -> float:
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    return float(np.sqrt(total))


def clip_by_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    """Rescale all gradients jointly when their combined norm exceeds max_norm."""
    norm = global_norm(grads)
    if norm <= max_norm or norm == 0.0:
        return grads
    scale = max_norm / norm
    return {k: g * scale for k, g in grads.items()}


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    frozen: set[str] | frozenset[str] = frozenset(),
) -> None:
    """Apply one update in place.  Frozen keys are skipped entirely: no moment
    accumulation, no counter advance, bit-identical parameter bytes."""
    for key in sorted(grads):
        if key in frozen:
            continue
        g = grads[key]
        if key not in state.m:
            state.m[key] = np.zeros_like(g)
            state.v[key] = np.zeros_like(g)
            state.t[key] = 0
        state.t[key] += 1
        t = state.t[key]
        m = state.m[key]
        v = state.v[key]
        m *= BETA1
        m += (1.0 - BETA1) * g
        v *= BETA2
        v += (1.0 - BETA2) * g * g
        mhat = m / (1.0 - BETA1**t)
        vhat = v / (1.0 - BETA2**t)
        params[key] -= lr * mhat / (np.sqrt(vhat) + EPSILON)
