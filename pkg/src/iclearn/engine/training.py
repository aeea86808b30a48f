"""Minibatch training loops over the sequence model.

One generic loop drives both phases of the fixed-weight recipe: pure
reconstruction (class weight 0) and the combined objective where labeled rows
also contribute cross entropy.  Shuffling, batching, and the learning-rate
schedule all come from the config plus the caller's generator, so identical
(config, seed) inputs give bit-identical parameter trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model as M
from . import optim


def stack_inputs(sequences) -> np.ndarray:
    """Stack per-sample (T, N, D) or (T, F) arrays into one (B, T, F) batch."""
    flat = []
    for seq in sequences:
        a = np.asarray(getattr(seq, "keypoints", seq), dtype=np.float64)
        if a.ndim == 3:
            a = a.reshape(a.shape[0], -1)
        if a.ndim != 2:
            raise ValueError(f"expected (T, F) or (T, N, D) sequences, got ndim={a.ndim}")
        flat.append(a)
    shapes = {a.shape for a in flat}
    if len(shapes) != 1:
        raise ValueError(f"sequences disagree in shape: {sorted(shapes)}")
    return np.stack(flat)


@dataclass
class TrainResult:
    losses: list[float] = field(default_factory=list)
    pred_losses: list[float] = field(default_factory=list)
    class_losses: list[float] = field(default_factory=list)

    @property
    def epochs_run(self) -> int:
        return len(self.losses)

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else float("nan")


def run_training(
    params: M.Params,
    config: M.ModelConfig,
    x: np.ndarray,
    rng: np.random.Generator,
    optimizer: optim.AdamState,
    labels: np.ndarray | None = None,
    label_mask: np.ndarray | None = None,
    class_weight: float | None = None,
    pred_weight: float | None = None,
    epochs: int | None = None,
    epoch_offset: int = 0,
) -> TrainResult:
    """Update params in place for `epochs` passes; returns per-epoch mean losses.

    `epoch_offset` shifts the learning-rate schedule so that a resumed or
    staged run decays exactly as one long uninterrupted run would.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise ValueError("cannot train on an empty batch")
    if labels is not None:
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) != n:
            raise ValueError("labels length does not match batch")
        if label_mask is None:
            label_mask = np.ones(n, dtype=bool)
        else:
            label_mask = np.asarray(label_mask, dtype=bool)
    if epochs is None:
        epochs = config.epochs
    frozen = M.frozen_keys(config)
    result = TrainResult()
    for epoch in range(epochs):
        lr = optim.lr_at_epoch(
            config.learning_rate,
            epoch_offset + epoch,
            config.lr_decay,
            config.decay_interval_epochs,
        )
        order = rng.permutation(n)
        epoch_loss = 0.0
        epoch_pred = 0.0
        epoch_class = 0.0
        batches = 0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            cache = M.forward_pass(
                params,
                config,
                x[idx],
                labels=None if labels is None else labels[idx],
                label_mask=None if label_mask is None else label_mask[idx],
                class_weight=class_weight,
                pred_weight=pred_weight,
            )
            grads = M.backward(params, config, cache)
            if config.grad_clip is not None:
                grads = optim.clip_by_global_norm(grads, config.grad_clip)
            optim.adam_step(params, grads, optimizer, lr, frozen)
            epoch_loss += cache.loss
            epoch_pred += cache.pred_loss
            epoch_class += cache.class_loss
            batches += 1
        result.losses.append(epoch_loss / batches)
        result.pred_losses.append(epoch_pred / batches)
        result.class_losses.append(epoch_class / batches)
    return result


def train_autoregression(
    params: M.Params,
    config: M.ModelConfig,
    x: np.ndarray,
    rng: np.random.Generator,
    optimizer: optim.AdamState | None = None,
    epochs: int | None = None,
    epoch_offset: int = 0,
) -> TrainResult:
    """Reconstruction-only pretraining: minimize mean squared error alone."""
    if optimizer is None:
        optimizer = optim.AdamState()
    return run_training(
        params,
        config,
        x,
        rng,
        optimizer,
        class_weight=0.0,
        pred_weight=1.0,
        epochs=epochs,
        epoch_offset=epoch_offset,
    )
