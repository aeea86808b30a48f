"""Softmax classification on the latent space and the two training recipes.

Strategy (i) trains everything jointly from scratch: every batch minimizes
half the mean reconstruction error over all rows plus half the mean cross
entropy over whatever labeled rows the batch contains.

Strategy (ii) first pretrains the autoencoder on reconstruction alone, then
fine-tunes with the combined objective.  Under the fixed-weight recipe the
decoder's recurrent tensors never move in either phase; only the regression
layer, the encoder, and the head learn.
"""

from __future__ import annotations

import numpy as np

from .engine import model as M
from .engine import optim, training
from .engine.model import class_loss, classify, combined_loss

__all__ = [
    "classify",
    "class_loss",
    "combined_loss",
    "predict_probs",
    "train_strategy_i",
    "train_strategy_ii",
]


def predict_probs(params: M.Params, config: M.ModelConfig, x: np.ndarray) -> np.ndarray:
    """Class probabilities (B, C) for a (B, T, F) batch of sequences."""
    latent, _ = M.encode_batch(params, config, np.asarray(x, dtype=np.float64))
    return classify(latent, params)


def train_strategy_i(
    params: M.Params,
    config: M.ModelConfig,
    x: np.ndarray,
    labels: np.ndarray,
    label_mask: np.ndarray,
    rng: np.random.Generator,
    optimizer: optim.AdamState | None = None,
    epochs: int | None = None,
    epoch_offset: int = 0,
) -> training.TrainResult:
    """Joint training from scratch on the weighted combined objective."""
    if optimizer is None:
        optimizer = optim.AdamState()
    return training.run_training(
        params,
        config,
        x,
        rng,
        optimizer,
        labels=labels,
        label_mask=label_mask,
        epochs=epochs,
        epoch_offset=epoch_offset,
    )


def train_strategy_ii(
    params: M.Params,
    config: M.ModelConfig,
    x: np.ndarray,
    labels: np.ndarray,
    label_mask: np.ndarray,
    rng: np.random.Generator,
    pretrain_epochs: int,
    finetune_epochs: int,
    optimizer: optim.AdamState | None = None,
) -> tuple[training.TrainResult, training.TrainResult]:
    """Reconstruction pretraining followed by combined fine-tuning.

    The fine-tune phase continues the learning-rate schedule where the
    pretrain phase left off.
    """
    if optimizer is None:
        optimizer = optim.AdamState()
    pre = training.train_autoregression(
        params, config, x, rng, optimizer, epochs=pretrain_epochs
    )
    fine = training.run_training(
        params,
        config,
        x,
        rng,
        optimizer,
        labels=labels,
        label_mask=label_mask,
        epochs=finetune_epochs,
        epoch_offset=pretrain_epochs,
    )
    return pre, fine
