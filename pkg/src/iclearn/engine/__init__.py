"""Numpy sequence-model engine: GRU cells, autoencoder, optimizer, checkpoints."""

from .gru import GATE_KEYS, gru_cell_forward, init_cell, sequence_backward, sequence_forward
from .model import (
    ForwardCache,
    ModelConfig,
    Params,
    backward,
    class_loss,
    classify,
    clone_params,
    combined_loss,
    decode,
    decode_batch,
    encode,
    encode_batch,
    forward_pass,
    frozen_keys,
    init_params,
    prediction_loss,
    softmax,
    trainable_keys,
)
from .optim import AdamState, adam_step, clip_by_global_norm, global_norm, lr_at_epoch
from .checkpoint import load_checkpoint, save_checkpoint
from .training import TrainResult, run_training, stack_inputs, train_autoregression

__all__ = [
    "GATE_KEYS",
    "gru_cell_forward",
    "init_cell",
    "sequence_backward",
    "sequence_forward",
    "ForwardCache",
    "ModelConfig",
    "Params",
    "backward",
    "class_loss",
    "classify",
    "clone_params",
    "combined_loss",
    "decode",
    "decode_batch",
    "encode",
    "encode_batch",
    "forward_pass",
    "frozen_keys",
    "init_params",
    "prediction_loss",
    "softmax",
    "trainable_keys",
    "AdamState",
    "adam_step",
    "clip_by_global_norm",
    "global_norm",
    "lr_at_epoch",
    "load_checkpoint",
    "save_checkpoint",
    "TrainResult",
    "run_training",
    "stack_inputs",
    "train_autoregression",
]
