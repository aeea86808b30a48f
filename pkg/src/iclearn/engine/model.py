"""Sequence autoencoder with a softmax head, as explicit numpy tensors.

Architecture: a multi-layer bidirectional GRU encoder whose final forward and
backward states concatenate into the latent vector; a single unidirectional
GRU decoder initialized from that latent and driven by zero inputs, followed
by a linear regression layer that emits one frame per step; and an affine +
softmax classifier head on the latent.

Parameters live in a flat name -> array dict so the optimizer, checkpoints,
freezing, and finite-difference checks all speak one language:

    enc.{layer}.{f|b}.{gate}   encoder cells
    dec.{gate}                 decoder cell (frozen under fixed-weight training)
    out.W / out.b              regression layer, decoder_hidden -> input_dim
    head.W / head.b            classifier, 2*encoder_hidden -> num_classes
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from . import gru

LOG_CLAMP = 1e-12

Params = dict[str, np.ndarray]


@dataclass(frozen=True)
class ModelConfig:
    input_dim: int
    seq_len: int
    encoder_hidden: int
    encoder_layers: int = 1
    decoder_hidden: int | None = None  # defaults to 2 * encoder_hidden
    num_classes: int = 0
    decoder_frozen: bool = True
    learning_rate: float = 1e-4
    lr_decay: float = 0.95
    decay_interval_epochs: int = 50
    batch_size: int = 16
    epochs: int = 100
    seed: int = 0
    grad_clip: float | None = 5.0
    loss_weights: tuple[float, float] = (0.5, 0.5)  # (class term, prediction term)
    reverse_reconstruction: bool = False

    def __post_init__(self):
        if self.decoder_hidden is None:
            object.__setattr__(self, "decoder_hidden", 2 * self.encoder_hidden)
        if self.decoder_hidden != 2 * self.encoder_hidden:
            raise ValueError(
                f"decoder_hidden must be 2 * encoder_hidden, got "
                f"{self.decoder_hidden} vs 2*{self.encoder_hidden}"
            )
        for name in ("input_dim", "seq_len", "encoder_hidden", "encoder_layers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.seq_len < 2:
            raise ValueError("seq_len must be >= 2")
        if self.num_classes < 0:
            raise ValueError("num_classes must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError("lr_decay must be in (0, 1]")
        if self.decay_interval_epochs < 1 or self.batch_size < 1 or self.epochs < 0:
            raise ValueError("invalid training schedule values")
        object.__setattr__(self, "loss_weights", tuple(float(w) for w in self.loss_weights))

    @property
    def latent_dim(self) -> int:
        return 2 * self.encoder_hidden

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelConfig":
        obj = dict(obj)
        if "loss_weights" in obj:
            obj["loss_weights"] = tuple(obj["loss_weights"])
        return cls(**obj)


def init_params(config: ModelConfig, rng: np.random.Generator) -> Params:
    """Seeded random initialization of every tensor, head included.

    The decoder gets reservoir-style recurrence: an orthogonal candidate
    matrix with gain 2 and a negative update-gate bias.  Plain small random
    weights make the zero-input dynamics contractive, so every trajectory
    collapses to one fixed point within a few steps and late frames become
    unreconstructable no matter how the encoder trains.  The orthogonal
    recurrence keeps distinct initial states distinct over the whole unroll.
    """
    params: Params = {}
    in_dim = config.input_dim
    for layer in range(config.encoder_layers):
        for direction in ("f", "b"):
            cell = gru.init_cell(in_dim, config.encoder_hidden, rng)
            for k, v in cell.items():
                params[f"enc.{layer}.{direction}.{k}"] = v
        in_dim = 2 * config.encoder_hidden
    dec = gru.init_cell(config.input_dim, config.decoder_hidden, rng)
    q, _ = np.linalg.qr(rng.normal(size=(config.decoder_hidden, config.decoder_hidden)))
    dec["Un"] = 2.0 * q
    dec["bz"] = dec["bz"] - 1.0
    for k, v in dec.items():
        params[f"dec.{k}"] = v
    bound = 1.0 / np.sqrt(config.decoder_hidden)
    params["out.W"] = rng.uniform(-bound, bound, size=(config.input_dim, config.decoder_hidden))
    params["out.b"] = np.zeros(config.input_dim)
    if config.num_classes > 0:
        bound = 1.0 / np.sqrt(config.latent_dim)
        params["head.W"] = rng.uniform(-bound, bound, size=(config.num_classes, config.latent_dim))
        params["head.b"] = np.zeros(config.num_classes)
    return params


def clone_params(params: Params) -> Params:
    return {k: v.copy() for k, v in params.items()}


def frozen_keys(config: ModelConfig) -> set[str]:
    if not config.decoder_frozen:
        return set()
    return {f"dec.{k}" for k in gru.GATE_KEYS}


def trainable_keys(params: Params, config: ModelConfig) -> list[str]:
    frozen = frozen_keys(config)
    return [k for k in params if k not in frozen]


def _cell(params: Params, prefix: str) -> dict[str, np.ndarray]:
    return {k: params[f"{prefix}.{k}"] for k in gru.GATE_KEYS}


@dataclass
class EncoderCache:
    layers: list[dict]  # per layer: {"f": SequenceCache, "b": SequenceCache}
    latent: np.ndarray  # (B, 2H)


def encode_batch(params: Params, config: ModelConfig, x: np.ndarray) -> tuple[np.ndarray, EncoderCache]:
    """Run the bidirectional recurrence; latent = [H_f, H_b] of the top layer."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[1] != config.seq_len or x.shape[2] != config.input_dim:
        raise ValueError(
            f"encoder input must be (B, {config.seq_len}, {config.input_dim}), got {x.shape}"
        )
    layers = []
    inp = x
    for layer in range(config.encoder_layers):
        fwd = gru.sequence_forward(_cell(params, f"enc.{layer}.f"), inp, reverse=False)
        bwd = gru.sequence_forward(_cell(params, f"enc.{layer}.b"), inp, reverse=True)
        layers.append({"f": fwd, "b": bwd})
        inp = np.concatenate([fwd.hs, bwd.hs], axis=2)
    latent = np.concatenate([layers[-1]["f"].final_state, layers[-1]["b"].final_state], axis=1)
    return latent, EncoderCache(layers=layers, latent=latent)


def encode(params: Params, config: ModelConfig, x: np.ndarray) -> tuple[np.ndarray, EncoderCache]:
    """Single-sequence encode; x is (T, input_dim) or (T, N, D)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 3:
        x = x.reshape(x.shape[0], -1)
    latent, cache = encode_batch(params, config, x[None])
    return latent[0], cache


def encoder_backward(
    params: Params, config: ModelConfig, cache: EncoderCache, d_latent: np.ndarray
) -> dict[str, np.ndarray]:
    """Backpropagate a gradient on the latent through every encoder layer."""
    H = config.encoder_hidden
    grads: dict[str, np.ndarray] = {}
    d_final = {"f": d_latent[:, :H], "b": d_latent[:, H:]}
    d_hs = {"f": None, "b": None}
    for layer in range(config.encoder_layers - 1, -1, -1):
        caches = cache.layers[layer]
        d_input = None
        for direction in ("f", "b"):
            cell = _cell(params, f"enc.{layer}.{direction}")
            d_x, _, cell_grads = gru.sequence_backward(
                cell, caches[direction], d_hs[direction], d_final[direction]
            )
            for k, v in cell_grads.items():
                grads[f"enc.{layer}.{direction}.{k}"] = v
            d_input = d_x if d_input is None else d_input + d_x
        if layer > 0:
            d_hs = {"f": d_input[:, :, :H], "b": d_input[:, :, H:]}
            d_final = {"f": None, "b": None}
    return grads


@dataclass
class DecoderCache:
    seq: gru.SequenceCache
    hidden: np.ndarray  # (B, T, decoder_hidden)
    y: np.ndarray  # (B, T, input_dim)


def decode_batch(
    params: Params, config: ModelConfig, latent: np.ndarray, steps: int
) -> tuple[np.ndarray, DecoderCache]:
    """Unroll the decoder from the latent with zero inputs; regress each frame."""
    latent = np.asarray(latent, dtype=np.float64)
    if latent.ndim != 2 or latent.shape[1] != config.decoder_hidden:
        raise ValueError(
            f"latent must be (B, {config.decoder_hidden}), got {latent.shape}"
        )
    B = latent.shape[0]
    zeros = np.zeros((B, steps, config.input_dim))
    seq = gru.sequence_forward(_cell(params, "dec"), zeros, reverse=False, h0=latent)
    y = seq.hs @ params["out.W"].T + params["out.b"]
    return y, DecoderCache(seq=seq, hidden=seq.hs, y=y)


def decode(params: Params, config: ModelConfig, latent: np.ndarray, steps: int) -> np.ndarray:
    """Single-latent decode to a (steps, input_dim) sequence."""
    y, _ = decode_batch(params, config, np.asarray(latent, dtype=np.float64)[None], steps)
    return y[0]


def decoder_backward(
    params: Params, config: ModelConfig, cache: DecoderCache, d_y: np.ndarray
) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Returns (d_latent, grads for out.* and dec.*)."""
    grads: dict[str, np.ndarray] = {}
    grads["out.W"] = np.einsum("bti,bth->ih", d_y, cache.hidden)
    grads["out.b"] = d_y.sum(axis=(0, 1))
    d_hidden = d_y @ params["out.W"]
    _, d_h0, cell_grads = gru.sequence_backward(_cell(params, "dec"), cache.seq, d_hidden, None)
    for k, v in cell_grads.items():
        grads[f"dec.{k}"] = v
    return d_h0, grads


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def classify(latent: np.ndarray, params: Params) -> np.ndarray:
    """Class probabilities for one latent vector or a (B, latent) batch."""
    if "head.W" not in params:
        raise ValueError("model has no classifier head (num_classes is 0)")
    latent = np.asarray(latent, dtype=np.float64)
    if latent.shape[-1] != params["head.W"].shape[1]:
        raise ValueError(
            f"latent dim {latent.shape[-1]} does not match head input "
            f"{params['head.W'].shape[1]}"
        )
    return softmax(latent @ params["head.W"].T + params["head.b"])


def prediction_loss(predicted: np.ndarray, target: np.ndarray) -> float:
    """Mean squared error over all steps and coordinates."""
    predicted = np.asarray(predicted, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if predicted.shape != target.shape:
        raise ValueError(f"shape mismatch: {predicted.shape} vs {target.shape}")
    diff = predicted - target
    return float(np.mean(diff * diff))


def class_loss(probs: np.ndarray, label: int) -> float:
    """Cross entropy -log p_label of one probability vector; p clamped at 1e-12."""
    probs = np.asarray(probs, dtype=np.float64)
    if not 0 <= label < probs.shape[-1]:
        raise ValueError(f"label {label} out of range for {probs.shape[-1]} classes")
    return float(-np.log(max(float(probs[label]), LOG_CLAMP)))


def combined_loss(class_term: float, pred_term: float, weights: tuple[float, float] = (0.5, 0.5)) -> float:
    """Weighted sum of the classification and prediction terms (0.5/0.5 default)."""
    return weights[0] * float(class_term) + weights[1] * float(pred_term)


@dataclass
class ForwardCache:
    x: np.ndarray
    target: np.ndarray | None
    latent: np.ndarray
    enc: EncoderCache
    dec: DecoderCache | None
    probs: np.ndarray | None
    labels: np.ndarray | None
    label_mask: np.ndarray | None
    class_weight: float
    pred_weight: float
    loss: float = 0.0
    pred_loss: float = 0.0
    class_loss: float = 0.0


def forward_pass(
    params: Params,
    config: ModelConfig,
    x: np.ndarray,
    labels: np.ndarray | None = None,
    label_mask: np.ndarray | None = None,
    class_weight: float | None = None,
    pred_weight: float | None = None,
) -> ForwardCache:
    """Full forward pass caching everything `backward` needs.

    Total loss = class_weight * mean cross entropy over labeled rows
               + pred_weight * mean squared reconstruction error over all rows.
    """
    if class_weight is None:
        class_weight = config.loss_weights[0]
    if pred_weight is None:
        pred_weight = config.loss_weights[1]
    x = np.asarray(x, dtype=np.float64)
    latent, enc_cache = encode_batch(params, config, x)
    cache = ForwardCache(
        x=x,
        target=None,
        latent=latent,
        enc=enc_cache,
        dec=None,
        probs=None,
        labels=None,
        label_mask=None,
        class_weight=float(class_weight),
        pred_weight=float(pred_weight),
    )
    loss = 0.0
    if pred_weight != 0.0:
        target = x[:, ::-1] if config.reverse_reconstruction else x
        y, dec_cache = decode_batch(params, config, latent, config.seq_len)
        cache.target = target
        cache.dec = dec_cache
        cache.pred_loss = prediction_loss(y, target)
        loss += pred_weight * cache.pred_loss
    if class_weight != 0.0 and labels is not None:
        labels = np.asarray(labels, dtype=np.int64)
        mask = (
            np.ones(len(labels), dtype=bool)
            if label_mask is None
            else np.asarray(label_mask, dtype=bool)
        )
        cache.labels = labels
        cache.label_mask = mask
        if mask.any():
            probs = classify(latent, params)
            cache.probs = probs
            picked = probs[mask, labels[mask]]
            cache.class_loss = float(-np.log(np.maximum(picked, LOG_CLAMP)).mean())
            loss += class_weight * cache.class_loss
    cache.loss = float(loss)
    if not np.isfinite(cache.loss):
        raise FloatingPointError("non-finite training loss")
    return cache


def backward(params: Params, config: ModelConfig, cache: ForwardCache) -> dict[str, np.ndarray]:
    """Exact gradients of the cached loss for every trainable parameter.

    Gradients still flow *through* the frozen decoder to the latent; only the
    decoder's own recurrent tensors are withheld from the result.
    """
    d_latent = np.zeros_like(cache.latent)
    grads: dict[str, np.ndarray] = {}
    if cache.dec is not None and cache.pred_weight != 0.0:
        y = cache.dec.y
        d_y = (cache.pred_weight * 2.0 / y.size) * (y - cache.target)
        d_latent_dec, dec_grads = decoder_backward(params, config, cache.dec, d_y)
        d_latent += d_latent_dec
        grads.update(dec_grads)
    if cache.probs is not None and cache.class_weight != 0.0:
        mask = cache.label_mask
        n_labeled = int(mask.sum())
        d_logits = np.zeros_like(cache.probs)
        d_logits[mask] = cache.probs[mask]
        d_logits[mask, cache.labels[mask]] -= 1.0
        d_logits *= cache.class_weight / n_labeled
        grads["head.W"] = d_logits.T @ cache.latent
        grads["head.b"] = d_logits.sum(axis=0)
        d_latent += d_logits @ params["head.W"]
    grads.update(encoder_backward(params, config, cache.enc, d_latent))
    for key in frozen_keys(config):
        grads.pop(key, None)
    return grads
