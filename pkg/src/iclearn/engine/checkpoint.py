"""Bit-exact model checkpoints as versioned JSON.

Every tensor is stored as base64 of its little-endian float64 bytes together
with its shape, so a save/load round trip reproduces the array exactly.  The
file also carries the model config, the optimizer moments and step counters,
and the numpy RNG state, which is everything needed to resume training as if
it had never stopped.  Writes go to a temp file in the same directory and are
moved into place atomically.
"""

from __future__ import annotations

import base64
import json
import os
import tempfile
from typing import Any

import numpy as np

from .model import ModelConfig, Params
from .optim import AdamState

FORMAT_VERSION = 1


def encode_array(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype=np.float64)
    return {
        "shape": list(a.shape),
        "data": base64.b64encode(a.astype("<f8", copy=False).tobytes()).decode("ascii"),
    }


def decode_array(obj: dict) -> np.ndarray:
    raw = base64.b64decode(obj["data"])
    a = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    return a.reshape(obj["shape"]).copy()


def _rng_state(rng: np.random.Generator) -> dict:
    state = rng.bit_generator.state
    return json.loads(json.dumps(state, default=int))


def _restore_rng(state: dict) -> np.random.Generator:
    rng = np.random.default_rng()
    rng.bit_generator.state = state
    return rng


def checkpoint_dict(
    params: Params,
    config: ModelConfig,
    optimizer: AdamState | None = None,
    rng: np.random.Generator | None = None,
    extra: dict[str, Any] | None = None,
) -> dict:
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "config": config.to_dict(),
        "params": {k: encode_array(v) for k, v in sorted(params.items())},
    }
    if optimizer is not None:
        doc["optimizer"] = {
            "m": {k: encode_array(v) for k, v in sorted(optimizer.m.items())},
            "v": {k: encode_array(v) for k, v in sorted(optimizer.v.items())},
            "t": dict(sorted(optimizer.t.items())),
        }
    if rng is not None:
        doc["rng"] = _rng_state(rng)
    if extra:
        doc["extra"] = extra
    return doc


def atomic_write_json(path: str, doc: dict) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            json.dump(doc, f)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_checkpoint(
    path: str,
    params: Params,
    config: ModelConfig,
    optimizer: AdamState | None = None,
    rng: np.random.Generator | None = None,
    extra: dict[str, Any] | None = None,
) -> None:
    atomic_write_json(path, checkpoint_dict(params, config, optimizer, rng, extra))


def load_checkpoint(path: str) -> dict:
    """Returns {"params", "config", "optimizer"|None, "rng"|None, "extra"}."""
    with open(path) as f:
        doc = json.load(f)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format_version: {version!r}")
    out: dict[str, Any] = {
        "config": ModelConfig.from_dict(doc["config"]),
        "params": {k: decode_array(v) for k, v in doc["params"].items()},
        "optimizer": None,
        "rng": None,
        "extra": doc.get("extra", {}),
    }
    if "optimizer" in doc:
        opt = doc["optimizer"]
        out["optimizer"] = AdamState(
            m={k: decode_array(v) for k, v in opt["m"].items()},
            v={k: decode_array(v) for k, v in opt["v"].items()},
            t={k: int(v) for k, v in opt["t"].items()},
        )
    if "rng" in doc:
        out["rng"] = _restore_rng(doc["rng"])
    return out
