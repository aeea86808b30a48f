"""GRU cell primitives: forward recurrences and exact backward passes.

Gate equations, for input x and carried state h:

    z = sigmoid(Wz x + Uz h + bz)          update gate
    r = sigmoid(Wr x + Ur h + br)          reset gate
    n = tanh(Wn x + Un (r * h) + bn)       candidate state
    h' = (1 - z) * n + z * h

A cell is a plain dict of nine arrays: Wz/Wr/Wn (H, I), Uz/Ur/Un (H, H),
bz/br/bn (H,). Everything runs in float64 batched over the leading axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GATE_KEYS = ("Wz", "Wr", "Wn", "Uz", "Ur", "Un", "bz", "br", "bn")


def init_cell(input_dim: int, hidden: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Weight matrices uniform in +-1/sqrt(fan_in); biases zero."""

    def uniform(rows, cols):
        bound = 1.0 / np.sqrt(cols)
        return rng.uniform(-bound, bound, size=(rows, cols))

    return {
        "Wz": uniform(hidden, input_dim),
        "Wr": uniform(hidden, input_dim),
        "Wn": uniform(hidden, input_dim),
        "Uz": uniform(hidden, hidden),
        "Ur": uniform(hidden, hidden),
        "Un": uniform(hidden, hidden),
        "bz": np.zeros(hidden),
        "br": np.zeros(hidden),
        "bn": np.zeros(hidden),
    }


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def gru_cell_forward(x: np.ndarray, h: np.ndarray, cell: dict[str, np.ndarray]) -> np.ndarray:
    """One GRU step; x is (I,) or (B, I), h is (H,) or (B, H)."""
    x = np.asarray(x, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if x.shape[-1] != cell["Wz"].shape[1] or h.shape[-1] != cell["Uz"].shape[1]:
        raise ValueError(
            f"gru_cell_forward: input dim {x.shape[-1]} / hidden dim {h.shape[-1]} "
            f"do not match cell shapes {cell['Wz'].shape} / {cell['Uz'].shape}"
        )
    z = _sigmoid(x @ cell["Wz"].T + h @ cell["Uz"].T + cell["bz"])
    r = _sigmoid(x @ cell["Wr"].T + h @ cell["Ur"].T + cell["br"])
    n = np.tanh(x @ cell["Wn"].T + (r * h) @ cell["Un"].T + cell["bn"])
    return (1.0 - z) * n + z * h


@dataclass
class SequenceCache:
    """Per-step intermediates of one directional pass, indexed by input time."""

    x: np.ndarray  # (B, T, I) the inputs the pass consumed
    h_prev: np.ndarray  # (B, T, H) state entering each step
    z: np.ndarray
    r: np.ndarray
    n: np.ndarray
    hs: np.ndarray  # (B, T, H) state leaving each step
    reverse: bool

    @property
    def final_state(self) -> np.ndarray:
        return self.hs[:, 0] if self.reverse else self.hs[:, -1]


def sequence_forward(
    cell: dict[str, np.ndarray],
    x: np.ndarray,
    reverse: bool = False,
    h0: np.ndarray | None = None,
) -> SequenceCache:
    """Run the recurrence over x (B, T, I); reverse walks t = T-1 .. 0.

    Cache arrays stay aligned to input time, so hs[:, t] is the state after
    reading step t regardless of direction.
    """
    B, T, _ = x.shape
    H = cell["Uz"].shape[0]
    h = np.zeros((B, H)) if h0 is None else np.asarray(h0, dtype=np.float64)
    h_prev = np.empty((B, T, H))
    zs = np.empty((B, T, H))
    rs = np.empty((B, T, H))
    ns = np.empty((B, T, H))
    hs = np.empty((B, T, H))
    order = range(T - 1, -1, -1) if reverse else range(T)
    for t in order:
        xt = x[:, t]
        z = _sigmoid(xt @ cell["Wz"].T + h @ cell["Uz"].T + cell["bz"])
        r = _sigmoid(xt @ cell["Wr"].T + h @ cell["Ur"].T + cell["br"])
        n = np.tanh(xt @ cell["Wn"].T + (r * h) @ cell["Un"].T + cell["bn"])
        h_prev[:, t] = h
        h = (1.0 - z) * n + z * h
        zs[:, t], rs[:, t], ns[:, t], hs[:, t] = z, r, n, h
        if not np.isfinite(h).all():
            raise FloatingPointError(f"non-finite hidden state at step {t}")
    return SequenceCache(x=x, h_prev=h_prev, z=zs, r=rs, n=ns, hs=hs, reverse=reverse)


def sequence_backward(
    cell: dict[str, np.ndarray],
    cache: SequenceCache,
    d_hs: np.ndarray | None = None,
    d_final: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, dict[str, np.ndarray]]:
    """Backpropagate through one directional pass.

    d_hs carries per-step gradients on hs (aligned to input time), d_final the
    gradient on the pass's final state. Returns (d_x, d_h0, cell gradients).
    """
    x = cache.x
    B, T, _ = x.shape
    H = cell["Uz"].shape[0]
    grads = {k: np.zeros_like(cell[k]) for k in GATE_KEYS}
    d_x = np.zeros_like(x)
    d_h = np.zeros((B, H)) if d_final is None else d_final.astype(np.float64).copy()
    order = range(T) if cache.reverse else range(T - 1, -1, -1)
    for t in order:
        d_total = d_h if d_hs is None else d_h + d_hs[:, t]
        z, r, n, hp = cache.z[:, t], cache.r[:, t], cache.n[:, t], cache.h_prev[:, t]
        xt = x[:, t]
        hr = r * hp
        d_z = d_total * (hp - n)
        d_az = d_z * z * (1.0 - z)
        d_n = d_total * (1.0 - z)
        d_an = d_n * (1.0 - n * n)
        d_hr = d_an @ cell["Un"]
        d_r = d_hr * hp
        d_ar = d_r * r * (1.0 - r)
        d_x[:, t] = d_az @ cell["Wz"] + d_ar @ cell["Wr"] + d_an @ cell["Wn"]
        grads["Wz"] += d_az.T @ xt
        grads["Wr"] += d_ar.T @ xt
        grads["Wn"] += d_an.T @ xt
        grads["Uz"] += d_az.T @ hp
        grads["Ur"] += d_ar.T @ hp
        grads["Un"] += d_an.T @ hr
        grads["bz"] += d_az.sum(axis=0)
        grads["br"] += d_ar.sum(axis=0)
        grads["bn"] += d_an.sum(axis=0)
        d_h = d_total * z + d_hr * r + d_az @ cell["Uz"] + d_ar @ cell["Ur"]
    return d_x, d_h, grads
