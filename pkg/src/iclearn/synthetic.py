"""Synthetic keypoint-motion datasets for tests, demos, and benchmarks.

The motion dataset animates two keypoints orbiting their own centers at a
shared rate.  A class is a frequency/phase motif: the pair completes 2 or 3
cycles per window, with the second keypoint leading or lagging the first by a
quarter cycle.  Every sample carries its own random global phase, frequency
and amplitude jitter, a shared translation offset, and coordinate noise.
Position snapshots therefore overlap heavily across classes; what separates
them is the motion itself, which is exactly what a sequence model can exploit
and a raw-coordinate neighbor lookup cannot.
"""

from __future__ import annotations

import math

import numpy as np

from .data import Dataset, Sample

MOTION_CLASSES = (
    ("f2-lead", 2.0, 0.5 * math.pi),
    ("f2-lag", 2.0, -0.5 * math.pi),
    ("f3-lead", 3.0, 0.5 * math.pi),
    ("f3-lag", 3.0, -0.5 * math.pi),
)

FREQ_JITTER = 0.08  # relative spread around the class frequency
SHIFT_JITTER = 0.35  # shared translation offset, uniform per coordinate


def _motion_sample(
    sid: str, label: str, freq0: float, rel: float, T: int, noise: float, rng: np.random.Generator
) -> Sample:
    freq = freq0 * rng.uniform(1.0 - FREQ_JITTER, 1.0 + FREQ_JITTER)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    amp = rng.uniform(0.7, 1.3)
    offset = rng.uniform(-SHIFT_JITTER, SHIFT_JITTER, 2)
    angle = 2.0 * math.pi * freq * (np.arange(T) / T) + phase
    kp = np.empty((T, 2, 2))
    kp[:, 0, 0] = 0.5 * amp * np.cos(angle) + offset[0]
    kp[:, 0, 1] = 0.5 * amp * np.sin(angle) + offset[1]
    kp[:, 1, 0] = 0.8 + 0.3 * amp * np.cos(angle + rel) + offset[0]
    kp[:, 1, 1] = 0.3 * amp * np.sin(angle + rel) + offset[1]
    kp += rng.normal(0.0, noise, size=kp.shape)
    return Sample(id=sid, keypoints=kp, label=label)


def make_motion_dataset(
    n_train: int = 200,
    n_test: int = 80,
    T: int = 24,
    noise: float = 0.2,
    seed: int = 0,
) -> Dataset:
    """Balanced four-class dataset with ``train`` and ``test`` splits."""
    rng = np.random.default_rng(seed)
    samples = []
    counts = {"train": n_train, "test": n_test}
    splits: dict[str, tuple[int, ...]] = {}
    start = 0
    for split, count in counts.items():
        for i in range(count):
            label, freq0, rel = MOTION_CLASSES[i % len(MOTION_CLASSES)]
            samples.append(
                _motion_sample(f"{split}-{i:04d}", label, freq0, rel, T, noise, rng)
            )
        splits[split] = tuple(range(start, start + count))
        start += count
    return Dataset(
        samples=tuple(samples),
        class_names=tuple(name for name, _, _ in MOTION_CLASSES),
        splits=splits,
    )


def sinusoid_batch(
    n: int = 8, T: int = 20, channels: int = 2, seed: int = 0
) -> np.ndarray:
    """(n, T, channels) batch of distinct sinusoids in [-1, 1], for quick
    reconstruction sanity checks."""
    rng = np.random.default_rng(seed)
    t = np.arange(T) / T
    x = np.empty((n, T, channels))
    for i in range(n):
        freq = 1.0 + 3.0 * i / max(n - 1, 1)
        for c in range(channels):
            phase = rng.uniform(0.0, 2.0 * math.pi)
            x[i, :, c] = np.sin(2.0 * math.pi * freq * t + phase)
    return x
