"""Keypoint sequence ingestion, validation, and preprocessing.

A sample is one tracked sequence of T frames, each frame holding N keypoints
in D spatial dimensions (D = 2 or 3). Files are line-delimited JSON records:

    {"id": str, "keypoints": [[[x, y(, z)] * N] * T],
     "confidence": optional [[c * N] * T], "label": optional str}

All operations here are pure; datasets are immutable after construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

EPS_DEGENERATE = 1e-8


class DatasetError(ValueError):
    """Malformed dataset file or record."""


class DegenerateFrameError(ValueError):
    """Alignment axes of a frame are too short or collinear."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Sample:
    """One keypoint sequence with optional per-entry confidence and label."""

    id: str
    keypoints: np.ndarray  # (T, N, D)
    confidence: np.ndarray | None = None  # (T, N), entries in [0, 1]
    label: str | None = None

    def __post_init__(self):
        kp = np.asarray(self.keypoints, dtype=np.float64)
        if kp.ndim != 3:
            raise DatasetError(
                f"sample {self.id!r}: keypoints must be (T, N, D), got shape {kp.shape}"
            )
        T, N, D = kp.shape
        if T < 2:
            raise DatasetError(f"sample {self.id!r}: need at least 2 frames, got {T}")
        if N < 1:
            raise DatasetError(f"sample {self.id!r}: need at least 1 keypoint")
        if D not in (2, 3):
            raise DatasetError(f"sample {self.id!r}: D must be 2 or 3, got {D}")
        if not np.isfinite(kp).all():
            raise DatasetError(f"sample {self.id!r}: non-finite keypoint values")
        object.__setattr__(self, "keypoints", _freeze(kp))
        if self.confidence is not None:
            conf = np.asarray(self.confidence, dtype=np.float64)
            if conf.shape != (T, N):
                raise DatasetError(
                    f"sample {self.id!r}: confidence shape {conf.shape} "
                    f"does not match (T, N) = {(T, N)}"
                )
            if not np.isfinite(conf).all() or conf.min() < 0.0 or conf.max() > 1.0:
                raise DatasetError(
                    f"sample {self.id!r}: confidence entries must be finite and in [0, 1]"
                )
            object.__setattr__(self, "confidence", _freeze(conf))

    @property
    def T(self) -> int:
        return self.keypoints.shape[0]

    @property
    def N(self) -> int:
        return self.keypoints.shape[1]

    @property
    def D(self) -> int:
        return self.keypoints.shape[2]

    def flat(self) -> np.ndarray:
        """Keypoints as (T, N*D) step vectors."""
        T, N, D = self.keypoints.shape
        return self.keypoints.reshape(T, N * D)


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of samples with a class inventory and named splits."""

    samples: tuple[Sample, ...]
    class_names: tuple[str, ...] = ()
    splits: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        seen: set[str] = set()
        for s in self.samples:
            if s.id in seen:
                raise DatasetError(f"duplicate sample id {s.id!r}")
            seen.add(s.id)
        known = set(self.class_names)
        for s in self.samples:
            if s.label is not None and s.label not in known:
                raise DatasetError(
                    f"sample {s.id!r}: label {s.label!r} not in class_names"
                )
        n = len(self.samples)
        used: set[int] = set()
        for name, idx in self.splits.items():
            idx = tuple(int(i) for i in idx)
            for i in idx:
                if not 0 <= i < n:
                    raise DatasetError(f"split {name!r}: index {i} out of range")
                if i in used:
                    raise DatasetError(f"split {name!r}: index {i} appears twice")
                used.add(i)
            self.splits[name] = idx

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def by_id(self, sample_id: str) -> Sample:
        for s in self.samples:
            if s.id == sample_id:
                return s
        raise KeyError(sample_id)

    def split_samples(self, name: str) -> list[Sample]:
        return [self.samples[i] for i in self.splits[name]]

    def label_index(self, label: str) -> int:
        return self.class_names.index(label)

    def with_samples(self, samples: list[Sample]) -> "Dataset":
        """Same class inventory, new sample list, splits dropped."""
        return Dataset(tuple(samples), self.class_names, {})


@dataclass(frozen=True)
class SkeletonSpec:
    """Names of the keypoints and of the alignment landmarks.

    `root` anchors the translation; the `hip_left`/`hip_right` pair defines
    the ground-parallel axis and `spine` (relative to root) the vertical one.
    """

    keypoint_names: tuple[str, ...]
    root: str
    hip_left: str
    hip_right: str
    spine: str

    def __post_init__(self):
        object.__setattr__(self, "keypoint_names", tuple(self.keypoint_names))
        for name in (self.root, self.hip_left, self.hip_right, self.spine):
            if name not in self.keypoint_names:
                raise DatasetError(f"skeleton landmark {name!r} not a keypoint name")
        if {self.hip_left, self.hip_right} == {self.root, self.spine}:
            raise DatasetError("hip axis and spine axis use the same keypoint pair")
        if self.hip_left == self.hip_right or self.root == self.spine:
            raise DatasetError("alignment axis endpoints must differ")

    def index(self, name: str) -> int:
        return self.keypoint_names.index(name)

    @classmethod
    def from_file(cls, path) -> "SkeletonSpec":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(
            keypoint_names=tuple(obj["keypoint_names"]),
            root=obj["root"],
            hip_left=obj["hip_left"],
            hip_right=obj["hip_right"],
            spine=obj["spine"],
        )


def _record_to_sample(obj: dict, line_no: int) -> Sample:
    if "id" not in obj or "keypoints" not in obj:
        raise DatasetError(f"line {line_no}: record needs 'id' and 'keypoints'")
    try:
        return Sample(
            id=str(obj["id"]),
            keypoints=np.asarray(obj["keypoints"], dtype=np.float64),
            confidence=None
            if obj.get("confidence") is None
            else np.asarray(obj["confidence"], dtype=np.float64),
            label=obj.get("label"),
        )
    except DatasetError:
        raise
    except (TypeError, ValueError) as exc:
        raise DatasetError(f"line {line_no}: {exc}") from exc


def load_dataset(path, format: str = "jsonl") -> Dataset:
    """Read a line-delimited dataset file, preserving record order.

    Class names are collected from labels in first-appearance order.
    Raises DatasetError with the offending line number / sample id.
    """
    if format != "jsonl":
        raise DatasetError(f"unsupported format {format!r}")
    samples: list[Sample] = []
    classes: list[str] = []
    splits: dict[str, list[int]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
            sample = _record_to_sample(obj, line_no)
            if obj.get("split") is not None:
                splits.setdefault(str(obj["split"]), []).append(len(samples))
            samples.append(sample)
            if sample.label is not None and sample.label not in classes:
                classes.append(sample.label)
    return Dataset(
        tuple(samples), tuple(classes), {k: tuple(v) for k, v in splits.items()}
    )


def save_dataset(dataset: Dataset, path) -> None:
    """Write samples back out in the line-delimited record format."""
    split_of: dict[int, str] = {}
    for name, idx in dataset.splits.items():
        for i in idx:
            split_of[i] = name
    with open(path, "w", encoding="utf-8") as fh:
        for i, s in enumerate(dataset):
            rec = {"id": s.id, "keypoints": s.keypoints.tolist()}
            if s.confidence is not None:
                rec["confidence"] = s.confidence.tolist()
            if s.label is not None:
                rec["label"] = s.label
            if i in split_of:
                rec["split"] = split_of[i]
            fh.write(json.dumps(rec) + "\n")


def view_invariant_transform(sample: Sample, spec: SkeletonSpec) -> Sample:
    """Rigidly canonicalize every frame of a 3-D sequence.

    Per frame: translate the root keypoint to the origin, rotate so the
    left->right hip vector lies along +x (parallel to the ground plane) and
    the root->spine vector lies in the x/y plane with positive y (y is up).
    When hip and spine axes are not orthogonal, the spine axis is
    orthogonalized against the hip axis, so the hip constraint is exact.
    """
    if sample.D != 3:
        raise DatasetError(f"sample {sample.id!r}: view alignment needs D=3")
    i_root = spec.index(spec.root)
    i_hl = spec.index(spec.hip_left)
    i_hr = spec.index(spec.hip_right)
    i_sp = spec.index(spec.spine)
    out = np.empty_like(sample.keypoints)
    for t in range(sample.T):
        frame = sample.keypoints[t] - sample.keypoints[t, i_root]
        hip = frame[i_hr] - frame[i_hl]
        hip_norm = np.linalg.norm(hip)
        if hip_norm < EPS_DEGENERATE:
            raise DegenerateFrameError(
                f"sample {sample.id!r} frame {t}: hip axis shorter than {EPS_DEGENERATE}"
            )
        ux = hip / hip_norm
        spine = frame[i_sp]
        up = spine - np.dot(spine, ux) * ux
        up_norm = np.linalg.norm(up)
        if up_norm < EPS_DEGENERATE:
            raise DegenerateFrameError(
                f"sample {sample.id!r} frame {t}: spine axis degenerate or "
                "collinear with hip axis"
            )
        uy = up / up_norm
        uz = np.cross(ux, uy)
        rot = np.stack([ux, uy, uz])  # rows are the canonical axes
        out[t] = frame @ rot.T
    return replace(sample, keypoints=out)


def confidence_filter(dataset: Dataset, threshold: float) -> Dataset:
    """Keep samples whose minimum confidence passes `threshold`.

    Samples without a confidence tensor pass unconditionally; order is
    preserved and an empty result is legal.
    """
    if not 0.0 <= threshold <= 1.0:
        raise DatasetError(f"threshold must be in [0, 1], got {threshold}")
    kept = [
        s
        for s in dataset
        if s.confidence is None or float(s.confidence.min()) >= threshold
    ]
    return dataset.with_samples(kept)


def resample_length(sample: Sample, target_T: int) -> Sample:
    """Linearly interpolate each trajectory in time to exactly target_T frames."""
    if target_T < 2:
        raise DatasetError(f"target length must be >= 2, got {target_T}")
    T = sample.T
    if T == target_T:
        return sample
    src = np.arange(T, dtype=np.float64)
    dst = np.linspace(0.0, T - 1.0, target_T)
    flat = sample.keypoints.reshape(T, -1)
    out = np.empty((target_T, flat.shape[1]))
    for j in range(flat.shape[1]):
        out[:, j] = np.interp(dst, src, flat[:, j])
    conf = None
    if sample.confidence is not None:
        # nearest-frame confidence keeps entries valid probabilities
        nearest = np.clip(np.round(dst).astype(int), 0, T - 1)
        conf = sample.confidence[nearest]
    return replace(
        sample,
        keypoints=out.reshape(target_T, sample.N, sample.D),
        confidence=conf,
    )


def normalize_sample(sample: Sample, root_index: int = 0) -> Sample:
    """Center on the mean root position and scale by the bounding-box extent.

    The scale is the largest per-axis extent over all frames and keypoints
    after centering; degenerate (constant) samples keep scale 1.
    """
    center = sample.keypoints[:, root_index, :].mean(axis=0)
    kp = sample.keypoints - center
    extent = kp.max(axis=(0, 1)) - kp.min(axis=(0, 1))
    scale = float(extent.max())
    if scale < EPS_DEGENERATE:
        scale = 1.0
    return replace(sample, keypoints=kp / scale)


def split(dataset: Dataset, train_fraction: float, seed: int) -> Dataset:
    """Populate disjoint, exhaustive train/test splits, deterministic per seed.

    |train| = floor(train_fraction * len(dataset)).
    """
    if not 0.0 <= train_fraction <= 1.0:
        raise DatasetError(f"train fraction must be in [0, 1], got {train_fraction}")
    n = len(dataset)
    n_train = math.floor(train_fraction * n)
    perm = np.random.default_rng(seed).permutation(n)
    train = tuple(sorted(int(i) for i in perm[:n_train]))
    test = tuple(sorted(int(i) for i in perm[n_train:]))
    return Dataset(dataset.samples, dataset.class_names, {"train": train, "test": test})


def preprocess(
    dataset: Dataset,
    *,
    skeleton: SkeletonSpec | None = None,
    threshold: float | None = None,
    target_len: int | None = None,
    normalize: bool = True,
) -> Dataset:
    """Standard ingestion pipeline: filter, align (3-D), resample, normalize."""
    if threshold is not None:
        dataset = confidence_filter(dataset, threshold)
    out: list[Sample] = []
    root_index = skeleton.index(skeleton.root) if skeleton is not None else 0
    for s in dataset:
        if skeleton is not None and s.D == 3:
            s = view_invariant_transform(s, skeleton)
        if target_len is not None:
            s = resample_length(s, target_len)
        if normalize:
            s = normalize_sample(s, root_index=root_index)
        out.append(s)
    return dataset.with_samples(out)
