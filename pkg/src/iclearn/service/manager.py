"""Session lifecycle: the annotation loop wired to threads and the store.

A session steps through phases:

    pretraining -> awaiting_labels -> fine_tuning -> awaiting_labels -> ...
                                                  -> idle (budget or pool done)

Training phases run on a background thread; requests only read scalars then,
and label submission is rejected until the thread finishes.  Every phase
boundary checkpoints the loop, so a restarted process resumes any session at
its last boundary: a pending batch comes back as awaiting_labels, a finished
run as idle, and a session that died mid-pretrain starts pretraining afresh.
"""

from __future__ import annotations

import os
import threading
import time
import uuid

import numpy as np

from ..data import Dataset, load_dataset
from ..engine import training
from ..engine.model import ModelConfig
from ..loop import IterativeLabelingLoop, LoopConfig
from . import store

PHASES = ("pretraining", "awaiting_labels", "fine_tuning", "idle", "error")

DERIVED_MODEL_KEYS = ("input_dim", "seq_len", "num_classes")


class WrongPhase(RuntimeError):
    pass


def pca_2d(points: np.ndarray) -> np.ndarray:
    """Project onto the top two principal components.  Each component's sign
    is fixed so its largest-magnitude coordinate is positive, which keeps the
    picture stable across runs."""
    x = np.asarray(points, dtype=np.float64)
    centered = x - x.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:2].copy()
    for row in components:
        peak = np.argmax(np.abs(row))
        if row[peak] < 0:
            row *= -1.0
    return centered @ components.T


def _split_inputs(dataset: Dataset, split: str) -> tuple[np.ndarray, list[str]]:
    samples = dataset.split_samples(split)
    return training.stack_inputs(samples), [s.id for s in samples]


class Session:
    def __init__(
        self,
        session_id: str,
        directory: str,
        loop: IterativeLabelingLoop,
        dataset: Dataset,
        meta: dict,
    ):
        self.id = session_id
        self.dir = directory
        self.loop = loop
        self.dataset = dataset
        self.meta = meta
        self.class_names = list(meta["class_names"])
        self.phase = "pretraining"
        self.last_error: str | None = None
        self.lock = threading.Lock()

    # -- views ------------------------------------------------------------

    def status(self) -> dict:
        return {
            "session_id": self.id,
            "phase": self.phase,
            "iteration": self.loop.iteration,
            "labeled_count": self.loop.labeled_count,
            "labeled_fraction": self.loop.labeled_fraction,
            "pool_size": len(self.loop.ids),
            "class_names": self.class_names,
            "strategy": self.loop.loop_config.strategy,
            "last_error": self.last_error,
        }

    def queries(self) -> dict:
        if self.phase != "awaiting_labels":
            raise WrongPhase(f"no open query batch in phase {self.phase!r}")
        return {"iteration": self.loop.iteration + 1, "queried_ids": list(self.loop.pending)}

    def embedding(self) -> dict:
        state = self.loop.last_state
        if self.phase in ("pretraining", "fine_tuning") or state is None:
            raise WrongPhase(f"embedding not available in phase {self.phase!r}")
        points = pca_2d(state.latents)
        pending = set(self.loop.pending)
        labels = self.loop.labels
        return {
            "ids": list(self.loop.ids),
            "points": [[float(a), float(b)] for a, b in points],
            "cluster": [int(c) for c in state.assignments],
            "labeled": [bool(v) for v in state.labeled],
            "label": [labels.get(sid) for sid in self.loop.ids],
            "max_prob": [float(v) for v in state.max_prob],
            "entropy": [float(v) for v in state.entropies],
            "queried": [sid in pending for sid in self.loop.ids],
        }

    def history(self) -> dict:
        return {"records": list(self.loop.history)}

    def sample_payload(self, sample_id: str) -> dict:
        sample = self.dataset.by_id(sample_id)  # KeyError -> 404 upstream
        label_index = self.loop.labels.get(sample.id)
        if label_index is None and sample.label in self.class_names:
            label_index = self.class_names.index(sample.label)
        kp = sample.keypoints
        return {
            "id": sample.id,
            "label": None if label_index is None else self.class_names[label_index],
            "label_index": label_index,
            "num_frames": sample.T,
            "num_keypoints": sample.N,
            "dims": sample.D,
            "keypoints": kp.tolist(),
            "frames_2d": kp[:, :, :2].tolist(),
        }

    # -- transitions --------------------------------------------------------

    def _checkpoint(self) -> None:
        self.loop.save(os.path.join(self.dir, store.CHECKPOINT_FILE))

    def _advance(self) -> None:
        """Propose the next batch (or finish) and checkpoint.  Caller holds
        the lock."""
        if self.loop.iteration >= self.loop.loop_config.iterations:
            self.phase = "idle"
        else:
            queried = self.loop.propose()
            self.phase = "awaiting_labels" if queried else "idle"
        self._checkpoint()

    def start_pretraining(self) -> None:
        threading.Thread(target=self._run_pretrain, daemon=True).start()

    def _run_pretrain(self) -> None:
        try:
            self.loop.pretrain()
            with self.lock:
                self._advance()
        except Exception as exc:  # surfaced via status, never crashes the app
            self.last_error = f"{type(exc).__name__}: {exc}"
            self.phase = "error"

    def submit_labels(self, raw_labels: dict) -> dict:
        """Validate and commit a full batch, then fine-tune asynchronously."""
        resolved: dict[str, int] = {}
        for sid, value in raw_labels.items():
            if isinstance(value, str):
                if value not in self.class_names:
                    raise ValueError(f"unknown class name {value!r} for {sid!r}")
                resolved[str(sid)] = self.class_names.index(value)
            else:
                resolved[str(sid)] = int(value)
        with self.lock:
            if self.phase != "awaiting_labels":
                raise WrongPhase(f"labels not accepted in phase {self.phase!r}")
            round_number = self.loop.iteration + 1
            self.loop.commit_labels(resolved)
            now = time.time()
            labels_path = os.path.join(self.dir, store.LABELS_FILE)
            for sid in sorted(resolved):
                store.append_jsonl(
                    labels_path,
                    {"round": round_number, "id": sid, "label": resolved[sid], "ts": now},
                )
            self.phase = "fine_tuning"
            queried = list(resolved)
        threading.Thread(target=self._run_finetune, args=(queried,), daemon=True).start()
        return {"accepted": len(resolved), "phase": self.phase}

    def _run_finetune(self, queried: list[str]) -> None:
        try:
            self.loop.finetune()
            with self.lock:
                entry = self.loop.record(queried)
                store.append_jsonl(os.path.join(self.dir, store.HISTORY_FILE), entry)
                self._advance()
        except Exception as exc:
            self.last_error = f"{type(exc).__name__}: {exc}"
            self.phase = "error"


class SessionManager:
    def __init__(self, root: str):
        self.root = os.path.abspath(root)
        os.makedirs(self.root, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self._guard = threading.Lock()

    def list_ids(self) -> list[str]:
        on_disk = set(store.list_session_ids(self.root))
        return sorted(on_disk | set(self.sessions))

    def create(self, request: dict) -> Session:
        dataset_path = request.get("dataset")
        if not dataset_path or not os.path.exists(dataset_path):
            raise ValueError(f"dataset path does not exist: {dataset_path!r}")
        train_split = request.get("train_split", "train")
        test_split = request.get("test_split")
        model_kwargs = dict(request.get("model", {}))
        for key in DERIVED_MODEL_KEYS:
            if key in model_kwargs:
                raise ValueError(f"model.{key} is derived from the dataset")
        dataset = load_dataset(dataset_path)
        if train_split not in dataset.splits:
            raise ValueError(f"dataset has no split {train_split!r}")
        class_names = list(request.get("class_names") or dataset.class_names)
        if not class_names:
            raise ValueError("no class names: label some samples or pass class_names")
        x, ids = _split_inputs(dataset, train_split)
        x_test = y_test = None
        if test_split is not None:
            if test_split not in dataset.splits:
                raise ValueError(f"dataset has no split {test_split!r}")
            test_samples = dataset.split_samples(test_split)
            if any(s.label not in class_names for s in test_samples):
                raise ValueError(f"split {test_split!r} must be fully labeled")
            x_test = training.stack_inputs(test_samples)
            y_test = np.array([class_names.index(s.label) for s in test_samples])
        model_config = ModelConfig(
            input_dim=x.shape[2],
            seq_len=x.shape[1],
            num_classes=len(class_names),
            **model_kwargs,
        )
        loop_config = LoopConfig(**request.get("loop", {}))
        loop = IterativeLabelingLoop(
            x, ids, model_config, loop_config, x_test=x_test, y_test=y_test
        )
        session_id = uuid.uuid4().hex[:12]
        meta = {
            "session_id": session_id,
            "created_at": time.time(),
            "dataset": os.path.abspath(dataset_path),
            "train_split": train_split,
            "test_split": test_split,
            "model": model_config.to_dict(),
            "loop": loop_config.to_dict(),
            "class_names": class_names,
        }
        directory = store.create_session_dir(self.root, session_id, meta)
        session = Session(session_id, directory, loop, dataset, meta)
        with self._guard:
            self.sessions[session_id] = session
        session.start_pretraining()
        return session

    def get(self, session_id: str) -> Session:
        with self._guard:
            if session_id not in self.sessions:
                self.sessions[session_id] = self._recover(session_id)
            return self.sessions[session_id]

    def _recover(self, session_id: str) -> Session:
        directory = store.session_dir(self.root, session_id)
        if not os.path.isfile(os.path.join(directory, store.SESSION_FILE)):
            raise KeyError(session_id)
        meta = store.read_session_meta(self.root, session_id)
        dataset = load_dataset(meta["dataset"])
        x, ids = _split_inputs(dataset, meta["train_split"])
        x_test = y_test = None
        if meta["test_split"] is not None:
            test_samples = dataset.split_samples(meta["test_split"])
            x_test = training.stack_inputs(test_samples)
            y_test = np.array([meta["class_names"].index(s.label) for s in test_samples])
        checkpoint_path = os.path.join(directory, store.CHECKPOINT_FILE)
        if os.path.exists(checkpoint_path):
            loop = IterativeLabelingLoop.load(checkpoint_path, x, ids, x_test, y_test)
            session = Session(session_id, directory, loop, dataset, meta)
            session.phase = "awaiting_labels" if loop.pending else "idle"
        else:
            # died before the first boundary: pretrain again from the start
            loop = IterativeLabelingLoop(
                x,
                ids,
                ModelConfig.from_dict(meta["model"]),
                LoopConfig.from_dict(meta["loop"]),
                x_test=x_test,
                y_test=y_test,
            )
            session = Session(session_id, directory, loop, dataset, meta)
            session.start_pretraining()
        return session
