"""The iterative annotation loop: cluster, select, label, fine-tune, repeat.

One object drives both offline simulation (an oracle answers immediately) and
the interactive service (a human answers between steps).  Both paths call the
same primitives in the same order, so a live session replayed with the same
seed and the same answers reproduces the simulated history bit for bit.

Each round:
  1. encode every training sequence, classify, run k-means on the latents
  2. pick at most `cap` unlabeled sequences by the configured strategy
  3. wait for labels covering exactly that batch
  4. fine-tune on the combined objective, labeled rows contributing the
     cross-entropy term and every row the reconstruction term

Setting pretrain_epochs > 0 gives the two-phase recipe (reconstruction-only
warmup, then combined fine-tuning); 0 trains the combined objective from
scratch.  The learning-rate schedule runs on a global epoch counter so each
round continues the decay where the previous one stopped.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .clustering import kmeans
from .engine import checkpoint as ckpt
from .engine import model as M
from .engine import optim, training
from .selection import STRATEGIES, SelectionState, select


@dataclass(frozen=True)
class LoopConfig:
    strategy: str = "kr"
    per: float = 0.05  # requested fraction (of pool or of each cluster) per round
    n_clusters: int = 4
    cap: int | None = None  # max annotations per round; default 2 * n_clusters
    iterations: int = 10
    pretrain_epochs: int = 0
    finetune_epochs: int = 30
    target_fraction: float | None = None  # stop once this share of ids is labeled

    def __post_init__(self):
        if self.strategy not in STRATEGIES and self.strategy != "random":
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0.0 < self.per <= 1.0:
            raise ValueError("per must be in (0, 1]")
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be >= 1")
        if self.cap is not None and self.cap < 1:
            raise ValueError("cap must be >= 1")
        if self.iterations < 0 or self.pretrain_epochs < 0 or self.finetune_epochs < 1:
            raise ValueError("invalid loop schedule values")
        if self.target_fraction is not None and not 0.0 < self.target_fraction <= 1.0:
            raise ValueError("target_fraction must be in (0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "LoopConfig":
        return cls(**obj)


Oracle = Callable[[list[str]], dict[str, int]]


class IterativeLabelingLoop:
    """Owns the model parameters, optimizer, labels, and randomness of one run."""

    def __init__(
        self,
        x: np.ndarray,
        ids: Sequence[str],
        model_config: M.ModelConfig,
        loop_config: LoopConfig,
        x_test: np.ndarray | None = None,
        y_test: np.ndarray | None = None,
    ):
        self.x = np.asarray(x, dtype=np.float64)
        self.ids = list(ids)
        if len(self.ids) != self.x.shape[0]:
            raise ValueError("ids and sequences disagree in length")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate ids")
        if loop_config.n_clusters > len(self.ids):
            raise ValueError("more clusters than sequences")
        self.index_of = {sid: i for i, sid in enumerate(self.ids)}
        self.model_config = model_config
        self.loop_config = loop_config
        self.x_test = None if x_test is None else np.asarray(x_test, dtype=np.float64)
        self.y_test = None if y_test is None else np.asarray(y_test, dtype=np.int64)
        self.rng = np.random.default_rng(model_config.seed)
        self.params = M.init_params(model_config, self.rng)
        self.optimizer = optim.AdamState()
        self.labels: dict[str, int] = {}
        self.pending: list[str] = []
        self.history: list[dict] = []
        self.iteration = 0
        self.epochs_done = 0
        self.pretrained = False
        self.last_state: SelectionState | None = None

    # -- budget ---------------------------------------------------------

    @property
    def labeled_count(self) -> int:
        return len(self.labels)

    @property
    def labeled_fraction(self) -> float:
        return self.labeled_count / len(self.ids)

    def _target_count(self) -> int | None:
        frac = self.loop_config.target_fraction
        if frac is None:
            return None
        return math.ceil(frac * len(self.ids))

    def _effective_cap(self) -> int:
        cap = self.loop_config.cap
        if cap is None:
            cap = 2 * self.loop_config.n_clusters
        target = self._target_count()
        if target is not None:
            cap = min(cap, max(target - self.labeled_count, 0))
        return cap

    # -- primitives -----------------------------------------------------

    def pretrain(self) -> training.TrainResult | None:
        """Reconstruction-only warmup; a no-op when pretrain_epochs is 0."""
        if self.pretrained:
            raise RuntimeError("pretraining already ran")
        self.pretrained = True
        if self.loop_config.pretrain_epochs == 0:
            return None
        result = training.train_autoregression(
            self.params,
            self.model_config,
            self.x,
            self.rng,
            self.optimizer,
            epochs=self.loop_config.pretrain_epochs,
        )
        self.epochs_done += self.loop_config.pretrain_epochs
        return result

    def compute_state(self) -> SelectionState:
        """Fresh latents, probabilities, and clustering for the whole pool."""
        latents, _ = M.encode_batch(self.params, self.model_config, self.x)
        probs = M.classify(latents, self.params)
        km = kmeans(
            latents,
            self.loop_config.n_clusters,
            np.random.default_rng(int(self.rng.integers(2**63))),
        )
        labeled = np.zeros(len(self.ids), dtype=bool)
        for sid in self.labels:
            labeled[self.index_of[sid]] = True
        self.last_state = SelectionState.compute(
            latents, probs, km.assignments, km.centroids, labeled
        )
        return self.last_state

    def propose(self) -> list[str]:
        """Choose the next batch to annotate; empty means the run is done."""
        if not self.pretrained:
            raise RuntimeError("call pretrain() before the first proposal")
        if self.pending:
            raise RuntimeError("previous batch is still awaiting labels")
        cap = self._effective_cap()
        if cap == 0:
            return []
        state = self.compute_state()
        chosen = select(state, self.loop_config.strategy, self.loop_config.per, self.rng, cap)
        self.pending = [self.ids[i] for i in chosen]
        return list(self.pending)

    def commit_labels(self, answers: dict[str, int]) -> None:
        """Record labels for exactly the pending batch; partial answers are
        rejected so an aborted round leaves no trace."""
        if not self.pending:
            raise RuntimeError("no batch is awaiting labels")
        pending = set(self.pending)
        extra = set(answers) - pending
        if extra:
            raise ValueError(f"labels for ids not in the requested batch: {sorted(extra)}")
        missing = pending - set(answers)
        if missing:
            raise ValueError(f"batch incomplete, missing labels for: {sorted(missing)}")
        n_classes = self.model_config.num_classes
        for sid, label in answers.items():
            if not 0 <= int(label) < n_classes:
                raise ValueError(f"label {label} for {sid!r} out of range [0, {n_classes})")
        for sid in self.pending:
            self.labels[sid] = int(answers[sid])
        self.pending = []

    def finetune(self) -> training.TrainResult:
        """One round of combined training over the whole pool."""
        labels = np.zeros(len(self.ids), dtype=np.int64)
        mask = np.zeros(len(self.ids), dtype=bool)
        for sid, label in self.labels.items():
            i = self.index_of[sid]
            labels[i] = label
            mask[i] = True
        result = training.run_training(
            self.params,
            self.model_config,
            self.x,
            self.rng,
            self.optimizer,
            labels=labels,
            label_mask=mask,
            epochs=self.loop_config.finetune_epochs,
            epoch_offset=self.epochs_done,
        )
        self.epochs_done += self.loop_config.finetune_epochs
        return result

    def test_accuracy(self) -> float | None:
        if self.x_test is None or self.y_test is None:
            return None
        latents, _ = M.encode_batch(self.params, self.model_config, self.x_test)
        predicted = M.classify(latents, self.params).argmax(axis=1)
        return float(np.mean(predicted == self.y_test))

    def record(self, selected_ids: list[str]) -> dict:
        self.iteration += 1
        entry = {
            "iteration": self.iteration,
            "selected_ids": sorted(selected_ids),
            "labeled_count": self.labeled_count,
            "labeled_fraction": self.labeled_fraction,
            "test_accuracy": self.test_accuracy(),
        }
        self.history.append(entry)
        return entry

    # -- driving --------------------------------------------------------

    def run(self, oracle: Oracle) -> list[dict]:
        """Algorithm loop end to end with an immediate oracle."""
        if not self.pretrained:
            self.pretrain()
        while self.iteration < self.loop_config.iterations:
            queried = self.propose()
            if not queried:
                break
            self.commit_labels(oracle(queried))
            self.finetune()
            self.record(queried)
        return self.history

    # -- persistence ------------------------------------------------------

    def save(self, path: str) -> None:
        extra = {
            "loop_config": self.loop_config.to_dict(),
            "labels": dict(sorted(self.labels.items())),
            "pending": list(self.pending),
            "history": self.history,
            "iteration": self.iteration,
            "epochs_done": self.epochs_done,
            "pretrained": self.pretrained,
        }
        if self.last_state is not None:
            # clustering is the one non-recomputable piece of the round state
            extra["clusters"] = {
                "assignments": ckpt.encode_array(self.last_state.assignments),
                "centroids": ckpt.encode_array(self.last_state.centroids),
            }
        ckpt.save_checkpoint(
            path, self.params, self.model_config, self.optimizer, self.rng, extra
        )

    @classmethod
    def load(
        cls,
        path: str,
        x: np.ndarray,
        ids: Sequence[str],
        x_test: np.ndarray | None = None,
        y_test: np.ndarray | None = None,
    ) -> "IterativeLabelingLoop":
        doc = ckpt.load_checkpoint(path)
        extra = doc["extra"]
        loop = cls(
            x,
            ids,
            doc["config"],
            LoopConfig.from_dict(extra["loop_config"]),
            x_test=x_test,
            y_test=y_test,
        )
        loop.params = doc["params"]
        loop.optimizer = doc["optimizer"] or optim.AdamState()
        if doc["rng"] is not None:
            loop.rng = doc["rng"]
        loop.labels = {str(k): int(v) for k, v in extra["labels"].items()}
        loop.pending = [str(s) for s in extra["pending"]]
        loop.history = list(extra["history"])
        loop.iteration = int(extra["iteration"])
        loop.epochs_done = int(extra["epochs_done"])
        loop.pretrained = bool(extra["pretrained"])
        if "clusters" in extra:
            # latents and probabilities re-derive from the restored params;
            # no generator draws happen here, so replay stays exact
            latents, _ = M.encode_batch(loop.params, loop.model_config, loop.x)
            probs = M.classify(latents, loop.params)
            labeled = np.zeros(len(loop.ids), dtype=bool)
            for sid in loop.labels:
                labeled[loop.index_of[sid]] = True
            loop.last_state = SelectionState.compute(
                latents,
                probs,
                ckpt.decode_array(extra["clusters"]["assignments"]).astype(np.int64),
                ckpt.decode_array(extra["clusters"]["centroids"]),
                labeled,
            )
        return loop


def run_active_loop(
    x: np.ndarray,
    ids: Sequence[str],
    oracle: Oracle,
    model_config: M.ModelConfig,
    loop_config: LoopConfig,
    x_test: np.ndarray | None = None,
    y_test: np.ndarray | None = None,
) -> IterativeLabelingLoop:
    """Convenience wrapper: build a loop, run it to completion, return it."""
    loop = IterativeLabelingLoop(
        x, ids, model_config, loop_config, x_test=x_test, y_test=y_test
    )
    loop.run(oracle)
    return loop
