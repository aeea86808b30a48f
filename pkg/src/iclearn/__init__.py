"""Cluster-guided active labeling for keypoint-sequence action recognition.

A recurrent sequence autoencoder learns a latent space from unlabeled motion
capture; clustering that space steers which sequences humans label next; a
softmax head fine-tunes on the growing labeled set.  Submodules:

    data        keypoint records, view alignment, preprocessing
    engine      GRU autoencoder, optimizer, checkpoints, training loops
    classifier  the head plus the two training recipes
    clustering  k-means over latents
    selection   query strategies over uncertainty and clusters
    loop        the iterative annotate/fine-tune cycle
    evaluation  budget-curve benchmarks and baselines
    synthetic   generated motion datasets
    service     HTTP annotation sessions
"""

from .data import Dataset, Sample, SkeletonSpec, load_dataset, save_dataset
from .engine import ModelConfig
from .loop import IterativeLabelingLoop, LoopConfig, run_active_loop

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Sample",
    "SkeletonSpec",
    "load_dataset",
    "save_dataset",
    "ModelConfig",
    "IterativeLabelingLoop",
    "LoopConfig",
    "run_active_loop",
    "__version__",
]
