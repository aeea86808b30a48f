"""One full annotation run with a scripted oracle standing in for the human.

Run from the repository root:

    python3 demos/03_active_loop.py

Each round clusters the latent space, queries a few informative sequences,
"asks" the oracle, fine-tunes, and reports test accuracy; a random-selection
run with no pretraining serves as the point of comparison.
"""

import numpy as np

from iclearn.engine import model as M
from iclearn.evaluation import split_arrays
from iclearn.loop import LoopConfig, run_active_loop
from iclearn.synthetic import make_motion_dataset


def run(strategy, pretrain_epochs, x, ids, truth, model_config, x_test, y_test):
    loop_config = LoopConfig(
        strategy=strategy,
        per=0.1,
        n_clusters=4,
        cap=8,
        iterations=5,
        pretrain_epochs=pretrain_epochs,
        finetune_epochs=20,
    )
    oracle = lambda queried: {sid: truth[sid] for sid in queried}
    return run_active_loop(
        x, ids, oracle, model_config, loop_config, x_test=x_test, y_test=y_test
    )


def main():
    dataset = make_motion_dataset(n_train=120, n_test=48, seed=0)
    x, ids, y = split_arrays(dataset, "train")
    x_test, _, y_test = split_arrays(dataset, "test")
    truth = dict(zip(ids, (int(v) for v in y)))
    model_config = M.ModelConfig(
        input_dim=x.shape[2],
        seq_len=x.shape[1],
        encoder_hidden=20,
        num_classes=len(dataset.class_names),
        batch_size=32,
        learning_rate=1e-2,
        lr_decay=0.8,
        seed=0,
    )

    print("pretrained latents + cluster-spread random queries (kr):")
    loop = run("kr", pretrain_epochs=150, x=x, ids=ids, truth=truth,
               model_config=model_config, x_test=x_test, y_test=y_test)
    for h in loop.history:
        print(f"  round {h['iteration']}: {h['labeled_count']:>2} labels "
              f"({100 * h['labeled_fraction']:.0f}%), "
              f"test accuracy {h['test_accuracy']:.3f}")

    print("\nsame budget, classifier only, no pretraining (random):")
    base = run("random", pretrain_epochs=0, x=x, ids=ids, truth=truth,
               model_config=M.ModelConfig(**{**model_config.to_dict(),
                                             "loss_weights": (1.0, 0.0)}),
               x_test=x_test, y_test=y_test)
    for h in base.history:
        print(f"  round {h['iteration']}: {h['labeled_count']:>2} labels "
              f"({100 * h['labeled_fraction']:.0f}%), "
              f"test accuracy {h['test_accuracy']:.3f}")

    gap = loop.history[-1]["test_accuracy"] - base.history[-1]["test_accuracy"]
    print(f"\nadvantage of the pretrained loop at the final round: {gap:+.3f}")


if __name__ == "__main__":
    main()
