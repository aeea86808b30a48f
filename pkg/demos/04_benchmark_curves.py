"""Accuracy-versus-budget comparison across labeling methods.

Run from the repository root:

    python3 demos/04_benchmark_curves.py

A scaled-down version of the benchmark the acceptance suite runs: three
methods, two seeds, three budgets.  Writes demo_output/curves.csv and
demo_output/curves.svg.  Expect a couple of minutes of training.
"""

import os

from iclearn.engine import model as M
from iclearn.evaluation import (
    labels_to_reach,
    plot_curves,
    simulate_with_oracle,
    write_curves_csv,
)
from iclearn.loop import LoopConfig
from iclearn.synthetic import make_motion_dataset

OUT = "demo_output"


def main():
    os.makedirs(OUT, exist_ok=True)
    dataset = make_motion_dataset(n_train=120, n_test=48, seed=0)
    model_config = M.ModelConfig(
        input_dim=4,
        seq_len=24,
        encoder_hidden=20,
        num_classes=4,
        batch_size=32,
        learning_rate=1e-2,
        lr_decay=0.8,
        seed=0,
    )
    loop_config = LoopConfig(
        per=0.05, n_clusters=4, cap=6, pretrain_epochs=150, finetune_epochs=40
    )

    methods = ("knn", "c", "ic-kr")
    budgets = (0.1, 0.25, 0.5)
    print(f"methods {methods}, budgets {budgets}, seeds (0, 1); training...")
    curves = simulate_with_oracle(
        dataset, methods, budgets, (0, 1), model_config, loop_config
    )

    print("\nmean test accuracy by labeled fraction:")
    header = "  ".join(f"{int(100 * b):>4}%" for b in budgets)
    print(f"  {'method':>7}  {header}")
    for curve in curves:
        row = "  ".join(f"{v:.3f}" for v in curve.mean_acc)
        print(f"  {curve.method:>7}  {row}")

    print("\nbudget needed to reach 80% accuracy:")
    for curve in curves:
        reach = labels_to_reach(curve, 0.80)
        text = "not reached" if reach is None else f"{100 * reach:g}% of the pool"
        print(f"  {curve.method:>7}  {text}")

    csv_path = os.path.join(OUT, "curves.csv")
    svg_path = os.path.join(OUT, "curves.svg")
    write_curves_csv(csv_path, curves)
    plot_curves(curves, svg_path)
    print(f"\nwrote {csv_path} and {svg_path}")


if __name__ == "__main__":
    main()
