"""Command-line entry point (`icctl`).

    synth     write a synthetic keypoint-motion dataset
    prep      filter / align / resample / normalize / split a dataset file
    train     fit the sequence model on a labeled split, save a checkpoint
    simulate  run budget-curve benchmarks with a ground-truth oracle
    curves    report the budget each method needs to hit a target accuracy
    plot      render a curves CSV to an image
    serve     run the interactive annotation service
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import classifier, data, evaluation, synthetic
from .engine import checkpoint as ckpt
from .engine import model as M
from .engine import optim
from .loop import LoopConfig


def _comma_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hidden", type=int, default=32, help="encoder units per direction")
    parser.add_argument("--layers", type=int, default=1, help="encoder layers")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--lr", type=float, default=1e-4)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--thaw-decoder",
        action="store_true",
        help="let the decoder recurrence train instead of staying fixed",
    )


def _model_config(args, x: np.ndarray, num_classes: int, epochs: int) -> M.ModelConfig:
    return M.ModelConfig(
        input_dim=x.shape[2],
        seq_len=x.shape[1],
        encoder_hidden=args.hidden,
        encoder_layers=args.layers,
        num_classes=num_classes,
        decoder_frozen=not args.thaw_decoder,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        epochs=epochs,
        seed=args.seed,
    )


def cmd_synth(args) -> int:
    dataset = synthetic.make_motion_dataset(
        n_train=args.train, n_test=args.test, T=args.frames, noise=args.noise, seed=args.seed
    )
    data.save_dataset(dataset, args.output)
    print(
        f"wrote {len(dataset)} samples ({args.train} train / {args.test} test, "
        f"{len(dataset.class_names)} classes) to {args.output}"
    )
    return 0


def cmd_prep(args) -> int:
    dataset = data.load_dataset(args.input)
    skeleton = data.SkeletonSpec.from_file(args.skeleton) if args.skeleton else None
    dataset = data.preprocess(
        dataset,
        skeleton=skeleton,
        threshold=args.min_confidence,
        target_len=args.target_len,
        normalize=not args.no_normalize,
    )
    if args.split is not None:
        dataset = data.split(dataset, args.split, args.seed)
    data.save_dataset(dataset, args.output)
    splits = {name: len(idx) for name, idx in dataset.splits.items()}
    print(f"wrote {len(dataset)} samples to {args.output} (splits: {splits or 'none'})")
    return 0


def cmd_train(args) -> int:
    dataset = data.load_dataset(args.input)
    x, _, y = evaluation.split_arrays(dataset, args.split)
    config = _model_config(args, x, len(dataset.class_names), args.epochs)
    rng = np.random.default_rng(config.seed)
    params = M.init_params(config, rng)
    optimizer = optim.AdamState()
    mask = np.ones(len(y), dtype=bool)
    if args.strategy == "joint":
        result = classifier.train_strategy_i(
            params, config, x, y, mask, rng, optimizer, epochs=args.epochs
        )
        losses = result.losses
    else:
        pre, fine = classifier.train_strategy_ii(
            params,
            config,
            x,
            y,
            mask,
            rng,
            pretrain_epochs=args.pretrain_epochs,
            finetune_epochs=args.epochs,
            optimizer=optimizer,
        )
        losses = pre.losses + fine.losses
    probs = classifier.predict_probs(params, config, x)
    train_acc = float(np.mean(probs.argmax(axis=1) == y))
    ckpt.save_checkpoint(
        args.output, params, config, optimizer, rng, extra={"class_names": list(dataset.class_names)}
    )
    print(
        f"trained {args.strategy} for {len(losses)} epochs: "
        f"loss {losses[0]:.4f} -> {losses[-1]:.4f}, train accuracy {train_acc:.3f}"
    )
    print(f"checkpoint written to {args.output}")
    return 0


def cmd_simulate(args) -> int:
    dataset = data.load_dataset(args.input)
    methods = _comma_list(args.methods)
    unknown = [m for m in methods if m not in evaluation.METHOD_NAMES]
    if unknown:
        print(f"unknown methods: {unknown}; choose from {evaluation.METHOD_NAMES}", file=sys.stderr)
        return 2
    budgets = [float(b) for b in _comma_list(args.budgets)]
    seeds = [int(s) for s in _comma_list(args.seeds)]
    x, _, _ = evaluation.split_arrays(dataset, "train")
    model_config = _model_config(args, x, len(dataset.class_names), epochs=0)
    loop_config = LoopConfig(
        per=args.per,
        n_clusters=args.clusters,
        cap=args.cap,
        pretrain_epochs=args.pretrain_epochs,
        finetune_epochs=args.finetune_epochs,
    )
    curves = evaluation.simulate_with_oracle(
        dataset, methods, budgets, seeds, model_config, loop_config
    )
    evaluation.write_curves_csv(args.output, curves)
    for curve in curves:
        points = ", ".join(
            f"{int(round(100 * b))}%: {m:.3f}" for b, m in zip(curve.budgets, curve.mean_acc)
        )
        print(f"{curve.method:>7}  {points}")
    print(f"curves written to {args.output}")
    return 0


def cmd_curves(args) -> int:
    curves = evaluation.read_curves_csv(args.input)
    for curve in curves:
        budget = evaluation.labels_to_reach(curve, args.target)
        reach = "never reached" if budget is None else f"{100 * budget:g}% of the pool"
        print(f"{curve.method:>7}  accuracy {args.target:.2f} at {reach}")
    return 0


def cmd_plot(args) -> int:
    curves = evaluation.read_curves_csv(args.input)
    output = args.output or ("curves.svg" if args.svg else "curves.png")
    evaluation.plot_curves(curves, output)
    print(f"plot written to {output}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.store, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="icctl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic keypoint-motion dataset")
    p.add_argument("output")
    p.add_argument("--train", type=int, default=200)
    p.add_argument("--test", type=int, default=80)
    p.add_argument("--frames", type=int, default=24)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("prep", help="preprocess a dataset file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--skeleton", help="skeleton landmark file for 3-D view alignment")
    p.add_argument("--min-confidence", type=float, default=None)
    p.add_argument("--target-len", type=int, default=None)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--split", type=float, default=None, help="train fraction; re-partitions")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_prep)

    p = sub.add_parser("train", help="fit the model on a labeled split")
    p.add_argument("input")
    p.add_argument("--output", "-o", default="checkpoint.json")
    p.add_argument("--split", default="train")
    p.add_argument(
        "--strategy",
        choices=("joint", "two-phase"),
        default="two-phase",
        help="joint: combined objective from scratch; two-phase: pretrain then fine-tune",
    )
    p.add_argument("--epochs", type=int, default=100, help="joint epochs / fine-tune epochs")
    p.add_argument("--pretrain-epochs", type=int, default=100)
    _add_model_args(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("simulate", help="benchmark methods against an oracle")
    p.add_argument("input")
    p.add_argument("--output", "-o", default="curves.csv")
    p.add_argument("--methods", default="knn,ic-kr", help=f"comma list from {evaluation.METHOD_NAMES}")
    p.add_argument("--budgets", default="0.05,0.1,0.25,0.5")
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--per", type=float, default=0.05)
    p.add_argument("--clusters", type=int, default=4)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--pretrain-epochs", type=int, default=100)
    p.add_argument("--finetune-epochs", type=int, default=30)
    _add_model_args(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("curves", help="budget needed per method for a target accuracy")
    p.add_argument("input")
    p.add_argument("--target", type=float, default=0.9)
    p.set_defaults(fn=cmd_curves)

    p = sub.add_parser("plot", help="render a curves CSV")
    p.add_argument("input")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--svg", action="store_true", help="default output becomes curves.svg")
    p.set_defaults(fn=cmd_plot)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--store", default="./sessions", help="session store directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", default=None, help="static directory to serve at /")
    p.add_argument("--log-level", default="warning")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (data.DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
