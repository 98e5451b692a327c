"""Command line for the fine-tuning harness: train and predict."""

from __future__ import annotations

import argparse
import logging
import sys

from .predict import predict
from .training import TrainerConfig, resolve_epoch_files, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contrast-trainer",
        description="Fine-tune a small sequence-pair classifier on emitted "
        "epoch files and write prediction files for the evaluator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--strategy", choices=("naive", "dynamic_balanced"), required=True)
    p.add_argument("--train-file", help="static file for the naive strategy")
    p.add_argument("--epoch-dir", help="directory holding epoch_<e>.jsonl files")
    p.add_argument("--out", required=True)
    p.add_argument("--model", default="tiny", help="'tiny' or a pretrained checkpoint name")
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--learning-rate", type=float, default=5e-5)
    p.add_argument("--max-seq-len", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)
    return parser


def cmd_train(args) -> int:
    config = TrainerConfig(
        model=args.model,
        strategy=args.strategy,
        batch_size=args.batch_size,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        max_seq_len=args.max_seq_len,
        seed=args.seed,
    )
    files = resolve_epoch_files(config, train_file=args.train_file, epoch_dir=args.epoch_dir)
    checkpoint = train(config, files, args.out)
    print(f"checkpoint written to {checkpoint}")
    return 0


def cmd_predict(args) -> int:
    out = predict(args.checkpoint, args.data, args.out)
    print(f"predictions written to {out}")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
