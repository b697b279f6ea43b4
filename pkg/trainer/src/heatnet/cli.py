"""Command line: train a model on an exported dataset, emit heat maps."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .emit import emit_heatmaps, read_duals_source
from .features import Instance, load_dataset
from .train import TrainConfig, load_checkpoint, save_checkpoint, train


def _cmd_train(args) -> int:
    samples = load_dataset(args.data)
    cfg = TrainConfig(
        epochs=args.epochs,
        batch_size=min(args.batch_size, len(samples)),
        lr=args.lr,
        arc_weight=args.arc_weight,
        diagonal_weight=args.diagonal_weight,
        norm_weight=args.norm_weight,
        column_norm=args.column_norm,
        width=args.width,
        depth=args.depth,
        heads=args.heads,
        seed=args.seed,
    )
    result = train(samples, cfg, log=lambda epoch, loss: print(f"epoch {epoch}: mean loss {loss:.6f}"))
    save_checkpoint(args.out, result.model, cfg)
    print(f"wrote {args.out} (size {result.model.n_total}, final loss {result.final_epoch_loss:.6f})")
    return 0


def _cmd_emit(args) -> int:
    model, _cfg = load_checkpoint(args.model)
    inst = Instance.from_json(args.instance)
    rows = read_duals_source(args.duals)
    written = emit_heatmaps(
        model,
        inst,
        rows,
        args.out_dir,
        coord_divisor=args.coord_divisor,
        dual_divisor=args.dual_divisor,
    )
    print(f"wrote {len(written)} heat maps under {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatnet", description="Unsupervised heat-map trainer for graph-reduced pricing")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train on an exported sample directory")
    t.add_argument("--data", required=True, help="directory of sample_*/ exports")
    t.add_argument("--out", required=True, help="checkpoint path")
    t.add_argument("--epochs", type=int, default=20)
    t.add_argument("--batch-size", type=int, default=32)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--arc-weight", type=float, default=1.0)
    t.add_argument("--diagonal-weight", type=float, default=1.0)
    t.add_argument("--norm-weight", type=float, default=1.0)
    t.add_argument("--column-norm", action="store_true", help="normalize column sums instead of row sums")
    t.add_argument("--width", type=int, default=128)
    t.add_argument("--depth", type=int, default=3)
    t.add_argument("--heads", type=int, default=8)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=_cmd_train)

    e = sub.add_parser("emit", help="emit per-iteration heat maps for a solver run")
    e.add_argument("--model", required=True)
    e.add_argument("--instance", required=True, help="instance JSON")
    e.add_argument("--duals", required=True, help="duals JSONL from the solver, or a single JSON array")
    e.add_argument("--out-dir", required=True)
    e.add_argument("--coord-divisor", type=float, default=1.0)
    e.add_argument("--dual-divisor", type=float, default=None)
    e.set_defaults(func=_cmd_emit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
