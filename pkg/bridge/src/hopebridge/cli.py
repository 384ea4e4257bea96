"""hopeal-bridge: serve a transformer scorer, or fine-tune one first."""

from __future__ import annotations

import argparse
import sys

from .bridge import BridgeConfig, BridgeError, serve
from .finetune import finetune


def _config_from(args) -> BridgeConfig:
    return BridgeConfig(
        model=args.model,
        max_sequence_length=args.max_seq_len,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        device=args.device,
        seed=args.seed,
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, help="checkpoint name or path")
    parser.add_argument("--max-seq-len", type=int, default=128)
    parser.add_argument("--lr", type=float, default=2e-5)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--seed", type=int, default=0)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hopeal-bridge")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="answer al-scorer requests on stdin/stdout")
    _add_common(p_serve)

    p_ft = sub.add_parser("finetune", help="fine-tune on a labeled CSV, then exit")
    _add_common(p_ft)
    p_ft.add_argument("--train", required=True, help="labeled CSV (text,label)")
    p_ft.add_argument("--out", required=True, help="directory for the checkpoint")
    p_ft.add_argument("--text-col", default="text")
    p_ft.add_argument("--label-col", default="label")

    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            serve(_config_from(args))
        else:
            out_dir, losses = finetune(
                _config_from(args), args.train, args.out,
                text_col=args.text_col, label_col=args.label_col,
            )
            print(f"checkpoint saved to {out_dir}")
            print("losses: " + ", ".join(f"{v:.6f}" for v in losses))
    except BridgeError as exc:
        print(f"hopeal-bridge: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
