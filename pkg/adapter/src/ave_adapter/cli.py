"""ave-adapter command line: train, generate, and oracle passthrough.

``oracle`` delegates to the installed ``avegen`` CLI so that oracle files
produced here and there are byte-identical for identical arguments.
"""

from __future__ import annotations

import argparse
import logging
import subprocess
import sys

from .data import SchemaError


def cmd_train(args) -> int:
    from .training import TrainConfig, train

    config = TrainConfig(
        model_key=args.model_key,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        max_epochs=args.max_epochs,
        max_source_len=args.max_source_len,
        max_target_len=args.max_target_len,
        seed=args.seed,
    )
    result = train(args.train, args.valid, config, args.artifact, resume_from=args.resume)
    print(f"best validation loss: {result['best_valid_loss']:.6f}")
    return 0


def cmd_generate(args) -> int:
    from .generation import generate_file

    n = generate_file(
        args.artifact, args.infile, args.out,
        num_beams=args.beams, max_target_len=args.max_target_len,
        batch_size=args.batch_size,
    )
    print(f"wrote {n} generations to {args.out}")
    return 0


def run_oracle_passthrough(rest: list[str]) -> int:
    proc = subprocess.run([sys.executable, "-m", "avegen", "oracle", *rest])
    return proc.returncode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ave-adapter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND", required=True)

    p = sub.add_parser("train", help="fine-tune a model on encoded targets")
    p.add_argument("--train", required=True, help="training JSONL ({id, title, target})")
    p.add_argument("--valid", required=True, help="validation JSONL, drives checkpoint selection")
    p.add_argument("--artifact", required=True, help="output artifact directory")
    p.add_argument("--model-key", default="tiny",
                   help='"tiny" (built-in, offline) or a Hugging Face model id/path')
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--learning-rate", type=float, default=3e-4)
    p.add_argument("--max-epochs", type=int, default=20)
    p.add_argument("--max-source-len", type=int, default=256)
    p.add_argument("--max-target-len", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resume", default=None, help="continue from an existing artifact")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="generate target strings for titles")
    p.add_argument("--artifact", required=True)
    p.add_argument("--in", dest="infile", required=True, help="input JSONL ({id, title})")
    p.add_argument("--out", required=True, help="output JSONL ({id, generated})")
    p.add_argument("--beams", type=int, default=1)
    p.add_argument("--max-target-len", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=16)
    p.set_defaults(func=cmd_generate)

    sub.add_parser("oracle", help="passthrough to `avegen oracle` (same flags)",
                   add_help=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # Forwarded verbatim: argparse.REMAINDER chokes on leading --flags.
    if argv and argv[0] == "oracle":
        return run_oracle_passthrough(argv[1:])
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SchemaError, ValueError) as exc:
        print(f"ave-adapter: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ave-adapter: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
