"""Command line: train a bundle from a corpus, or run the paired experiment.

    infill-trainer train --corpus markov --size 2000 --bundle out.pfim
    infill-trainer train --fasta seqs.fasta --bundle out.pfim --log log.json
    infill-trainer fim-vs-ar --report report.json
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .alphabet import Alphabet
from .corpus import synth_corpus
from .experiment import fim_vs_ar_experiment
from .export import export_bundle
from .train import TrainConfig, TrainingDivergedError, train


def read_fasta(path: str | Path) -> list[str]:
    sequences, current = [], []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if current:
                sequences.append("".join(current))
            current = []
        else:
            current.append(line)
    if current:
        sequences.append("".join(current))
    if not sequences:
        raise ValueError(f"no sequences in {path}")
    return sequences


def _config_from_args(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        batch_size=args.batch_size,
        steps=args.steps,
        warmup_steps=args.warmup,
        lr_peak=args.lr,
        weight_decay=args.weight_decay,
        p_fim=args.p_fim,
        seed=args.seed,
    )


def cmd_train(args: argparse.Namespace) -> int:
    alphabet = Alphabet.load(args.alphabet) if args.alphabet else Alphabet.default()
    if args.fasta:
        corpus = [alphabet.tokenize(s) for s in read_fasta(args.fasta)]
    else:
        corpus = synth_corpus(args.corpus, args.size, args.seed, length=args.length)
    checkpoint = train(_config_from_args(args), corpus, alphabet)
    export_bundle(checkpoint, args.bundle)
    if args.log:
        Path(args.log).write_text(json.dumps(checkpoint.log_dict(), indent=1) + "\n")
    print(
        f"trained {args.steps} steps: val loss "
        f"{checkpoint.val_loss_initial:.4f} -> {checkpoint.val_loss_final:.4f}, "
        f"fim fraction {checkpoint.fim_fraction:.3f}; bundle at {args.bundle}"
    )
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    config = TrainConfig(
        steps=args.steps, warmup_steps=args.warmup, lr_peak=args.lr,
        seed=args.seed, val_fraction=0.05,
    )
    report = fim_vs_ar_experiment(
        config, corpus_size=args.corpus_size, eval_size=args.eval_size
    )
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=1) + "\n")
    print(
        f"middle accuracy: fim {report['fim']['middle_accuracy']:.3f} vs "
        f"ar {report['ar']['middle_accuracy']:.3f} "
        f"(gap {report['accuracy_gap']:.3f}, chance "
        f"{report['chance_accuracy']:.3f}) in {report['elapsed_seconds']:.0f}s"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infill-trainer", description=__doc__.splitlines()[0]
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("train", help="train and export a weight bundle")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--corpus", choices=("markov", "suffix_keyed"),
                     default="markov")
    src.add_argument("--fasta", default=None, help="train on FASTA sequences")
    p.add_argument("--size", type=int, default=2000,
                   help="synthetic corpus size (sequences)")
    p.add_argument("--length", type=int, default=24,
                   help="markov sequence length")
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--warmup", type=int, default=40)
    p.add_argument("--lr", type=float, default=3e-3)
    p.add_argument("--weight-decay", type=float, default=1e-5)
    p.add_argument("--p-fim", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alphabet", default=None,
                   help="alphabet JSON (default: built-in standard)")
    p.add_argument("--bundle", required=True, help="output bundle path")
    p.add_argument("--log", default=None, help="JSON training-log path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("fim-vs-ar",
                       help="matched infilling-vs-prefix-only experiment")
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--warmup", type=int, default=50)
    p.add_argument("--lr", type=float, default=3e-3)
    p.add_argument("--corpus-size", type=int, default=4096)
    p.add_argument("--eval-size", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None, help="JSON report path")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.func(args)
    except TrainingDivergedError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
