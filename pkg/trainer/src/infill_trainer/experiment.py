"""Matched-pair experiment: infilling vs prefix-only training.

Both models share dimensions, optimizer, schedule, and step budget and
train on the same suffix_keyed corpus; they differ only in the stream
transform. The infilling model sees ``[PRE] p [SUF] s [MID] m [EOS]`` at
the keyed span, so the determined middle follows its key in the stream;
the plain model sees ``p m s [EOS]``, where the key is in the future at
every middle position. Middle-token accuracy (teacher-forced argmax) is
the headline: the plain model cannot beat chance (1/20) by construction.
"""

from __future__ import annotations

import time
from typing import Sequence

import numpy as np
import torch

from .alphabet import Alphabet
from .corpus import MIDDLE_LEN, PREFIX_LEN, SUFFIX_LEN, keyed_span, synth_corpus
from .fim import fim_stream, plain_stream
from .model import CharGPT
from .train import Checkpoint, TrainConfig, train_streams

CHANCE_ACCURACY = 1.0 / 20.0

# Middle slice inside each stream kind: [PRE] p [SUF] s [MID] puts the
# middle after 3 control tokens + prefix + suffix; plain puts it after
# the prefix.
_FIM_MIDDLE_START = 3 + PREFIX_LEN + SUFFIX_LEN
_PLAIN_MIDDLE_START = PREFIX_LEN


def middle_token_accuracy(
    model: CharGPT, streams: Sequence[list[int]], middle_start: int,
    batch_size: int = 128,
) -> float:
    """Teacher-forced argmax accuracy on the middle positions."""
    correct = total = 0
    with torch.no_grad():
        for i in range(0, len(streams), batch_size):
            chunk = streams[i : i + batch_size]
            x = torch.as_tensor(chunk, dtype=torch.long)
            logits = model(x[:, :-1])
            pred = logits[:, middle_start - 1 : middle_start - 1 + MIDDLE_LEN].argmax(-1)
            want = x[:, middle_start : middle_start + MIDDLE_LEN]
            correct += int((pred == want).sum())
            total += pred.numel()
    return correct / total


def _fim_transform(alphabet: Alphabet):
    start, length = keyed_span()

    def transform(tokens: list[int], rng: np.random.Generator):
        return fim_stream(tokens, start, length, alphabet), True

    return transform


def _plain_transform(alphabet: Alphabet):
    def transform(tokens: list[int], rng: np.random.Generator):
        return plain_stream(tokens, alphabet), False

    return transform


def fim_vs_ar_experiment(
    config: TrainConfig | None = None,
    *,
    corpus_size: int = 4096,
    eval_size: int = 512,
    alphabet: Alphabet | None = None,
) -> dict:
    """Train the matched pair and report per-model middle accuracy."""
    t0 = time.perf_counter()
    config = config or TrainConfig(steps=500, warmup_steps=50, val_fraction=0.05)
    alphabet = alphabet or Alphabet.default()
    corpus = synth_corpus("suffix_keyed", corpus_size + eval_size, config.seed)
    train_seqs, eval_seqs = corpus[:corpus_size], corpus[corpus_size:]

    def run(transform) -> Checkpoint:
        return train_streams(config, train_seqs, transform(alphabet), alphabet)

    fim_ckpt = run(_fim_transform)
    ar_ckpt = run(_plain_transform)

    fim_eval = [fim_stream(s, *keyed_span(), alphabet) for s in eval_seqs]
    ar_eval = [plain_stream(s, alphabet) for s in eval_seqs]
    fim_acc = middle_token_accuracy(fim_ckpt.model, fim_eval, _FIM_MIDDLE_START)
    ar_acc = middle_token_accuracy(ar_ckpt.model, ar_eval, _PLAIN_MIDDLE_START)

    return {
        "task": "fim_vs_ar",
        "config": config.to_dict(),
        "corpus": {
            "kind": "suffix_keyed",
            "train_size": len(train_seqs),
            "eval_size": len(eval_seqs),
        },
        "fim": {
            "middle_accuracy": fim_acc,
            "final_train_loss": fim_ckpt.loss_history[-1],
            "val_loss_initial": fim_ckpt.val_loss_initial,
            "val_loss_final": fim_ckpt.val_loss_final,
        },
        "ar": {
            "middle_accuracy": ar_acc,
            "final_train_loss": ar_ckpt.loss_history[-1],
            "val_loss_initial": ar_ckpt.val_loss_initial,
            "val_loss_final": ar_ckpt.val_loss_final,
        },
        "accuracy_gap": fim_acc - ar_acc,
        "chance_accuracy": CHANCE_ACCURACY,
        "elapsed_seconds": time.perf_counter() - t0,
    }
