"""Training loop: AdamW with cosine-warmup schedule, per-step loss log.

The optimizer is decoupled-weight-decay Adam (decay ratio 1e-5 by
default) with betas (0.9, 0.999); the betas are library defaults kept
explicit because no other value is claimed. ``REFERENCE_PRESET`` records
the full-scale hyper-parameters this desk configuration scales down
from, for anyone re-running at size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import torch
import torch.nn.functional as F

from .alphabet import Alphabet
from .fim import maybe_fim
from .model import CharGPT

# Full-scale settings the desk defaults stand in for.
REFERENCE_PRESET = {"batch_size": 128, "steps": 500_000, "warmup_steps": 1_000}

# (tokens, rng) -> (stream, used_infilling)
StreamTransform = Callable[[list[int], np.random.Generator], tuple[list[int], bool]]


class TrainingDivergedError(RuntimeError):
    """Raised when the loss stops being finite; carries step diagnostics."""


@dataclass(frozen=True)
class TrainConfig:
    n_layers: int = 2
    d_model: int = 64
    n_heads: int = 4
    vocab_size: int = 26
    max_positions: int = 128
    batch_size: int = 64
    steps: int = 400
    warmup_steps: int = 40
    lr_peak: float = 3e-3
    weight_decay: float = 1e-5
    p_fim: float = 0.5
    seed: int = 0
    val_fraction: float = 0.1
    grad_clip: float = 1.0
    deterministic: bool = True

    def __post_init__(self) -> None:
        for name in ("n_layers", "d_model", "n_heads", "vocab_size",
                     "max_positions", "batch_size", "steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.d_model % self.n_heads:
            raise ValueError(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}"
            )
        if not 0 <= self.warmup_steps < self.steps:
            raise ValueError(
                f"warmup_steps must be in [0, steps), got {self.warmup_steps}"
            )
        if not 0.0 <= self.p_fim <= 1.0:
            raise ValueError(f"p_fim must be in [0, 1], got {self.p_fim}")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError(
                f"val_fraction must be in [0, 1), got {self.val_fraction}"
            )
        if self.lr_peak <= 0:
            raise ValueError(f"lr_peak must be positive, got {self.lr_peak}")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class Checkpoint:
    model: CharGPT
    config: TrainConfig
    alphabet: Alphabet
    loss_history: list[float] = field(repr=False)
    val_loss_initial: float = math.nan
    val_loss_final: float = math.nan
    fim_fraction: float = 0.0

    def log_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "loss_history": self.loss_history,
            "val_loss_initial": self.val_loss_initial,
            "val_loss_final": self.val_loss_final,
            "fim_fraction": self.fim_fraction,
        }


def cosine_warmup(step: int, warmup: int, total: int) -> float:
    """LR multiplier: linear ramp to 1 over ``warmup``, cosine decay after."""
    if step < warmup:
        return (step + 1) / warmup
    span = max(total - warmup, 1)
    return 0.5 * (1.0 + math.cos(math.pi * (step - warmup) / span))


def pad_batch(
    streams: Sequence[list[int]], pad_id: int
) -> tuple[torch.Tensor, torch.Tensor]:
    """Inputs stream[:-1] and targets stream[1:], padded; pad targets are
    ignored by the loss."""
    width = max(len(s) for s in streams) - 1
    x = torch.full((len(streams), width), pad_id, dtype=torch.long)
    y = torch.full((len(streams), width), pad_id, dtype=torch.long)
    for i, s in enumerate(streams):
        t = torch.as_tensor(s, dtype=torch.long)
        x[i, : len(s) - 1] = t[:-1]
        y[i, : len(s) - 1] = t[1:]
    return x, y


def evaluate_loss(
    model: CharGPT, streams: Sequence[list[int]], pad_id: int, batch_size: int = 64
) -> float:
    """Mean next-token cross entropy per non-pad target, in nats."""
    if not streams:
        raise ValueError("no streams to evaluate")
    total = count = 0.0
    was_training = model.training
    model.eval()
    with torch.no_grad():
        for i in range(0, len(streams), batch_size):
            x, y = pad_batch(streams[i : i + batch_size], pad_id)
            loss = F.cross_entropy(
                model(x).flatten(0, 1), y.flatten(), ignore_index=pad_id,
                reduction="sum",
            )
            total += float(loss)
            count += int((y != pad_id).sum())
    if was_training:
        model.train()
    return total / count


def train_streams(
    config: TrainConfig,
    corpus: Sequence[list[int]],
    transform: StreamTransform,
    alphabet: Alphabet,
    model: CharGPT | None = None,
) -> Checkpoint:
    """Core loop over an arbitrary stream transform.

    The transform is applied per sampled sequence per step, so spans are
    resampled every epoch. A caller-supplied ``model`` skips
    initialization (resume, or probing the loop's failure behavior).
    """
    if len(corpus) < 2:
        raise ValueError("corpus needs at least 2 sequences")
    if config.vocab_size != alphabet.vocab_size:
        raise ValueError(
            f"config vocab {config.vocab_size} != alphabet {alphabet.vocab_size}"
        )
    if config.deterministic:
        torch.use_deterministic_algorithms(True)
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)

    perm = rng.permutation(len(corpus))
    n_val = int(round(config.val_fraction * len(corpus)))
    n_val = min(max(n_val, 1 if config.val_fraction > 0 else 0), len(corpus) - 1)
    val_seqs = [corpus[i] for i in perm[:n_val]]
    train_seqs = [corpus[i] for i in perm[n_val:]]
    # Frozen validation streams so initial/final losses are comparable.
    val_rng = np.random.default_rng((config.seed, 1))
    val_streams = [transform(list(s), val_rng)[0] for s in val_seqs] or None

    if model is None:
        model = CharGPT(config.n_layers, config.d_model, config.n_heads,
                        config.vocab_size, config.max_positions)
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=config.lr_peak,
        betas=(0.9, 0.999),
        weight_decay=config.weight_decay,
    )
    schedule = torch.optim.lr_scheduler.LambdaLR(
        optimizer,
        lambda step: cosine_warmup(step, config.warmup_steps, config.steps),
    )

    val_initial = (
        evaluate_loss(model, val_streams, alphabet.pad_id) if val_streams
        else math.nan
    )
    losses: list[float] = []
    fim_count = 0
    model.train()
    for step in range(config.steps):
        picks = rng.integers(0, len(train_seqs), size=config.batch_size)
        streams = []
        for i in picks:
            stream, used = transform(list(train_seqs[i]), rng)
            streams.append(stream)
            fim_count += used
        x, y = pad_batch(streams, alphabet.pad_id)
        loss = F.cross_entropy(
            model(x).flatten(0, 1), y.flatten(), ignore_index=alphabet.pad_id
        )
        if not torch.isfinite(loss):
            raise TrainingDivergedError(
                f"non-finite loss {loss.item()} at step {step} "
                f"(lr {schedule.get_last_lr()[0]:.3g}, "
                f"last finite {losses[-1] if losses else 'none'})"
            )
        optimizer.zero_grad()
        loss.backward()
        torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
        optimizer.step()
        schedule.step()
        losses.append(float(loss.detach()))

    val_final = (
        evaluate_loss(model, val_streams, alphabet.pad_id) if val_streams
        else math.nan
    )
    model.eval()
    return Checkpoint(
        model=model,
        config=config,
        alphabet=alphabet,
        loss_history=losses,
        val_loss_initial=val_initial,
        val_loss_final=val_final,
        fim_fraction=fim_count / (config.steps * config.batch_size),
    )


def train(
    config: TrainConfig,
    corpus: Sequence[list[int]],
    alphabet: Alphabet | None = None,
    model: CharGPT | None = None,
) -> Checkpoint:
    """Train with the standard transform: each sequence is infilled with
    probability ``config.p_fim`` (fresh span each time), else kept plain."""
    alphabet = alphabet or Alphabet.default()

    def transform(tokens: list[int], rng: np.random.Generator):
        return maybe_fim(tokens, config.p_fim, rng, alphabet)

    return train_streams(config, corpus, transform, alphabet, model=model)
