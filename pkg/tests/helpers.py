"""Handcrafted models used as oracles across test modules.

With every transformer block zeroed out, the residual stream carries
wte[token] + wpe[pos] untouched, so the logit row at each position is an
exact, analyzable function of that token/position alone. The constructors
below exploit this to force specific output distributions.
"""

from __future__ import annotations

import numpy as np

from infill_bench.lm_engine import Model, ModelConfig, zero_weights


def uniform_model(vocab_size: int, d_model: int = 16, n_heads: int = 4) -> Model:
    """All-zero weights: every logit row is identically zero (uniform)."""
    cfg = ModelConfig(1, d_model, n_heads, vocab_size)
    return Model(cfg, zero_weights(cfg))


def token_map_model(
    mapping: dict[int, int],
    vocab_size: int,
    default: int | None = None,
    gain: float = 30.0,
    max_positions: int = 1024,
) -> Model:
    """Model whose next-token argmax after token j is mapping[j].

    Tokens absent from ``mapping`` fall back to ``default`` (or stay uniform
    when default is None). Built from one-hot embeddings and a hand-set output
    projection; d_model must cover the vocab, so it is set to the smallest
    multiple of 4 that does.
    """
    d = max(4, -(-vocab_size // 4) * 4)
    cfg = ModelConfig(1, d, 4, vocab_size, max_positions)
    tensors = zero_weights(cfg)
    tensors["lnf.g"] = np.ones(d, dtype=np.float32)
    wte = np.zeros((vocab_size, d), dtype=np.float32)
    head = np.zeros((d, vocab_size), dtype=np.float32)
    for j in range(vocab_size):
        wte[j, j] = 1.0
        target = mapping.get(j, default)
        if target is not None:
            head[j, target] = gain
    tensors["wte"] = wte
    tensors["lm_head.w"] = head
    return Model(cfg, tensors)


def logit_table_model(
    table: dict[int, dict[int, float]],
    vocab_size: int,
    max_positions: int = 1024,
) -> Model:
    """Model whose logits after token j approximate table[j] (target -> logit).

    Off-diagonal layer-norm cross-talk adds a shared per-target offset, so only
    entries well separated from zero keep their intended ordering; verify the
    realized distribution with forward_logits when exact values matter.
    """
    d = max(4, -(-vocab_size // 4) * 4)
    cfg = ModelConfig(1, d, 4, vocab_size, max_positions)
    tensors = zero_weights(cfg)
    tensors["lnf.g"] = np.ones(d, dtype=np.float32)
    wte = np.zeros((vocab_size, d), dtype=np.float32)
    head = np.zeros((d, vocab_size), dtype=np.float32)
    for j in range(vocab_size):
        wte[j, j] = 1.0
        for target, logit in table.get(j, {}).items():
            head[j, target] = logit
    tensors["wte"] = wte
    tensors["lm_head.w"] = head
    return Model(cfg, tensors)


def position_free_model(
    vocab_size: int,
    rng: np.random.Generator,
    d_model: int = 16,
    n_heads: int = 4,
) -> Model:
    """Zero positions and zero attention: hidden state i depends on token i only."""
    cfg = ModelConfig(2, d_model, n_heads, vocab_size)
    tensors = zero_weights(cfg)
    tensors["wte"] = rng.normal(0, 0.5, (vocab_size, d_model)).astype(np.float32)
    for i in range(cfg.n_layers):
        tensors[f"h{i}.ln1.g"] = np.ones(d_model, dtype=np.float32)
        tensors[f"h{i}.ln2.g"] = np.ones(d_model, dtype=np.float32)
        tensors[f"h{i}.mlp.w_fc"] = rng.normal(0, 0.3, (d_model, 4 * d_model)).astype(np.float32)
        tensors[f"h{i}.mlp.w_proj"] = rng.normal(0, 0.3, (4 * d_model, d_model)).astype(np.float32)
    tensors["lnf.g"] = np.ones(d_model, dtype=np.float32)
    tensors["lm_head.w"] = rng.normal(0, 0.3, (d_model, vocab_size)).astype(np.float32)
    return Model(cfg, tensors)
