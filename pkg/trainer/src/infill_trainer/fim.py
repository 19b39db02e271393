"""Infilling data transform over token-id sequences.

A transformed stream is ``[PRE] prefix [SUF] suffix [MID] middle [EOS]``;
a plain stream is ``sequence [EOS]``. Middles keep at least MIN_FLANK
residues on each side, matching the format the inference side inverts.
"""

from __future__ import annotations

import numpy as np

from .alphabet import Alphabet

MIN_FLANK = 4


def sample_span(n: int, rng: np.random.Generator) -> tuple[int, int]:
    """Uniform admissible (start, length): start >= 4 and end <= n - 4."""
    if n < 2 * MIN_FLANK + 1:
        raise ValueError(f"sequence of length {n} has no admissible span")
    start = int(rng.integers(MIN_FLANK, n - MIN_FLANK))
    length = int(rng.integers(1, n - MIN_FLANK - start + 1))
    return start, length


def fim_stream(
    tokens: list[int], start: int, length: int, alphabet: Alphabet
) -> list[int]:
    n = len(tokens)
    if start < MIN_FLANK or start + length > n - MIN_FLANK or length < 1:
        raise ValueError(f"span ({start}, {length}) violates flanks for n={n}")
    return (
        [alphabet.pre_id]
        + tokens[:start]
        + [alphabet.suf_id]
        + tokens[start + length :]
        + [alphabet.mid_id]
        + tokens[start : start + length]
        + [alphabet.eos_id]
    )


def plain_stream(tokens: list[int], alphabet: Alphabet) -> list[int]:
    return list(tokens) + [alphabet.eos_id]


def maybe_fim(
    tokens: list[int],
    p_fim: float,
    rng: np.random.Generator,
    alphabet: Alphabet,
) -> tuple[list[int], bool]:
    """Bernoulli(p_fim) infilling transform; short sequences stay plain."""
    if not 0.0 <= p_fim <= 1.0:
        raise ValueError(f"p_fim must be in [0, 1], got {p_fim}")
    if rng.random() < p_fim and len(tokens) >= 2 * MIN_FLANK + 1:
        return fim_stream(tokens, *sample_span(len(tokens), rng), alphabet), True
    return plain_stream(tokens, alphabet), False
