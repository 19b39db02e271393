"""Synthetic residue corpora for desk-scale training runs.

Two generators over the 20 canonical residue ids (0..19):

- ``markov``: a first-order chain with a circulant transition kernel.
  Circulant rows make the matrix doubly stochastic, so the stationary
  distribution is exactly uniform (each residue 5% in the long run) while
  leaving plenty of local structure for a model to learn.
- ``suffix_keyed``: fixed-geometry sequences whose middle segment is a
  deterministic function of the suffix (a fixed permutation applied
  position-wise), so infilling context is provably informative and
  prefix-only context provably is not.
"""

from __future__ import annotations

import numpy as np

N_RESIDUES = 20

MARKOV_OFFSETS = (1, 2, 5, 11)
MARKOV_WEIGHTS = (0.45, 0.30, 0.15, 0.10)

PREFIX_LEN = 8
MIDDLE_LEN = 6
SUFFIX_LEN = 8
KEYED_LEN = PREFIX_LEN + MIDDLE_LEN + SUFFIX_LEN

# Fixed derangement of the residue ids: middle token i is
# KEY_PERMUTATION[suffix token i], so a keyed middle never copies its key.
KEY_PERMUTATION = (
    3, 8, 12, 13, 14, 16, 10, 15, 1, 6, 0, 7, 4, 18, 5, 19, 17, 2, 9, 11
)


def keyed_span() -> tuple[int, int]:
    """(start, length) of the determined middle in a suffix_keyed sequence."""
    return PREFIX_LEN, MIDDLE_LEN


def keyed_middle(suffix: list[int]) -> list[int]:
    """The middle a suffix determines; the recovery rule of the language."""
    if len(suffix) < MIDDLE_LEN:
        raise ValueError(f"suffix shorter than the keyed middle: {len(suffix)}")
    return [KEY_PERMUTATION[t] for t in suffix[:MIDDLE_LEN]]


def _markov_sequence(rng: np.random.Generator, length: int) -> list[int]:
    steps = rng.choice(MARKOV_OFFSETS, size=length - 1, p=MARKOV_WEIGHTS)
    start = rng.integers(0, N_RESIDUES)
    return ((start + np.concatenate(([0], np.cumsum(steps)))) % N_RESIDUES).tolist()


def _keyed_sequence(rng: np.random.Generator) -> list[int]:
    prefix = rng.integers(0, N_RESIDUES, size=PREFIX_LEN).tolist()
    suffix = rng.integers(0, N_RESIDUES, size=SUFFIX_LEN).tolist()
    return prefix + keyed_middle(suffix) + suffix


def synth_corpus(
    kind: str, size: int, seed: int, *, length: int = 24
) -> list[list[int]]:
    """``size`` residue-id sequences; fully determined by (kind, size, seed)."""
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    rng = np.random.default_rng(seed)
    if kind == "markov":
        if length < 2:
            raise ValueError(f"length must be >= 2, got {length}")
        return [_markov_sequence(rng, length) for _ in range(size)]
    if kind == "suffix_keyed":
        return [_keyed_sequence(rng) for _ in range(size)]
    raise ValueError(f"unknown corpus kind {kind!r}")
