"""Candidate middle-segment generators behind one query/result contract.

Every generator answers a :class:`FillQuery` with exactly ``k`` residue
strings of exactly ``target_len`` characters, drawn from the 20 canonical
amino acids. The transformer paths share a retry loop that regenerates short
outputs with top_k increased by 10 each round; continuations that never emit
the stop token are cut at target_len rather than discarded.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .lm_engine import Model, SamplingParams, forward_logits, sample_next
from .rng import split_rng
from .seqcore import (
    CANONICAL_RESIDUES,
    DEFAULT_ALPHABET,
    ResidueAlphabet,
    build_fim_prompt,
    detokenize,
    tokenize,
)

DEFAULT_RETRY_CAP = 50
TOP_K_STEP = 10


class PartialFillError(RuntimeError):
    """Retry cap hit before k exact-length candidates were collected.

    Carries whatever was gathered so the caller can decide to keep or drop.
    """

    def __init__(self, message: str, candidates: list[str], attempts: int,
                 top_k_schedule: list[int]):
        super().__init__(message)
        self.candidates = candidates
        self.attempts = attempts
        self.top_k_schedule = top_k_schedule


@dataclass(frozen=True)
class FillQuery:
    prefix: str
    suffix: str
    target_len: int
    k: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.target_len < 1:
            raise ValueError(f"target_len must be >= 1, got {self.target_len}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class FillResult:
    candidates: list[str]
    provenance: dict
    attempts: int

    def __post_init__(self) -> None:
        for c in self.candidates:
            bad = set(c) - set(CANONICAL_RESIDUES)
            if bad:
                raise ValueError(f"candidate has non-canonical residues: {sorted(bad)}")


def result_record(site_id: str, result: FillResult) -> dict:
    """JSON-lines record for one evaluated site."""
    return {
        "site_id": site_id,
        "candidates": list(result.candidates),
        "provenance": result.provenance,
        "attempts": result.attempts,
    }


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------

def random_fill(q: FillQuery) -> FillResult:
    """Each position i.i.d. uniform over the 20 canonical residues."""
    rng = split_rng(q.seed)
    letters = np.array(list(CANONICAL_RESIDUES))
    candidates = [
        "".join(rng.choice(letters, size=q.target_len)) for _ in range(q.k)
    ]
    return FillResult(candidates, {"generator": "random", "seed": q.seed}, attempts=1)


@dataclass(frozen=True)
class MarkovTable:
    """Order-m next-residue counts keyed by the preceding m residues."""

    order: int
    counts: Mapping[str, Mapping[str, int]]

    @classmethod
    def train(cls, sequences: Iterable[str], order: int) -> "MarkovTable":
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        counts: dict[str, Counter] = defaultdict(Counter)
        for seq in sequences:
            for i in range(order, len(seq)):
                counts[seq[i - order : i]][seq[i]] += 1
        return cls(order, {k: dict(v) for k, v in counts.items()})

    def next_distribution(self, context: str) -> tuple[str, np.ndarray]:
        """(letters, probabilities) for the residue following ``context``.

        Unseen contexts fall back to uniform over the canonical alphabet.
        """
        if not self.counts:
            raise ValueError("markov table is untrained (no counts)")
        table = self.counts.get(context[-self.order :])
        if not table:
            n = len(CANONICAL_RESIDUES)
            return CANONICAL_RESIDUES, np.full(n, 1.0 / n)
        letters = "".join(sorted(table))
        freqs = np.array([table[c] for c in letters], dtype=np.float64)
        return letters, freqs / freqs.sum()


def markov_fill(q: FillQuery, table: MarkovTable) -> FillResult:
    rng = split_rng(q.seed)
    candidates = []
    for _ in range(q.k):
        context = q.prefix
        out = []
        for _ in range(q.target_len):
            letters, probs = table.next_distribution(context)
            ch = letters[rng.choice(len(letters), p=probs)]
            out.append(ch)
            context += ch
        candidates.append("".join(out))
    provenance = {"generator": "markov", "order": table.order, "seed": q.seed}
    return FillResult(candidates, provenance, attempts=1)


# ---------------------------------------------------------------------------
# Transformer paths
# ---------------------------------------------------------------------------

def _masked_generate(
    model: Model,
    prompt: list[int],
    params: SamplingParams,
    max_new: int,
    stop_token: int,
    allowed_ids: np.ndarray,
    rng: np.random.Generator,
) -> list[int]:
    """Like lm_engine.generate but samples only from allowed_ids ∪ {stop}."""
    mask = np.full(model.config.vocab_size, True)
    mask[allowed_ids] = False
    mask[stop_token] = False
    current = list(prompt)
    out: list[int] = []
    for _ in range(max_new):
        if len(current) >= model.config.max_positions:
            break  # cannot extend further; caller sees a short candidate
        row = forward_logits(model, current)[-1].astype(np.float64)
        row[mask] = -np.inf
        token = sample_next(row, params, rng)
        if token == stop_token:
            break
        current.append(token)
        out.append(token)
    return out


def _retry_fill(
    q: FillQuery,
    model: Model,
    params: SamplingParams,
    prompt: list[int],
    generator_name: str,
    alphabet: ResidueAlphabet,
    retry_cap: int,
    dedupe: bool,
) -> FillResult:
    allowed = np.array([alphabet.encode_residue(c) for c in CANONICAL_RESIDUES])
    candidates: list[str] = []
    schedule: list[int] = []
    current = params
    for round_idx in range(retry_cap):
        schedule.append(current.top_k)
        need = q.k - len(candidates)
        for try_idx in range(need):
            rng = split_rng(q.seed, round_idx, try_idx)
            tokens = _masked_generate(
                model, prompt, current, q.target_len, alphabet.eos_id, allowed, rng
            )
            if len(tokens) != q.target_len:
                continue
            cand = detokenize(tokens, alphabet)
            if dedupe and cand in candidates:
                continue
            candidates.append(cand)
        if len(candidates) == q.k:
            provenance = {
                "generator": generator_name,
                "top_k": params.top_k,
                "top_p": params.top_p,
                "temperature": params.temperature,
                "seed": q.seed,
                "top_k_schedule": schedule,
            }
            return FillResult(candidates, provenance, attempts=len(schedule))
        current = current.with_top_k(current.top_k + TOP_K_STEP)
    raise PartialFillError(
        f"collected {len(candidates)}/{q.k} exact-length candidates "
        f"after {retry_cap} rounds",
        candidates=candidates,
        attempts=len(schedule),
        top_k_schedule=schedule,
    )


def transformer_fim_fill(
    q: FillQuery,
    model: Model,
    params: SamplingParams | None = None,
    alphabet: ResidueAlphabet = DEFAULT_ALPHABET,
    retry_cap: int = DEFAULT_RETRY_CAP,
    dedupe: bool = False,
) -> FillResult:
    """Infill conditioned on both flanks via the FIM prompt layout."""
    params = params or SamplingParams()
    prompt = build_fim_prompt(
        tokenize(q.prefix, alphabet) if q.prefix else [],
        tokenize(q.suffix, alphabet) if q.suffix else [],
        q.target_len,
        alphabet,
        allow_short_flanks=True,
    ).flattened
    return _retry_fill(
        q, model, params, prompt, "transformer_fim", alphabet, retry_cap, dedupe
    )


def ar_prefix_fill(
    q: FillQuery,
    model: Model,
    params: SamplingParams | None = None,
    alphabet: ResidueAlphabet = DEFAULT_ALPHABET,
    retry_cap: int = DEFAULT_RETRY_CAP,
    dedupe: bool = False,
) -> FillResult:
    """Continuation conditioned on the prefix alone; the suffix is ignored.

    An empty prefix degenerates to unconditional generation, seeded by a
    single PAD token so the model still has one position to condition on.
    """
    params = params or SamplingParams()
    prompt = tokenize(q.prefix, alphabet) if q.prefix else [alphabet.pad_id]
    return _retry_fill(
        q, model, params, prompt, "ar_prefix", alphabet, retry_cap, dedupe
    )
