"""Residue alphabet, character-level tokenization, and fill-in-middle transforms.

The FIM transform moves a middle span of residues to the end of the token
stream, marked with special tokens, so a causal model learns to infill
conditioned on both prefix and suffix:

    [PRE] prefix [SUF] suffix [MID] middle [EOS]

Inference prompts stop after [MID]. All randomness is taken from an explicit
``numpy.random.Generator``; every function here is pure given its RNG, so
concurrent use is safe as long as each worker owns its generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, TextIO

import numpy as np

CANONICAL_RESIDUES = "ACDEFGHIKLMNPQRSTVWY"
UNKNOWN_RESIDUE = "X"
PRE, SUF, MID, EOS, PAD = "[PRE]", "[SUF]", "[MID]", "[EOS]", "[PAD]"
SPECIAL_TOKENS = (PRE, SUF, MID, EOS, PAD)

# Ambiguous / rare residue codes folded into 'X' on ingestion.
NONCANONICAL_MAP = {c: UNKNOWN_RESIDUE for c in "BZUOJ"}

# Minimum residues on each side of a middle span.
MIN_FLANK = 4

TokenSeq = list[int]


class AlphabetError(ValueError):
    """A character is not part of the residue alphabet."""


class SequenceTooShortError(ValueError):
    """Sequence cannot host a middle span with the required flanks."""


class SpanError(ValueError):
    """Span does not fit the sequence it is applied to."""


class FimLayoutError(ValueError):
    """Special tokens of a FIM stream are missing, duplicated, or misordered."""


@dataclass(frozen=True)
class ResidueAlphabet:
    """Token table: 20 canonical residues, 'X', and five special tokens.

    Ids are dense and stable under JSON round trip; :meth:`default` is the
    layout every artifact in this package uses unless told otherwise.
    """

    residue_ids: dict[str, int]
    special_ids: dict[str, int]
    _id_to_symbol: dict[int, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ids = list(self.residue_ids.values()) + list(self.special_ids.values())
        if len(set(ids)) != len(ids):
            raise AlphabetError("token ids must be unique")
        if sorted(ids) != list(range(len(ids))):
            raise AlphabetError("token ids must be dense starting at 0")
        missing = [t for t in SPECIAL_TOKENS if t not in self.special_ids]
        if missing:
            raise AlphabetError(f"missing special tokens: {missing}")
        rev = {i: s for s, i in self.residue_ids.items()}
        rev.update({i: s for s, i in self.special_ids.items()})
        object.__setattr__(self, "_id_to_symbol", rev)

    @classmethod
    def default(cls) -> "ResidueAlphabet":
        residues = {c: i for i, c in enumerate(CANONICAL_RESIDUES)}
        residues[UNKNOWN_RESIDUE] = len(residues)
        specials = {t: len(residues) + i for i, t in enumerate(SPECIAL_TOKENS)}
        return cls(residues, specials)

    @property
    def size(self) -> int:
        return len(self.residue_ids) + len(self.special_ids)

    @property
    def pre_id(self) -> int:
        return self.special_ids[PRE]

    @property
    def suf_id(self) -> int:
        return self.special_ids[SUF]

    @property
    def mid_id(self) -> int:
        return self.special_ids[MID]

    @property
    def eos_id(self) -> int:
        return self.special_ids[EOS]

    @property
    def pad_id(self) -> int:
        return self.special_ids[PAD]

    def encode_residue(self, ch: str) -> int:
        try:
            return self.residue_ids[ch]
        except KeyError:
            raise AlphabetError(f"invalid residue {ch!r}") from None

    def symbol(self, token_id: int) -> str:
        try:
            return self._id_to_symbol[token_id]
        except KeyError:
            raise AlphabetError(f"unknown token id {token_id}") from None

    def is_special(self, token_id: int) -> bool:
        return self._id_to_symbol.get(token_id) in SPECIAL_TOKENS

    def render(self, tokens: Iterable[int]) -> str:
        """Human-readable form, e.g. ``[PRE]AAAA[SUF]CCCC[MID]BBB[EOS]``."""
        return "".join(self.symbol(t) for t in tokens)

    def to_json(self) -> str:
        return json.dumps(
            {"residues": self.residue_ids, "specials": self.special_ids},
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ResidueAlphabet":
        obj = json.loads(text)
        return cls(
            {str(k): int(v) for k, v in obj["residues"].items()},
            {str(k): int(v) for k, v in obj["specials"].items()},
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "ResidueAlphabet":
        return cls.from_json(Path(path).read_text())


DEFAULT_ALPHABET = ResidueAlphabet.default()


@dataclass(frozen=True)
class ProteinSequence:
    """A named residue string over the canonical alphabet plus 'X'."""

    id: str
    residues: str

    def __post_init__(self) -> None:
        if not self.residues:
            raise AlphabetError(f"sequence {self.id!r} is empty")
        bad = set(self.residues) - set(CANONICAL_RESIDUES) - {UNKNOWN_RESIDUE}
        if bad:
            raise AlphabetError(
                f"sequence {self.id!r} has invalid residues: {sorted(bad)}"
            )

    def __len__(self) -> int:
        return len(self.residues)


@dataclass(frozen=True)
class SpanSpec:
    """Half-open middle span [start, start+length) on a residue sequence."""

    start: int
    length: int

    def __post_init__(self) -> None:
        if self.start < MIN_FLANK:
            raise SpanError(f"span start {self.start} leaves a prefix < {MIN_FLANK}")
        if self.length < 1:
            raise SpanError(f"span length {self.length} < 1")

    @property
    def end(self) -> int:
        return self.start + self.length


@dataclass(frozen=True)
class FimExample:
    """A FIM-transformed training sample (token ids)."""

    prefix: TokenSeq
    middle: TokenSeq
    suffix: TokenSeq
    flattened: TokenSeq


@dataclass(frozen=True)
class FimPrompt:
    """Inference prompt ``[PRE] prefix [SUF] suffix [MID]`` plus the length to fill."""

    flattened: TokenSeq
    target_len: int


# ---------------------------------------------------------------------------
# Tokenization
# ---------------------------------------------------------------------------

def tokenize(
    seq: ProteinSequence | str, alphabet: ResidueAlphabet = DEFAULT_ALPHABET
) -> TokenSeq:
    residues = seq.residues if isinstance(seq, ProteinSequence) else seq
    if not residues:
        raise AlphabetError("cannot tokenize an empty sequence")
    return [alphabet.encode_residue(c) for c in residues]


def detokenize(tokens: TokenSeq, alphabet: ResidueAlphabet = DEFAULT_ALPHABET) -> str:
    out = []
    for t in tokens:
        if alphabet.is_special(t):
            raise AlphabetError(f"special token {alphabet.symbol(t)} in residue stream")
        out.append(alphabet.symbol(t))
    return "".join(out)


# ---------------------------------------------------------------------------
# Span sampling
# ---------------------------------------------------------------------------

LenPolicy = Callable[[int, np.random.Generator], int]
"""Maps (max feasible middle length, rng) to a chosen length in [1, max]."""


def uniform_length(max_len: int, rng: np.random.Generator) -> int:
    return int(rng.integers(1, max_len + 1))


def fixed_length(length: int) -> LenPolicy:
    def policy(max_len: int, rng: np.random.Generator) -> int:
        if length > max_len:
            raise SpanError(f"fixed length {length} exceeds feasible maximum {max_len}")
        return length

    return policy


def clamped_length(lo: int, hi: int) -> LenPolicy:
    """Uniform over [lo, hi], clamped to the feasible range."""

    def policy(max_len: int, rng: np.random.Generator) -> int:
        upper = min(hi, max_len)
        lower = min(lo, upper)
        return int(rng.integers(lower, upper + 1))

    return policy


def sample_span(
    n: int, rng: np.random.Generator, len_policy: LenPolicy = uniform_length
) -> SpanSpec:
    """Draw a middle span leaving at least ``MIN_FLANK`` residues on each side.

    The start is uniform over the positions valid for the drawn length.
    """
    if n < 2 * MIN_FLANK + 1:
        raise SequenceTooShortError(
            f"need at least {2 * MIN_FLANK + 1} residues for a middle span, got {n}"
        )
    length = len_policy(n - 2 * MIN_FLANK, rng)
    if not 1 <= length <= n - 2 * MIN_FLANK:
        raise SpanError(f"length policy returned infeasible length {length}")
    start = int(rng.integers(MIN_FLANK, n - MIN_FLANK - length + 1))
    return SpanSpec(start, length)


# ---------------------------------------------------------------------------
# FIM transform
# ---------------------------------------------------------------------------

def fim_transform(
    tokens: TokenSeq, span: SpanSpec, alphabet: ResidueAlphabet = DEFAULT_ALPHABET
) -> FimExample:
    """Rearrange ``tokens`` into prefix/suffix/middle order with markers."""
    n = len(tokens)
    if span.end > n - MIN_FLANK:
        raise SpanError(
            f"span [{span.start}, {span.end}) leaves a suffix < {MIN_FLANK} "
            f"for sequence of length {n}"
        )
    prefix = list(tokens[: span.start])
    middle = list(tokens[span.start : span.end])
    suffix = list(tokens[span.end :])
    flattened = (
        [alphabet.pre_id]
        + prefix
        + [alphabet.suf_id]
        + suffix
        + [alphabet.mid_id]
        + middle
        + [alphabet.eos_id]
    )
    return FimExample(prefix, middle, suffix, flattened)


def maybe_fim(
    tokens: TokenSeq,
    p_fim: float,
    rng: np.random.Generator,
    len_policy: LenPolicy = uniform_length,
    alphabet: ResidueAlphabet = DEFAULT_ALPHABET,
) -> TokenSeq:
    """With probability ``p_fim`` return a FIM stream, else the AR form ``tokens + [EOS]``."""
    if not 0.0 <= p_fim <= 1.0:
        raise ValueError(f"p_fim must be in [0, 1], got {p_fim}")
    if rng.random() < p_fim:
        span = sample_span(len(tokens), rng, len_policy)
        return fim_transform(tokens, span, alphabet).flattened
    return list(tokens) + [alphabet.eos_id]


def build_fim_prompt(
    prefix: TokenSeq,
    suffix: TokenSeq,
    target_len: int,
    alphabet: ResidueAlphabet = DEFAULT_ALPHABET,
    allow_short_flanks: bool = False,
) -> FimPrompt:
    if target_len < 1:
        raise SpanError(f"target_len must be >= 1, got {target_len}")
    if not allow_short_flanks and (len(prefix) < MIN_FLANK or len(suffix) < MIN_FLANK):
        raise SpanError(
            f"prefix/suffix must each have >= {MIN_FLANK} residues "
            "(pass allow_short_flanks=True to relax)"
        )
    flattened = (
        [alphabet.pre_id] + list(prefix) + [alphabet.suf_id] + list(suffix)
        + [alphabet.mid_id]
    )
    return FimPrompt(flattened, target_len)


def invert_fim(
    example: FimExample | TokenSeq, alphabet: ResidueAlphabet = DEFAULT_ALPHABET
) -> TokenSeq:
    """Reassemble the original token stream from a FIM example.

    Works from the flattened stream alone (a bare stream is accepted in
    place of a :class:`FimExample`) so it genuinely inverts the transform;
    raises :class:`FimLayoutError` on malformed streams.
    """
    flattened = example.flattened if isinstance(example, FimExample) else example
    return list(_split_flattened(flattened, alphabet))


def _split_flattened(
    flattened: TokenSeq, alphabet: ResidueAlphabet
) -> TokenSeq:
    def index_of(tid: int, name: str) -> int:
        hits = [i for i, t in enumerate(flattened) if t == tid]
        if len(hits) != 1:
            raise FimLayoutError(f"expected exactly one {name}, found {len(hits)}")
        return hits[0]

    i_pre = index_of(alphabet.pre_id, PRE)
    i_suf = index_of(alphabet.suf_id, SUF)
    i_mid = index_of(alphabet.mid_id, MID)
    if not (i_pre < i_suf < i_mid):
        raise FimLayoutError("special tokens out of order (want PRE < SUF < MID)")
    if i_pre != 0:
        raise FimLayoutError("stream must start with [PRE]")
    tail = flattened[i_mid + 1 :]
    if tail and tail[-1] == alphabet.eos_id:
        tail = tail[:-1]
    if any(alphabet.is_special(t) for t in tail):
        raise FimLayoutError("unexpected special token in middle section")
    prefix = flattened[i_pre + 1 : i_suf]
    suffix = flattened[i_suf + 1 : i_mid]
    if any(alphabet.is_special(t) for t in prefix + suffix):
        raise FimLayoutError("unexpected special token in prefix/suffix section")
    return prefix + list(tail) + suffix


# ---------------------------------------------------------------------------
# FASTA I/O
# ---------------------------------------------------------------------------

def read_fasta(
    source: str | Path | TextIO, map_noncanonical: bool = True
) -> list[ProteinSequence]:
    """Read a multi-record, line-wrapped FASTA file.

    Record ids are the first whitespace-delimited word after '>'. Lowercase
    residues are uppercased; B/Z/U/O/J fold into 'X' when ``map_noncanonical``.
    """
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return list(_parse_fasta(fh, map_noncanonical))
    return list(_parse_fasta(source, map_noncanonical))


def _parse_fasta(fh: TextIO, map_noncanonical: bool) -> Iterator[ProteinSequence]:
    name: str | None = None
    chunks: list[str] = []

    def emit() -> Iterator[ProteinSequence]:
        if name is not None:
            residues = "".join(chunks)
            if map_noncanonical:
                residues = "".join(NONCANONICAL_MAP.get(c, c) for c in residues)
            yield ProteinSequence(name, residues)

    for line in fh:
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            yield from emit()
            name = line[1:].split()[0] if line[1:].split() else ""
            chunks = []
        else:
            if name is None:
                raise AlphabetError("FASTA data before the first '>' header")
            chunks.append(line.upper())
    yield from emit()


def write_fasta(
    records: Iterable[ProteinSequence], path: str | Path, width: int = 60
) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(f">{rec.id}\n")
            for i in range(0, len(rec.residues), width):
                fh.write(rec.residues[i : i + width] + "\n")
