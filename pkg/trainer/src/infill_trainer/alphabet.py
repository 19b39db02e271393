"""Token alphabet, loaded from the benchmark's interchange JSON.

The id assignment is a published contract (20 canonical residues in
alphabetical order, X = 20, five control tokens 21-25), so a built-in
default exists; ``from_json``/``load`` consume the file emitted by
``infill-bench alphabet`` and must agree with it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

CANONICAL_RESIDUES = "ACDEFGHIKLMNPQRSTVWY"
UNKNOWN_RESIDUE = "X"
# Ambiguity codes collapse to X rather than failing tokenization.
AMBIGUOUS_RESIDUES = "BZUOJ"
SPECIAL_TOKENS = ("[PRE]", "[SUF]", "[MID]", "[EOS]", "[PAD]")


@dataclass(frozen=True)
class Alphabet:
    residue_ids: dict[str, int]
    special_ids: dict[str, int]

    def __post_init__(self) -> None:
        ids = list(self.residue_ids.values()) + list(self.special_ids.values())
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate token ids in alphabet")
        for name in SPECIAL_TOKENS:
            if name not in self.special_ids:
                raise ValueError(f"alphabet is missing special token {name}")
        if UNKNOWN_RESIDUE not in self.residue_ids:
            raise ValueError("alphabet is missing the unknown residue X")

    @property
    def vocab_size(self) -> int:
        return max(
            *self.residue_ids.values(), *self.special_ids.values()
        ) + 1

    @property
    def pre_id(self) -> int:
        return self.special_ids["[PRE]"]

    @property
    def suf_id(self) -> int:
        return self.special_ids["[SUF]"]

    @property
    def mid_id(self) -> int:
        return self.special_ids["[MID]"]

    @property
    def eos_id(self) -> int:
        return self.special_ids["[EOS]"]

    @property
    def pad_id(self) -> int:
        return self.special_ids["[PAD]"]

    def tokenize(self, sequence: str) -> list[int]:
        out = []
        for ch in sequence.upper():
            if ch in AMBIGUOUS_RESIDUES:
                ch = UNKNOWN_RESIDUE
            if ch not in self.residue_ids:
                raise ValueError(f"unknown residue {ch!r}")
            out.append(self.residue_ids[ch])
        return out

    @classmethod
    def default(cls) -> "Alphabet":
        residues = {c: i for i, c in enumerate(CANONICAL_RESIDUES)}
        residues[UNKNOWN_RESIDUE] = len(CANONICAL_RESIDUES)
        base = len(residues)
        specials = {name: base + i for i, name in enumerate(SPECIAL_TOKENS)}
        return cls(residues, specials)

    @classmethod
    def from_json(cls, text: str) -> "Alphabet":
        obj = json.loads(text)
        return cls(
            {str(k): int(v) for k, v in obj["residues"].items()},
            {str(k): int(v) for k, v in obj["specials"].items()},
        )

    @classmethod
    def load(cls, path: str | Path) -> "Alphabet":
        return cls.from_json(Path(path).read_text())
