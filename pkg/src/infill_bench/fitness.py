"""Zero-shot fitness evaluation: CSV landscapes, model scorers, Spearman.

Two scorers are shipped because the embedding protocol is under-specified in
the wild: `loglik` ranks test sequences by mean log-probability under the
model with no training at all, while `embedding_head` fits a closed-form
ridge regression (default lambda 1.0) from train-split mean embeddings to
fitness and scores the test split. Both report Spearman rank correlation with
average ranks for ties.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .lm_engine import Model, log_likelihood_score, mean_embedding
from .seqcore import CANONICAL_RESIDUES, UNKNOWN_RESIDUE, ResidueAlphabet, tokenize

SPLITS = ("train", "test")
_VALID_RESIDUES = set(CANONICAL_RESIDUES + UNKNOWN_RESIDUE)


@dataclass(frozen=True)
class FitnessRecord:
    sequence: str
    fitness: float
    split: str

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}")
        if not math.isfinite(self.fitness):
            raise ValueError("fitness must be finite")
        if not self.sequence:
            raise ValueError("sequence must be nonempty")


@dataclass(frozen=True)
class FitnessDataset:
    name: str
    records: tuple[FitnessRecord, ...]
    replaced_residues: int = 0  # ingestion warning count

    def __post_init__(self):
        if not any(r.split == "test" for r in self.records):
            raise ValueError("dataset needs a nonempty test split")

    def split(self, which: str) -> list[FitnessRecord]:
        return [r for r in self.records if r.split == which]


def ingest_csv(
    path: str | Path,
    sequence_col: str = "sequence",
    target_col: str = "target",
    split_col: str = "set",
    name: str | None = None,
) -> FitnessDataset:
    """Load a landscape CSV; non-residue characters become X and are counted."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for col in (sequence_col, target_col, split_col):
            if col not in fields:
                raise ValueError(f"missing column {col!r} in {path.name}")
        records = []
        replaced = 0
        for i, row in enumerate(reader, start=2):
            raw = row[sequence_col].strip().upper()
            cleaned = []
            for ch in raw:
                if ch in _VALID_RESIDUES:
                    cleaned.append(ch)
                else:
                    cleaned.append(UNKNOWN_RESIDUE)
                    replaced += 1
            try:
                fitness = float(row[target_col])
            except ValueError:
                raise ValueError(f"bad fitness value on line {i}: {row[target_col]!r}")
            records.append(
                FitnessRecord("".join(cleaned), fitness, row[split_col].strip())
            )
    if not records:
        raise ValueError(f"{path.name} contains no data rows")
    return FitnessDataset(
        name=name or path.stem, records=tuple(records), replaced_residues=replaced
    )


def export_csv(dataset: FitnessDataset, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sequence", "target", "set"])
        for r in dataset.records:
            writer.writerow([r.sequence, repr(r.fitness), r.split])


# ---------------------------------------------------------------------------
# Spearman
# ---------------------------------------------------------------------------

def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks, ties sharing the average of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j < len(values) and sorted_vals[j] == sorted_vals[i]:
            j += 1
        ranks[order[i:j]] = (i + j + 1) / 2.0  # mean of ranks i+1..j
        i = j
    return ranks


def spearman(xs: Iterable[float], ys: Iterable[float]) -> float:
    """Rank correlation in [-1, 1]; raises on constant input (undefined)."""
    x = np.asarray(list(xs), dtype=np.float64)
    y = np.asarray(list(ys), dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("inputs must have equal length")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = float(np.sqrt((rx * rx).sum() * (ry * ry).sum()))
    if denom == 0.0:
        raise ValueError("correlation undefined for a constant vector")
    rho = float((rx * ry).sum() / denom)
    return min(1.0, max(-1.0, rho))


# ---------------------------------------------------------------------------
# Zero-shot evaluation
# ---------------------------------------------------------------------------

SCORERS = ("loglik", "embedding_head")


@dataclass(frozen=True)
class FitnessEvalResult:
    landscape: str
    scorer: str
    spearman: float
    n_train: int
    n_test: int
    ridge_lambda: float | None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def _embed(model: Model, sequences: list[str], alphabet: ResidueAlphabet) -> np.ndarray:
    return np.stack([
        mean_embedding(model, tokenize(seq, alphabet)) for seq in sequences
    ])


def _ridge_fit(x: np.ndarray, y: np.ndarray, lam: float):
    """Centered closed-form ridge; returns a predict function."""
    mu_x = x.mean(axis=0)
    mu_y = y.mean()
    xc = x - mu_x
    d = x.shape[1]
    w = np.linalg.solve(xc.T @ xc + lam * np.eye(d), xc.T @ (y - mu_y))
    return lambda q: (q - mu_x) @ w + mu_y


def zero_shot_eval(
    model: Model,
    dataset: FitnessDataset,
    scorer: str = "loglik",
    ridge_lambda: float = 1.0,
    alphabet: ResidueAlphabet | None = None,
) -> FitnessEvalResult:
    """Spearman between model-derived scores and fitness on the test split."""
    if scorer not in SCORERS:
        raise ValueError(f"scorer must be one of {SCORERS}")
    alphabet = alphabet or ResidueAlphabet.default()
    train = dataset.split("train")
    test = dataset.split("test")

    if scorer == "loglik":
        scores = [
            log_likelihood_score(model, tokenize(r.sequence, alphabet))
            for r in test
        ]
        lam = None
    else:
        if not train:
            raise ValueError("embedding_head requires a nonempty train split")
        x_train = _embed(model, [r.sequence for r in train], alphabet)
        y_train = np.asarray([r.fitness for r in train])
        predict = _ridge_fit(x_train, y_train, ridge_lambda)
        x_test = _embed(model, [r.sequence for r in test], alphabet)
        scores = list(predict(x_test))
        lam = ridge_lambda

    rho = spearman(scores, [r.fitness for r in test])
    return FitnessEvalResult(
        landscape=dataset.name,
        scorer=scorer,
        spearman=rho,
        n_train=len(train),
        n_test=len(test),
        ridge_lambda=lam,
    )
