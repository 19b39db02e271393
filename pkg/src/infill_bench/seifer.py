"""Structure-recovery benchmark for middle-segment design.

Pipeline: extract evaluation sites (uniform secondary-structure runs with
adequate flanks), generate k candidate middles per site, splice each into the
full sequence, fold through a pluggable structure oracle, assign secondary
structure, and judge a candidate positive when its residues differ from the
original while the span's 3-class secondary structure is recovered exactly.

Metrics: Precision@K (mean over sites of TP/valid-candidates), Retrieval@K
(fraction of sites with at least one TP), position/length ablations, pLDDT
deltas against baselines, and pooled sequence recovery. Candidates whose
prediction failed are excluded from denominators and counted separately.
"""

from __future__ import annotations

import hashlib
import json
import os
import shlex
import subprocess
import tempfile
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .dssp import assign_model, map_ss3
from .generators import FillQuery, FillResult, PartialFillError
from .rng import stream_seed
from .seqcore import MIN_FLANK, SpanSpec
from .structio import (
    ONE_TO_THREE,
    AtomRecord,
    ResidueRecord,
    StructureModel,
    read_structure,
)

DEFAULT_MIN_LENS: Mapping[str, int] = {"H": 10, "E": 6, "C": 6}
SS3_CLASSES = "HEC"


class OracleError(RuntimeError):
    """A structure prediction could not be produced for a sequence."""


# ---------------------------------------------------------------------------
# Sites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MiddleSite:
    """A uniform secondary-structure span selected for infilling evaluation."""

    protein_id: str
    span: SpanSpec
    ss_class: str
    original_middle: str
    original_ss3_span: str
    protein_length: int

    def __post_init__(self):
        if self.ss_class not in SS3_CLASSES:
            raise ValueError(f"ss_class must be one of {SS3_CLASSES!r}")
        if self.original_ss3_span != self.ss_class * self.span.length:
            raise ValueError("original_ss3_span must be uniform in ss_class")
        if len(self.original_middle) != self.span.length:
            raise ValueError("original_middle length must match the span")
        if self.protein_length - self.span.end < MIN_FLANK:
            raise ValueError(f"suffix flank shorter than {MIN_FLANK}")

    @property
    def midpoint(self) -> float:
        return self.span.start + self.span.length / 2.0

    @property
    def site_id(self) -> str:
        return (
            f"{self.protein_id}:{self.span.start}-{self.span.end}:{self.ss_class}"
        )


def extract_middle_sites(
    sequence: str,
    ss3: str,
    min_lens: Mapping[str, int] | None = None,
    protein_id: str = "",
) -> list[MiddleSite]:
    """Maximal uniform SS3 runs, clipped to the flank-admissible window.

    A run touching either terminus is clipped to [MIN_FLANK, N-MIN_FLANK]
    and kept if the clipped length still meets the class minimum, so long
    terminal helices/strands remain usable as sites.
    """
    if len(sequence) != len(ss3):
        raise ValueError("sequence and ss3 must have equal length")
    bad = set(ss3) - set(SS3_CLASSES)
    if bad:
        raise ValueError(f"ss3 contains non-3-class labels: {sorted(bad)}")
    mins = dict(DEFAULT_MIN_LENS)
    mins.update(min_lens or {})

    n = len(sequence)
    sites = []
    i = 0
    while i < n:
        j = i
        while j < n and ss3[j] == ss3[i]:
            j += 1
        lo, hi = max(i, MIN_FLANK), min(j, n - MIN_FLANK)
        if hi - lo >= mins[ss3[i]]:
            span = SpanSpec(lo, hi - lo)
            sites.append(
                MiddleSite(
                    protein_id=protein_id,
                    span=span,
                    ss_class=ss3[i],
                    original_middle=sequence[lo:hi],
                    original_ss3_span=ss3[lo:hi],
                    protein_length=n,
                )
            )
        i = j
    return sites


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def sequence_key(sequence: str) -> str:
    """Content address of a designed sequence: lowercase hex SHA-256."""
    return hashlib.sha256(sequence.encode("ascii")).hexdigest()


@dataclass(frozen=True)
class OraclePrediction:
    """Predicted structure, optionally with precomputed 3-class labels.

    When ss3 is None the pipeline derives it from the model geometry; a mock
    oracle supplies it directly.
    """

    model: StructureModel
    ss3: str | None = None


class StructureOracle(ABC):
    """Maps a full designed sequence to a predicted structure."""

    concurrent: bool = True  # safe to call from multiple workers

    @abstractmethod
    def predict(self, sequence: str) -> OraclePrediction:
        raise NotImplementedError


class MockOracle(StructureOracle):
    """Deterministic stand-in: configured SS3 and pLDDT, synthetic CA trace."""

    def __init__(
        self,
        ss3: str | Callable[[str], str],
        plddt: float | Callable[[str], Sequence[float]] = 90.0,
    ):
        self._ss3 = ss3
        self._plddt = plddt

    def predict(self, sequence: str) -> OraclePrediction:
        ss3 = self._ss3(sequence) if callable(self._ss3) else self._ss3
        if callable(self._plddt):
            plddts = list(self._plddt(sequence))
        else:
            plddts = [float(self._plddt)] * len(sequence)
        if len(plddts) != len(sequence):
            raise OracleError("configured pLDDT length mismatch")
        residues = []
        for i, ch in enumerate(sequence):
            atom = AtomRecord(
                name="CA",
                element="C",
                coords=(3.8 * i, 0.0, 0.0),
                b_factor=plddts[i],
                occupancy=1.0,
                alt_loc="",
            )
            residues.append(
                ResidueRecord(
                    name3=ONE_TO_THREE.get(ch, "UNK"),
                    chain_id="A",
                    seq_num=i + 1,
                    insertion_code="",
                    atoms=(atom,),
                    het=False,
                )
            )
        model = StructureModel(entry_id=sequence_key(sequence)[:8],
                               chains={"A": tuple(residues)})
        return OraclePrediction(model=model, ss3=ss3)


class DirectoryOracle(StructureOracle):
    """Precomputed predictions on disk, one file per sequence hash."""

    def __init__(self, directory: str | Path,
                 suffixes: Sequence[str] = (".pdb", ".cif", ".mmcif")):
        self.directory = Path(directory)
        self.suffixes = tuple(suffixes)

    def predict(self, sequence: str) -> OraclePrediction:
        key = sequence_key(sequence)
        for suffix in self.suffixes:
            path = self.directory / (key + suffix)
            if path.exists():
                return OraclePrediction(model=read_structure(path))
        raise OracleError(f"no predicted structure for {key}")


class CommandOracle(StructureOracle):
    """Runs an external folding command per sequence, with a result cache.

    The template receives {fasta} and {out}; the command must write a PDB
    to {out}. Serialized by default since external predictors often are not
    safe to run concurrently.
    """

    concurrent = False

    def __init__(
        self,
        template: str,
        cache_dir: str | Path | None = None,
        timeout: float = 600.0,
        concurrent: bool = False,
    ):
        self.template = template
        env_cache = os.environ.get("INFILL_BENCH_CACHE")
        if cache_dir is None and env_cache:
            cache_dir = env_cache
        if cache_dir is None:
            cache_dir = tempfile.mkdtemp(prefix="oracle-cache-")
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.timeout = timeout
        self.concurrent = concurrent

    def predict(self, sequence: str) -> OraclePrediction:
        key = sequence_key(sequence)
        out = self.cache_dir / f"{key}.pdb"
        if not out.exists():
            fasta = self.cache_dir / f"{key}.fasta"
            fasta.write_text(f">{key}\n{sequence}\n")
            cmd = [
                part.format(fasta=str(fasta), out=str(out))
                for part in shlex.split(self.template)
            ]
            try:
                proc = subprocess.run(
                    cmd, capture_output=True, timeout=self.timeout
                )
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise OracleError(f"oracle command failed: {exc}") from exc
            if proc.returncode != 0:
                raise OracleError(
                    f"oracle command exited {proc.returncode}: "
                    f"{proc.stderr.decode(errors='replace')[:200]}"
                )
            if not out.exists():
                raise OracleError("oracle command produced no output file")
        return OraclePrediction(model=read_structure(out))


# ---------------------------------------------------------------------------
# Judging and the run loop
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeiferOutcome:
    site: MiddleSite
    candidate: str
    differs_from_original: bool
    predicted_ss3_span: str
    tp: bool
    plddt_mean_structure: float | None = None
    plddt_mean_span: float | None = None
    error: str | None = None
    allow_identical: bool = False

    def __post_init__(self):
        if self.tp and not (
            (self.differs_from_original or self.allow_identical)
            and self.predicted_ss3_span == self.site.original_ss3_span
        ):
            raise ValueError("tp requires differing residues and exact SS3 match")

    @property
    def ok(self) -> bool:
        return self.error is None


def judge_candidate(
    site: MiddleSite,
    candidate_middle: str,
    predicted_ss3_span: str,
    allow_identical: bool = False,
) -> bool:
    """Positive iff residues differ (unless allowed) and SS3 matches exactly."""
    if len(candidate_middle) != site.span.length:
        raise ValueError("candidate length must equal the span length")
    if len(predicted_ss3_span) != site.span.length:
        raise ValueError("predicted SS3 span length must equal the span length")
    differs = candidate_middle != site.original_middle
    return (differs or allow_identical) and (
        predicted_ss3_span == site.original_ss3_span
    )


def _model_ss3_and_plddt(model: StructureModel) -> tuple[str, list[float]]:
    ss3 = "".join(map_ss3(ss8) for ss8 in assign_model(model).values())
    plddts = [r.plddt for r in model.all_polymer_residues()]
    return ss3, plddts


def _evaluate_candidate(
    site: MiddleSite,
    candidate: str,
    designed: str,
    oracle: StructureOracle,
    allow_identical: bool,
) -> SeiferOutcome:
    start, end = site.span.start, site.span.end
    designed_len = len(designed)
    try:
        prediction = oracle.predict(designed)
    except OracleError as exc:
        return SeiferOutcome(
            site=site,
            candidate=candidate,
            differs_from_original=candidate != site.original_middle,
            predicted_ss3_span="",
            tp=False,
            error=str(exc),
            allow_identical=allow_identical,
        )
    model = prediction.model
    n_res = len(model.all_polymer_residues())
    if n_res != designed_len:
        return SeiferOutcome(
            site=site,
            candidate=candidate,
            differs_from_original=candidate != site.original_middle,
            predicted_ss3_span="",
            tp=False,
            error=f"prediction has {n_res} residues, expected {designed_len}",
            allow_identical=allow_identical,
        )
    if prediction.ss3 is not None:
        ss3 = prediction.ss3
        plddts = [r.plddt for r in model.all_polymer_residues()]
    else:
        ss3, plddts = _model_ss3_and_plddt(model)
    if len(ss3) != designed_len:
        return SeiferOutcome(
            site=site,
            candidate=candidate,
            differs_from_original=candidate != site.original_middle,
            predicted_ss3_span="",
            tp=False,
            error=f"SS3 length {len(ss3)} does not match sequence",
            allow_identical=allow_identical,
        )
    span_ss3 = ss3[start:end]
    tp = judge_candidate(site, candidate, span_ss3, allow_identical)
    return SeiferOutcome(
        site=site,
        candidate=candidate,
        differs_from_original=candidate != site.original_middle,
        predicted_ss3_span=span_ss3,
        tp=tp,
        plddt_mean_structure=float(np.mean(plddts)),
        plddt_mean_span=float(np.mean(plddts[start:end])),
        allow_identical=allow_identical,
    )


def _site_seed(seed: int, index: int) -> int:
    return stream_seed(seed, index)


def run_seifer(
    sites: Sequence[MiddleSite],
    sequences: Mapping[str, str],
    generator: Callable[[FillQuery], FillResult],
    oracle: StructureOracle,
    k: int,
    *,
    seed: int = 0,
    workers: int = 1,
    allow_identical: bool = False,
) -> list[SeiferOutcome]:
    """Generate, fold, and judge k candidates per site; deterministic order.

    Results do not depend on the worker count: candidate generation is seeded
    per site, and outcomes are reduced in (site, candidate) order.
    """
    tasks: list[tuple[MiddleSite, str, str, str | None]] = []
    for idx, site in enumerate(sites):
        full = sequences[site.protein_id]
        if len(full) != site.protein_length:
            raise ValueError(f"sequence length mismatch for {site.protein_id}")
        if full[site.span.start : site.span.end] != site.original_middle:
            raise ValueError(f"site does not match sequence for {site.site_id}")
        prefix, suffix = full[: site.span.start], full[site.span.end :]
        query = FillQuery(
            prefix=prefix,
            suffix=suffix,
            target_len=site.span.length,
            k=k,
            seed=_site_seed(seed, idx),
        )
        try:
            result = generator(query)
            candidates = list(result.candidates)
            gen_error = None
        except PartialFillError as exc:
            candidates = list(exc.candidates)
            gen_error = str(exc)
        for cand in candidates[:k]:
            tasks.append((site, cand, prefix + cand + suffix, None))
        for _ in range(k - min(len(candidates), k)):
            tasks.append(
                (site, "", "", gen_error or "generation produced no candidate")
            )

    def run_task(task: tuple[MiddleSite, str, str, str | None]) -> SeiferOutcome:
        site, cand, designed, gen_error = task
        if gen_error is not None:
            return SeiferOutcome(
                site=site,
                candidate=cand,
                differs_from_original=False,
                predicted_ss3_span="",
                tp=False,
                error=gen_error,
                allow_identical=allow_identical,
            )
        return _evaluate_candidate(site, cand, designed, oracle, allow_identical)

    if workers > 1 and oracle.concurrent:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_task, tasks))
    else:
        outcomes = [run_task(t) for t in tasks]
    return outcomes


def outcome_record(outcome: SeiferOutcome) -> dict:
    """Flat JSON-serializable row for one outcome; record_to_outcome inverts it."""
    site = outcome.site
    return {
        "site_id": site.site_id,
        "protein_id": site.protein_id,
        "start": site.span.start,
        "length": site.span.length,
        "ss_class": site.ss_class,
        "protein_length": site.protein_length,
        "original_middle": site.original_middle,
        "candidate": outcome.candidate,
        "differs": outcome.differs_from_original,
        "predicted_ss3_span": outcome.predicted_ss3_span,
        "tp": outcome.tp,
        "plddt_mean_structure": outcome.plddt_mean_structure,
        "plddt_mean_span": outcome.plddt_mean_span,
        "error": outcome.error,
        "allow_identical": outcome.allow_identical,
    }


def record_to_outcome(record: Mapping) -> SeiferOutcome:
    """Rebuild an outcome from its flat record, e.g. when reading a dump."""
    length = int(record["length"])
    cls = str(record["ss_class"])
    site = MiddleSite(
        protein_id=str(record["protein_id"]),
        span=SpanSpec(int(record["start"]), length),
        ss_class=cls,
        original_middle=str(record["original_middle"]),
        original_ss3_span=cls * length,
        protein_length=int(record["protein_length"]),
    )
    return SeiferOutcome(
        site=site,
        candidate=str(record["candidate"]),
        differs_from_original=bool(record["differs"]),
        predicted_ss3_span=str(record["predicted_ss3_span"]),
        tp=bool(record["tp"]),
        plddt_mean_structure=record["plddt_mean_structure"],
        plddt_mean_span=record["plddt_mean_span"],
        error=record["error"],
        allow_identical=bool(record.get("allow_identical", False)),
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def _by_site(outcomes: Iterable[SeiferOutcome]) -> dict[tuple, list[SeiferOutcome]]:
    groups: dict[tuple, list[SeiferOutcome]] = {}
    for o in outcomes:
        key = (o.site.protein_id, o.site.span.start, o.site.span.length,
               o.site.ss_class)
        groups.setdefault(key, []).append(o)
    return groups


def _site_fractions(
    outcomes: Iterable[SeiferOutcome], k: int | None
) -> list[tuple[int, int]]:
    """Per site: (TP count, valid count) over the first k candidates."""
    rows = []
    for group in _by_site(outcomes).values():
        subset = group if k is None else group[:k]
        valid = [o for o in subset if o.ok]
        if valid:
            rows.append((sum(o.tp for o in valid), len(valid)))
    return rows


def precision_at_k(outcomes: Iterable[SeiferOutcome], k: int | None = None) -> float:
    """Mean over sites of TP/(valid candidates); errored candidates excluded."""
    rows = _site_fractions(outcomes, k)
    if not rows:
        raise ValueError("no sites with valid candidates")
    return sum(tp / valid for tp, valid in rows) / len(rows)


def retrieval_at_k(outcomes: Iterable[SeiferOutcome], k: int | None = None) -> float:
    """Fraction of sites with at least one TP among their first k candidates."""
    rows = _site_fractions(outcomes, k)
    if not rows:
        raise ValueError("no sites with valid candidates")
    return sum(1 for tp, _ in rows if tp > 0) / len(rows)


def _bin_metrics(outcomes: list[SeiferOutcome], k: int | None) -> dict:
    out = {
        "n_sites": len(_site_fractions(outcomes, k)),
        "n_candidates": sum(1 for o in outcomes if o.ok),
        "n_errored": sum(1 for o in outcomes if not o.ok),
    }
    try:
        out["precision_at_k"] = precision_at_k(outcomes, k)
        out["retrieval_at_k"] = retrieval_at_k(outcomes, k)
    except ValueError:
        out["precision_at_k"] = None
        out["retrieval_at_k"] = None
    return out


def position_bin(site: MiddleSite, n_bins: int = 4) -> int:
    """floor(n_bins * midpoint/length), clamped into the last bin."""
    raw = int(n_bins * site.midpoint / site.protein_length)
    return min(max(raw, 0), n_bins - 1)


def ablate_by_position(
    outcomes: Iterable[SeiferOutcome], n_bins: int = 4, k: int | None = None
) -> list[dict]:
    outcomes = list(outcomes)
    rows = []
    for b in range(n_bins):
        members = [o for o in outcomes if position_bin(o.site, n_bins) == b]
        row = {"bin": b, "lo": b / n_bins, "hi": (b + 1) / n_bins}
        row.update(_bin_metrics(members, k))
        rows.append(row)
    return rows


def length_bin(length: int, edges: Sequence[float]) -> int:
    """Half-open bins [e0,e1),...,[e_{m-1},e_m]; out-of-range clamps."""
    idx = int(np.searchsorted(np.asarray(edges, dtype=float), length, side="right")) - 1
    return min(max(idx, 0), len(edges) - 2)


def default_length_edges(sites: Iterable[MiddleSite]) -> list[float]:
    lengths = sorted({(s.protein_id, s.span.start): s.span.length
                      for s in sites}.values())
    if not lengths:
        raise ValueError("no sites")
    qs = np.quantile(np.asarray(lengths, dtype=float), [0.0, 0.25, 0.5, 0.75, 1.0])
    return list(qs)


def ablate_by_length(
    outcomes: Iterable[SeiferOutcome],
    bin_edges: Sequence[float] | None = None,
    k: int | None = None,
) -> list[dict]:
    outcomes = list(outcomes)
    if bin_edges is None:
        bin_edges = default_length_edges(o.site for o in outcomes)
    if len(bin_edges) < 2:
        raise ValueError("need at least two bin edges")
    rows = []
    for b in range(len(bin_edges) - 1):
        members = [
            o for o in outcomes if length_bin(o.site.span.length, bin_edges) == b
        ]
        row = {"bin": b, "lo": float(bin_edges[b]), "hi": float(bin_edges[b + 1])}
        row.update(_bin_metrics(members, k))
        rows.append(row)
    return rows


@dataclass(frozen=True)
class PlddtDeltaResult:
    deltas: tuple[float, ...]
    ecdf_x: tuple[float, ...]
    ecdf_y: tuple[float, ...]
    fraction_positive: float
    n_skipped_sites: int


def plddt_delta(
    outcomes: Iterable[SeiferOutcome], baselines: Mapping[str, float]
) -> PlddtDeltaResult:
    """Candidate-minus-baseline mean pLDDT deltas with their empirical CDF."""
    deltas = []
    skipped = set()
    for o in outcomes:
        if not o.ok or o.plddt_mean_structure is None:
            continue
        base = baselines.get(o.site.protein_id)
        if base is None:
            skipped.add(o.site.site_id)
            continue
        deltas.append(o.plddt_mean_structure - base)
    if not deltas:
        raise ValueError("no deltas: every outcome errored or lacked a baseline")
    xs = sorted(deltas)
    n = len(xs)
    ys = [(i + 1) / n for i in range(n)]
    frac = sum(1 for d in deltas if d > 0) / n
    return PlddtDeltaResult(
        deltas=tuple(deltas),
        ecdf_x=tuple(xs),
        ecdf_y=tuple(ys),
        fraction_positive=frac,
        n_skipped_sites=len(skipped),
    )


def sequence_recovery_rate(outcomes: Iterable[SeiferOutcome]) -> float:
    """Pooled per-position identity between candidates and originals, x100."""
    matches = total = 0
    for o in outcomes:
        if not o.ok or not o.candidate:
            continue
        orig = o.site.original_middle
        matches += sum(a == b for a, b in zip(o.candidate, orig))
        total += len(orig)
    if total == 0:
        raise ValueError("no valid candidates to score")
    return 100.0 * matches / total


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeiferReport:
    ks: tuple[int, ...]
    n_sites: int
    n_candidates: int
    n_errored: int
    overall: dict
    per_class: dict
    position_bins: tuple[dict, ...]
    length_bins: tuple[dict, ...]
    recovery_rate: float | None
    plddt: PlddtDeltaResult | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["position_bins"] = list(self.position_bins)
        d["length_bins"] = list(self.length_bins)
        d["plddt"] = None if self.plddt is None else asdict(self.plddt)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


def _metric_block(outcomes: list[SeiferOutcome], ks: Sequence[int]) -> dict:
    block = {}
    for k in ks:
        try:
            block[f"precision_at_{k}"] = precision_at_k(outcomes, k)
            block[f"retrieval_at_{k}"] = retrieval_at_k(outcomes, k)
        except ValueError:
            block[f"precision_at_{k}"] = None
            block[f"retrieval_at_{k}"] = None
    return block


def build_report(
    outcomes: Iterable[SeiferOutcome],
    ks: Sequence[int] = (3, 5),
    n_bins: int = 4,
    length_edges: Sequence[float] | None = None,
    baselines: Mapping[str, float] | None = None,
) -> SeiferReport:
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("no outcomes")
    per_class = {}
    for cls in SS3_CLASSES:
        members = [o for o in outcomes if o.site.ss_class == cls]
        if members:
            block = _metric_block(members, ks)
            block["n_sites"] = len(_by_site(members))
            per_class[cls] = block
    try:
        recovery = sequence_recovery_rate(outcomes)
    except ValueError:
        recovery = None
    plddt = None
    if baselines is not None:
        try:
            plddt = plddt_delta(outcomes, baselines)
        except ValueError:
            plddt = None
    max_k = max(ks) if ks else None
    return SeiferReport(
        ks=tuple(ks),
        n_sites=len(_by_site(outcomes)),
        n_candidates=sum(1 for o in outcomes if o.ok),
        n_errored=sum(1 for o in outcomes if not o.ok),
        overall=_metric_block(outcomes, ks),
        per_class=per_class,
        position_bins=tuple(ablate_by_position(outcomes, n_bins, max_k)),
        length_bins=tuple(ablate_by_length(outcomes, length_edges, max_k)),
        recovery_rate=recovery,
        plddt=plddt,
    )
