"""Command-line surface: transforms, generation, assignment, benchmark, reports.

Artifact conventions, shared by every subcommand:

- every artifact embeds {tool, version, seed, config hash}: JSON files under a
  ``meta`` key, JSONL files as a leading meta row, CSV and text dumps as a
  leading ``#`` comment line, SVG files in the metadata description;
- no timestamps anywhere, so rerunning with identical inputs and flags
  produces byte-identical files;
- figures are always accompanied by a CSV of the plotted numbers;
- exit codes: 0 success (warnings allowed), 1 usage error, 2 data error,
  3 oracle error.

Interchange files whose layout is owned elsewhere (weight bundles, alphabet
JSON, FASTA) are written verbatim in their own formats, without the meta
wrapper.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__, plots
from .fitness import ingest_csv, zero_shot_eval
from .generators import (
    FillQuery,
    FillResult,
    PartialFillError,
    ar_prefix_fill,
    random_fill,
    result_record,
    transformer_fim_fill,
)
from .lm_engine import SamplingParams, forward_logits, load_weights
from .rng import split_rng, stream_seed
from .seifer import (
    DEFAULT_MIN_LENS,
    CommandOracle,
    DirectoryOracle,
    MiddleSite,
    MockOracle,
    OracleError,
    StructureOracle,
    build_report,
    extract_middle_sites,
    outcome_record,
    plddt_delta,
    record_to_outcome,
    run_seifer,
)
from .seqcore import (
    DEFAULT_ALPHABET,
    fim_transform,
    read_fasta,
    sample_span,
    tokenize,
)
from .dssp import assign_model, map_ss3
from .structio import extract_interaction_sites, read_structure, relative_positions

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ORACLE = 3

SS3_CLASSES = ("H", "E", "C")


class UsageError(Exception):
    """Bad flags or malformed flag values; maps to exit code 1."""


class DataError(ValueError):
    """Malformed or inconsistent input files; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    """argparse that reports problems through the exit-code contract."""

    def error(self, message: str):  # noqa: D102  argparse hook
        raise UsageError(message)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


# ---------------------------------------------------------------------------
# Artifact plumbing
# ---------------------------------------------------------------------------

def _config_hash(args: argparse.Namespace) -> str:
    # hash only result-determining settings: the output path and worker
    # count cannot change what is computed, so they stay out
    cfg = {k: v for k, v in vars(args).items()
           if k not in ("func", "out", "workers")}
    blob = json.dumps(cfg, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def _run_meta(args: argparse.Namespace) -> dict:
    return {
        "tool": "infill-bench",
        "version": __version__,
        "seed": int(getattr(args, "seed", 0)),
        "config": _config_hash(args),
    }


def _meta_comment(meta: dict) -> str:
    return (
        f"# {meta['tool']} {meta['version']} "
        f"seed={meta['seed']} config={meta['config']}"
    )


def _svg_description(meta: dict) -> str:
    return _meta_comment(meta)[2:]


def _write_json(path: str | Path, payload: dict, meta: dict) -> None:
    obj = {"meta": meta, **payload}
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _write_jsonl(path: str | Path, rows: Sequence[dict], meta: dict) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def _write_csv(
    path: str | Path, header: Sequence[str], rows: Sequence[Sequence], meta: dict
) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_meta_comment(meta) + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])


def _read_jsonl(path: str | Path) -> list[dict]:
    """Data rows of a JSONL artifact; a leading meta row is skipped."""
    rows = []
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {i}: {exc}") from exc
            if i == 1 and set(obj) == {"meta"}:
                continue
            rows.append(obj)
    return rows


def _ensure_outdir(path: str | Path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Shared input parsing
# ---------------------------------------------------------------------------

def _read_sequences(path: str | Path) -> dict[str, str]:
    records = read_fasta(path)
    if not records:
        raise DataError(f"{path}: no FASTA records")
    out: dict[str, str] = {}
    for rec in records:
        if rec.id in out:
            raise DataError(f"{path}: duplicate record id {rec.id!r}")
        out[rec.id] = rec.residues
    return out


def _read_ss3(path: str | Path) -> dict[str, str]:
    """SS3 strings in FASTA layout; H/E/C are all valid residue letters."""
    strings = _read_sequences(path)
    for pid, ss3 in strings.items():
        bad = set(ss3) - set(SS3_CLASSES)
        if bad:
            raise DataError(
                f"{path}: record {pid!r} has non-SS3 labels {sorted(bad)}"
            )
    return strings


def _read_baselines(path: str | Path) -> dict[str, float]:
    """CSV with protein_id,plddt columns; '#' comment lines are skipped."""
    out: dict[str, float] = {}
    with open(path, newline="") as fh:
        body = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(body)
    fields = reader.fieldnames or []
    for col in ("protein_id", "plddt"):
        if col not in fields:
            raise DataError(f"{path}: missing column {col!r}")
    for i, row in enumerate(reader, start=2):
        try:
            out[row["protein_id"]] = float(row["plddt"])
        except ValueError as exc:
            raise DataError(f"{path}: line {i}: bad plddt {row['plddt']!r}") from exc
    if not out:
        raise DataError(f"{path}: no baseline rows")
    return out


def _parse_min_lens(text: str) -> dict[str, int]:
    """Parse 'H=10,E=6,C=6'-style overrides of the per-class site minimums."""
    mins = dict(DEFAULT_MIN_LENS)
    for part in filter(None, (p.strip() for p in text.split(","))):
        cls, sep, value = part.partition("=")
        if not sep or cls not in SS3_CLASSES:
            raise UsageError(f"bad --min-lens entry {part!r} (want H=10,E=6,C=6)")
        try:
            mins[cls] = int(value)
        except ValueError:
            raise UsageError(f"bad --min-lens value {value!r} for class {cls}")
        if mins[cls] < 1:
            raise UsageError(f"--min-lens {cls} must be >= 1")
    return mins


def _sampling_params(args: argparse.Namespace) -> SamplingParams:
    try:
        return SamplingParams(
            top_k=args.top_k, top_p=args.top_p, temperature=args.temperature
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _make_generator(args: argparse.Namespace) -> Callable[[FillQuery], FillResult]:
    name = args.generator
    if name == "random":
        return random_fill
    if not args.weights:
        raise UsageError(f"generator {name!r} requires --weights")
    model = load_weights(args.weights)
    params = _sampling_params(args)
    fill = transformer_fim_fill if name == "transformer-fim" else ar_prefix_fill
    return lambda q: fill(q, model, params)


def _identity_mock(sequences: dict[str, str], ss3_map: dict[str, str],
                   plddt: float) -> MockOracle:
    """Test oracle: a designed sequence gets the SS3 of its nearest protein.

    Designed sequences differ from their source protein only inside one
    span, so nearest-by-Hamming over equal-length proteins recovers the
    source, and the prediction reproduces the reference structure labels.
    """

    def lookup(designed: str) -> str:
        best: tuple[int, str] | None = None
        for pid, seq in sequences.items():
            if len(seq) != len(designed):
                continue
            dist = sum(a != b for a, b in zip(seq, designed))
            if best is None or dist < best[0]:
                best = (dist, pid)
        if best is None:
            raise OracleError(
                f"no reference protein of length {len(designed)} for mock oracle"
            )
        return ss3_map[best[1]]

    return MockOracle(ss3=lookup, plddt=plddt)


def _parse_oracle(spec: str, sequences: dict[str, str],
                  ss3_map: dict[str, str]) -> StructureOracle:
    kind, _, rest = spec.partition(":")
    if kind == "mock":
        plddt = 90.0
        if rest:
            key, sep, value = rest.partition("=")
            if key != "plddt" or not sep:
                raise UsageError(f"bad mock oracle option {rest!r} (want plddt=N)")
            try:
                plddt = float(value)
            except ValueError:
                raise UsageError(f"bad mock plddt {value!r}")
        return _identity_mock(sequences, ss3_map, plddt)
    if kind == "dir":
        if not rest:
            raise UsageError("dir oracle needs a path: dir:PATH")
        if not Path(rest).is_dir():
            raise OracleError(f"oracle directory not found: {rest}")
        return DirectoryOracle(rest)
    if kind == "cmd":
        if not rest:
            raise UsageError("cmd oracle needs a template: cmd:TEMPLATE")
        return CommandOracle(rest)
    raise UsageError(
        f"unknown oracle {spec!r} (want mock[:plddt=N], dir:PATH, or cmd:TEMPLATE)"
    )


# ---------------------------------------------------------------------------
# fim-transform
# ---------------------------------------------------------------------------

def cmd_fim_transform(args: argparse.Namespace) -> int:
    if not 0.0 <= args.p_fim <= 1.0:
        raise UsageError(f"--p-fim must be in [0, 1], got {args.p_fim}")
    meta = _run_meta(args)
    rows = []
    for idx, (pid, residues) in enumerate(_read_sequences(args.fasta).items()):
        rng = split_rng(args.seed, idx)
        tokens = tokenize(residues)
        if rng.random() < args.p_fim:
            span = sample_span(len(tokens), rng)
            example = fim_transform(tokens, span)
            rows.append({
                "id": pid, "fim": True, "start": span.start,
                "length": span.length, "tokens": example.flattened,
            })
        else:
            rows.append({
                "id": pid, "fim": False, "start": None, "length": None,
                "tokens": tokens + [DEFAULT_ALPHABET.eos_id],
            })
    _write_jsonl(args.out, rows, meta)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def _load_queries(path: str | Path) -> list[tuple[str, str, str, int]]:
    """Sites JSON: rows with prefix/suffix/target_len or sequence/start/length."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if not isinstance(data, list) or not data:
        raise DataError(f"{path}: expected a nonempty JSON array of sites")
    queries = []
    for i, row in enumerate(data):
        if not isinstance(row, dict):
            raise DataError(f"{path}: sites[{i}] is not an object")
        try:
            if "sequence" in row:
                seq = str(row["sequence"])
                start, length = int(row["start"]), int(row["length"])
                if not (0 <= start and start + length <= len(seq) and length >= 1):
                    raise DataError(
                        f"{path}: sites[{i}] span [{start}, {start + length}) "
                        f"does not fit a sequence of length {len(seq)}"
                    )
                prefix, suffix = seq[:start], seq[start + length:]
                target_len = length
            else:
                prefix = str(row["prefix"])
                suffix = str(row["suffix"])
                target_len = int(row["target_len"])
        except KeyError as exc:
            raise DataError(f"{path}: sites[{i}] missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path}: sites[{i}]: {exc}") from exc
        queries.append((str(row.get("site_id", i)), prefix, suffix, target_len))
    return queries


def cmd_generate(args: argparse.Namespace) -> int:
    meta = _run_meta(args)
    queries = _load_queries(args.sites)
    generator = _make_generator(args)
    rows, n_partial = [], 0
    for idx, (site_id, prefix, suffix, target_len) in enumerate(queries):
        try:
            query = FillQuery(prefix, suffix, target_len, k=args.k,
                              seed=stream_seed(args.seed, idx))
        except ValueError as exc:
            raise DataError(f"sites[{idx}]: {exc}") from exc
        try:
            rows.append(result_record(site_id, generator(query)))
        except PartialFillError as exc:
            n_partial += 1
            rows.append({
                "site_id": site_id,
                "candidates": list(exc.candidates),
                "provenance": {
                    "generator": args.generator,
                    "error": str(exc),
                    "top_k_schedule": exc.top_k_schedule,
                },
                "attempts": exc.attempts,
            })
    if n_partial:
        _warn(f"{n_partial} of {len(queries)} sites returned short of k candidates")
    if args.format == "csv":
        flat = [
            (row["site_id"], rank, cand)
            for row in rows
            for rank, cand in enumerate(row["candidates"])
        ]
        _write_csv(args.out, ("site_id", "rank", "candidate"), flat, meta)
    else:
        _write_jsonl(args.out, rows, meta)
    print(f"wrote candidates for {len(rows)} sites to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# dssp
# ---------------------------------------------------------------------------

def cmd_dssp(args: argparse.Namespace) -> int:
    meta = _run_meta(args)
    model = read_structure(args.structure)
    assigned = assign_model(model)
    lines = [_meta_comment(meta)]
    for chain_id in sorted(assigned):
        ss8 = assigned[chain_id]
        lines.append(
            f"{model.entry_id} {chain_id} {ss8 or '-'} "
            f"{map_ss3(ss8) if ss8 else '-'}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# interactions
# ---------------------------------------------------------------------------

def cmd_interactions(args: argparse.Namespace) -> int:
    if args.cutoff < 0:
        raise UsageError(f"--cutoff must be >= 0, got {args.cutoff}")
    meta = _run_meta(args)
    model = read_structure(args.structure)
    sites = sorted(extract_interaction_sites(model, cutoff=args.cutoff,
                                             method=args.method))
    chain_lengths = {cid: len(model.polymer_residues(cid)) for cid in model.chains}
    positions, counts = relative_positions(sites, chain_lengths, n_bins=args.bins)

    outdir = _ensure_outdir(args.out)
    _write_csv(
        outdir / "sites.csv",
        ("chain_id", "residue_index", "relative_position"),
        [(cid, idx, pos) for (cid, idx), pos in zip(sites, positions)],
        meta,
    )
    edges = np.linspace(0.0, 1.0, args.bins + 1)
    _write_csv(
        outdir / "histogram.csv",
        ("bin_lo", "bin_hi", "count"),
        [(float(edges[i]), float(edges[i + 1]), int(c))
         for i, c in enumerate(counts)],
        meta,
    )
    plots.histogram_plot(
        [int(c) for c in counts],
        outdir / "histogram.svg",
        xlabel="relative chain position",
        title=f"interaction sites at {args.cutoff:g} A",
        description=_svg_description(meta),
    )
    print(f"{len(sites)} interaction sites at cutoff {args.cutoff:g}; "
          f"artifacts in {outdir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# seifer
# ---------------------------------------------------------------------------

def _metrics_table(report) -> list[tuple]:
    def cells(block: dict) -> tuple:
        return tuple(
            block.get(f"{m}_at_{k}")
            for k in report.ks for m in ("precision", "retrieval")
        )

    rows = [("overall", "", report.n_sites) + cells(report.overall)]
    for cls in SS3_CLASSES:
        block = report.per_class.get(cls)
        if block:
            rows.append(("class", cls, block["n_sites"]) + cells(block))
    return rows


def cmd_seifer(args: argparse.Namespace) -> int:
    meta = _run_meta(args)
    sequences = _read_sequences(args.fasta)
    ss3_map = _read_ss3(args.ss3)
    mins = _parse_min_lens(args.min_lens)

    sites: list[MiddleSite] = []
    for pid, seq in sequences.items():
        ss3 = ss3_map.get(pid)
        if ss3 is None:
            raise DataError(f"no SS3 record for protein {pid!r}")
        if len(ss3) != len(seq):
            raise DataError(
                f"SS3 length {len(ss3)} != sequence length {len(seq)} for {pid!r}"
            )
        sites.extend(extract_middle_sites(seq, ss3, mins, protein_id=pid))
    if not sites:
        raise DataError("no admissible sites under the configured minimum lengths")

    oracle = _parse_oracle(args.oracle, sequences, ss3_map)
    generator = _make_generator(args)
    outcomes = run_seifer(
        sites, sequences, generator, oracle, k=args.k,
        seed=args.seed, workers=args.workers, allow_identical=args.allow_identical,
    )
    n_errored = sum(1 for o in outcomes if not o.ok)
    if n_errored:
        _warn(f"{n_errored} of {len(outcomes)} candidate evaluations errored")

    baselines = _read_baselines(args.baselines) if args.baselines else None
    report = build_report(outcomes, ks=(3, 5), n_bins=args.position_bins,
                          baselines=baselines)

    outdir = _ensure_outdir(args.out)
    _write_jsonl(outdir / "outcomes.jsonl",
                 [outcome_record(o) for o in outcomes], meta)
    _write_json(outdir / "report.json", {"report": report.to_dict()}, meta)

    ks_header = tuple(
        f"{m}_at_{k}" for k in report.ks for m in ("precision", "retrieval")
    )
    _write_csv(outdir / "metrics.csv",
               ("scope", "ss_class", "n_sites") + ks_header,
               _metrics_table(report), meta)

    ablation_rows = [
        ("position", row["bin"], row["lo"], row["hi"], row["n_sites"],
         row["precision_at_k"], row["retrieval_at_k"])
        for row in report.position_bins
    ] + [
        ("length", row["bin"], row["lo"], row["hi"], row["n_sites"],
         row["precision_at_k"], row["retrieval_at_k"])
        for row in report.length_bins
    ]
    _write_csv(outdir / "ablations.csv",
               ("kind", "bin", "lo", "hi", "n_sites", "precision", "retrieval"),
               ablation_rows, meta)

    classes = [cls for cls in SS3_CLASSES if cls in report.per_class]
    series = {
        label: [report.per_class[cls].get(label) for cls in classes]
        for label in ks_header
    }
    plots.grouped_bar_plot(
        classes or ["none"], series, outdir / "metrics.svg",
        ylabel="fraction", title="recovery by secondary-structure class",
        description=_svg_description(meta),
    )

    if report.plddt is not None:
        _write_plddt_artifacts(report.plddt, outdir, meta)

    top_k = max(report.ks)
    print(
        f"sites={report.n_sites} candidates={report.n_candidates} "
        f"errored={report.n_errored} "
        f"P@{top_k}={_fmt(report.overall[f'precision_at_{top_k}'])} "
        f"R@{top_k}={_fmt(report.overall[f'retrieval_at_{top_k}'])}; "
        f"artifacts in {outdir}"
    )
    return EXIT_OK


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.4f}"


# ---------------------------------------------------------------------------
# plddt-delta
# ---------------------------------------------------------------------------

def _write_plddt_artifacts(result, outdir: Path, meta: dict) -> None:
    _write_csv(
        outdir / "plddt_cdf.csv",
        ("delta", "cum_fraction"),
        list(zip(result.ecdf_x, result.ecdf_y)),
        meta,
    )
    plots.ecdf_plot(
        result.ecdf_x, result.ecdf_y, outdir / "plddt_cdf.svg",
        xlabel="designed minus original mean pLDDT",
        title="pLDDT change across designs",
        description=_svg_description(meta),
    )


def cmd_plddt_delta(args: argparse.Namespace) -> int:
    meta = _run_meta(args)
    try:
        outcomes = [record_to_outcome(row) for row in _read_jsonl(args.outcomes)]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{args.outcomes}: bad outcome record: {exc}") from exc
    baselines = _read_baselines(args.baselines)
    result = plddt_delta(outcomes, baselines)
    if result.n_skipped_sites:
        _warn(f"{result.n_skipped_sites} sites lacked a baseline and were skipped")

    outdir = _ensure_outdir(args.out)
    _write_plddt_artifacts(result, outdir, meta)
    _write_json(
        outdir / "plddt_summary.json",
        {
            "n_deltas": len(result.deltas),
            "fraction_positive": result.fraction_positive,
            "n_skipped_sites": result.n_skipped_sites,
        },
        meta,
    )
    print(f"n={len(result.deltas)} fraction_positive={result.fraction_positive:.4f}; "
          f"artifacts in {outdir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fitness
# ---------------------------------------------------------------------------

def cmd_fitness(args: argparse.Namespace) -> int:
    meta = _run_meta(args)
    dataset = ingest_csv(
        args.csv,
        sequence_col=args.sequence_col,
        target_col=args.target_col,
        split_col=args.split_col,
        name=args.name,
    )
    if dataset.replaced_residues:
        _warn(f"{dataset.replaced_residues} non-residue characters replaced with X")
    model = load_weights(args.weights)
    result = zero_shot_eval(
        model, dataset,
        scorer=args.scorer.replace("-", "_"),
        ridge_lambda=args.ridge_lambda,
    )
    payload = {
        "landscape": result.landscape,
        "scorer": result.scorer,
        "spearman": result.spearman,
        "n_train": result.n_train,
        "n_test": result.n_test,
        "ridge_lambda": result.ridge_lambda,
    }
    if args.format == "csv":
        keys = sorted(payload)
        _write_csv(args.out, keys, [tuple(payload[k] for k in keys)], meta)
    else:
        _write_json(args.out, payload, meta)
    print(f"{result.landscape}: spearman={result.spearman:.4f} "
          f"(scorer={result.scorer}, n_test={result.n_test})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# logits / alphabet (cross-component interchange)
# ---------------------------------------------------------------------------

def cmd_logits(args: argparse.Namespace) -> int:
    meta = _run_meta(args)
    model = load_weights(args.weights)
    try:
        inputs = json.loads(Path(args.inputs).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.inputs}: {exc}") from exc
    if not isinstance(inputs, list) or not inputs:
        raise DataError(f"{args.inputs}: expected a nonempty JSON array of "
                        "token-id lists")
    vocab = model.config.vocab_size
    rows = []
    for i, tokens in enumerate(inputs):
        if (not isinstance(tokens, list) or not tokens
                or not all(isinstance(t, int) and 0 <= t < vocab for t in tokens)):
            raise DataError(
                f"{args.inputs}: inputs[{i}] must be a nonempty list of "
                f"token ids in [0, {vocab})"
            )
        logits = forward_logits(model, tokens)
        for pos in range(logits.shape[0]):
            rows.append((i, pos) + tuple(repr(float(v)) for v in logits[pos]))
    header = ("input", "position") + tuple(f"logit_{v}" for v in range(vocab))
    _write_csv(args.out, header, rows, meta)
    print(f"wrote logits for {len(inputs)} inputs to {args.out}")
    return EXIT_OK


def cmd_alphabet(args: argparse.Namespace) -> int:
    # format owned by the tokenizer; written verbatim so consumers can parse it
    text = DEFAULT_ALPHABET.to_json()
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote alphabet to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_seed(p: _Parser) -> None:
    p.add_argument("--seed", type=int, default=0, help="root random seed")


def _add_sampling(p: _Parser) -> None:
    p.add_argument("--generator", default="random",
                   choices=("random", "transformer-fim", "ar-prefix"))
    p.add_argument("--weights", default=None, help="weight bundle path")
    p.add_argument("--top-k", type=int, default=100)
    p.add_argument("--top-p", type=float, default=0.95)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--k", type=int, default=5, help="candidates per site")


def build_parser() -> _Parser:
    parser = _Parser(prog="infill-bench",
                     description="Fill-in-middle protein design toolkit")
    parser.add_argument("--version", action="version",
                        version=f"infill-bench {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("fim-transform",
                       help="rearrange FASTA records into infilling streams")
    p.add_argument("fasta")
    p.add_argument("--out", required=True, help="output JSONL path")
    p.add_argument("--p-fim", type=float, default=1.0,
                   help="probability of applying the rearrangement per record")
    _add_seed(p)
    p.set_defaults(func=cmd_fim_transform)

    p = sub.add_parser("generate", help="fill middles for a list of sites")
    p.add_argument("sites", help="JSON array of sites")
    p.add_argument("--out", required=True)
    p.add_argument("--format", default="json", choices=("json", "csv"))
    _add_sampling(p)
    _add_seed(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("dssp", help="secondary-structure dump per chain")
    p.add_argument("structure", help="PDB or mmCIF file")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    _add_seed(p)
    p.set_defaults(func=cmd_dssp)

    p = sub.add_parser("interactions",
                       help="inter-chain contact sites and their positions")
    p.add_argument("structure", help="PDB or mmCIF file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--cutoff", type=float, default=8.0, help="distance cutoff (A)")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--method", default="grid", choices=("grid", "brute"))
    _add_seed(p)
    p.set_defaults(func=cmd_interactions)

    p = sub.add_parser("seifer",
                       help="site extraction, generation, folding, and judging")
    p.add_argument("fasta", help="protein sequences")
    p.add_argument("--ss3", required=True,
                   help="reference SS3 strings in FASTA layout, ids matching")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--oracle", default="mock",
                   help="mock[:plddt=N] | dir:PATH | cmd:TEMPLATE")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--min-lens", default="",
                   help="per-class site minimums, e.g. H=10,E=6,C=6")
    p.add_argument("--allow-identical", action="store_true",
                   help="count exact-original candidates as positives")
    p.add_argument("--baselines", default=None,
                   help="CSV of protein_id,plddt for delta analysis")
    p.add_argument("--position-bins", type=int, default=4)
    _add_sampling(p)
    _add_seed(p)
    p.set_defaults(func=cmd_seifer)

    p = sub.add_parser("plddt-delta",
                       help="confidence-change CDF from an outcomes dump")
    p.add_argument("outcomes", help="outcomes.jsonl from a benchmark run")
    p.add_argument("--baselines", required=True,
                   help="CSV of protein_id,plddt")
    p.add_argument("--out", required=True, help="output directory")
    _add_seed(p)
    p.set_defaults(func=cmd_plddt_delta)

    p = sub.add_parser("fitness", help="zero-shot fitness correlation")
    p.add_argument("csv", help="landscape CSV")
    p.add_argument("--weights", required=True)
    p.add_argument("--scorer", default="loglik",
                   choices=("loglik", "embedding-head"))
    p.add_argument("--ridge-lambda", type=float, default=1.0)
    p.add_argument("--name", default=None)
    p.add_argument("--sequence-col", default="sequence")
    p.add_argument("--target-col", default="target")
    p.add_argument("--split-col", default="set")
    p.add_argument("--out", required=True)
    p.add_argument("--format", default="json", choices=("json", "csv"))
    _add_seed(p)
    p.set_defaults(func=cmd_fitness)

    p = sub.add_parser("logits",
                       help="dump per-position logits for fixed token inputs")
    p.add_argument("--weights", required=True)
    p.add_argument("--inputs", required=True,
                   help="JSON array of token-id lists")
    p.add_argument("--out", required=True, help="output CSV path")
    _add_seed(p)
    p.set_defaults(func=cmd_logits)

    p = sub.add_parser("alphabet", help="dump the token alphabet as JSON")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_alphabet)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleError as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
