"""CLI surface tests: artifacts, determinism, exit codes, schemas."""

from __future__ import annotations

import contextlib
import csv
import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from geometry import build_backbone, backbone_to_model, transform_chain

from infill_bench.cli import EXIT_DATA, EXIT_OK, EXIT_ORACLE, EXIT_USAGE, main
from infill_bench.lm_engine import ModelConfig, load_weights, forward_logits, \
    random_weights, save_weights
from infill_bench.seqcore import (
    CANONICAL_RESIDUES,
    DEFAULT_ALPHABET,
    ProteinSequence,
    ResidueAlphabet,
    detokenize,
    invert_fim,
    write_fasta,
)
from infill_bench.structio import StructureModel, write_mmcif, write_pdb

ALPHA = (-57.0, -47.0)


def run_cli(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


def read_jsonl(path: Path) -> tuple[dict, list[dict]]:
    lines = [json.loads(x) for x in path.read_text().splitlines() if x.strip()]
    assert set(lines[0]) == {"meta"}
    return lines[0]["meta"], lines[1:]


def read_csv(path: Path) -> tuple[str, list[dict]]:
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# infill-bench")
    return lines[0], list(csv.DictReader(lines[1:]))


def write_seqs(path: Path, n=4, length=20, seed=7) -> dict[str, str]:
    rng = np.random.default_rng(seed)
    recs = [
        ProteinSequence(f"prot{i}",
                        "".join(rng.choice(list(CANONICAL_RESIDUES), size=length)))
        for i in range(n)
    ]
    write_fasta(recs, path)
    return {r.id: r.residues for r in recs}


def write_ss3(path: Path, ids, ss3: str) -> None:
    write_fasta([ProteinSequence(pid, ss3) for pid in ids], path)


LAYOUT_SS3 = "C" * 4 + "H" * 12 + "C" * 4


@pytest.fixture(scope="module")
def bundle(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("weights") / "tiny.pfim"
    config = ModelConfig(n_layers=1, d_model=16, n_heads=4,
                         vocab_size=26, max_positions=128)
    save_weights(path, config, random_weights(config, np.random.default_rng(1)))
    return path


# ---------------------------------------------------------------------------
# top level
# ---------------------------------------------------------------------------

def test_no_subcommand_is_usage_error():
    code, _, err = run_cli()
    assert code == EXIT_USAGE
    assert "usage" in err.lower()


def test_unknown_subcommand_is_usage_error():
    code, _, _ = run_cli("frobnicate")
    assert code == EXIT_USAGE


def test_missing_input_file_is_data_error(tmp_path):
    code, _, err = run_cli("dssp", tmp_path / "nope.pdb")
    assert code == EXIT_DATA
    assert "data error" in err


# ---------------------------------------------------------------------------
# fim-transform
# ---------------------------------------------------------------------------

def test_fim_transform_row_per_record_and_round_trip(tmp_path):
    seqs = write_seqs(tmp_path / "seqs.fasta", n=3)
    out = tmp_path / "fim.jsonl"
    code, _, _ = run_cli("fim-transform", tmp_path / "seqs.fasta",
                         "--out", out, "--p-fim", "1", "--seed", "3")
    assert code == EXIT_OK
    meta, rows = read_jsonl(out)
    assert meta["seed"] == 3 and meta["version"]
    assert len(rows) == 3
    mid = DEFAULT_ALPHABET.mid_id
    for row in rows:
        assert row["fim"] is True
        assert mid in row["tokens"]
        # re-ingesting the emitted stream recovers the input record
        assert detokenize(invert_fim(row["tokens"])) == seqs[row["id"]]


def test_fim_transform_p_zero_emits_plain_streams(tmp_path):
    seqs = write_seqs(tmp_path / "seqs.fasta", n=2)
    out = tmp_path / "ar.jsonl"
    assert run_cli("fim-transform", tmp_path / "seqs.fasta", "--out", out,
                   "--p-fim", "0")[0] == EXIT_OK
    _, rows = read_jsonl(out)
    eos = DEFAULT_ALPHABET.eos_id
    for row in rows:
        assert row["fim"] is False and row["tokens"][-1] == eos
        assert detokenize(row["tokens"][:-1]) == seqs[row["id"]]


def test_fim_transform_rejects_bad_p_and_short_sequences(tmp_path):
    write_seqs(tmp_path / "seqs.fasta", n=1)
    code, _, _ = run_cli("fim-transform", tmp_path / "seqs.fasta",
                         "--out", tmp_path / "x.jsonl", "--p-fim", "1.5")
    assert code == EXIT_USAGE
    write_fasta([ProteinSequence("tiny", "ACDEFGHK")], tmp_path / "tiny.fasta")
    code, _, err = run_cli("fim-transform", tmp_path / "tiny.fasta",
                           "--out", tmp_path / "x.jsonl")
    assert code == EXIT_DATA and "data error" in err


def test_fim_transform_reruns_are_byte_identical(tmp_path):
    write_seqs(tmp_path / "seqs.fasta", n=3)
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (a, b):
        assert run_cli("fim-transform", tmp_path / "seqs.fasta", "--out", out,
                       "--seed", "9")[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.jsonl"
    assert run_cli("fim-transform", tmp_path / "seqs.fasta", "--out", c,
                   "--seed", "10")[0] == EXIT_OK
    assert a.read_bytes() != c.read_bytes()


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def write_sites(path: Path) -> None:
    sites = [
        {"site_id": "s0", "prefix": "ACDEF", "suffix": "KLMNP", "target_len": 6},
        {"site_id": "s1", "sequence": "ACDEFGHIKLMNPQRSTVWY",
         "start": 5, "length": 4},
    ]
    path.write_text(json.dumps(sites))


def test_generate_random_k_candidates_exact_length(tmp_path):
    write_sites(tmp_path / "sites.json")
    out = tmp_path / "gen.jsonl"
    code, _, _ = run_cli("generate", tmp_path / "sites.json", "--out", out,
                         "--k", "5", "--seed", "2")
    assert code == EXIT_OK
    _, rows = read_jsonl(out)
    want_len = {"s0": 6, "s1": 4}
    assert [r["site_id"] for r in rows] == ["s0", "s1"]
    for row in rows:
        assert len(row["candidates"]) == 5
        for cand in row["candidates"]:
            assert len(cand) == want_len[row["site_id"]]
            assert set(cand) <= set(CANONICAL_RESIDUES)


def test_generate_is_reproducible(tmp_path):
    write_sites(tmp_path / "sites.json")
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (a, b):
        run_cli("generate", tmp_path / "sites.json", "--out", out, "--seed", "4")
    assert a.read_bytes() == b.read_bytes()


def test_generate_model_generator_and_csv_format(tmp_path, bundle):
    write_sites(tmp_path / "sites.json")
    out = tmp_path / "gen.csv"
    code, _, _ = run_cli("generate", tmp_path / "sites.json", "--out", out,
                         "--format", "csv", "--generator", "transformer-fim",
                         "--weights", bundle, "--k", "2", "--seed", "2")
    assert code == EXIT_OK
    _, rows = read_csv(out)
    assert len(rows) == 4
    assert {r["site_id"] for r in rows} == {"s0", "s1"}
    for row in rows:
        assert set(row["candidate"]) <= set(CANONICAL_RESIDUES)


def test_generate_usage_and_data_errors(tmp_path):
    write_sites(tmp_path / "sites.json")
    code, _, _ = run_cli("generate", tmp_path / "sites.json",
                         "--out", tmp_path / "x", "--generator",
                         "transformer-fim")
    assert code == EXIT_USAGE  # model generator without --weights
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("generate", bad, "--out", tmp_path / "x")[0] == EXIT_DATA
    bad.write_text(json.dumps([{"prefix": "AC", "suffix": "DE"}]))
    assert run_cli("generate", bad, "--out", tmp_path / "x")[0] == EXIT_DATA


# ---------------------------------------------------------------------------
# dssp
# ---------------------------------------------------------------------------

def helix_model(n=20, entry="helx"):
    return backbone_to_model(build_backbone([ALPHA] * n), entry_id=entry)


def test_dssp_dump_interior_helix(tmp_path):
    pdb = tmp_path / "helix.pdb"
    pdb.write_text(write_pdb(helix_model()))
    code, out, _ = run_cli("dssp", pdb)
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("# infill-bench")
    entry, chain, ss8, ss3 = lines[1].split()
    assert chain == "A"
    assert set(ss8[1:-1]) == {"H"}
    assert ss3 == ss8.replace("-", "C")


def test_dssp_cross_format_identical_ss3(tmp_path):
    model = helix_model()
    pdb, cif = tmp_path / "m.pdb", tmp_path / "m.cif"
    pdb.write_text(write_pdb(model))
    cif.write_text(write_mmcif(model))
    _, out_pdb, _ = run_cli("dssp", pdb)
    _, out_cif, _ = run_cli("dssp", cif)
    ss_pdb = [x.split()[2:] for x in out_pdb.splitlines()[1:]]
    ss_cif = [x.split()[2:] for x in out_cif.splitlines()[1:]]
    assert ss_pdb == ss_cif


def test_dssp_het_only_chain_dumps_placeholder(tmp_path):
    model = helix_model()
    text = write_pdb(model).replace(
        "END",
        "HETATM 9999  O   HOH B 401       0.000   0.000   0.000"
        "  1.00  0.00           O\nEND",
    )
    pdb = tmp_path / "het.pdb"
    pdb.write_text(text)
    code, out, _ = run_cli("dssp", pdb, "--out", tmp_path / "dump.txt")
    assert code == EXIT_OK and not out
    lines = (tmp_path / "dump.txt").read_text().splitlines()
    rows = {x.split()[1]: x.split()[2:] for x in lines[1:]}
    assert rows["B"] == ["-", "-"]
    assert set(rows["A"][0][1:-1]) == {"H"}


# ---------------------------------------------------------------------------
# interactions
# ---------------------------------------------------------------------------

def pair_model(gap: float) -> StructureModel:
    a = backbone_to_model(build_backbone([ALPHA]), chain_id="A", entry_id="pair")
    moved = transform_chain(build_backbone([ALPHA]), np.eye(3),
                            np.array([gap, 0.0, 0.0]))
    b = backbone_to_model(moved, chain_id="B", entry_id="pair")
    return StructureModel(entry_id="pair", chains={**a.chains, **b.chains})


def test_interactions_two_sites_and_histogram_mass(tmp_path):
    pdb = tmp_path / "pair.pdb"
    pdb.write_text(write_pdb(pair_model(5.0)))
    out = tmp_path / "inter"
    code, _, _ = run_cli("interactions", pdb, "--out", out, "--cutoff", "8")
    assert code == EXIT_OK
    _, sites = read_csv(out / "sites.csv")
    assert {(r["chain_id"], r["residue_index"]) for r in sites} == {
        ("A", "0"), ("B", "0"),
    }
    _, hist = read_csv(out / "histogram.csv")
    assert sum(int(r["count"]) for r in hist) == len(sites)
    ET.parse(out / "histogram.svg")  # well-formed XML


def test_interactions_zero_cutoff_empty(tmp_path):
    pdb = tmp_path / "pair.pdb"
    pdb.write_text(write_pdb(pair_model(5.0)))
    out = tmp_path / "inter0"
    code, _, _ = run_cli("interactions", pdb, "--out", out, "--cutoff", "0")
    assert code == EXIT_OK
    _, sites = read_csv(out / "sites.csv")
    assert sites == []
    _, hist = read_csv(out / "histogram.csv")
    assert sum(int(r["count"]) for r in hist) == 0


def test_interactions_rerun_byte_identical_including_svg(tmp_path):
    pdb = tmp_path / "pair.pdb"
    pdb.write_text(write_pdb(pair_model(5.0)))
    for out in ("i1", "i2"):
        assert run_cli("interactions", pdb, "--out", tmp_path / out)[0] == EXIT_OK
    for name in ("sites.csv", "histogram.csv", "histogram.svg"):
        assert (tmp_path / "i1" / name).read_bytes() == \
               (tmp_path / "i2" / name).read_bytes()


# ---------------------------------------------------------------------------
# seifer
# ---------------------------------------------------------------------------

def seifer_inputs(tmp_path, n=4) -> tuple[Path, Path]:
    fasta, ss3 = tmp_path / "seqs.fasta", tmp_path / "ss3.fasta"
    seqs = write_seqs(fasta, n=n)
    write_ss3(ss3, seqs, LAYOUT_SS3)
    return fasta, ss3


def test_seifer_mock_end_to_end_report_schema(tmp_path):
    fasta, ss3 = seifer_inputs(tmp_path)
    out = tmp_path / "run"
    code, stdout, err = run_cli("seifer", fasta, "--ss3", ss3, "--out", out,
                                "--k", "5", "--seed", "5")
    assert code == EXIT_OK
    assert "warning" not in err
    report = json.loads((out / "report.json").read_text())["report"]
    for k in (3, 5):
        assert report["overall"][f"precision_at_{k}"] == 1.0
        assert report["overall"][f"retrieval_at_{k}"] == 1.0  # analytic: random
        assert report["per_class"]["H"][f"precision_at_{k}"] == 1.0
    assert report["n_sites"] == 4 and report["n_errored"] == 0
    _, outcomes = read_jsonl(out / "outcomes.jsonl")
    assert len(outcomes) == 4 * 5
    assert all(o["predicted_ss3_span"] == "H" * 12 for o in outcomes)
    _, metrics = read_csv(out / "metrics.csv")
    assert [r["scope"] for r in metrics] == ["overall", "class"]
    assert metrics[1]["ss_class"] == "H"
    ET.parse(out / "metrics.svg")
    assert "R@5=1.0000" in stdout


def test_seifer_worker_count_does_not_change_artifacts(tmp_path):
    fasta, ss3 = seifer_inputs(tmp_path)
    for out, workers in (("w1", "1"), ("w3", "3")):
        assert run_cli("seifer", fasta, "--ss3", ss3, "--out", tmp_path / out,
                       "--k", "3", "--seed", "8", "--workers", workers,
                       )[0] == EXIT_OK
    a, b = tmp_path / "w1", tmp_path / "w3"
    for name in ("outcomes.jsonl", "metrics.csv", "ablations.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seifer_missing_oracle_entries_warn_but_exit_zero(tmp_path):
    fasta, ss3 = seifer_inputs(tmp_path, n=2)
    empty = tmp_path / "folds"
    empty.mkdir()
    out = tmp_path / "run"
    code, stdout, err = run_cli("seifer", fasta, "--ss3", ss3, "--out", out,
                                "--oracle", f"dir:{empty}", "--k", "2")
    assert code == EXIT_OK
    assert "warning" in err and "errored" in err
    _, outcomes = read_jsonl(out / "outcomes.jsonl")
    assert len(outcomes) == 4 and all(o["error"] for o in outcomes)
    assert "P@5=n/a" in stdout


def test_seifer_oracle_and_config_errors(tmp_path):
    fasta, ss3 = seifer_inputs(tmp_path, n=2)
    out = tmp_path / "x"
    code, _, err = run_cli("seifer", fasta, "--ss3", ss3, "--out", out,
                           "--oracle", f"dir:{tmp_path / 'missing'}")
    assert code == EXIT_ORACLE and "oracle error" in err
    assert run_cli("seifer", fasta, "--ss3", ss3, "--out", out,
                   "--oracle", "smoke-signals")[0] == EXIT_USAGE
    assert run_cli("seifer", fasta, "--ss3", ss3, "--out", out,
                   "--min-lens", "Q=2")[0] == EXIT_USAGE
    # raising the helix minimum above the run length leaves no sites
    code, _, err = run_cli("seifer", fasta, "--ss3", ss3, "--out", out,
                           "--min-lens", "H=13")
    assert code == EXIT_DATA and "no admissible sites" in err


def test_seifer_ss3_mismatch_is_data_error(tmp_path):
    fasta = tmp_path / "seqs.fasta"
    seqs = write_seqs(fasta, n=2)
    ss3 = tmp_path / "ss3.fasta"
    write_ss3(ss3, seqs, "C" * 4 + "H" * 12 + "C" * 5)  # one too long
    assert run_cli("seifer", fasta, "--ss3", ss3,
                   "--out", tmp_path / "x")[0] == EXIT_DATA
    write_ss3(ss3, list(seqs)[:1], LAYOUT_SS3)  # second protein missing
    assert run_cli("seifer", fasta, "--ss3", ss3,
                   "--out", tmp_path / "x")[0] == EXIT_DATA


def test_seifer_emits_plddt_artifacts_with_baselines(tmp_path):
    fasta, ss3 = seifer_inputs(tmp_path, n=3)
    base = tmp_path / "base.csv"
    base.write_text("protein_id,plddt\nprot0,88\nprot1,90\nprot2,92\n")
    out = tmp_path / "run"
    code, _, _ = run_cli("seifer", fasta, "--ss3", ss3, "--out", out,
                         "--k", "2", "--baselines", base)
    assert code == EXIT_OK
    assert (out / "plddt_cdf.csv").exists() and (out / "plddt_cdf.svg").exists()
    report = json.loads((out / "report.json").read_text())["report"]
    # mock pLDDT is 90: deltas are +2, 0, -2 -> one positive protein of three
    assert report["plddt"]["fraction_positive"] == pytest.approx(1 / 3)


# ---------------------------------------------------------------------------
# plddt-delta
# ---------------------------------------------------------------------------

def delta_fixture(tmp_path) -> tuple[Path, Path]:
    fasta, ss3 = seifer_inputs(tmp_path, n=3)
    out = tmp_path / "run"
    assert run_cli("seifer", fasta, "--ss3", ss3, "--out", out, "--k", "1",
                   "--oracle", "mock:plddt=90")[0] == EXIT_OK
    base = tmp_path / "base.csv"
    base.write_text("protein_id,plddt\nprot0,91\nprot1,90\nprot2,89\n")
    return out / "outcomes.jsonl", base


def test_plddt_delta_reproduces_hand_computed_cdf(tmp_path):
    outcomes, base = delta_fixture(tmp_path)
    out = tmp_path / "delta"
    code, stdout, _ = run_cli("plddt-delta", outcomes, "--baselines", base,
                              "--out", out)
    assert code == EXIT_OK
    _, rows = read_csv(out / "plddt_cdf.csv")
    points = [(float(r["delta"]), float(r["cum_fraction"])) for r in rows]
    assert points == [(-1.0, 1 / 3), (0.0, 2 / 3), (1.0, 1.0)]
    summary = json.loads((out / "plddt_summary.json").read_text())
    assert summary["fraction_positive"] == pytest.approx(1 / 3)
    assert summary["n_deltas"] == 3 and summary["n_skipped_sites"] == 0
    ET.parse(out / "plddt_cdf.svg")
    assert "fraction_positive=0.3333" in stdout


def test_plddt_delta_skips_unknown_proteins_with_warning(tmp_path):
    outcomes, base = delta_fixture(tmp_path)
    base.write_text("protein_id,plddt\nprot0,91\n")
    code, _, err = run_cli("plddt-delta", outcomes, "--baselines", base,
                           "--out", tmp_path / "d")
    assert code == EXIT_OK and "2 sites lacked a baseline" in err
    base.write_text("protein_id,plddt\nsomeone_else,50\n")
    code, _, err = run_cli("plddt-delta", outcomes, "--baselines", base,
                           "--out", tmp_path / "d2")
    assert code == EXIT_DATA  # nothing left to plot


def test_plddt_delta_rejects_malformed_inputs(tmp_path):
    outcomes, base = delta_fixture(tmp_path)
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"site_id": "x"}\n')
    assert run_cli("plddt-delta", bad, "--baselines", base,
                   "--out", tmp_path / "d")[0] == EXIT_DATA
    nob = tmp_path / "nob.csv"
    nob.write_text("who,what\n1,2\n")
    assert run_cli("plddt-delta", outcomes, "--baselines", nob,
                   "--out", tmp_path / "d")[0] == EXIT_DATA


# ---------------------------------------------------------------------------
# fitness
# ---------------------------------------------------------------------------

def write_landscape(path: Path, n=30, seed=0) -> None:
    rng = np.random.default_rng(seed)
    rows = [["sequence", "target", "set"]]
    for i in range(n):
        seq = "".join(rng.choice(list(CANONICAL_RESIDUES), size=12))
        target = seq.count("A") + rng.normal(0, 0.1)
        rows.append([seq, repr(float(target)), "train" if i % 3 else "test"])
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)


def test_fitness_json_and_csv_outputs(tmp_path, bundle):
    write_landscape(tmp_path / "land.csv")
    out = tmp_path / "fit.json"
    code, stdout, _ = run_cli("fitness", tmp_path / "land.csv",
                              "--weights", bundle, "--out", out)
    assert code == EXIT_OK
    obj = json.loads(out.read_text())
    assert obj["scorer"] == "loglik" and obj["ridge_lambda"] is None
    assert -1.0 <= obj["spearman"] <= 1.0
    assert obj["meta"]["tool"] == "infill-bench"
    assert "spearman=" in stdout

    out_csv = tmp_path / "fit.csv"
    code, _, _ = run_cli("fitness", tmp_path / "land.csv", "--weights", bundle,
                         "--out", out_csv, "--format", "csv",
                         "--scorer", "embedding-head", "--ridge-lambda", "0.5")
    assert code == EXIT_OK
    _, rows = read_csv(out_csv)
    assert len(rows) == 1
    assert rows[0]["scorer"] == "embedding_head"
    assert float(rows[0]["ridge_lambda"]) == 0.5


def test_fitness_warns_on_replaced_residues(tmp_path, bundle):
    path = tmp_path / "land.csv"
    path.write_text("sequence,target,set\nABCDE,1.0,train\nACDEF,2.0,test\n"
                    "ACDFF,3.0,test\n")
    code, _, err = run_cli("fitness", path, "--weights", bundle,
                           "--out", tmp_path / "fit.json")
    assert code == EXIT_OK
    assert "1 non-residue characters" in err


def test_fitness_bad_csv_is_data_error(tmp_path, bundle):
    path = tmp_path / "land.csv"
    path.write_text("seq,fitness\nACDEF,1.0\n")
    assert run_cli("fitness", path, "--weights", bundle,
                   "--out", tmp_path / "x")[0] == EXIT_DATA


# ---------------------------------------------------------------------------
# logits / alphabet
# ---------------------------------------------------------------------------

def test_logits_dump_matches_engine_exactly(tmp_path, bundle):
    inputs = [[21, 0, 1, 22, 2, 3, 23], [5, 6, 7]]
    spec = tmp_path / "inputs.json"
    spec.write_text(json.dumps(inputs))
    out = tmp_path / "logits.csv"
    code, _, _ = run_cli("logits", "--weights", bundle, "--inputs", spec,
                         "--out", out)
    assert code == EXIT_OK
    _, rows = read_csv(out)
    model = load_weights(bundle)
    assert len(rows) == sum(len(t) for t in inputs)
    for row in rows:
        ref = forward_logits(model, inputs[int(row["input"])])
        got = [float(row[f"logit_{v}"]) for v in range(26)]
        assert got == [float(x) for x in ref[int(row["position"])]]


def test_logits_validates_inputs(tmp_path, bundle):
    spec = tmp_path / "inputs.json"
    spec.write_text(json.dumps([[0, 99]]))
    assert run_cli("logits", "--weights", bundle, "--inputs", spec,
                   "--out", tmp_path / "x")[0] == EXIT_DATA
    spec.write_text(json.dumps([]))
    assert run_cli("logits", "--weights", bundle, "--inputs", spec,
                   "--out", tmp_path / "x")[0] == EXIT_DATA


def test_logits_corrupted_bundle_is_data_error(tmp_path, bundle):
    blob = bytearray(bundle.read_bytes())
    blob[len(blob) // 2] ^= 0xFF
    broken = tmp_path / "broken.pfim"
    broken.write_bytes(bytes(blob))
    spec = tmp_path / "inputs.json"
    spec.write_text(json.dumps([[1, 2]]))
    code, _, err = run_cli("logits", "--weights", broken, "--inputs", spec,
                           "--out", tmp_path / "x")
    assert code == EXIT_DATA and "data error" in err


def test_alphabet_dump_round_trips(tmp_path):
    code, stdout, _ = run_cli("alphabet")
    assert code == EXIT_OK
    assert ResidueAlphabet.from_json(stdout) == DEFAULT_ALPHABET
    out = tmp_path / "alphabet.json"
    assert run_cli("alphabet", "--out", out)[0] == EXIT_OK
    assert out.read_text() == DEFAULT_ALPHABET.to_json()
