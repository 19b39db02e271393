"""Secondary-structure assignment against hand geometry and the reference oracle."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from geometry import build_backbone, random_rotation, backbone_to_model, transform_chain
from reference_dssp import reference_ss8

from infill_bench.dssp import (
    BackboneResidue,
    ClashError,
    assign_model,
    assign_ss8,
    backbone_chain,
    backbone_chains,
    hbond_energy,
    map_ss3,
    map_ss4,
    reconstruct_amide_H,
)

FIXTURES = json.loads(
    (Path(__file__).parent / "fixtures" / "ss8_cases.json").read_text()
)

ALPHA = [(-57.0, -47.0)] * 20


def res(name="A", n=None, ca=None, c=None, o=None, h=None):
    arr = lambda v: None if v is None else np.asarray(v, dtype=float)
    return BackboneResidue(name, arr(n), arr(ca), arr(c), arr(o), arr(h))


def rebuild(case):
    return build_backbone([tuple(p) for p in case["phi_psi"]], case["residues"])


# ---------------------------------------------------------------------------
# hydrogen reconstruction
# ---------------------------------------------------------------------------

def test_h_placed_one_angstrom_from_n_along_reversed_carbonyl():
    prev = res(c=[0.0, 0.0, 0.0], o=[0.0, 0.0, -1.231], n=[9, 9, 9], ca=[9, 9, 8])
    cur = res(n=[1.4, 0.0, 0.5], ca=[2.0, 1.0, 0.5], c=[3.0, 1.0, 0.5], o=[3.5, 2.0, 0.5])
    out = reconstruct_amide_H([prev, cur])
    # C - O = (0,0,1.231): unit z, so H sits exactly 1 A above N
    assert out[1].h == pytest.approx([1.4, 0.0, 1.5])
    assert abs(np.linalg.norm(out[1].h - cur.n) - 1.0) < 1e-12


def test_first_residue_and_proline_get_no_h():
    chain = build_backbone([(-57.0, -47.0)] * 4, "APAA")
    out = reconstruct_amide_H(chain)
    assert out[0].h is None  # nothing before the chain start
    assert out[1].h is None  # proline nitrogen carries no amide hydrogen
    assert out[2].h is not None and out[3].h is not None


def test_no_h_across_chain_break():
    chain = build_backbone(ALPHA)
    far = transform_chain(chain[10:], np.eye(3), np.array([100.0, 0.0, 0.0]))
    out = reconstruct_amide_H(list(chain[:10]) + far)
    assert out[10].h is None
    assert out[11].h is not None


# ---------------------------------------------------------------------------
# bond energy
# ---------------------------------------------------------------------------

def hand_energy(n, h, c, o):
    """Direct transcription of the electrostatic formula, test-side."""
    d = lambda a, b: math.dist(a, b)
    e = 27.888 * (1 / d(n, o) + 1 / d(h, c) - 1 / d(h, o) - 1 / d(n, c))
    return max(math.copysign(math.floor(abs(e) * 1000 + 0.5) / 1000, e), -9.9)


def test_energy_matches_hand_formula_on_ideal_bond_geometry():
    # linear N-H...O=C at 2.9 A N-O distance
    donor = res(n=[0, 0, 0], h=[0, 0, 1.0], ca=[1, 0, 0], c=[1, 1, 0], o=[2, 1, 0])
    acc = res(n=[5, 5, 5], ca=[5, 5, 6], c=[0, 0, 4.131], o=[0, 0, 2.9])
    got = hbond_energy(donor, acc)
    want = hand_energy([0, 0, 0], [0, 0, 1.0], [0, 0, 4.131], [0, 0, 2.9])
    assert got == want
    assert got < -0.5  # a textbook hydrogen bond qualifies


def test_energy_is_asymmetric_and_decays_with_distance():
    a = build_backbone(ALPHA)
    a = reconstruct_amide_H(a)
    near = hbond_energy(a[6], a[2])
    assert near != hbond_energy(a[2], a[6])
    shifted = transform_chain([a[2]], np.eye(3), np.array([0.0, 0.0, 30.0]))[0]
    assert abs(hbond_energy(a[6], shifted)) < abs(near)


def test_energy_rounding_and_floor():
    donor = res(n=[0, 0, 0], h=[0, 0, 1.0], ca=[1, 0, 0], c=[1, 1, 0], o=[2, 1, 0])
    acc = res(n=[5, 5, 5], ca=[5, 5, 6], c=[0, 0, 4.131], o=[0, 0, 2.9])
    e = hbond_energy(donor, acc)
    assert e == round(e, 3)
    # 0.6 A H..O: legal (above the clash floor) but enormous -> clamped
    tight = res(n=[5, 5, 5], ca=[5, 5, 6], c=[0, 0, 1.9], o=[0, 0, 1.6])
    assert hbond_energy(donor, tight) == -9.9


def test_clash_below_half_angstrom_raises():
    donor = res(n=[0, 0, 0], h=[0, 0, 1.0], ca=[1, 0, 0], c=[1, 1, 0], o=[2, 1, 0])
    acc = res(n=[5, 5, 5], ca=[5, 5, 6], c=[0, 0, 1.45], o=[0, 0, 0.3])
    with pytest.raises(ClashError):
        hbond_energy(donor, acc)


def test_proline_and_missing_h_do_not_donate():
    pro = res(name="P", n=[0, 0, 0], ca=[1, 0, 0], c=[1, 1, 0], o=[2, 1, 0],
              h=[0, 0, 1.0])
    acc = res(n=[5, 5, 5], ca=[5, 5, 6], c=[0, 0, 4.131], o=[0, 0, 2.9])
    assert hbond_energy(pro, acc) == 0.0
    bare = res(n=[0, 0, 0], ca=[1, 0, 0], c=[1, 1, 0], o=[2, 1, 0])  # h=None
    assert hbond_energy(bare, acc) == 0.0  # N stands in for H: terms cancel


def test_energy_requires_backbone_atoms():
    donor = res(n=[0, 0, 0], ca=[1, 0, 0], c=[1, 1, 0], o=[2, 1, 0])
    with pytest.raises(ValueError):
        hbond_energy(donor, res(n=[5, 5, 5], ca=[5, 5, 6]))


# ---------------------------------------------------------------------------
# assignment on fixture chains
# ---------------------------------------------------------------------------

def test_fixture_set_is_large_and_covers_all_classes():
    assert len(FIXTURES) >= 10
    assert set("".join(c["ss8"] for c in FIXTURES)) == set("HGIEBTS-")


def test_reference_oracle_matches_frozen_dumps():
    for case in FIXTURES:
        assert reference_ss8(rebuild(case)) == case["ss8"], case["name"]


def test_assignment_matches_reference_on_fixtures():
    total = agree3 = 0
    for case in FIXTURES:
        got = assign_ss8(rebuild(case))
        assert got == case["ss8"], case["name"]
        total += len(got)
        agree3 += sum(
            a == b for a, b in zip(map_ss3(got), map_ss3(case["ss8"]))
        )
    assert agree3 / total >= 0.95


def test_assignment_matches_reference_on_random_chains():
    for seed in range(30):
        rng = np.random.default_rng(1000 + seed)
        pp = [
            (float(rng.uniform(-160, -40)), float(rng.uniform(-70, 175)))
            for _ in range(int(rng.integers(6, 30)))
        ]
        chain = build_backbone(pp)
        assert assign_ss8(chain) == reference_ss8(chain), seed


def test_poly_ala_helix_interior_is_all_h():
    ss8 = assign_ss8(build_backbone(ALPHA))
    assert set(ss8[1:-1]) == {"H"}
    assert len(ss8) == 20


def test_tiny_and_empty_chains():
    assert assign_ss8([]) == ""
    assert assign_ss8(build_backbone([(-57.0, -47.0)] * 2)) == "--"


def test_rigid_motion_invariance():
    cases = [rebuild(FIXTURES[0]), rebuild(FIXTURES[4]), rebuild(FIXTURES[12])]
    for k, chain in enumerate(cases):
        want = assign_ss8(chain)
        for seed in range(3):
            rng = np.random.default_rng(50 * k + seed)
            moved = transform_chain(
                chain, random_rotation(rng), rng.uniform(-40, 40, size=3)
            )
            assert assign_ss8(moved) == want


def test_chain_break_splits_assignment_into_independent_segments():
    chain = build_backbone(ALPHA)
    far = transform_chain(chain[12:], np.eye(3), np.array([200.0, 0.0, 0.0]))
    broken = list(chain[:12]) + far
    assert assign_ss8(broken) == assign_ss8(chain[:12]) + assign_ss8(chain[12:])


def test_missing_backbone_atom_marks_residue_and_breaks_chain():
    chain = list(build_backbone(ALPHA))
    gap = chain[10]
    chain[10] = BackboneResidue(gap.name, gap.n, gap.ca, gap.c, None)
    ss8 = assign_ss8(chain)
    assert ss8[10] == "-"
    assert ss8 == assign_ss8(chain[:10]) + "-" + assign_ss8(chain[11:])


# ---------------------------------------------------------------------------
# class mappings and model plumbing
# ---------------------------------------------------------------------------

def test_map_ss3_table():
    assert map_ss3("HGIEBTS-") == "HHHEECCC"


def test_map_ss4_keeps_unassigned_distinct():
    assert map_ss4("T-S") == "C-C"
    assert map_ss4("HGIEBTS-") == "HHHEECC-"


def test_mappings_reject_unknown_labels():
    with pytest.raises(ValueError):
        map_ss3("HX")
    with pytest.raises(ValueError):
        map_ss4("Hq")


def test_assign_model_roundtrip_through_structure_records():
    chain = build_backbone(ALPHA)
    model = backbone_to_model(chain, entry_id="helix")
    assert assign_model(model) == {"A": assign_ss8(chain)}
    rebuilt = backbone_chains(model)["A"]
    assert all(r.complete for r in rebuilt)
    assert [r.name for r in rebuilt] == ["A"] * 20


def test_backbone_chain_skips_het_records():
    import dataclasses

    model = backbone_to_model(build_backbone(ALPHA[:5]))
    residues = list(model.chains["A"])
    residues.append(dataclasses.replace(residues[0], het=True, seq_num=99))
    assert len(backbone_chain(residues)) == 5
