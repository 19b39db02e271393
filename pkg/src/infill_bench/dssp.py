"""Kabsch-Sander secondary-structure assignment from backbone geometry.

Implements the classic 8-class algorithm: amide-hydrogen reconstruction,
electrostatic hydrogen-bond energies with the -0.5 kcal/mol threshold,
n-turns and minimal helices, bridge/ladder/bulge sheet logic, bends at
kappa > 70 degrees, and the 3-/4-class mappings used downstream.

Conventions pinned here (all from the original algorithm and its canonical
implementation): energies are rounded to 0.001 kcal/mol and clamped at -9.9;
residue pairs closer than 9 A between alpha-carbons are the only bond
candidates; each residue keeps its two strongest bonds per direction;
prolines and segment-initial residues never donate. Chain breaks (C->N
distance >= 2.5 A, or missing backbone atoms) split a chain into segments
that are assigned independently, with no bonds across breaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .structio import ResidueRecord, StructureModel

Q1Q2_F = 0.084 * 332.0  # 27.888: partial charges times electrostatic factor
MIN_BOND_ENERGY = -9.9
BOND_THRESHOLD = -0.5
CLASH_DISTANCE = 0.5
CA_SEARCH_DISTANCE = 9.0
CHAIN_BREAK_DISTANCE = 2.5
BEND_KAPPA_DEGREES = 70.0
AMIDE_NH_LENGTH = 1.0

SS3_MAP = {"H": "H", "G": "H", "I": "H", "E": "E", "B": "E",
           "T": "C", "S": "C", "-": "C"}
SS4_MAP = {**SS3_MAP, "-": "-"}


class ClashError(ValueError):
    """Atoms closer than the 0.5 A sanity floor; geometry is degenerate."""


@dataclass(frozen=True)
class BackboneResidue:
    """Backbone heavy atoms of one residue; None marks a missing atom."""

    name: str  # one-letter code ('P' disables hydrogen donation)
    n: np.ndarray | None
    ca: np.ndarray | None
    c: np.ndarray | None
    o: np.ndarray | None
    h: np.ndarray | None = None

    @property
    def complete(self) -> bool:
        return all(v is not None for v in (self.n, self.ca, self.c, self.o))

    @classmethod
    def from_record(cls, record: ResidueRecord) -> "BackboneResidue":
        def coords(name: str) -> np.ndarray | None:
            atom = record.atom(name)
            return np.asarray(atom.coords, dtype=np.float64) if atom else None

        return cls(record.one_letter, coords("N"), coords("CA"), coords("C"),
                   coords("O"))


def backbone_chain(residues: Sequence[ResidueRecord]) -> list[BackboneResidue]:
    return [BackboneResidue.from_record(r) for r in residues if not r.het]


def backbone_chains(model: StructureModel) -> dict[str, list[BackboneResidue]]:
    return {
        cid: backbone_chain(model.polymer_residues(cid)) for cid in model.chains
    }


def _dist(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b))


def _segment_ids(chain: Sequence[BackboneResidue]) -> list[int]:
    """Residues sharing an id are covalently continuous (no chain break)."""
    ids = []
    seg = 0
    for i, res in enumerate(chain):
        if i > 0:
            prev = chain[i - 1]
            broken = (
                not prev.complete
                or not res.complete
                or _dist(prev.c, res.n) >= CHAIN_BREAK_DISTANCE
            )
            if broken:
                seg += 1
        ids.append(seg)
    return ids


# ---------------------------------------------------------------------------
# Hydrogen reconstruction and bond energies
# ---------------------------------------------------------------------------

def reconstruct_amide_H(chain: Sequence[BackboneResidue]) -> list[BackboneResidue]:
    """Place each amide hydrogen 1 A from N opposite the previous carbonyl.

    Segment-initial residues and prolines get none (they cannot donate).
    File-supplied hydrogens are ignored; reconstruction keeps behavior uniform
    across experimental and predicted structures.
    """
    seg = _segment_ids(chain)
    out = []
    for i, res in enumerate(chain):
        h = None
        if (
            res.name != "P"
            and res.n is not None
            and i > 0
            and seg[i] == seg[i - 1]
            and chain[i - 1].c is not None
            and chain[i - 1].o is not None
        ):
            co = chain[i - 1].c - chain[i - 1].o
            norm = np.linalg.norm(co)
            if norm > 0:
                h = res.n + co / norm * AMIDE_NH_LENGTH
        out.append(replace(res, h=h))
    return out


def _round_energy(e: float) -> float:
    # round half away from zero at the third decimal, like the reference code
    return math.copysign(math.floor(abs(e) * 1000.0 + 0.5) / 1000.0, e)


def hbond_energy(donor: BackboneResidue, acceptor: BackboneResidue) -> float:
    """Electrostatic N-H...O=C energy in kcal/mol (bond iff < -0.5)."""
    if donor.n is None or acceptor.c is None or acceptor.o is None:
        raise ValueError("donor N and acceptor C/O coordinates are required")
    if donor.name == "P":
        return 0.0
    h = donor.h if donor.h is not None else donor.n
    r_on = _dist(donor.n, acceptor.o)
    r_ch = _dist(h, acceptor.c)
    r_oh = _dist(h, acceptor.o)
    r_cn = _dist(donor.n, acceptor.c)
    if min(r_on, r_ch, r_oh, r_cn) < CLASH_DISTANCE:
        raise ClashError(
            f"donor/acceptor atoms closer than {CLASH_DISTANCE} A"
        )
    energy = Q1Q2_F * (1.0 / r_on + 1.0 / r_ch - 1.0 / r_oh - 1.0 / r_cn)
    return max(_round_energy(energy), MIN_BOND_ENERGY)


# ---------------------------------------------------------------------------
# Assignment
# ---------------------------------------------------------------------------

_NO_BOND = (0.0, None)


class _Bonds:
    """Two strongest donated bonds per residue (and the mirror direction)."""

    def __init__(self, n: int):
        self.accepts: list[list[tuple[float, int | None]]] = [
            [_NO_BOND, _NO_BOND] for _ in range(n)
        ]
        self.donates_to = self.accepts  # alias: donor's stored acceptors

    def add(self, donor: int, acceptor: int, energy: float) -> None:
        slots = self.donates_to[donor]
        if energy < slots[0][0]:
            slots[1] = slots[0]
            slots[0] = (energy, acceptor)
        elif energy < slots[1][0]:
            slots[1] = (energy, acceptor)

    def test(self, donor: int, acceptor: int) -> bool:
        return any(
            idx == acceptor and e < BOND_THRESHOLD
            for e, idx in self.donates_to[donor]
        )


def _compute_bonds(chain: list[BackboneResidue], seg: list[int]) -> _Bonds:
    n = len(chain)
    bonds = _Bonds(n)
    for i in range(n):
        ri = chain[i]
        if not ri.complete:
            continue
        for j in range(i + 1, n):
            rj = chain[j]
            if not rj.complete or seg[i] != seg[j]:
                continue
            if _dist(ri.ca, rj.ca) >= CA_SEARCH_DISTANCE:
                continue
            try:
                e = hbond_energy(ri, rj)
            except ClashError:
                e = MIN_BOND_ENERGY
            bonds.add(i, j, e)
            if j != i + 1:  # N-H of i+1 points back at C=O of i; skip self-ring
                try:
                    e = hbond_energy(rj, ri)
                except ClashError:
                    e = MIN_BOND_ENERGY
                bonds.add(j, i, e)
    return bonds


_FLAG_NONE, _FLAG_START, _FLAG_END, _FLAG_START_END, _FLAG_MIDDLE = range(5)


def _helix_flags(
    chain: list[BackboneResidue], seg: list[int], bonds: _Bonds
) -> dict[int, list[int]]:
    n = len(chain)
    flags = {stride: [_FLAG_NONE] * n for stride in (3, 4, 5)}
    for stride in (3, 4, 5):
        f = flags[stride]
        for i in range(n - stride):
            if seg[i] != seg[i + stride] or not bonds.test(i + stride, i):
                continue
            f[i + stride] = _FLAG_END
            for j in range(i + 1, i + stride):
                if f[j] == _FLAG_NONE:
                    f[j] = _FLAG_MIDDLE
            f[i] = _FLAG_START_END if f[i] == _FLAG_END else _FLAG_START
    return flags


def _is_start(flags: dict[int, list[int]], stride: int, i: int) -> bool:
    return flags[stride][i] in (_FLAG_START, _FLAG_START_END)


_PARALLEL, _ANTIPARALLEL = 0, 1


def _bridge_type(bonds: _Bonds, seg: list[int], i: int, j: int) -> int | None:
    if seg[i - 1] != seg[i + 1] or seg[j - 1] != seg[j + 1]:
        return None
    if (bonds.test(i + 1, j) and bonds.test(j, i - 1)) or (
        bonds.test(j + 1, i) and bonds.test(i, j - 1)
    ):
        return _PARALLEL
    if (bonds.test(i + 1, j - 1) and bonds.test(j + 1, i - 1)) or (
        bonds.test(j, i) and bonds.test(i, j)
    ):
        return _ANTIPARALLEL
    return None


def _beta_assign(
    chain: list[BackboneResidue], seg: list[int], bonds: _Bonds, ss: list[str]
) -> None:
    n = len(chain)
    ladders: list[dict] = []
    for i in range(1, n - 1):
        for j in range(i + 3, n - 1):
            btype = _bridge_type(bonds, seg, i, j)
            if btype is None:
                continue
            for ladder in ladders:
                if ladder["type"] != btype or ladder["i"][-1] + 1 != i:
                    continue
                if btype == _PARALLEL and ladder["j"][-1] + 1 == j:
                    ladder["i"].append(i)
                    ladder["j"].append(j)
                    break
                if btype == _ANTIPARALLEL and ladder["j"][0] - 1 == j:
                    ladder["i"].append(i)
                    ladder["j"].insert(0, j)
                    break
            else:
                ladders.append({"type": btype, "i": [i], "j": [j]})

    # merge beta-bulge-linked ladders: gap of at most one residue on one
    # strand and at most four on the other
    a = 0
    while a < len(ladders):
        b = a + 1
        while b < len(ladders):
            la, lb = ladders[a], ladders[b]
            d_i = lb["i"][0] - la["i"][-1]
            same_seg = seg[min(la["i"][0], lb["i"][0])] == seg[
                max(la["i"][-1], lb["i"][-1])
            ]
            if la["type"] != lb["type"] or not same_seg or not 0 < d_i < 6:
                b += 1
                continue
            if la["type"] == _PARALLEL:
                d_j = lb["j"][0] - la["j"][-1]
            else:
                d_j = la["j"][0] - lb["j"][-1]
            if (0 <= d_j < 6 and d_i < 3) or (0 <= d_j < 3):
                la["i"].extend(lb["i"])
                if la["type"] == _PARALLEL:
                    la["j"].extend(lb["j"])
                else:
                    la["j"] = lb["j"] + la["j"]
                del ladders[b]
            else:
                b += 1
        a += 1

    for ladder in ladders:
        label = "E" if len(ladder["i"]) > 1 else "B"
        for lo, hi in ((min(ladder["i"]), max(ladder["i"])),
                       (min(ladder["j"]), max(ladder["j"]))):
            for k in range(lo, hi + 1):
                if ss[k] != "E":
                    ss[k] = label


def _kappa_bend(chain: list[BackboneResidue], seg: list[int], i: int) -> bool:
    if i < 2 or i + 2 >= len(chain) or seg[i - 2] != seg[i + 2]:
        return False
    window = chain[i - 2 : i + 3]
    if any(r.ca is None for r in window):
        return False
    u = chain[i].ca - chain[i - 2].ca
    v = chain[i + 2].ca - chain[i].ca
    denom = np.linalg.norm(u) * np.linalg.norm(v)
    if denom == 0:
        return False
    cos = float(np.clip(np.dot(u, v) / denom, -1.0, 1.0))
    return math.degrees(math.acos(cos)) > BEND_KAPPA_DEGREES


def assign_ss8(chain: Sequence[BackboneResidue]) -> str:
    """One 8-class label per residue; unassignable residues get '-'."""
    chain = reconstruct_amide_H(chain)
    n = len(chain)
    if n == 0:
        return ""
    seg = _segment_ids(chain)
    bonds = _compute_bonds(chain, seg)
    ss = ["-"] * n

    # sheets first; helices may overwrite below
    _beta_assign(chain, seg, bonds, ss)

    flags = _helix_flags(chain, seg, bonds)
    for i in range(1, n - 4 + 1):
        if i + 3 < n and _is_start(flags, 4, i) and _is_start(flags, 4, i - 1):
            for j in range(i, i + 4):
                ss[j] = "H"
    for i in range(1, n):
        if i + 2 < n and _is_start(flags, 3, i) and _is_start(flags, 3, i - 1):
            if all(ss[j] in ("-", "G") for j in range(i, i + 3)):
                for j in range(i, i + 3):
                    ss[j] = "G"
    for i in range(1, n):
        if i + 4 < n and _is_start(flags, 5, i) and _is_start(flags, 5, i - 1):
            if all(ss[j] in ("-", "I") for j in range(i, i + 5)):
                for j in range(i, i + 5):
                    ss[j] = "I"

    for i in range(n):
        if ss[i] != "-":
            continue
        turn = any(
            i - k >= 0 and _is_start(flags, stride, i - k)
            for stride in (3, 4, 5)
            for k in range(1, stride)
        )
        if turn:
            ss[i] = "T"
        elif _kappa_bend(chain, seg, i):
            ss[i] = "S"

    for i in range(n):
        if not chain[i].complete:
            ss[i] = "-"
    return "".join(ss)


def assign_model(model: StructureModel) -> dict[str, str]:
    return {
        cid: assign_ss8(backbone_chain(model.polymer_residues(cid)))
        for cid in model.chains
    }


def map_ss3(ss8: str) -> str:
    """Collapse to helix/sheet/coil: H,G,I -> H; E,B -> E; T,S,- -> C."""
    try:
        return "".join(SS3_MAP[ch] for ch in ss8)
    except KeyError as exc:
        raise ValueError(f"unknown SS8 label {exc.args[0]!r}") from None


def map_ss4(ss8: str) -> str:
    """Like map_ss3 but keeps unassigned '-' apart from T/S coil."""
    try:
        return "".join(SS4_MAP[ch] for ch in ss8)
    except KeyError as exc:
        raise ValueError(f"unknown SS8 label {exc.args[0]!r}") from None
