"""Ideal-geometry backbone construction from phi/psi dihedrals.

Builds N/CA/C/O coordinates residue by residue with standard bond lengths
and angles (omega fixed at 180), so secondary-structure fixtures can be
generated from dihedral recipes instead of shipped coordinate files.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from infill_bench.dssp import BackboneResidue
from infill_bench.structio import (
    ONE_TO_THREE,
    AtomRecord,
    ResidueRecord,
    StructureModel,
)

# ideal backbone internal coordinates (angstroms, degrees)
B_N_CA = 1.458
B_CA_C = 1.525
B_C_N = 1.329
B_C_O = 1.231
A_N_CA_C = 111.2
A_CA_C_N = 116.2
A_C_N_CA = 121.7
A_CA_C_O = 120.8
OMEGA = 180.0


def place_atom(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    bond: float,
    angle_deg: float,
    dihedral_deg: float,
) -> np.ndarray:
    """Position D so that |C-D|=bond, angle(B,C,D)=angle, dihedral(A,B,C,D)=chi."""
    theta = math.radians(angle_deg)
    chi = math.radians(dihedral_deg)
    bc = c - b
    bc = bc / np.linalg.norm(bc)
    n = np.cross(b - a, bc)
    n = n / np.linalg.norm(n)
    m = np.cross(n, bc)
    d = (
        -bond * math.cos(theta) * bc
        + bond * math.sin(theta) * (math.cos(chi) * m - math.sin(chi) * n)
    )
    return c + d


def dihedral(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> float:
    """Signed dihedral angle A-B-C-D in degrees."""
    b1 = b - a
    b2 = c - b
    b3 = d - c
    n1 = np.cross(b1, b2)
    n2 = np.cross(b2, b3)
    m = np.cross(n1, b2 / np.linalg.norm(b2))
    return math.degrees(math.atan2(float(np.dot(m, n2)), float(np.dot(n1, n2))))


def build_backbone(
    phi_psi: Sequence[tuple[float, float]], names: str | None = None
) -> list[BackboneResidue]:
    """Chain of BackboneResidue from per-residue (phi, psi).

    phi of the first residue is undefined and ignored; psi of the last only
    orients its carbonyl oxygen.
    """
    n_res = len(phi_psi)
    if names is None:
        names = "A" * n_res
    if len(names) != n_res:
        raise ValueError("names length must match phi_psi length")

    ns: list[np.ndarray] = []
    cas: list[np.ndarray] = []
    cs: list[np.ndarray] = []
    theta1 = math.radians(A_N_CA_C)
    for i, (phi, _) in enumerate(phi_psi):
        if i == 0:
            ns.append(np.zeros(3))
            cas.append(np.array([B_N_CA, 0.0, 0.0]))
            cs.append(
                cas[0]
                + B_CA_C * np.array([-math.cos(theta1), math.sin(theta1), 0.0])
            )
            continue
        psi_prev = phi_psi[i - 1][1]
        n = place_atom(ns[i - 1], cas[i - 1], cs[i - 1], B_C_N, A_CA_C_N, psi_prev)
        ca = place_atom(cas[i - 1], cs[i - 1], n, B_N_CA, A_C_N_CA, OMEGA)
        c = place_atom(cs[i - 1], n, ca, B_CA_C, A_N_CA_C, phi)
        ns.append(n)
        cas.append(ca)
        cs.append(c)

    chain = []
    for i, (_, psi) in enumerate(phi_psi):
        o = place_atom(ns[i], cas[i], cs[i], B_C_O, A_CA_C_O, psi + 180.0)
        chain.append(BackboneResidue(names[i], ns[i], cas[i], cs[i], o))
    return chain


def transform_chain(
    chain: Sequence[BackboneResidue],
    rotation: np.ndarray,
    translation: np.ndarray,
) -> list[BackboneResidue]:
    def move(v: np.ndarray | None) -> np.ndarray | None:
        return None if v is None else rotation @ v + translation

    return [
        BackboneResidue(r.name, move(r.n), move(r.ca), move(r.c), move(r.o))
        for r in chain
    ]


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish proper rotation via QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def backbone_to_model(
    chain: Sequence[BackboneResidue], entry_id: str = "synthetic", chain_id: str = "A"
) -> StructureModel:
    """Wrap bare backbone coordinates as a structure model for file IO."""
    residues = []
    for i, res in enumerate(chain):
        atoms = []
        for name, coords in (("N", res.n), ("CA", res.ca), ("C", res.c), ("O", res.o)):
            if coords is None:
                continue
            element = name[0]
            atoms.append(
                AtomRecord(
                    name=name,
                    element=element,
                    coords=tuple(round(float(x), 3) for x in coords),
                    b_factor=0.0,
                    occupancy=1.0,
                    alt_loc="",
                )
            )
        residues.append(
            ResidueRecord(
                name3=ONE_TO_THREE.get(res.name, "UNK"),
                chain_id=chain_id,
                seq_num=i + 1,
                insertion_code="",
                atoms=tuple(atoms),
                het=False,
            )
        )
    return StructureModel(entry_id=entry_id, chains={chain_id: tuple(residues)})
