"""Regenerate the frozen secondary-structure fixture set.

Each case is a dihedral recipe; coordinates are rebuilt deterministically by
tests from the stored phi/psi, and the stored ss8 string is the output of the
reference implementation at freeze time. Rerun only when the fixture set
itself is meant to change: python3 tests/make_ss8_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from geometry import build_backbone  # noqa: E402
from reference_dssp import reference_ss8  # noqa: E402

STRAND = (-139.0, 135.0)
TURN = [(60.0, -120.0), (-80.0, 0.0)]
HELIX = (-63.0, -42.0)


def _coil(seed: int, n: int) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    return [
        (float(rng.uniform(-150, -50)), float(rng.uniform(-60, 170)))
        for _ in range(n)
    ]


def cases() -> list[dict]:
    defs: list[tuple[str, list[tuple[float, float]], str | None]] = [
        ("poly_ala_helix", [(-57.0, -47.0)] * 20, None),
        ("alpha_13", [HELIX] * 13, None),
        ("three_ten_12", [(-49.0, -26.0)] * 12, None),
        ("pi_14", [(-57.0, -70.0)] * 14, None),
        ("hairpin", [STRAND] * 7 + TURN + [STRAND] * 7, None),
        ("hairpin_long", [STRAND] * 9 + TURN + [STRAND] * 9, None),
        ("lone_strand", [STRAND] * 15, None),
        ("helix_loop_helix",
         [HELIX] * 9
         + [(-135.0, 160.0), (-70.0, 150.0), (-100.0, 120.0)]
         + [HELIX] * 9,
         None),
        ("proline_kink",
         [HELIX] * 6 + [(-60.0, -30.0)] + [HELIX] * 6,
         "A" * 6 + "P" + "A" * 6),
        ("meander_three_strands",
         [STRAND] * 6 + TURN + [STRAND] * 6 + TURN + [STRAND] * 6,
         None),
        ("bridge_bulge",
         [STRAND] * 7 + TURN + [STRAND] * 3 + [(-90.0, 0.0)] + [STRAND] * 4,
         None),
        ("mixed_alpha_beta",
         [HELIX] * 8 + [(-135.0, 160.0), (-70.0, 150.0)]
         + [STRAND] * 4 + TURN + [STRAND] * 4,
         None),
        ("coil_a", _coil(7, 25), None),
        ("coil_b", _coil(19, 25), None),
    ]
    out = []
    for name, phi_psi, names in defs:
        residues = names if names is not None else "A" * len(phi_psi)
        chain = build_backbone(phi_psi, residues)
        out.append(
            {
                "name": name,
                "residues": residues,
                "phi_psi": [[p, q] for p, q in phi_psi],
                "ss8": reference_ss8(chain),
            }
        )
    return out


def main() -> None:
    data = cases()
    classes = set("".join(c["ss8"] for c in data))
    assert {"H", "G", "I", "E", "B", "T", "S", "-"} <= classes, classes
    assert len(data) >= 10
    path = Path(__file__).parent / "fixtures" / "ss8_cases.json"
    path.parent.mkdir(exist_ok=True)
    path.write_text(json.dumps(data, indent=1))
    for c in data:
        print(f"{c['name']:24s} {c['ss8']}")
    print(f"wrote {len(data)} cases to {path}")


if __name__ == "__main__":
    main()
