"""Structure-file parsing (mmCIF/PDB), interaction sites, and corpus stats.

Only the first model of multi-model files is read. Alternate locations keep
the highest-occupancy conformer per atom name. Interaction analysis uses
ordinal residue indices within each chain (file numbering is retained on the
records but not used for positions).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

THREE_TO_ONE = {
    "ALA": "A", "CYS": "C", "ASP": "D", "GLU": "E", "PHE": "F",
    "GLY": "G", "HIS": "H", "ILE": "I", "LYS": "K", "LEU": "L",
    "MET": "M", "ASN": "N", "PRO": "P", "GLN": "Q", "ARG": "R",
    "SER": "S", "THR": "T", "VAL": "V", "TRP": "W", "TYR": "Y",
}
ONE_TO_THREE = {v: k for k, v in THREE_TO_ONE.items()}
ONE_TO_THREE["X"] = "UNK"

SS8_ALPHABET = "HGIEBTS-"


class StructureParseError(ValueError):
    """Unparseable structure data; message carries line/field context."""


@dataclass(frozen=True)
class AtomRecord:
    name: str
    element: str
    coords: tuple[float, float, float]
    b_factor: float = 0.0
    occupancy: float = 1.0
    alt_loc: str = ""

    def __post_init__(self) -> None:
        if not all(math.isfinite(c) for c in self.coords):
            raise StructureParseError(f"atom {self.name}: non-finite coordinates")
        if not self.element:
            raise StructureParseError(f"atom {self.name}: empty element")

    @property
    def is_hydrogen(self) -> bool:
        return self.element.upper() in ("H", "D")


@dataclass(frozen=True)
class ResidueRecord:
    name3: str
    chain_id: str
    seq_num: int
    insertion_code: str
    atoms: tuple[AtomRecord, ...]
    het: bool = False

    @property
    def one_letter(self) -> str:
        return THREE_TO_ONE.get(self.name3, "X")

    def atom(self, name: str) -> AtomRecord | None:
        for a in self.atoms:
            if a.name == name:
                return a
        return None

    @property
    def plddt(self) -> float:
        """Per-residue confidence carried in the B-factor column."""
        ca = self.atom("CA")
        if ca is not None:
            return ca.b_factor
        return float(np.mean([a.b_factor for a in self.atoms]))


@dataclass(frozen=True)
class StructureMetadata:
    uniprot_id: str | None = None
    full_length: int | None = None


@dataclass(frozen=True)
class StructureModel:
    entry_id: str
    chains: dict[str, list[ResidueRecord]]
    metadata: StructureMetadata = field(default_factory=StructureMetadata)

    def polymer_residues(self, chain_id: str) -> list[ResidueRecord]:
        return [r for r in self.chains[chain_id] if not r.het]

    def all_polymer_residues(self) -> list[ResidueRecord]:
        out: list[ResidueRecord] = []
        for chain_id in self.chains:
            out.extend(self.polymer_residues(chain_id))
        return out

    def chain_sequence(self, chain_id: str) -> str:
        return "".join(r.one_letter for r in self.polymer_residues(chain_id))

    def num_atoms(self) -> int:
        return sum(len(r.atoms) for rs in self.chains.values() for r in rs)

    def to_json(self) -> str:
        def atom(a: AtomRecord) -> dict:
            return {
                "name": a.name, "element": a.element, "coords": list(a.coords),
                "b_factor": a.b_factor, "occupancy": a.occupancy,
                "alt_loc": a.alt_loc,
            }

        obj = {
            "entry_id": self.entry_id,
            "metadata": {
                "uniprot_id": self.metadata.uniprot_id,
                "full_length": self.metadata.full_length,
            },
            "chains": {
                cid: [
                    {
                        "name3": r.name3, "seq_num": r.seq_num,
                        "insertion_code": r.insertion_code, "het": r.het,
                        "atoms": [atom(a) for a in r.atoms],
                    }
                    for r in residues
                ]
                for cid, residues in self.chains.items()
            },
        }
        return json.dumps(obj, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "StructureModel":
        obj = json.loads(text)
        chains = {
            cid: [
                ResidueRecord(
                    r["name3"], cid, int(r["seq_num"]), r["insertion_code"],
                    tuple(
                        AtomRecord(
                            a["name"], a["element"], tuple(a["coords"]),
                            a["b_factor"], a["occupancy"], a["alt_loc"],
                        )
                        for a in r["atoms"]
                    ),
                    het=r["het"],
                )
                for r in residues
            ]
            for cid, residues in obj["chains"].items()
        }
        md = obj.get("metadata", {})
        return cls(
            obj["entry_id"], chains,
            StructureMetadata(md.get("uniprot_id"), md.get("full_length")),
        )


# ---------------------------------------------------------------------------
# Raw atom rows -> residues
# ---------------------------------------------------------------------------

@dataclass
class _RawAtom:
    het: bool
    name: str
    alt_loc: str
    res_name: str
    chain_id: str
    seq_num: int
    icode: str
    coords: tuple[float, float, float]
    occupancy: float
    b_factor: float
    element: str


def _element_from_name(name: str) -> str:
    # older PDB files omit the element column; for polymer atoms the first
    # alphabetic character of the name (after any leading digit) is the element
    stripped = name.strip().lstrip("0123456789")
    for ch in stripped:
        if ch.isalpha():
            return ch.upper()
    raise StructureParseError(f"cannot infer element from atom name {name!r}")


def _assemble(entry_id: str, atoms: list[_RawAtom], metadata: StructureMetadata) -> StructureModel:
    grouped: dict[str, dict[tuple[int, str], tuple[str, bool, list[_RawAtom]]]] = {}
    for a in atoms:
        chain = grouped.setdefault(a.chain_id, {})
        key = (a.seq_num, a.icode)
        if key not in chain:
            chain[key] = (a.res_name, a.het, [])
        chain[key][2].append(a)
    chains: dict[str, list[ResidueRecord]] = {}
    for chain_id, residues in grouped.items():
        records = []
        for (seq_num, icode), (res_name, het, raw) in sorted(residues.items()):
            records.append(
                ResidueRecord(
                    res_name, chain_id, seq_num, icode,
                    tuple(_resolve_alt_locs(raw)), het=het,
                )
            )
        chains[chain_id] = records
    return StructureModel(entry_id, chains, metadata)


def _resolve_alt_locs(raw: list[_RawAtom]) -> Iterator[AtomRecord]:
    """Keep the highest-occupancy conformer per atom name (ties: first seen)."""
    best: dict[str, _RawAtom] = {}
    order: list[str] = []
    for a in raw:
        if a.name not in best:
            best[a.name] = a
            order.append(a.name)
        elif a.occupancy > best[a.name].occupancy:
            best[a.name] = a
    for name in order:
        a = best[name]
        yield AtomRecord(a.name, a.element, a.coords, a.b_factor, a.occupancy, a.alt_loc)


# ---------------------------------------------------------------------------
# PDB format
# ---------------------------------------------------------------------------

def _parse_pdb(text: str, entry_id: str) -> StructureModel:
    atoms: list[_RawAtom] = []
    model_open = False
    model_done = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        rec = line[:6].strip()
        if rec == "MODEL":
            if model_done:
                break
            model_open = True
        elif rec == "ENDMDL":
            model_done = True
        elif rec in ("ATOM", "HETATM"):
            if model_done:
                continue  # later models ignored
            if len(line) < 54:
                raise StructureParseError(
                    f"line {lineno}: truncated {rec} record ({len(line)} cols)"
                )
            try:
                coords = (float(line[30:38]), float(line[38:46]), float(line[46:54]))
                occupancy = float(line[54:60]) if line[54:60].strip() else 1.0
                b_factor = float(line[60:66]) if line[60:66].strip() else 0.0
                seq_num = int(line[22:26])
            except ValueError as exc:
                raise StructureParseError(f"line {lineno}: {exc}") from None
            name = line[12:16].strip()
            element = line[76:78].strip() if len(line) >= 78 else ""
            atoms.append(
                _RawAtom(
                    het=rec == "HETATM",
                    name=name,
                    alt_loc=line[16].strip(),
                    res_name=line[17:20].strip(),
                    chain_id=line[21].strip() or "A",
                    seq_num=seq_num,
                    icode=line[26].strip(),
                    coords=coords,
                    occupancy=occupancy,
                    b_factor=b_factor,
                    element=element or _element_from_name(name),
                )
            )
    del model_open
    if not atoms:
        raise StructureParseError("no ATOM/HETATM records found")
    return _assemble(entry_id, atoms, StructureMetadata())


def write_pdb(model: StructureModel) -> str:
    lines = []
    serial = 1
    for chain_id, residues in model.chains.items():
        for r in residues:
            rec = "HETATM" if r.het else "ATOM  "
            for a in r.atoms:
                name = a.name if len(a.name) == 4 else f" {a.name:<3}"
                lines.append(
                    f"{rec}{serial:>5} {name}{a.alt_loc or ' ':1}{r.name3:>3} "
                    f"{chain_id:1}{r.seq_num:>4}{r.insertion_code or ' ':1}   "
                    f"{a.coords[0]:8.3f}{a.coords[1]:8.3f}{a.coords[2]:8.3f}"
                    f"{a.occupancy:6.2f}{a.b_factor:6.2f}          "
                    f"{a.element:>2}"
                )
                serial += 1
        lines.append(f"TER   {serial:>5}")
        serial += 1
    lines.append("END")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# mmCIF format
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"'[^']*'|\"[^\"]*\"|\S+")


def _cif_tokens(text: str) -> Iterator[tuple[int, str]]:
    """(line number, token) pairs; handles quotes and ; multiline blocks."""
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith(";"):
            block = [line[1:]]
            i += 1
            while i < len(lines) and not lines[i].startswith(";"):
                block.append(lines[i])
                i += 1
            if i >= len(lines):
                raise StructureParseError(
                    f"line {len(lines)}: unterminated ';' text block"
                )
            yield i + 1, "\n".join(block)
            i += 1
            continue
        for m in _TOKEN_RE.finditer(line):
            tok = m.group(0)
            if tok.startswith("#"):
                break
            if tok[0] in "'\"" and len(tok) >= 2 and tok[-1] == tok[0]:
                tok = tok[1:-1]
            yield i + 1, tok
        i += 1


def _parse_cif_categories(text: str) -> tuple[str, dict[str, list[dict[str, str]]]]:
    """First data block as {category: [row dicts]}; key-value pairs become
    single-row categories."""
    entry_id = ""
    categories: dict[str, list[dict[str, str]]] = {}
    tokens = list(_cif_tokens(text))
    n = len(tokens)
    pos = 0
    seen_data = False
    while pos < n:
        lineno, tok = tokens[pos]
        low = tok.lower()
        if low.startswith("data_"):
            if seen_data:
                break  # only the first block
            seen_data = True
            entry_id = tok[5:]
            pos += 1
        elif low == "loop_":
            pos += 1
            keys: list[str] = []
            while pos < n and tokens[pos][1].startswith("_"):
                keys.append(tokens[pos][1])
                pos += 1
            if not keys:
                raise StructureParseError(f"line {lineno}: loop_ without keys")
            values: list[str] = []
            while pos < n:
                _, t = tokens[pos]
                tl = t.lower()
                if t.startswith("_") or tl in ("loop_", "stop_") or tl.startswith("data_"):
                    break
                values.append(t)
                pos += 1
            if len(values) % len(keys):
                raise StructureParseError(
                    f"line {lineno}: loop has {len(values)} values for "
                    f"{len(keys)} keys"
                )
            cat = keys[0].split(".")[0]
            fields = [k.split(".", 1)[1] if "." in k else k for k in keys]
            rows = categories.setdefault(cat, [])
            for off in range(0, len(values), len(keys)):
                rows.append(dict(zip(fields, values[off : off + len(keys)])))
        elif tok.startswith("_"):
            if pos + 1 >= n:
                raise StructureParseError(f"line {lineno}: key {tok} without value")
            cat, _, fieldname = tok.partition(".")
            rows = categories.setdefault(cat, [])
            if not rows:
                rows.append({})
            rows[0][fieldname or tok] = tokens[pos + 1][1]
            pos += 2
        else:
            raise StructureParseError(f"line {lineno}: unexpected token {tok!r}")
    return entry_id, categories


def _cif_value(row: Mapping[str, str], key: str, default: str = "") -> str:
    v = row.get(key, default)
    return "" if v in (".", "?") else v


def _extract_metadata(categories: Mapping[str, list[dict[str, str]]]) -> StructureMetadata:
    uniprot = None
    length = None
    for row in categories.get("_struct_ref", []):
        if _cif_value(row, "db_name").upper() == "UNP":
            uniprot = uniprot or _cif_value(row, "pdbx_db_accession") or None
    for row in categories.get("_ma_target_ref_db_details", []):
        if _cif_value(row, "db_name").upper() == "UNP":
            uniprot = uniprot or _cif_value(row, "db_accession") or None
            end = _cif_value(row, "seq_db_align_end")
            if end.isdigit():
                length = length or int(end)
    for row in categories.get("_entity_poly", []):
        seq = _cif_value(row, "pdbx_seq_one_letter_code_can") or _cif_value(
            row, "pdbx_seq_one_letter_code"
        )
        if seq and length is None:
            # parenthesized groups are single modified residues
            length = len(re.sub(r"\([^)]*\)", "X", re.sub(r"\s", "", seq)))
    return StructureMetadata(uniprot, length)


def _parse_mmcif(text: str, entry_id_fallback: str) -> StructureModel:
    entry_id, categories = _parse_cif_categories(text)
    rows = categories.get("_atom_site")
    if not rows:
        raise StructureParseError("no _atom_site loop found")
    atoms: list[_RawAtom] = []
    first_model: str | None = None
    for idx, row in enumerate(rows):
        model_num = _cif_value(row, "pdbx_PDB_model_num", "1") or "1"
        if first_model is None:
            first_model = model_num
        if model_num != first_model:
            continue
        name = _cif_value(row, "label_atom_id") or _cif_value(row, "auth_atom_id")
        if not name:
            raise StructureParseError(f"_atom_site row {idx}: missing atom id")
        try:
            coords = tuple(
                float(_cif_value(row, k)) for k in ("Cartn_x", "Cartn_y", "Cartn_z")
            )
            occ_s = _cif_value(row, "occupancy")
            b_s = _cif_value(row, "B_iso_or_equiv")
            seq_s = _cif_value(row, "auth_seq_id") or _cif_value(row, "label_seq_id")
            seq_num = int(seq_s) if seq_s else 0
        except ValueError as exc:
            raise StructureParseError(f"_atom_site row {idx}: {exc}") from None
        element = _cif_value(row, "type_symbol") or _element_from_name(name)
        atoms.append(
            _RawAtom(
                het=_cif_value(row, "group_PDB", "ATOM").upper() == "HETATM",
                name=name,
                alt_loc=_cif_value(row, "label_alt_id"),
                res_name=_cif_value(row, "label_comp_id") or _cif_value(row, "auth_comp_id"),
                chain_id=_cif_value(row, "auth_asym_id")
                or _cif_value(row, "label_asym_id")
                or "A",
                seq_num=seq_num,
                icode=_cif_value(row, "pdbx_PDB_ins_code"),
                coords=coords,  # type: ignore[arg-type]
                occupancy=float(occ_s) if occ_s else 1.0,
                b_factor=float(b_s) if b_s else 0.0,
                element=element,
            )
        )
    if not atoms:
        raise StructureParseError("empty _atom_site loop")
    return _assemble(entry_id or entry_id_fallback, atoms, _extract_metadata(categories))


def write_mmcif(model: StructureModel) -> str:
    out = [f"data_{model.entry_id or 'model'}", "#"]
    if model.metadata.uniprot_id or model.metadata.full_length:
        out += [
            "loop_",
            "_ma_target_ref_db_details.db_name",
            "_ma_target_ref_db_details.db_accession",
            "_ma_target_ref_db_details.seq_db_align_end",
            "UNP {} {}".format(
                model.metadata.uniprot_id or "?",
                model.metadata.full_length if model.metadata.full_length else "?",
            ),
            "#",
        ]
    out += [
        "loop_",
        "_atom_site.group_PDB",
        "_atom_site.id",
        "_atom_site.label_atom_id",
        "_atom_site.label_alt_id",
        "_atom_site.label_comp_id",
        "_atom_site.label_asym_id",
        "_atom_site.auth_asym_id",
        "_atom_site.auth_seq_id",
        "_atom_site.pdbx_PDB_ins_code",
        "_atom_site.Cartn_x",
        "_atom_site.Cartn_y",
        "_atom_site.Cartn_z",
        "_atom_site.occupancy",
        "_atom_site.B_iso_or_equiv",
        "_atom_site.type_symbol",
        "_atom_site.pdbx_PDB_model_num",
    ]
    serial = 1
    for chain_id, residues in model.chains.items():
        for r in residues:
            group = "HETATM" if r.het else "ATOM"
            for a in r.atoms:
                out.append(
                    f"{group} {serial} {a.name} {a.alt_loc or '.'} {r.name3} "
                    f"{chain_id} {chain_id} {r.seq_num} "
                    f"{r.insertion_code or '.'} "
                    f"{a.coords[0]:.3f} {a.coords[1]:.3f} {a.coords[2]:.3f} "
                    f"{a.occupancy:.2f} {a.b_factor:.2f} {a.element} 1"
                )
                serial += 1
    out.append("#")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def parse_structure(data: str | bytes, fmt: str, entry_id: str = "") -> StructureModel:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt == "pdb":
        return _parse_pdb(text, entry_id)
    if fmt == "mmcif":
        return _parse_mmcif(text, entry_id)
    raise ValueError(f"unknown structure format {fmt!r} (want 'mmcif' or 'pdb')")


def read_structure(path: str | Path, fmt: str | None = None) -> StructureModel:
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower()
        fmt = "mmcif" if suffix in (".cif", ".mmcif") else "pdb"
    return parse_structure(path.read_text(), fmt, entry_id=path.stem)


# ---------------------------------------------------------------------------
# Interaction sites
# ---------------------------------------------------------------------------

def _heavy_atom_table(model: StructureModel):
    coords, chain_idx, res_idx = [], [], []
    chain_ids = list(model.chains)
    for ci, chain_id in enumerate(chain_ids):
        for ri, residue in enumerate(model.polymer_residues(chain_id)):
            for atom in residue.atoms:
                if atom.is_hydrogen:
                    continue
                coords.append(atom.coords)
                chain_idx.append(ci)
                res_idx.append(ri)
    if not coords:
        return chain_ids, np.empty((0, 3)), np.empty(0, int), np.empty(0, int)
    return (
        chain_ids,
        np.asarray(coords, dtype=np.float64),
        np.asarray(chain_idx, dtype=np.int64),
        np.asarray(res_idx, dtype=np.int64),
    )


def _mark(chain_ids, chain_idx, res_idx, ii, jj) -> set[tuple[str, int]]:
    sites: set[tuple[str, int]] = set()
    for side in (ii, jj):
        for ci, ri in zip(chain_idx[side], res_idx[side]):
            sites.add((chain_ids[ci], int(ri)))
    return sites


def _brute_force_pairs(coords, chain_idx, cutoff, block=512):
    c2 = cutoff * cutoff
    n = len(coords)
    out_i, out_j = [], []
    for start in range(0, n, block):
        stop = min(start + block, n)
        d2 = ((coords[start:stop, None, :] - coords[None, :, :]) ** 2).sum(-1)
        cross = chain_idx[start:stop, None] != chain_idx[None, :]
        ii, jj = np.nonzero((d2 <= c2) & cross)
        out_i.append(ii + start)
        out_j.append(jj)
    if not out_i:
        return np.empty(0, int), np.empty(0, int)
    return np.concatenate(out_i), np.concatenate(out_j)


def _grid_pairs(coords, chain_idx, cutoff):
    """Cell-list neighbor pairs via a sorted join; cell edge = cutoff."""
    cells = np.floor(coords / cutoff).astype(np.int64)
    cells -= cells.min(axis=0) - 1  # keep a margin so offsets stay in range
    dims = cells.max(axis=0) + 2
    key = (cells[:, 0] * dims[1] + cells[:, 1]) * dims[2] + cells[:, 2]
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    out_i, out_j = [], []
    n = len(coords)
    base = np.arange(n)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for dz in (-1, 0, 1):
                target = key + (dx * dims[1] + dy) * dims[2] + dz
                left = np.searchsorted(sorted_key, target, side="left")
                right = np.searchsorted(sorted_key, target, side="right")
                counts = right - left
                has = counts > 0
                if not has.any():
                    continue
                ii = np.repeat(base[has], counts[has])
                starts = np.repeat(left[has], counts[has])
                offsets = np.arange(len(ii)) - np.repeat(
                    np.cumsum(counts[has]) - counts[has], counts[has]
                )
                jj = order[starts + offsets]
                keep = chain_idx[ii] != chain_idx[jj]
                if not keep.any():
                    continue
                ii, jj = ii[keep], jj[keep]
                d2 = ((coords[ii] - coords[jj]) ** 2).sum(-1)
                keep = d2 <= cutoff * cutoff
                out_i.append(ii[keep])
                out_j.append(jj[keep])
    if not out_i:
        return np.empty(0, int), np.empty(0, int)
    return np.concatenate(out_i), np.concatenate(out_j)


def extract_interaction_sites(
    model: StructureModel, cutoff: float = 8.0, method: str = "grid"
) -> set[tuple[str, int]]:
    """Residues with any non-hydrogen atom within ``cutoff`` of another chain.

    Returns (chain_id, ordinal residue index) pairs. ``method='brute'`` runs
    the O(n^2) reference path; both must agree exactly.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    if len(model.chains) < 2:
        return set()
    chain_ids, coords, chain_idx, res_idx = _heavy_atom_table(model)
    if len(coords) == 0:
        return set()
    if method == "grid":
        # cell edge would be zero; degenerate cutoff falls back to brute force
        if cutoff == 0:
            ii, jj = _brute_force_pairs(coords, chain_idx, cutoff)
        else:
            ii, jj = _grid_pairs(coords, chain_idx, cutoff)
    elif method == "brute":
        ii, jj = _brute_force_pairs(coords, chain_idx, cutoff)
    else:
        raise ValueError(f"unknown method {method!r} (want 'grid' or 'brute')")
    return _mark(chain_ids, chain_idx, res_idx, ii, jj)


# ---------------------------------------------------------------------------
# Corpus statistics
# ---------------------------------------------------------------------------

def relative_positions(
    sites: Iterable[tuple[str, int]],
    chain_lengths: Mapping[str, int],
    n_bins: int = 20,
) -> tuple[list[float], np.ndarray]:
    """Sites as (index+0.5)/length plus a fixed-width histogram over (0, 1)."""
    positions = []
    for chain_id, idx in sites:
        length = chain_lengths[chain_id]
        if length <= 0:
            raise ValueError(f"chain {chain_id!r} has non-positive length {length}")
        if not 0 <= idx < length:
            raise ValueError(f"site index {idx} out of range for chain {chain_id!r}")
        positions.append((idx + 0.5) / length)
    counts, _ = np.histogram(positions, bins=n_bins, range=(0.0, 1.0))
    return positions, counts


_SS3_OF = {"H": "H", "G": "H", "I": "H", "E": "E", "B": "E", "T": "C", "S": "C", "-": "C"}
_SS4_OF = {**_SS3_OF, "-": "-"}


def ss_distribution(
    ss8_strings: Iterable[str],
) -> tuple[dict[str, float], dict[str, float]]:
    """3-class and 4-class frequency tables over pooled SS8 labels.

    The 4-class table keeps unassigned '-' apart from the T/S coil states.
    """
    counts3 = {"H": 0, "E": 0, "C": 0}
    counts4 = {"H": 0, "E": 0, "C": 0, "-": 0}
    total = 0
    for s in ss8_strings:
        for ch in s:
            if ch not in _SS3_OF:
                raise ValueError(f"unknown SS8 label {ch!r}")
            counts3[_SS3_OF[ch]] += 1
            counts4[_SS4_OF[ch]] += 1
            total += 1
    if total == 0:
        raise ValueError("no secondary-structure labels supplied")
    return (
        {k: v / total for k, v in counts3.items()},
        {k: v / total for k, v in counts4.items()},
    )
