"""Structure files: a canonical JSON encoding of finite atom structures.

See ``docs/structure-file.md`` for the format.  ``dumps`` is canonical, so
save → load → save reproduces the same bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Union

from ..algebra_core import (
    Atom,
    CaAtomStructure,
    RaAtomStructure,
    peirce_orbit,
    validate_ca_atom_structure,
    validate_ra_atom_structure,
)
from ..bits import iter_bits
from ..constructions import SplitBlurResult, split_blur
from ..rainbow_rules import RULES_VERSION, RainbowRules

FORMAT = "artifact-structure"
VERSION = 1

Loaded = Union[RaAtomStructure, CaAtomStructure, SplitBlurResult]


class StructureFileError(ValueError):
    """A structure file that cannot be loaded; ``where`` locates the problem."""

    def __init__(self, where: str, message: str) -> None:
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------


def _ra_doc(s: RaAtomStructure) -> dict:
    conv = s.converse_idx
    reps = {min(peirce_orbit(t, conv)) for t in s.forbidden}
    return {
        "kind": "ra",
        "atoms": [a.to_json() for a in s.atoms],
        "identity": list(iter_bits(s.identity_mask)),
        "converse": list(conv),
        "forbidden": [list(t) for t in sorted(reps)],
    }


def _first_use(labels: tuple[int, ...]) -> list[int]:
    ren: dict[int, int] = {}
    return [ren.setdefault(c, len(ren)) for c in labels]


def _ca_doc(s: CaAtomStructure) -> dict:
    if s.class_of is None:
        raise ValueError("only structures whose relations are equivalences can be saved")
    n = s.dimension
    doc: dict[str, Any] = {
        "kind": "ca",
        "dimension": n,
        "atoms": [a.to_json() for a in s.atoms],
        "classes": [_first_use(s.class_of[i]) for i in range(n)],
        "diagonals": [[i, j, list(iter_bits(s.diag[i][j]))] for i in range(n) for j in range(i + 1, n)],
    }
    rules = getattr(s, "rainbow_rules", None)
    if rules is not None:
        doc["rainbow"] = {
            "rules_version": RULES_VERSION,
            "n": rules.n,
            "tints": list(rules.tints),
            "red_indices": list(rules.red_indices),
            "shades": [list(sh) for sh in rules.shades],
        }
    return doc


def to_doc(obj: Loaded, *, family: dict | None = None) -> dict:
    if isinstance(obj, RaAtomStructure):
        doc = _ra_doc(obj)
    elif isinstance(obj, CaAtomStructure):
        doc = _ca_doc(obj)
    elif isinstance(obj, SplitBlurResult):
        orig = obj.original
        lam = max(len(c) for c in obj.copy_map.values())
        reds = [k for k, a in enumerate(orig.atoms) if len(obj.copy_map[a]) > 1 or obj.copy_map[a][0] != a]
        doc = {"kind": "split-blur", "lambda": lam, "original": _ca_doc(orig), "reds": reds}
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")
    out = {"format": FORMAT, "version": VERSION, **doc}
    if family is not None:
        out["family"] = family
    return out


def dumps(obj: Loaded, *, family: dict | None = None) -> str:
    return canonical_json(to_doc(obj, family=family))


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------


def _need(doc: dict, key: str, kind: type | tuple, where: str) -> Any:
    if key not in doc:
        raise StructureFileError(where, f"missing field {key!r}")
    v = doc[key]
    if not isinstance(v, kind) or isinstance(v, bool) and kind is int:
        raise StructureFileError(f"{where}.{key}", "has the wrong type")
    return v


def _index(v: Any, size: int, where: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < size:
        raise StructureFileError(where, f"{v!r} is not an atom index below {size}")
    return v


def _atoms(doc: dict, where: str) -> list[Atom]:
    raw = _need(doc, "atoms", list, where)
    out = []
    for k, a in enumerate(raw):
        if not isinstance(a, dict) or not isinstance(a.get("kind"), str):
            raise StructureFileError(f"{where}.atoms[{k}]", "needs a string 'kind'")
        out.append(Atom.from_json(a))
    if not out:
        raise StructureFileError(f"{where}.atoms", "is empty")
    if len(set(out)) != len(out):
        raise StructureFileError(f"{where}.atoms", "contains duplicates")
    return out


def _load_ra(doc: dict, where: str) -> RaAtomStructure:
    atoms = _atoms(doc, where)
    n = len(atoms)
    ident = [_index(v, n, f"{where}.identity[{k}]") for k, v in enumerate(_need(doc, "identity", list, where))]
    conv = _need(doc, "converse", list, where)
    if len(conv) != n:
        raise StructureFileError(f"{where}.converse", f"needs {n} entries")
    conv_map = {atoms[k]: atoms[_index(v, n, f"{where}.converse[{k}]")] for k, v in enumerate(conv)}
    forb = []
    for k, t in enumerate(_need(doc, "forbidden", list, where)):
        if not isinstance(t, list) or len(t) != 3:
            raise StructureFileError(f"{where}.forbidden[{k}]", "is not a triple")
        forb.append(tuple(atoms[_index(v, n, f"{where}.forbidden[{k}]")] for v in t))
    s = RaAtomStructure(atoms, [atoms[i] for i in ident], conv_map, forb, close=True)
    rep = validate_ra_atom_structure(s)
    if not rep.valid:
        raise StructureFileError(where, f"invalid structure, {rep.issues[0]}")
    return s


def _load_ca(doc: dict, where: str) -> CaAtomStructure:
    atoms = _atoms(doc, where)
    n = len(atoms)
    dim = _need(doc, "dimension", int, where)
    if dim < 1:
        raise StructureFileError(f"{where}.dimension", "must be positive")
    classes = _need(doc, "classes", list, where)
    if len(classes) != dim:
        raise StructureFileError(f"{where}.classes", f"needs {dim} labellings")
    for i, lab in enumerate(classes):
        if not isinstance(lab, list) or len(lab) != n or not all(isinstance(c, int) for c in lab):
            raise StructureFileError(f"{where}.classes[{i}]", f"needs {n} integer labels")
    diags: dict[tuple[int, int], list[Atom]] = {}
    for k, entry in enumerate(_need(doc, "diagonals", list, where)):
        if not (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[2], list)):
            raise StructureFileError(f"{where}.diagonals[{k}]", "needs [i, j, atoms]")
        i, j = entry[0], entry[1]
        if not all(isinstance(x, int) and 0 <= x < dim for x in (i, j)) or i == j:
            raise StructureFileError(f"{where}.diagonals[{k}]", "bad dimension indices")
        diags[(i, j)] = [atoms[_index(v, n, f"{where}.diagonals[{k}]")] for v in entry[2]]
    s = CaAtomStructure(dim, atoms, classes=classes, diagonals=diags)
    rep = validate_ca_atom_structure(s)
    if not rep.valid:
        raise StructureFileError(where, f"invalid structure, {rep.issues[0]}")
    if "rainbow" in doc:
        r = doc["rainbow"]
        if not isinstance(r, dict) or r.get("rules_version") != RULES_VERSION:
            raise StructureFileError(f"{where}.rainbow", f"needs rules_version {RULES_VERSION}")
        try:
            rules = RainbowRules(
                int(r["n"]),
                tuple(r["tints"]),
                tuple(r["red_indices"]),
                tuple(tuple(sh) for sh in r["shades"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureFileError(f"{where}.rainbow", f"malformed ({exc})") from None
        s.rainbow_rules = rules  # type: ignore[attr-defined]
    return s


def from_doc(doc: Any, where: str = "$") -> Loaded:
    if not isinstance(doc, dict):
        raise StructureFileError(where, "top level must be an object")
    if doc.get("format") != FORMAT:
        raise StructureFileError(f"{where}.format", f"must be {FORMAT!r}")
    if doc.get("version") != VERSION:
        raise StructureFileError(f"{where}.version", f"unsupported version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind == "ra":
        return _load_ra(doc, where)
    if kind == "ca":
        return _load_ca(doc, where)
    if kind == "split-blur":
        orig = _load_ca(_need(doc, "original", dict, where), f"{where}.original")
        lam = _need(doc, "lambda", int, where)
        if lam < 1:
            raise StructureFileError(f"{where}.lambda", "must be at least 1")
        reds = [orig.atoms[_index(v, orig.size, f"{where}.reds[{k}]")] for k, v in enumerate(_need(doc, "reds", list, where))]
        return split_blur(orig, reds, lam)
    raise StructureFileError(f"{where}.kind", f"unknown kind {kind!r}")


def loads(text: str) -> Loaded:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureFileError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return from_doc(doc)


def family_of(text: str) -> dict | None:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        return None
    return doc.get("family") if isinstance(doc, dict) else None


@dataclass
class StructureSummary:
    kind: str
    atoms: int
    digest: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "atoms": self.atoms, "digest": self.digest}
