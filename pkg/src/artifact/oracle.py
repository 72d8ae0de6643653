"""Brute-force ground truth: small structures, small representations, Ramsey colourings."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Iterator

from .algebra_core import Atom, ComplexAlgebra, RaAtomStructure, check_ra_axioms
from .bits import iter_bits
from .canonical import canonical_form
from .games import EXISTS, FORALL, GameSpec, solve

MAX_CENSUS_ATOMS = 4
MAX_REPRESENT_BASE = 8
MAX_RAMSEY_NODES = 16
MAX_RAMSEY_COLOURS = 3


class OracleBudgetError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _diversity_multisets(k: int) -> list[tuple[int, ...]]:
    return list(combinations_with_replacement(range(1, k + 1), 3))


def _structure(k: int, forbidden_sets: tuple[tuple[int, ...], ...]) -> RaAtomStructure:
    atoms = [Atom("id", 0)] + [Atom("d", i) for i in range(1, k + 1)]
    forb = [(atoms[0], atoms[x], atoms[y]) for x in range(k + 1) for y in range(k + 1) if x != y]
    for ms in forbidden_sets:
        for t in set(permutations(ms)):
            forb.append(tuple(atoms[i] for i in t))
    return RaAtomStructure(atoms, [atoms[0]], None, forb, close=True)


def _iso_key(k: int, forbidden_sets: frozenset) -> tuple:
    best = None
    for perm in permutations(range(1, k + 1)):
        ren = {0: 0, **{i: perm[i - 1] for i in range(1, k + 1)}}
        img = tuple(sorted(tuple(sorted(ren[x] for x in ms)) for ms in forbidden_sets))
        if best is None or img < best:
            best = img
    return best  # type: ignore[return-value]


def enumerate_small_ra(max_atoms: int) -> Iterator[RaAtomStructure]:
    """Symmetric integral atom structures with at most ``max_atoms`` atoms, up to isomorphism.

    Only structures whose complex algebra satisfies the relation algebra
    axioms are yielded, in order of size and then of forbidden-set key.
    """
    if not 1 <= max_atoms <= MAX_CENSUS_ATOMS:
        raise OracleBudgetError(f"max_atoms must lie in 1..{MAX_CENSUS_ATOMS}")
    for k in range(max_atoms):
        sets = _diversity_multisets(k)
        keys = set()
        for bits in range(1 << len(sets)):
            chosen = frozenset(sets[i] for i in iter_bits(bits))
            keys.add(_iso_key(k, chosen))
        for key in sorted(keys, key=lambda t: (len(t), t)):
            s = _structure(k, key)
            if check_ra_axioms(ComplexAlgebra(s)).ok:
                yield s


# ---------------------------------------------------------------------------
# Representation search
# ---------------------------------------------------------------------------


@dataclass
class RepresentationCandidate:
    base_size: int
    labels: dict[tuple[int, int], Atom]

    def to_json(self) -> dict:
        return {
            "base_size": self.base_size,
            "edges": [[x, y, str(a)] for (x, y), a in sorted(self.labels.items())],
        }


@dataclass
class Found:
    candidate: RepresentationCandidate
    outcome: str = "Found"


@dataclass
class Exhausted:
    max_base: int
    searched: dict[int, int] = field(default_factory=dict)
    outcome: str = "Exhausted"


def _triangles_ok(s: RaAtomStructure, lab: dict[tuple[int, int], int], new: int) -> bool:
    nodes = range(new + 1)
    for x in nodes:
        for y in nodes:
            for z in nodes:
                if new not in (x, y, z):
                    continue
                if not s.consistent(lab[(x, y)], lab[(y, z)], lab[(x, z)]):
                    return False
    return True


def representation_problems(s: RaAtomStructure, cand: RepresentationCandidate) -> list[str]:
    """Everything that stops ``cand`` from being a complete square representation."""
    b = cand.base_size
    lab = {p: s.index[a] for p, a in cand.labels.items()}
    out: list[str] = []
    if set(lab) != {(x, y) for x in range(b) for y in range(b)}:
        return ["labels do not cover every pair of the base"]
    conv = s.converse_idx
    for x in range(b):
        if not s.identity_mask >> lab[(x, x)] & 1:
            out.append(f"diagonal ({x},{x}) is not an identity atom")
        for y in range(b):
            if x != y and s.identity_mask >> lab[(x, y)] & 1:
                out.append(f"off-diagonal ({x},{y}) carries an identity atom")
            if lab[(y, x)] != conv[lab[(x, y)]]:
                out.append(f"({x},{y}) and ({y},{x}) are not converse")
    for x, y, z in product(range(b), repeat=3):
        if not s.consistent(lab[(x, y)], lab[(y, z)], lab[(x, z)]):
            out.append(f"triangle ({x},{y},{z}) is forbidden")
    if set(lab.values()) != set(range(s.size)):
        out.append("not every atom is realized")
    for (x, z), c in lab.items():
        for a in range(s.size):
            for bb in range(s.size):
                if s.consistent(a, bb, c) and not any(lab[(x, y)] == a and lab[(y, z)] == bb for y in range(b)):
                    out.append(f"({x},{z}) lacks a witness for {s.atoms[a]};{s.atoms[bb]}")
    return out


def _extensions(s: RaAtomStructure, lab: dict[tuple[int, int], int], size: int) -> Iterator[dict]:
    ids = list(iter_bits(s.identity_mask))
    div = [a for a in range(s.size) if not s.identity_mask >> a & 1]
    conv = s.converse_idx
    for e in ids:
        for row in product(div, repeat=size):
            new = dict(lab)
            new[(size, size)] = e
            for x, a in enumerate(row):
                new[(x, size)] = a
                new[(size, x)] = conv[a]
            if _triangles_ok(s, new, size):
                yield new


def _key(lab: dict, size: int) -> tuple:
    colours = [lab[(x, x)] for x in range(size)]
    tuples = {(x, y): lab[(x, y)] for x in range(size) for y in range(size) if x != y}
    return canonical_form(size, colours, tuples)


def brute_force_represent(s: RaAtomStructure, max_base: int) -> Found | Exhausted:
    """Search for a complete square representation on at most ``max_base`` points.

    Levels are built one point at a time and pruned to one graph per
    isomorphism class.  ``Exhausted`` only says that no representation fits
    within the bound.
    """
    if not 1 <= max_base <= MAX_REPRESENT_BASE:
        raise OracleBudgetError(f"max_base must lie in 1..{MAX_REPRESENT_BASE}")
    level: list[dict] = [{}]
    searched: dict[int, int] = {}
    for size in range(max_base):
        seen: dict[tuple, dict] = {}
        for lab in level:
            for new in _extensions(s, lab, size):
                seen.setdefault(_key(new, size + 1), new)
        level = [seen[k] for k in sorted(seen)]
        searched[size + 1] = len(level)
        for lab in level:
            cand = RepresentationCandidate(size + 1, {p: s.atoms[a] for p, a in sorted(lab.items())})
            if not representation_problems(s, cand):
                return Found(cand)
        if not level:
            break
    return Exhausted(max_base, searched)


# ---------------------------------------------------------------------------
# Ramsey colourings
# ---------------------------------------------------------------------------


def _gf16_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & 0x10:
            a ^= 0x13
    return out


def _cubic_residue_colouring() -> dict[tuple[int, int], int]:
    """Three-colouring of K_16 by the cubic residue class of x - y in GF(16)."""
    log = {}
    x = 1
    for e in range(15):
        log[x] = e
        x = _gf16_mul(x, 2)
    return {(a, b): log[a ^ b] % 3 for a, b in combinations(range(16), 2)}


def _pentagon_colouring() -> dict[tuple[int, int], int]:
    return {(a, b): int((b - a) % 5 in (2, 3)) for a, b in combinations(range(5), 2)}


def colouring_is_triangle_free(nodes: int, col: dict[tuple[int, int], int]) -> bool:
    return all(
        not (col[(x, y)] == col[(y, z)] == col[(x, z)]) for x, y, z in combinations(range(nodes), 3)
    )


def ramsey_colouring(nodes: int, colours: int) -> dict[tuple[int, int], int] | None:
    """An edge colouring of K_nodes with no monochromatic triangle, or None.

    Restrictions of the two classical extremal colourings are tried first and
    re-verified; otherwise the search is exhaustive.
    """
    if not 0 <= nodes <= MAX_RAMSEY_NODES or not 1 <= colours <= MAX_RAMSEY_COLOURS:
        raise OracleBudgetError("Ramsey search outside the supported budget")
    for size, k, make in ((5, 2, _pentagon_colouring), (16, 3, _cubic_residue_colouring)):
        if nodes <= size and k <= colours:
            col = {e: c for e, c in make().items() if e[1] < nodes}
            if colouring_is_triangle_free(nodes, col):
                return col
    edges = list(combinations(range(nodes), 2))
    col: dict[tuple[int, int], int] = {}
    # nbr[c][v] is the bitset of neighbours of v in colour c so far
    nbr = [[0] * nodes for _ in range(colours)]

    def go(i: int, used: int) -> bool:
        if i == len(edges):
            return True
        x, y = edges[i]
        for c in range(min(colours, used + 1)):
            if nbr[c][x] & nbr[c][y]:
                continue
            col[(x, y)] = c
            nbr[c][x] |= 1 << y
            nbr[c][y] |= 1 << x
            if go(i + 1, max(used, c + 1)):
                return True
            nbr[c][x] &= ~(1 << y)
            nbr[c][y] &= ~(1 << x)
            del col[(x, y)]
        return False

    return dict(col) if go(0, 0) else None


def ramsey_colouring_exists(nodes: int, colours: int) -> bool:
    return ramsey_colouring(nodes, colours) is not None


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------


@dataclass
class CensusEntry:
    index: int
    structure: RaAtomStructure
    representation: Found | Exhausted
    game: str
    nodes: int
    rounds: int

    @property
    def contradiction(self) -> bool:
        return isinstance(self.representation, Found) and self.game == FORALL

    def to_json(self) -> dict:
        rep = self.representation
        d = {
            "index": self.index,
            "atoms": [str(a) for a in self.structure.atoms],
            "forbidden": sorted(
                [str(self.structure.atoms[i]) for i in t] for t in self.structure.forbidden
                if all(x != 0 for x in t)
            ),
            "representation": rep.outcome,
            "game": self.game,
            "nodes": self.nodes,
            "rounds": self.rounds,
        }
        if isinstance(rep, Found):
            d["base_size"] = rep.candidate.base_size
        return d


def census(max_atoms: int = 3, *, max_base: int = 6, rounds: int = 4, nodes: int | None = None,
           threads: int = 1) -> list[CensusEntry]:
    """Run both engines over the small census.

    The node budget defaults to ``rounds + 2``, enough that a full board never
    decides an RA game; a representation found on any base then rules out a
    win for ∀.
    """
    m = rounds + 2 if nodes is None else nodes
    out = []
    for i, s in enumerate(enumerate_small_ra(max_atoms)):
        rep = brute_force_represent(s, max_base)
        v = solve(GameSpec("G", s, m, rounds), threads=threads, certificate=False)
        out.append(CensusEntry(i, s, rep, v.outcome, m, rounds))
    return out


__all__ = [
    "EXISTS",
    "FORALL",
    "CensusEntry",
    "Exhausted",
    "Found",
    "OracleBudgetError",
    "RepresentationCandidate",
    "brute_force_represent",
    "census",
    "enumerate_small_ra",
    "ramsey_colouring",
    "ramsey_colouring_exists",
    "representation_problems",
]
