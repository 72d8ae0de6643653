"""Generators for concrete finite atom structures."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable

from .algebra_core import Atom, CaAtomStructure, ComplexAlgebra, RaAtomStructure, as_atom
from .bits import iter_bits
from .rainbow_rules import RainbowRules, enumerate_atoms, is_red, restriction_signature

IDENTITY = Atom("id", 0)


@dataclass(frozen=True)
class MonkParams:
    greens: int
    reds: int

    def __post_init__(self) -> None:
        if self.greens < 1 or self.reds < 1:
            raise ValueError("MonkParams need at least one green and one red")


@dataclass(frozen=True)
class SplitParams:
    index_bound: int
    alpha: int

    def __post_init__(self) -> None:
        if self.index_bound < 1 or self.alpha < 1:
            raise ValueError("SplitParams must be positive")


@dataclass(frozen=True)
class RainbowParams:
    n: int = 3
    green_count: int | None = None
    shades: tuple | None = None

    def rules(self) -> RainbowRules:
        return RainbowRules.make(self.n, self.green_count, shades=self.shades)


def _diversity(atoms: list[Atom]) -> list[tuple[Atom, Atom, Atom]]:
    out = []
    for x in atoms:
        for y in atoms:
            if x != y:
                out.append((IDENTITY, x, y))
    return out


def monk_ra(greens: int, reds: int) -> RaAtomStructure:
    """Symmetric structure with one identity, ``greens`` greens and ``reds`` reds.

    Forbidden: any triple with the identity and two distinct atoms, the
    monochromatic triangle of each red, and every all-green triple.
    """
    MonkParams(greens, reds)
    gs = [Atom("g", i) for i in range(greens)]
    rs = [Atom("r", j) for j in range(1, reds + 1)]
    atoms = [IDENTITY] + gs + rs
    forb = _diversity(atoms)
    forb += [(r, r, r) for r in rs]
    forb += list(product(gs, repeat=3))
    return RaAtomStructure(atoms, [IDENTITY], None, forb, close=True)


def split_ra(index_bound: int, alpha: int) -> RaAtomStructure:
    """Symmetric structure with the index-0 red split into ``alpha`` parts."""
    SplitParams(index_bound, alpha)
    I = index_bound
    r0 = [Atom("r0", k) for k in range(alpha)]
    r = [Atom("r", i) for i in range(1, I)]
    y = [Atom("y", i) for i in range(I)]
    b = [Atom("b", i) for i in range(I)]
    atoms = [IDENTITY] + r0 + r + y + b
    forb = _diversity(atoms)
    for fam in (y, b):
        for i in range(I):
            for j in range(i, I):
                forb.append((fam[i], fam[i], fam[j]))
    for i in range(1, I):
        for j in range(i, I):
            forb.append((r[i - 1], r[i - 1], r[j - 1]))
    for p, q in product(r0, repeat=2):
        for x in r:
            forb.append((p, q, x))
        for x in r0:
            forb.append((p, q, x))
    return RaAtomStructure(atoms, [IDENTITY], None, forb, close=True)


def rainbow_finite(n: int = 3, green_count: int | None = None, *, shades: Iterable[Iterable[int]] | None = None,
                   rules: RainbowRules | None = None, max_atoms: int = 200_000) -> CaAtomStructure:
    """Finite rainbow cylindric atom structure of dimension n.

    Atoms are consistent coloured graphs on at most n nodes together with a
    surjection from the n coordinates.  Two atoms are ≡_i related when they
    agree once coordinate i is forgotten; D_ij holds the atoms sending i and
    j to the same node.
    """
    rules = rules or RainbowRules.make(n, green_count, shades=shades)
    n = rules.n
    est = len(rules.colours()) ** (n * (n - 1) // 2) * max(1, len(rules.shades)) ** n
    if est > max_atoms * 50:
        raise ValueError("rainbow parameters exceed the enumeration budget")
    payloads = enumerate_atoms(rules)
    atoms = [Atom("rb", p) for p in payloads]
    classes = [[restriction_signature(p, i) for p in payloads] for i in range(n)]
    diagonals = {}
    for i in range(n):
        for j in range(i + 1, n):
            diagonals[(i, j)] = [a for a, p in zip(atoms, payloads) if p[0][i] == p[0][j]]
    s = CaAtomStructure(n, atoms, classes=classes, diagonals=diagonals)
    s.rainbow_rules = rules  # type: ignore[attr-defined]
    return s


def is_red_atom(a: Atom) -> bool:
    """A rainbow atom whose graph has a red edge."""
    if a.kind != "rb":
        return False
    return any(is_red(c) for _, c in a.index[1])


def red_atoms(s: CaAtomStructure) -> list[Atom]:
    return [a for a in s.atoms if is_red_atom(a)]


@dataclass
class SplitBlurResult:
    original: CaAtomStructure
    split: CaAtomStructure
    copy_map: dict[Atom, tuple[Atom, ...]]


def split_blur(original: CaAtomStructure, reds: Iterable, lam: int) -> SplitBlurResult:
    """Replace every atom in ``reds`` by ``lam`` copies that no cylinder can tell apart."""
    if lam < 1:
        raise ValueError("lambda must be at least 1")
    red_set = {as_atom(a) for a in reds}
    for a in red_set:
        if a not in original.index:
            raise ValueError(f"{a} is not an atom of the structure")
    original.require_classes()
    n = original.dimension
    atoms: list[Atom] = []
    origin: list[int] = []
    copy_map: dict[Atom, tuple[Atom, ...]] = {}
    for k, a in enumerate(original.atoms):
        if a in red_set:
            cs = tuple(Atom("copy", (a.kind, a.index, l)) for l in range(lam))
        else:
            cs = (a,)
        copy_map[a] = cs
        atoms.extend(cs)
        origin.extend([k] * len(cs))
    classes = [[original.class_of[i][k] for k in origin] for i in range(n)]
    diagonals = {}
    for i in range(n):
        for j in range(i + 1, n):
            diagonals[(i, j)] = [x for x, k in zip(atoms, origin) if original.diag[i][j] >> k & 1]
    split = CaAtomStructure(n, atoms, classes=classes, diagonals=diagonals)
    return SplitBlurResult(original, split, copy_map)


@dataclass
class ThetaReport:
    injective: bool
    homomorphism: bool
    isomorphism: bool
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.injective and self.homomorphism


def theta_embed(r: SplitBlurResult, *, threads: int = 1) -> ThetaReport:
    """Check that atom ↦ join of its copies is an injective homomorphism."""
    A = ComplexAlgebra(r.original)
    B = ComplexAlgebra(r.split)
    n = r.original.dimension
    img = [B.element(r.copy_map[a]) for a in r.original.atoms]

    def theta(x: int) -> int:
        out = 0
        for k in iter_bits(x):
            out |= img[k]
        return out

    failures: list[str] = []
    injective = all(img)
    if not injective:
        failures.append("some atom has an empty image")
    seen = 0
    for k, m in enumerate(img):
        if seen & m:
            injective = False
            failures.append(f"images overlap at {r.original.atoms[k]}")
        seen |= m
    if theta(A.top) != B.top:
        failures.append("top is not preserved")
    for i in range(n):
        for j in range(n):
            if theta(A.diagonal(i, j)) != B.diagonal(i, j):
                failures.append(f"diagonal d_{i}{j} is not preserved")

    def check_atom(k: int) -> list[str]:
        bad = []
        x = 1 << k
        if theta(A.complement(x)) != B.complement(img[k]):
            bad.append(f"complement of {r.original.atoms[k]}")
        for i in range(n):
            if theta(A.cylindrify(i, x)) != B.cylindrify(i, img[k]):
                bad.append(f"c_{i} of {r.original.atoms[k]}")
        return bad

    ks = range(r.original.size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(check_atom, ks))
    else:
        results = [check_atom(k) for k in ks]
    for bad in results:
        failures.extend(bad)
    homomorphism = not failures
    iso = injective and homomorphism and all(len(r.copy_map[a]) == 1 for a in r.original.atoms)
    return ThetaReport(injective, homomorphism, iso, failures)


def full_set_structure(n: int, base: int) -> CaAtomStructure:
    """Atoms are the n-tuples over ``range(base)``: the full cylindric set algebra."""
    tuples = list(product(range(base), repeat=n))
    atoms = [Atom("t", t) for t in tuples]
    classes = [[t[:i] + t[i + 1 :] for t in tuples] for i in range(n)]
    diagonals = {}
    for i in range(n):
        for j in range(i + 1, n):
            diagonals[(i, j)] = [a for a, t in zip(atoms, tuples) if t[i] == t[j]]
    return CaAtomStructure(n, atoms, classes=classes, diagonals=diagonals)


def monk_green_pairs(s: RaAtomStructure) -> list[tuple[int, int]]:
    """Pairs of distinct green atoms; helper for colour counting."""
    gs = [k for k, a in enumerate(s.atoms) if a.kind == "g"]
    return [(p, q) for p, q in permutations(gs, 2)]
