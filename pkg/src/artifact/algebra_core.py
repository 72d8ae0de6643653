"""Finite atom structures, complex algebras, axiom checkers and reducts.

Elements of a complex algebra are Python ints used as bitsets over the atom
ordering fixed when the atom structure is built.  Every extra-Boolean
operation is computed atomwise and joined, so the operations are completely
additive by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Iterable, Iterator, Mapping, Sequence, Union

from .bits import bit_list, iter_bits, mask_of

# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------


def _freeze(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    if isinstance(value, (set, frozenset)):
        return tuple(sorted((_freeze(v) for v in value), key=sort_key))
    return value


def sort_key(value: Any) -> tuple:
    """Total order on the nested int/str/tuple values used in atom tags."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, int):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, tuple):
        return (2, tuple(sort_key(v) for v in value))
    if isinstance(value, Atom):
        return (3, value.sort_key())
    raise TypeError(f"unsortable tag component {value!r}")


def _fmt(value: Any) -> str:
    if isinstance(value, tuple):
        return "(" + ",".join(_fmt(v) for v in value) + ")"
    return str(value)


@dataclass(frozen=True)
class Atom:
    """A structured atom tag: a colour kind plus nested integer/str indices."""

    kind: str
    index: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", _freeze(self.index))

    def sort_key(self) -> tuple:
        return (self.kind, sort_key(self.index))

    def __str__(self) -> str:
        if not self.index:
            return self.kind
        return f"{self.kind}{_fmt(self.index)}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "index": _to_lists(self.index)}

    @staticmethod
    def from_json(data: Mapping[str, Any]) -> "Atom":
        return Atom(str(data["kind"]), _freeze(data.get("index", ())))


def _to_lists(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_to_lists(v) for v in value]
    return value


AtomLike = Union[Atom, str]


def as_atom(a: AtomLike) -> Atom:
    return a if isinstance(a, Atom) else Atom(str(a))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Issue:
    """One violated invariant or axiom instance."""

    rule: str
    witness: tuple
    detail: str = ""

    def __str__(self) -> str:
        w = ", ".join(str(x) for x in self.witness)
        return f"{self.rule}: ({w}) {self.detail}".rstrip()


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.issues

    def rules(self) -> set[str]:
        return {i.rule for i in self.issues}


@dataclass
class AxiomReport:
    """Outcome of an exhaustive axiom check.

    ``status`` is ``"pass"``, ``"fail"`` or ``"unknown"``; the last one is used
    only when the check budget ran out before a violation was found.
    """

    status: str
    violations: list[Issue] = field(default_factory=list)
    checked: int = 0
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "pass"


class BudgetExceeded(Exception):
    pass


class _Budget:
    def __init__(self, limit: int | None) -> None:
        self.limit = limit
        self.used = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceeded


# ---------------------------------------------------------------------------
# Relation-algebra atom structures
# ---------------------------------------------------------------------------

Triple = tuple[int, int, int]


def peirce_orbit(t: Triple, conv: Sequence[int]) -> set[Triple]:
    """All Peircean transforms of ``t`` (closure under both generators)."""
    seen = {t}
    todo = [t]
    while todo:
        a, b, c = todo.pop()
        for u in ((conv[a], c, b), (c, conv[b], a)):
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


def peirce_closure(triples: Iterable[Triple], conv: Sequence[int]) -> frozenset[Triple]:
    out: set[Triple] = set()
    for t in triples:
        if t not in out:
            out |= peirce_orbit(t, conv)
    return frozenset(out)


class RaAtomStructure:
    """Finite atom structure for relation algebras.

    Consistency of triples is stored as the complement of ``forbidden``.  A
    triple ``(a, b, c)`` is consistent when ``c`` lies below ``a;b``.
    """

    kind = "ra"

    def __init__(
        self,
        atoms: Sequence[AtomLike],
        identity: Iterable[AtomLike],
        converse: Mapping[AtomLike, AtomLike] | None,
        forbidden: Iterable[tuple[AtomLike, AtomLike, AtomLike]],
        *,
        close: bool = False,
    ) -> None:
        self.atoms: tuple[Atom, ...] = tuple(as_atom(a) for a in atoms)
        if not self.atoms:
            raise ValueError("an atom structure needs at least one atom")
        self.index: dict[Atom, int] = {a: i for i, a in enumerate(self.atoms)}
        if len(self.index) != len(self.atoms):
            raise ValueError("duplicate atoms")
        self.size = len(self.atoms)
        self.identity_mask = mask_of(self._idx(a) for a in identity)
        conv = list(range(self.size))
        if converse is not None:
            for a, b in converse.items():
                conv[self._idx(a)] = self._idx(b)
        self.converse_idx: tuple[int, ...] = tuple(conv)
        raw = {tuple(self._idx(x) for x in t) for t in forbidden}
        for t in raw:
            if len(t) != 3:
                raise ValueError(f"forbidden entry {t} is not a triple")
        self.forbidden: frozenset[Triple] = (
            peirce_closure(raw, conv) if close else frozenset(raw)  # type: ignore[arg-type]
        )
        full = (1 << self.size) - 1
        table = [[full] * self.size for _ in range(self.size)]
        for a, b, c in self.forbidden:
            table[a][b] &= ~(1 << c)
        self.table: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in table)

    def _idx(self, a: AtomLike) -> int:
        try:
            return self.index[as_atom(a)]
        except KeyError:
            raise ValueError(f"unknown atom {a}") from None

    def consistent(self, a: int, b: int, c: int) -> bool:
        return bool(self.table[a][b] >> c & 1)

    def atom(self, i: int) -> Atom:
        return self.atoms[i]

    def identity_atoms(self) -> list[Atom]:
        return [self.atoms[i] for i in iter_bits(self.identity_mask)]

    def is_symmetric(self) -> bool:
        return all(self.converse_idx[i] == i for i in range(self.size))

    def __repr__(self) -> str:
        return f"RaAtomStructure({self.size} atoms, {len(self.forbidden)} forbidden triples)"


def validate_ra_atom_structure(s: RaAtomStructure) -> ValidationReport:
    """Report every violated invariant: involution, Peircean closure, identity law."""
    rep = ValidationReport()
    conv = s.converse_idx
    at = s.atoms
    for a in range(s.size):
        if conv[conv[a]] != a:
            rep.issues.append(Issue("involution", (at[a],), f"converse twice gives {at[conv[conv[a]]]}"))
    for a, b, c in product(range(s.size), repeat=3):
        if not s.consistent(a, b, c):
            continue
        for u in ((conv[a], c, b), (c, conv[b], a)):
            if not s.consistent(*u):
                rep.issues.append(
                    Issue("peirce", (at[a], at[b], at[c]), f"transform {tuple(str(at[x]) for x in u)} forbidden")
                )
    ids = bit_list(s.identity_mask)
    if not ids:
        rep.issues.append(Issue("identity", (), "identity set is empty"))
    for a in range(s.size):
        if not any(s.consistent(a, e, a) for e in ids):
            rep.issues.append(Issue("identity", (at[a],), "no identity atom e with (a,e,a) consistent"))
        for e in ids:
            for b in range(s.size):
                if b != a and (s.consistent(a, e, b) or s.consistent(e, a, b)):
                    rep.issues.append(
                        Issue("identity", (at[a], at[e], at[b]), "identity atom composes to a different atom")
                    )
    return rep


# ---------------------------------------------------------------------------
# Cylindric atom structures
# ---------------------------------------------------------------------------


class CaAtomStructure:
    """Finite atom structure for cylindric algebras of dimension ``n``.

    ``classes[i][k]`` is a hashable label of the ≡_i class of atom ``k``;
    alternatively ``relations[i]`` lists related pairs.  ``diagonals`` maps
    ``(i, j)`` to the atoms below d_ij; D_ii defaults to every atom and
    D_ji mirrors D_ij unless given explicitly.
    """

    kind = "ca"

    def __init__(
        self,
        dimension: int,
        atoms: Sequence[AtomLike],
        *,
        classes: Sequence[Sequence[Any]] | None = None,
        relations: Sequence[Iterable[tuple[AtomLike, AtomLike]]] | None = None,
        diagonals: Mapping[tuple[int, int], Iterable[AtomLike]] | None = None,
    ) -> None:
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.atoms: tuple[Atom, ...] = tuple(as_atom(a) for a in atoms)
        if not self.atoms:
            raise ValueError("an atom structure needs at least one atom")
        self.index = {a: i for i, a in enumerate(self.atoms)}
        if len(self.index) != len(self.atoms):
            raise ValueError("duplicate atoms")
        self.size = len(self.atoms)
        n, size = dimension, self.size
        rows: list[list[int]] = []
        if classes is not None:
            if len(classes) != n:
                raise ValueError("need one class labelling per dimension index")
            for i in range(n):
                lab = list(classes[i])
                if len(lab) != size:
                    raise ValueError(f"class labelling {i} has wrong length")
                groups: dict[Any, int] = {}
                for k, c in enumerate(lab):
                    groups[c] = groups.get(c, 0) | (1 << k)
                rows.append([groups[c] for c in lab])
        elif relations is not None:
            if len(relations) != n:
                raise ValueError("need one relation per dimension index")
            for i in range(n):
                r = [0] * size
                for x, y in relations[i]:
                    r[self._idx(x)] |= 1 << self._idx(y)
                rows.append(r)
        else:
            raise ValueError("either classes or relations must be given")
        self.rows: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in rows)
        full = (1 << size) - 1
        diag = [[0] * n for _ in range(n)]
        given = dict(diagonals or {})
        for i in range(n):
            for j in range(n):
                if (i, j) in given:
                    diag[i][j] = mask_of(self._idx(a) for a in given[(i, j)])
                elif (j, i) in given:
                    diag[i][j] = mask_of(self._idx(a) for a in given[(j, i)])
                elif i == j:
                    diag[i][j] = full
        self.diag: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in diag)
        # class ids are available whenever every relation is an equivalence
        self.class_of: tuple[tuple[int, ...], ...] | None = None
        self.class_masks: tuple[tuple[int, ...], ...] | None = None
        if all(_is_equivalence(self.rows[i]) for i in range(n)):
            cof, cms = [], []
            for i in range(n):
                ids: dict[int, int] = {}
                lab = []
                for k in range(size):
                    lab.append(ids.setdefault(self.rows[i][k], len(ids)))
                cof.append(tuple(lab))
                cms.append(tuple(ids))
            self.class_of = tuple(cof)
            self.class_masks = tuple(cms)

    def _idx(self, a: AtomLike) -> int:
        try:
            return self.index[as_atom(a)]
        except KeyError:
            raise ValueError(f"unknown atom {a}") from None

    def related(self, i: int, a: int, b: int) -> bool:
        return bool(self.rows[i][a] >> b & 1)

    def relation_pairs(self, i: int) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.size) for b in iter_bits(self.rows[i][a])]

    def require_classes(self) -> tuple[tuple[int, ...], ...]:
        if self.class_of is None:
            raise ValueError("accessibility relations are not all equivalences")
        return self.class_of

    def __repr__(self) -> str:
        return f"CaAtomStructure(dim {self.dimension}, {self.size} atoms)"


def _is_equivalence(rows: Sequence[int]) -> bool:
    for a, r in enumerate(rows):
        if not r >> a & 1:
            return False
        for b in iter_bits(r):
            if rows[b] != r:
                return False
    return True


def validate_ca_atom_structure(s: CaAtomStructure) -> ValidationReport:
    """Check that each ≡_i is an equivalence and the diagonals are symmetric."""
    rep = ValidationReport()
    at = s.atoms
    for i in range(s.dimension):
        rows = s.rows[i]
        for a in range(s.size):
            if not rows[a] >> a & 1:
                rep.issues.append(Issue("reflexive", (i, at[a])))
            for b in iter_bits(rows[a]):
                if not rows[b] >> a & 1:
                    rep.issues.append(Issue("symmetric", (i, at[a], at[b])))
                extra = rows[b] & ~rows[a]
                if extra:
                    c = next(iter_bits(extra))
                    rep.issues.append(Issue("transitive", (i, at[a], at[b], at[c])))
    for i in range(s.dimension):
        for j in range(s.dimension):
            if s.diag[i][j] != s.diag[j][i]:
                rep.issues.append(Issue("diagonal-symmetry", (i, j)))
    return rep


# ---------------------------------------------------------------------------
# Complex algebras
# ---------------------------------------------------------------------------

Structure = Union[RaAtomStructure, CaAtomStructure]


class ComplexAlgebra:
    """The full powerset algebra over a finite atom structure."""

    def __init__(self, base: Structure) -> None:
        self.base = base
        self.width = base.size
        self.top = (1 << base.size) - 1
        self.bottom = 0
        self._cyl_cache: dict[tuple[int, int], int] = {}

    @property
    def kind(self) -> str:
        return self.base.kind

    @property
    def dimension(self) -> int:
        if isinstance(self.base, CaAtomStructure):
            return self.base.dimension
        return 2

    # -- elements ----------------------------------------------------------
    def element(self, atoms: Iterable[AtomLike]) -> int:
        return mask_of(self.base._idx(a) for a in atoms)

    def atom_element(self, a: AtomLike) -> int:
        return 1 << self.base._idx(a)

    def atoms_of(self, x: int) -> list[Atom]:
        self.check(x)
        return [self.base.atoms[i] for i in iter_bits(x)]

    def check(self, x: int) -> None:
        if not isinstance(x, int) or x < 0 or x >> self.width:
            raise ValueError(f"{x!r} is not an element of this algebra ({self.width} atoms)")

    def complement(self, x: int) -> int:
        return self.top & ~x

    # -- relation algebra operations -----------------------------------------
    def _ra(self) -> RaAtomStructure:
        if not isinstance(self.base, RaAtomStructure):
            raise ValueError("operation needs a relation-algebra atom structure")
        return self.base

    def compose(self, x: int, y: int) -> int:
        s = self._ra()
        out = 0
        ys = bit_list(y)
        for a in iter_bits(x):
            row = s.table[a]
            for b in ys:
                out |= row[b]
                if out == self.top:
                    return out
        return out

    def converse(self, x: int) -> int:
        s = self._ra()
        return mask_of(s.converse_idx[a] for a in iter_bits(x))

    @property
    def identity(self) -> int:
        return self._ra().identity_mask

    # -- cylindric operations ------------------------------------------------
    def _ca(self) -> CaAtomStructure:
        if not isinstance(self.base, CaAtomStructure):
            raise ValueError("operation needs a cylindric atom structure")
        return self.base

    def cylindrify(self, i: int, x: int) -> int:
        s = self._ca()
        if not 0 <= i < s.dimension:
            raise ValueError(f"cylindrifier index {i} out of range for dimension {s.dimension}")
        key = (i, x)
        hit = self._cyl_cache.get(key)
        if hit is not None:
            return hit
        rows = s.rows[i]
        out = 0
        rest = x
        while rest:
            low = rest & -rest
            r = rows[low.bit_length() - 1]
            out |= r
            rest &= ~low
            rest &= ~r if s.class_of is not None else ~0
        if len(self._cyl_cache) < 200_000:
            self._cyl_cache[key] = out
        return out

    def diagonal(self, i: int, j: int) -> int:
        s = self._ca()
        if not (0 <= i < s.dimension and 0 <= j < s.dimension):
            raise ValueError("diagonal index out of range")
        return s.diag[i][j]

    def substitute(self, i: int, j: int, x: int) -> int:
        """s_i^j x = c_j(d_ij · x) for i ≠ j, and x itself when i = j."""
        if i == j:
            return x
        return self.cylindrify(j, self.diagonal(i, j) & x)

    def operations_signature(self) -> str:
        return "ra" if self.kind == "ra" else f"ca{self.dimension}"

    def __repr__(self) -> str:
        return f"ComplexAlgebra({self.base!r})"


def _same_base(A: ComplexAlgebra, *xs: int) -> None:
    for x in xs:
        A.check(x)


def ra_compose(A: ComplexAlgebra, X: int, Y: int) -> int:
    """Composition in the complex algebra of a relation-algebra atom structure."""
    _same_base(A, X, Y)
    return A.compose(X, Y)


def ca_cylindrify(A: ComplexAlgebra, i: int, X: int) -> int:
    _same_base(A, X)
    return A.cylindrify(i, X)


# ---------------------------------------------------------------------------
# Axiom checkers
# ---------------------------------------------------------------------------


def check_ra_axioms(A: ComplexAlgebra, budget: int | None = None) -> AxiomReport:
    """Check the relation-algebra axioms on a complex algebra.

    The Boolean axioms and additivity of ``;`` and converse hold by
    construction.  The remaining axioms are checked on atoms, which suffices
    because both sides are completely additive in each argument.  The
    Peircean law x⌣;−(x;y) ≤ −y is checked in its equivalent atomic form
    d ≤ a⌣;c ⟹ c ≤ a;d.
    """
    s = A._ra()
    n = s.size
    conv = s.converse_idx
    bud = _Budget(budget)
    bad: list[Issue] = []
    at = s.atoms
    one = s.identity_mask
    try:
        for a in range(n):
            bud.tick()
            if conv[conv[a]] != a:
                bad.append(Issue("converse-involution", (at[a],)))
            x = 1 << a
            if A.compose(x, one) != x:
                bad.append(Issue("right-identity", (at[a],)))
            if A.compose(one, x) != x:
                bad.append(Issue("left-identity", (at[a],)))
        for a, b in product(range(n), repeat=2):
            bud.tick()
            lhs = A.converse(A.compose(1 << a, 1 << b))
            rhs = A.compose(1 << conv[b], 1 << conv[a])
            if lhs != rhs:
                bad.append(Issue("converse-antidistributes", (at[a], at[b])))
        comp = [[s.table[a][b] for b in range(n)] for a in range(n)]
        for a, b, c in product(range(n), repeat=3):
            bud.tick()
            left = 0
            for x in iter_bits(comp[a][b]):
                left |= comp[x][c]
            right = 0
            for y in iter_bits(comp[b][c]):
                right |= comp[a][y]
            if left != right:
                bad.append(Issue("associativity", (at[a], at[b], at[c])))
            # atomic Peircean law with (a, c, d) := (a, b, c)
            if comp[conv[a]][b] >> c & 1 and not comp[a][c] >> b & 1:
                bad.append(Issue("peircean-law", (at[a], at[b], at[c])))
    except BudgetExceeded:
        return AxiomReport("fail" if bad else "unknown", bad, bud.used, "budget exhausted")
    return AxiomReport("fail" if bad else "pass", bad, bud.used)


def check_ca_axioms(A: ComplexAlgebra, budget: int | None = None) -> AxiomReport:
    """Check C1-C7 on a complex algebra over a cylindric atom structure.

    Atoms stand in for x and y (all operations are additive; for C7 an atom
    version is equivalent to the general one).  Instances are grouped by the
    atoms' accessibility rows, which is an exact reformulation.
    """
    s = A._ca()
    n, size = s.dimension, s.size
    at = s.atoms
    bud = _Budget(budget)
    bad: list[Issue] = []
    full = A.top
    try:
        for i in range(n):
            bud.tick()
            if A.cylindrify(i, 0) != 0:
                bad.append(Issue("C1", (i,)))
            rows = s.rows[i]
            for a in range(size):
                if not rows[a] >> a & 1:
                    bad.append(Issue("C2", (i, at[a])))
            # C3 grouped by rows: for x with row P and y with row Q,
            # x ∈ Q needs P ⊆ Q and x ∉ Q needs P ∩ Q = 0.
            members: dict[int, int] = {}
            for a in range(size):
                members[rows[a]] = members.get(rows[a], 0) | (1 << a)
            keys = list(members)
            for P in keys:
                XP = members[P]
                for Q in keys:
                    bud.tick()
                    inside = XP & Q
                    if inside and P & ~Q:
                        x = next(iter_bits(inside))
                        y = next(iter_bits(members[Q]))
                        bad.append(Issue("C3", (i, at[x], at[y])))
                    outside = XP & ~Q
                    if outside and P & Q:
                        x = next(iter_bits(outside))
                        y = next(iter_bits(members[Q]))
                        bad.append(Issue("C3", (i, at[x], at[y])))
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                for a in range(size):
                    bud.tick()
                    x = 1 << a
                    if A.cylindrify(i, A.cylindrify(j, x)) != A.cylindrify(j, A.cylindrify(i, x)):
                        bad.append(Issue("C4", (i, j, at[a])))
        for i in range(n):
            bud.tick()
            if s.diag[i][i] != full:
                miss = next(iter_bits(full & ~s.diag[i][i]))
                bad.append(Issue("C5", (i, at[miss]), "d_ii misses an atom"))
        for i in range(n):
            for j in range(n):
                for mu in range(n):
                    if i in (j, mu):
                        continue
                    bud.tick()
                    if s.diag[j][mu] != A.cylindrify(i, s.diag[j][i] & s.diag[i][mu]):
                        bad.append(Issue("C6", (i, j, mu)))
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                D = bit_list(s.diag[i][j])
                rows = s.rows[i]
                pre = [0]
                for a in D:
                    pre.append(pre[-1] | rows[a])
                suf = [0]
                for a in reversed(D):
                    suf.append(suf[-1] | rows[a])
                suf.reverse()
                for k, a in enumerate(D):
                    bud.tick()
                    others = pre[k] | suf[k + 1]
                    if rows[a] & others:
                        bad.append(Issue("C7", (i, j, at[a])))
    except BudgetExceeded:
        return AxiomReport("fail" if bad else "unknown", bad, bud.used, "budget exhausted")
    return AxiomReport("fail" if bad else "pass", bad, bud.used)


# ---------------------------------------------------------------------------
# Subalgebras
# ---------------------------------------------------------------------------


def _refine(blocks: list[int], x: int) -> tuple[list[int], bool]:
    out: list[int] = []
    changed = False
    for b in blocks:
        inside, outside = b & x, b & ~x
        if inside and outside:
            out.extend((inside, outside))
            changed = True
        else:
            out.append(b)
    return out, changed


def _constants(A: ComplexAlgebra) -> list[int]:
    if A.kind == "ra":
        return [A.identity]
    n = A.dimension
    return [A.diagonal(i, j) for i in range(n) for j in range(n)]


def _images(A: ComplexAlgebra, blocks: Sequence[int]) -> Iterator[int]:
    if A.kind == "ra":
        for b in blocks:
            yield A.converse(b)
        for b in blocks:
            for c in blocks:
                yield A.compose(b, c)
    else:
        for i in range(A.dimension):
            for b in blocks:
                yield A.cylindrify(i, b)


@dataclass(frozen=True)
class Subalgebra:
    """A subalgebra of a finite complex algebra, given by its atoms (blocks)."""

    algebra: ComplexAlgebra
    blocks: tuple[int, ...]

    def __len__(self) -> int:
        return 1 << len(self.blocks)

    def contains(self, x: int) -> bool:
        return all((b & x) in (0, b) for b in self.blocks)

    def elements(self) -> Iterator[int]:
        k = len(self.blocks)
        for sel in range(1 << k):
            x = 0
            for t in iter_bits(sel):
                x |= self.blocks[t]
            yield x


def sg_generate(A: ComplexAlgebra, gens: Iterable[int]) -> Subalgebra:
    """Subalgebra generated by ``gens``: refine the atom partition to a fixpoint."""
    blocks = [A.top] if A.top else []
    for g in list(gens) + _constants(A):
        A.check(g)
        blocks, _ = _refine(blocks, g)
    changed = True
    while changed:
        changed = False
        for img in list(_images(A, blocks)):
            blocks, ch = _refine(blocks, img)
            changed |= ch
    blocks.sort(key=lambda b: (b & -b).bit_length())
    return Subalgebra(A, tuple(blocks))


def _as_subalgebra(B: Subalgebra | Iterable[int], A: ComplexAlgebra) -> Subalgebra:
    if isinstance(B, Subalgebra):
        if B.algebra is not A:
            raise ValueError("subalgebra belongs to a different algebra")
        elems = set(B.elements())
    else:
        elems = set(B)
    for x in elems:
        A.check(x)
    if 0 not in elems or A.top not in elems:
        raise ValueError("not closed: 0 and 1 must belong to a subalgebra")
    for x in elems:
        if A.complement(x) not in elems:
            raise ValueError("not closed under complement")
        for y in elems:
            if x | y not in elems:
                raise ValueError("not closed under join")
    for c in _constants(A):
        if c not in elems:
            raise ValueError("missing a constant of the signature")
    blocks = sorted(
        (x for x in elems if x and not any(y and y != x and y & x == y for y in elems)),
        key=lambda b: (b & -b).bit_length(),
    )
    sub = Subalgebra(A, tuple(blocks))
    for img in _images(A, sub.blocks):
        if img not in elems:
            raise ValueError("not closed under the extra-Boolean operations")
    return sub


def is_dense_subalgebra(B: Subalgebra | Iterable[int], A: ComplexAlgebra) -> bool:
    """Every nonzero element of A lies above a nonzero element of B.

    In a finite algebra this forces every atom of A into B.
    """
    sub = _as_subalgebra(B, A)
    for a in range(A.width):
        if not any(b and b & ~(1 << a) == 0 for b in sub.blocks):
            return False
    return True


def is_complete_subalgebra(B: Subalgebra | Iterable[int], A: ComplexAlgebra) -> bool:
    """Suprema of subsets of B computed in A stay in B and agree with B's.

    For finite algebras every subset is finite and joins are preserved by any
    subalgebra, so after the closure check this is always true.
    """
    _as_subalgebra(B, A)
    return True


# ---------------------------------------------------------------------------
# Reducts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductResult:
    """A reduct as a complex algebra over its own atoms.

    ``blocks[t]`` is the element of the source algebra that the reduct's
    ``t``-th atom stands for.
    """

    algebra: ComplexAlgebra
    blocks: tuple[int, ...]
    source: ComplexAlgebra

    def embed(self, x: int) -> int:
        out = 0
        for t in iter_bits(x):
            out |= self.blocks[t]
        return out


def _closure_blocks(A: ComplexAlgebra, indices: Sequence[int]) -> list[int]:
    s = A._ca()
    seen = 0
    blocks = []
    for a in range(s.size):
        if seen >> a & 1:
            continue
        blk = 1 << a
        while True:
            nxt = blk
            for i in indices:
                nxt |= A.cylindrify(i, nxt)
            if nxt == blk:
                break
            blk = nxt
        blocks.append(blk)
        seen |= blk
    return blocks


def _block_atom(blk: int) -> Atom:
    return Atom("block", tuple(bit_list(blk)))


def neat_reduct(A: ComplexAlgebra, k: int) -> ReductResult:
    """Elements fixed by every c_i with i ≥ k, with the signature cut to indices < k."""
    s = A._ca()
    m = s.dimension
    if not 1 <= k <= m:
        raise ValueError(f"neat reduct dimension {k} must lie in 1..{m}")
    if k == m:
        return ReductResult(A, tuple(1 << a for a in range(s.size)), A)
    blocks = _closure_blocks(A, range(k, m))
    atoms = [_block_atom(b) for b in blocks]
    relations = []
    for i in range(k):
        pairs = []
        for x, bx in enumerate(blocks):
            cx = A.cylindrify(i, bx)
            for y, by in enumerate(blocks):
                if by & cx:
                    if by & ~cx:
                        raise ValueError("cylindrifier does not preserve the neat reduct")
                    pairs.append((atoms[x], atoms[y]))
        relations.append(pairs)
    diagonals = {}
    for i in range(k):
        for j in range(k):
            d = s.diag[i][j]
            inside = []
            for x, bx in enumerate(blocks):
                if bx & d:
                    if bx & ~d:
                        raise ValueError(f"d_{i}{j} is not fixed by the higher cylindrifiers")
                    inside.append(atoms[x])
            diagonals[(i, j)] = inside
    red = CaAtomStructure(k, atoms, relations=relations, diagonals=diagonals)
    return ReductResult(ComplexAlgebra(red), tuple(blocks), A)


def ra_composition_term(A: ComplexAlgebra, x: int, y: int) -> int:
    """x;y = c_2(s_2^1 x · s_2^0 y)."""
    return A.cylindrify(2, A.substitute(2, 1, x) & A.substitute(2, 0, y))


def ra_converse_term(A: ComplexAlgebra, x: int) -> int:
    """_2s(0,1)x = s_0^2 s_1^0 s_2^1 x (innermost substitution applied first)."""
    return A.substitute(0, 2, A.substitute(1, 0, A.substitute(2, 1, x)))


def ra_reduct(A: ComplexAlgebra) -> ReductResult:
    """Relation-algebra reduct on Nr_2 with the composition and converse terms."""
    s = A._ca()
    if s.dimension < 3:
        raise ValueError("the Ra reduct needs dimension at least 3")
    blocks = _closure_blocks(A, range(2, s.dimension))
    atoms = [_block_atom(b) for b in blocks]
    where = {}
    for t, b in enumerate(blocks):
        for a in iter_bits(b):
            where[a] = t

    def to_blocks(x: int, what: str) -> int:
        out = 0
        for t, b in enumerate(blocks):
            if x & b:
                if b & ~x:
                    raise ValueError(f"{what} leaves the 2-neat reduct")
                out |= 1 << t
        return out

    converse = {}
    for t, b in enumerate(blocks):
        img = to_blocks(ra_converse_term(A, b), "converse")
        if img.bit_count() != 1:
            raise ValueError("converse term does not send atoms to atoms")
        converse[atoms[t]] = atoms[img.bit_length() - 1]
    forbidden = []
    for (p, bp), (q, bq) in product(enumerate(blocks), repeat=2):
        comp = to_blocks(ra_composition_term(A, bp, bq), "composition")
        for r in range(len(blocks)):
            if not comp >> r & 1:
                forbidden.append((atoms[p], atoms[q], atoms[r]))
    identity = [atoms[t] for t in iter_bits(to_blocks(s.diag[0][1], "identity"))]
    ra = RaAtomStructure(atoms, identity, converse, forbidden)
    return ReductResult(ComplexAlgebra(ra), tuple(blocks), A)


# ---------------------------------------------------------------------------
# Substitution-cylindrifier words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subst:
    """The letter s_sub^sup, acting as the replacement [sup|sub]."""

    sup: int
    sub: int

    def __str__(self) -> str:
        return f"s_{self.sub}^{self.sup}"


@dataclass(frozen=True)
class Cyl:
    index: int

    def __str__(self) -> str:
        return f"c_{self.index}"


Letter = Union[Subst, Cyl]


@dataclass(frozen=True)
class ScWord:
    letters: tuple[Letter, ...]
    arity: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        for let in self.letters:
            idx = (let.sup, let.sub) if isinstance(let, Subst) else (let.index,)
            if any(not 0 <= v < self.arity for v in idx):
                raise ValueError(f"letter {let} out of range for arity {self.arity}")

    def __add__(self, other: "ScWord") -> "ScWord":
        if self.arity != other.arity:
            raise ValueError("arity mismatch")
        return ScWord(self.letters + other.letters, self.arity)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.letters) or "ε"


def eval_sc_word(w: ScWord) -> dict[int, int]:
    """Partial map m → m denoted by an sc-word.

    The empty word gives the identity; appending s_j^i precomposes with
    [i|j]; appending c_i removes i from the domain.
    """
    f = {x: x for x in range(w.arity)}
    for let in w.letters:
        if isinstance(let, Subst):
            g = {}
            for x in range(w.arity):
                y = let.sub if x == let.sup else x
                if y in f:
                    g[x] = f[y]
            f = g
        else:
            f.pop(let.index, None)
    return f


def subst_word(i: int, j: int, n: int) -> ScWord:
    """The sc-word realizing the pair (i, j) as the image of (0, 1)."""
    if n < 3:
        raise ValueError("subst_word needs n ≥ 3")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError("indices out of range")
    if j != 0:
        letters: tuple[Letter, ...] = (Subst(0, i), Subst(1, j))
    elif i != 1:
        letters = (Subst(1, 0), Subst(0, i))
    else:
        letters = (Subst(2, 0), Subst(0, 1), Subst(1, 2))
    return ScWord(letters, n)
