"""Atomic networks, edge networks and hypernetworks.

Nodes are small non-negative integers.  Labels are atom indices into the
underlying atom structure.  All network objects are immutable; every
operation returns a new object.
"""

from __future__ import annotations

from itertools import product
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .algebra_core import CaAtomStructure, Issue, RaAtomStructure, ValidationReport, sort_key
from .bits import iter_bits
from .canonical import canonical_form, canonical_labelling

SHORT = "short"
LONG = "long"


class _Network:
    """Shared behaviour of edge and atomic networks."""

    __slots__ = ("structure", "nodes", "labels", "_key")
    arity: int

    def __init__(self, structure: Any, nodes: Iterable[int], labels: Mapping[tuple, int]) -> None:
        self.structure = structure
        self.nodes: tuple[int, ...] = tuple(sorted(set(nodes)))
        self.labels: dict[tuple, int] = dict(labels)
        self._key: Hashable | None = None
        want = len(self.nodes) ** self.arity
        if len(self.labels) != want:
            raise ValueError(f"network needs {want} labelled tuples, got {len(self.labels)}")

    def label(self, t: Sequence[int]) -> int:
        return self.labels[tuple(t)]

    def atom(self, t: Sequence[int]):
        return self.structure.atoms[self.labels[tuple(t)]]

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other: object) -> bool:
        return (
            type(self) is type(other)
            and self.structure is other.structure  # type: ignore[attr-defined]
            and self.nodes == other.nodes  # type: ignore[attr-defined]
            and self.labels == other.labels  # type: ignore[attr-defined]
        )

    def __hash__(self) -> int:
        return hash(self.exact_key())

    def exact_key(self) -> tuple:
        return (self.nodes, tuple(sorted(self.labels.items())))

    def restrict(self, keep: Iterable[int]) -> "_Network":
        ks = set(keep)
        labs = {t: a for t, a in self.labels.items() if all(x in ks for x in t)}
        return type(self)(self.structure, [x for x in self.nodes if x in ks], labs)

    def delete_node(self, k: int) -> "_Network":
        return self.restrict(x for x in self.nodes if x != k)

    def canonical_key(self) -> Hashable:
        if self._key is None:
            self._key = canonical_key(self)
        return self._key


class EdgeNetwork(_Network):
    """Network over a relation-algebra atom structure; labels on ordered pairs."""

    __slots__ = ()
    arity = 2

    @classmethod
    def single(cls, s: RaAtomStructure, atom: int) -> "EdgeNetwork":
        """Smallest network realizing ``atom`` on a pair of nodes."""
        if s.identity_mask >> atom & 1:
            return cls(s, [0], {(0, 0): atom})
        conv = s.converse_idx[atom]
        e0 = _identity_for(s, atom, left=True)
        e1 = _identity_for(s, atom, left=False)
        if e0 is None or e1 is None:
            raise ValueError("atom has no identity support")
        return cls(s, [0, 1], {(0, 0): e0, (1, 1): e1, (0, 1): atom, (1, 0): conv})


def _identity_for(s: RaAtomStructure, a: int, left: bool) -> int | None:
    for e in iter_bits(s.identity_mask):
        if (s.consistent(e, a, a) if left else s.consistent(a, e, a)):
            return e
    return None


class AtomicNetwork(_Network):
    """n-dimensional atomic network over a cylindric atom structure."""

    __slots__ = ()

    @property
    def arity(self) -> int:  # type: ignore[override]
        return self.structure.dimension

    @classmethod
    def from_atom(cls, s: CaAtomStructure, atom: int) -> "AtomicNetwork":
        """The network on as few nodes as the diagonals of ``atom`` allow, with x̄ = (0,…) labelled atom."""
        n = s.dimension
        pattern: list[int] = []
        for i in range(n):
            for j in range(i):
                if s.diag[i][j] >> atom & 1:
                    pattern.append(pattern[j])
                    break
            else:
                pattern.append(len(set(pattern)))
        nodes = sorted(set(pattern))
        fixed = {tuple(pattern): atom}
        for net in ca_completions(s, nodes, {}, fixed=fixed):
            return net
        raise ValueError("atom does not support a consistent network")


Network = Union[EdgeNetwork, AtomicNetwork]


# ---------------------------------------------------------------------------
# Hypernetworks
# ---------------------------------------------------------------------------


def _sim_classes(N: Network) -> dict[int, int]:
    """Map each node to the least node of its diagonal-equivalence class."""
    rep = {x: x for x in N.nodes}
    for x in N.nodes:
        for y in N.nodes:
            if y < rep[x] and diag_linked(N, x, y):
                rep[x] = min(rep[x], rep[y], y)
    return rep


def diag_linked(N: Network, x: int, y: int, mode: str = "some") -> bool:
    """x ~ y: the tuple (x, y, z̄) lies below d_01 for some (or every) z̄."""
    s = N.structure
    if isinstance(N, EdgeNetwork):
        return bool(s.identity_mask >> N.label((x, y)) & 1)
    n = s.dimension
    d01 = s.diag[0][1]
    hits = [bool(d01 >> N.label((x, y) + zs) & 1) for zs in product(N.nodes, repeat=n - 2)]
    return any(hits) if mode == "some" else all(hits)


class Hypernetwork:
    """A network with labelled hyperedges; short hyperedges implicitly carry ``lam``.

    Hyperlabels are stored on ∼-class representatives so that the
    ∼-invariance holds by construction.  Only long hyperedges are stored.
    """

    __slots__ = ("core", "hyper", "lam", "_rep")

    def __init__(self, core: Network, hyper: Mapping[tuple, Hashable], lam: Hashable) -> None:
        self.core = core
        self.lam = lam
        self._rep = _sim_classes(core)
        stored: dict[tuple, Hashable] = {}
        for t, lab in hyper.items():
            r = tuple(self._rep[x] for x in t)
            if classify_hyperedge(self, r) == SHORT:
                if lab != lam:
                    raise ValueError(f"short hyperedge {t} must carry the constant label")
                continue
            if r in stored and stored[r] != lab:
                raise ValueError(f"hyperedges equivalent to {r} carry different labels")
            stored[r] = lab
        self.hyper = stored

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.core.nodes

    @property
    def structure(self):
        return self.core.structure

    def hyperlabel(self, t: Sequence[int]) -> Hashable | None:
        r = tuple(self._rep[x] for x in t)
        if classify_hyperedge(self, r) == SHORT:
            return self.lam
        return self.hyper.get(r)

    def exact_key(self) -> tuple:
        return (self.core.exact_key(), tuple(sorted(self.hyper.items(), key=lambda kv: (kv[0], sort_key(kv[1])))))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Hypernetwork) and self.exact_key() == other.exact_key() and self.lam == other.lam

    def __hash__(self) -> int:
        return hash(self.exact_key())

    def restrict(self, keep: Iterable[int]) -> "Hypernetwork":
        ks = set(keep)
        core = self.core.restrict(ks)
        hyp = {t: lab for t, lab in self.hyper.items() if all(x in ks for x in t)}
        return Hypernetwork(core, hyp, self.lam)

    def canonical_key(self) -> Hashable:
        return canonical_key(self)


def classify_hyperedge(H: Union[Hypernetwork, Network], xs: Sequence[int]) -> str:
    """Short iff the coordinates meet at most n diagonal-equivalence classes."""
    core = H.core if isinstance(H, Hypernetwork) else H
    n = core.arity
    if isinstance(H, Hypernetwork):
        rep = H._rep
    else:
        rep = _sim_classes(core)
    return SHORT if len({rep[x] for x in xs}) <= n else LONG


# ---------------------------------------------------------------------------
# Consistency
# ---------------------------------------------------------------------------


def check_consistency(N: Union[Network, Hypernetwork]) -> ValidationReport:
    """List every violated network clause with a witness tuple."""
    if isinstance(N, Hypernetwork):
        rep = check_consistency(N.core)
        for t, lab in N.hyper.items():
            if classify_hyperedge(N, t) == SHORT and lab != N.lam:
                rep.issues.append(Issue("lambda-neat", t))
        return rep
    if isinstance(N, EdgeNetwork):
        return _check_edge(N)
    return _check_atomic(N)


def _check_edge(N: EdgeNetwork) -> ValidationReport:
    s: RaAtomStructure = N.structure
    rep = ValidationReport()
    at = s.atoms
    for x in N.nodes:
        if not s.identity_mask >> N.label((x, x)) & 1:
            rep.issues.append(Issue("identity", (x, x), f"label {at[N.label((x, x))]} is not below 1'"))
    for x in N.nodes:
        for y in N.nodes:
            if N.label((y, x)) != s.converse_idx[N.label((x, y))]:
                rep.issues.append(Issue("converse", (x, y)))
    for l, m, n in product(N.nodes, repeat=3):
        a, b, c = N.label((l, m)), N.label((m, n)), N.label((l, n))
        if not s.consistent(a, b, c):
            rep.issues.append(Issue("triangle", (l, m, n), f"({at[a]}, {at[b]}, {at[c]}) is forbidden"))
    return rep


def _check_atomic(N: AtomicNetwork) -> ValidationReport:
    s: CaAtomStructure = N.structure
    n = s.dimension
    rep = ValidationReport()
    for t, a in N.labels.items():
        for i in range(n):
            for j in range(i + 1, n):
                below = bool(s.diag[i][j] >> a & 1)
                if below != (t[i] == t[j]):
                    rep.issues.append(Issue("diagonal", t, f"d_{i}{j}"))
    for t, a in N.labels.items():
        for i in range(n):
            for z in N.nodes:
                u = t[:i] + (z,) + t[i + 1 :]
                if not s.rows[i][a] >> N.labels[u] & 1:
                    rep.issues.append(Issue("cylinder", (t, u), f"index {i}"))
    return rep


# ---------------------------------------------------------------------------
# Maps and keys
# ---------------------------------------------------------------------------


def apply_map(N: Union[Network, Hypernetwork], theta: Mapping[int, int]):
    """Pull ``N`` back along the partial map ``theta``: (Nθ)(ī) = N(θ(ī))."""
    if isinstance(N, Hypernetwork):
        core = apply_map(N.core, theta)
        dom = core.nodes
        hyp = {}
        # pull back every stored long hyperedge along θ
        inv: dict[int, list[int]] = {}
        for i in dom:
            inv.setdefault(theta[i], []).append(i)
        for t, lab in N.hyper.items():
            if all(x in inv for x in t):
                for pre in product(*(inv[x] for x in t)):
                    hyp[pre] = lab
        return Hypernetwork(core, hyp, N.lam)
    present = set(N.nodes)
    dom = sorted(i for i, v in theta.items() if v in present)
    k = N.arity
    labels = {t: N.labels[tuple(theta[x] for x in t)] for t in product(dom, repeat=k)}
    return type(N)(N.structure, dom, labels)


def canonical_key(N: Union[Network, Hypernetwork]) -> Hashable:
    """Key equal for two networks iff a node bijection preserves all labels."""
    if isinstance(N, Hypernetwork):
        core = N.core
        tuples: dict[tuple, Any] = {}
        idx = {x: p for p, x in enumerate(core.nodes)}
        for t, a in core.labels.items():
            tuples[tuple(idx[x] for x in t)] = (0, a)
        for t, lab in N.hyper.items():
            tuples[tuple(idx[x] for x in t)] = (1, sort_key(lab))
        return ("h", core.arity, canonical_form(len(core.nodes), [0] * len(core.nodes), tuples))
    idx = {x: p for p, x in enumerate(N.nodes)}
    tuples = {tuple(idx[x] for x in t): a for t, a in N.labels.items()}
    return (N.arity, canonical_form(len(N.nodes), [0] * len(N.nodes), tuples))


def canonical_relabel(N: Network) -> tuple[Hashable, dict[int, int]]:
    """Canonical key plus a node renaming onto 0..k-1 realizing it."""
    idx = {x: p for p, x in enumerate(N.nodes)}
    tuples = {tuple(idx[x] for x in t): a for t, a in N.labels.items()}
    cert, perm = canonical_labelling(len(N.nodes), [0] * len(N.nodes), tuples)
    return (N.arity, cert), {x: perm[idx[x]] for x in N.nodes}


# ---------------------------------------------------------------------------
# Completion search
# ---------------------------------------------------------------------------


def ra_completions(
    s: RaAtomStructure,
    nodes: Iterable[int],
    known: Mapping[tuple[int, int], int],
    fixed: Mapping[tuple[int, int], int] | None = None,
    *,
    diversity: bool = True,
) -> Iterator[EdgeNetwork]:
    """Every consistent edge network on ``nodes`` extending ``known`` and ``fixed``.

    ``known`` must be closed under converse on its pairs.  With ``diversity``
    set, distinct nodes never get an identity label.
    """
    nodes = sorted(set(nodes))
    labels = dict(known)
    for (x, y), a in (fixed or {}).items():
        for p, v in (((x, y), a), ((y, x), s.converse_idx[a])):
            if labels.get(p, v) != v:
                return
            labels[p] = v
    free = [p for p in product(nodes, repeat=2) if p not in labels and p[0] <= p[1]]
    free.sort(key=lambda p: (p[0] != p[1], max(p), p))
    full = (1 << s.size) - 1
    ids = s.identity_mask
    conv = s.converse_idx

    def ok(x: int, y: int) -> bool:
        # check triangles whose three edges are now all labelled
        for z in nodes:
            xz, zy = labels.get((x, z)), labels.get((z, y))
            if xz is not None and zy is not None and not s.consistent(xz, zy, labels[(x, y)]):
                return False
            zx, yz = labels.get((z, x)), labels.get((y, z))
            xy = labels[(x, y)]
            if zx is not None and labels.get((z, y)) is not None and not s.consistent(zx, xy, labels[(z, y)]):
                return False
            if yz is not None and labels.get((x, z)) is not None and not s.consistent(xy, yz, labels[(x, z)]):
                return False
        return True

    for p in list(labels):
        if not ok(*p):
            return

    def go(k: int) -> Iterator[EdgeNetwork]:
        if k == len(free):
            yield EdgeNetwork(s, nodes, labels)
            return
        x, y = free[k]
        dom = ids if x == y else (full & ~ids if diversity else full)
        for a in iter_bits(dom):
            labels[(x, y)] = a
            labels[(y, x)] = conv[a]
            if ok(x, y) and (x == y or ok(y, x)):
                yield from go(k + 1)
        del labels[(x, y)]
        labels.pop((y, x), None)

    yield from go(0)


def _diag_mask(s: CaAtomStructure, t: tuple) -> int:
    n = s.dimension
    m = (1 << s.size) - 1
    for i in range(n):
        for j in range(i + 1, n):
            d = s.diag[i][j]
            m &= d if t[i] == t[j] else ~d
    return m


def ca_completions(
    s: CaAtomStructure,
    nodes: Iterable[int],
    known: Mapping[tuple, int],
    fixed: Mapping[tuple, int] | None = None,
    *,
    limit: int | None = None,
) -> Iterator[AtomicNetwork]:
    """Every consistent atomic network on ``nodes`` extending ``known`` and ``fixed``.

    Tuples are variables; all tuples that agree off coordinate i must carry
    ≡_i-related atoms, so each such face shares one ≡_i class.  Search picks
    the variable with the fewest candidates first.
    """
    cls = s.require_classes()
    cmask = s.class_masks
    assert cmask is not None
    n = s.dimension
    nodes = sorted(set(nodes))
    labels: dict[tuple, int] = dict(known)
    for t, a in (fixed or {}).items():
        if labels.get(t, a) != a:
            return
        labels[t] = a
    face_cls: dict[tuple, int] = {}
    for t, a in labels.items():
        if not _diag_mask(s, t) >> a & 1:
            return
        for i in range(n):
            f = (i,) + t[:i] + (-1,) + t[i + 1 :]
            c = cls[i][a]
            if face_cls.setdefault(f, c) != c:
                return
    free = [t for t in product(nodes, repeat=n) if t not in labels]
    base = {t: _diag_mask(s, t) for t in free}
    faces = {t: [(i,) + t[:i] + (-1,) + t[i + 1 :] for i in range(n)] for t in free}
    count = [0]

    def cands(t: tuple) -> int:
        m = base[t]
        for i, f in enumerate(faces[t]):
            c = face_cls.get(f)
            if c is not None:
                m &= cmask[i][c]
        return m

    def go(rest: list[tuple]) -> Iterator[AtomicNetwork]:
        if not rest:
            count[0] += 1
            yield AtomicNetwork(s, nodes, labels)
            return
        best, bm, bc = -1, 0, None
        for k, t in enumerate(rest):
            m = cands(t)
            c = m.bit_count()
            if bc is None or c < bc:
                best, bm, bc = k, m, c
                if c <= 1:
                    break
        if not bm:
            return
        t = rest[best]
        others = rest[:best] + rest[best + 1 :]
        for a in iter_bits(bm):
            added = []
            for i, f in enumerate(faces[t]):
                if f not in face_cls:
                    face_cls[f] = cls[i][a]
                    added.append(f)
            labels[t] = a
            yield from go(others)
            del labels[t]
            for f in added:
                del face_cls[f]
            if limit is not None and count[0] >= limit:
                return

    yield from go(free)


def network_from_atom(s: Union[RaAtomStructure, CaAtomStructure], atom: int) -> Network:
    if isinstance(s, RaAtomStructure):
        return EdgeNetwork.single(s, atom)
    return AtomicNetwork.from_atom(s, atom)
