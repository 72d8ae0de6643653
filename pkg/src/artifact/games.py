"""Network games, hypernetwork games and an exhaustive memoized solver.

Round budgets count every round, including the opening atom move.  A game
with budget k therefore gives ∀ one atom move and k-1 further moves.

Conventions shared by all network variants:

* The board of G and BoldG is the current network.  A demand that already
  has a witness leaves the network unchanged (any extension is dominated
  for ∃).
* A fresh witness node is the least unused node below the budget m.  In G a
  full board means an unwitnessed demand cannot be met.  In BoldG ∀ may
  then name an in-use node to be overwritten.
* H and BoldH keep every played hypernetwork, since transformation and
  amalgamation moves refer back to them by node names.
"""

from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Hashable, Iterable, Iterator, Sequence, Union

from .algebra_core import CaAtomStructure, RaAtomStructure, sort_key
from .bits import iter_bits
from .networks import (
    LONG,
    AtomicNetwork,
    EdgeNetwork,
    Hypernetwork,
    Network,
    apply_map,
    ca_completions,
    classify_hyperedge,
    ra_completions,
)

EXISTS = "ExistsWins"
FORALL = "ForallWins"
UNKNOWN = "Unknown"

VARIANTS = ("G", "BoldG", "H", "BoldH")


# ---------------------------------------------------------------------------
# Specs, moves, verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GameSpec:
    """A finite network game.

    ``nodes`` is the node budget m (for H variants it bounds the node
    universe used by transformation maps and fresh nodes).  ``labels`` and
    ``lam`` are the hyperlabel set Λ and the constant λ of the H variants;
    ``max_hyperedge_length`` truncates the hyperedges that are tracked.
    """

    variant: str
    structure: Union[RaAtomStructure, CaAtomStructure]
    nodes: int
    rounds: int
    labels: tuple = ()
    lam: Hashable = "lam"
    max_hyperedge_length: int | None = None

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown game variant {self.variant!r}")
        if self.nodes < 1 or self.rounds < 0:
            raise ValueError("budgets must be positive")
        if self.variant in ("H", "BoldH"):
            if self.lam not in self.labels:
                object.__setattr__(self, "labels", (self.lam,) + tuple(self.labels))

    @property
    def arity(self) -> int:
        s = self.structure
        return s.dimension if isinstance(s, CaAtomStructure) else 2

    @property
    def hyper_length(self) -> int:
        if self.max_hyperedge_length is not None:
            return self.max_hyperedge_length
        return self.arity + 1

    def describe(self) -> dict:
        d = {"variant": self.variant, "nodes": self.nodes, "rounds": self.rounds}
        if self.variant in ("H", "BoldH"):
            d["labels"] = [str(x) for x in self.labels]
            d["lambda"] = str(self.lam)
            d["max_hyperedge_length"] = self.hyper_length
        return d


@dataclass(frozen=True)
class AtomMove:
    atom: int

    def to_json(self, s) -> dict:
        return {"type": "atom", "atom": str(s.atoms[self.atom])}


@dataclass(frozen=True)
class CylMove:
    """Cylindrifier demand: a witness for ``atom`` at ``tuple[i/z]``.

    ``reuse`` names the node to overwrite (BoldG on a full board).
    ``source`` indexes the played hypernetwork (H variants).
    """

    tuple: tuple
    i: int
    atom: int
    reuse: int | None = None
    source: int = 0

    def to_json(self, s) -> dict:
        d = {"type": "cylindrifier", "tuple": list(self.tuple), "index": self.i, "atom": str(s.atoms[self.atom])}
        if self.reuse is not None:
            d["reuse"] = self.reuse
        if self.source:
            d["source"] = self.source
        return d


@dataclass(frozen=True)
class TriangleMove:
    """Relation-algebra demand: a node z with N(x,z)=a and N(z,y)=b."""

    x: int
    y: int
    a: int
    b: int
    reuse: int | None = None
    source: int = 0

    def to_json(self, s) -> dict:
        d = {"type": "triangle", "edge": [self.x, self.y], "atoms": [str(s.atoms[self.a]), str(s.atoms[self.b])]}
        if self.reuse is not None:
            d["reuse"] = self.reuse
        if self.source:
            d["source"] = self.source
        return d


@dataclass(frozen=True)
class TransformMove:
    source: int
    theta: tuple  # sorted (new node, old node) pairs

    def to_json(self, s) -> dict:
        return {"type": "transformation", "source": self.source, "theta": [list(p) for p in self.theta]}


@dataclass(frozen=True)
class AmalgamationMove:
    left: int
    right: int

    def to_json(self, s) -> dict:
        return {"type": "amalgamation", "pair": [self.left, self.right]}


Move = Union[AtomMove, CylMove, TriangleMove, TransformMove, AmalgamationMove]


def move_sort_key(m: Move) -> tuple:
    if isinstance(m, AtomMove):
        return (0, m.atom)
    if isinstance(m, (CylMove, TriangleMove)):
        body = (m.tuple, m.i, m.atom) if isinstance(m, CylMove) else ((m.x, m.y), 0, (m.a, m.b))
        return (1, m.source, -1 if m.reuse is None else m.reuse) + body
    if isinstance(m, TransformMove):
        return (2, m.source, m.theta)
    return (3, m.left, m.right)


@dataclass
class Verdict:
    outcome: str
    depth: int | None = None
    certificate: dict | None = None
    exists_table: dict | None = None
    stats: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def report(self, spec: GameSpec | None = None) -> dict:
        out: dict[str, Any] = {"outcome": self.outcome, "depth": self.depth}
        if spec is not None:
            out["game"] = spec.describe()
        if self.certificate is not None:
            out["certificate_digest"] = certificate_digest(self.certificate)
            out["certificate_size"] = _tree_size(self.certificate)
        out["stats"] = dict(sorted(self.stats.items()))
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _tree_size(node: dict) -> int:
    return 1 + sum(_tree_size(r["next"]) for r in node.get("responses", []) if r.get("next"))


def certificate_digest(cert: dict) -> str:
    blob = json.dumps(cert, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class BudgetExhausted(Exception):
    pass


# ---------------------------------------------------------------------------
# Network games G and BoldG
# ---------------------------------------------------------------------------


def _dedupe(items: Iterable, key: Callable[[Any], Hashable]) -> list:
    seen: set = set()
    out = []
    for x in items:
        k = key(x)
        if k not in seen:
            seen.add(k)
            out.append(x)
    return out


class NetworkGame:
    """Move generation and responses for G(m,k) and BoldG(m) on one board."""

    def __init__(self, spec: GameSpec) -> None:
        if spec.variant not in ("G", "BoldG"):
            raise ValueError("NetworkGame handles G and BoldG")
        self.spec = spec
        self.s = spec.structure
        self.ra = isinstance(self.s, RaAtomStructure)
        if not self.ra:
            self.s.require_classes()
        self.m = spec.nodes
        self.bold = spec.variant == "BoldG"
        self._resp_cache: dict = {}
        self._lock = threading.Lock()

    # -- keys ---------------------------------------------------------------
    def key(self, pos: Network) -> Hashable:
        return pos.canonical_key()

    # -- opening ------------------------------------------------------------
    def opening_moves(self) -> list[AtomMove]:
        return [AtomMove(a) for a in range(self.s.size)]

    def opening_responses(self, move: AtomMove) -> list[Network]:
        a = move.atom
        s = self.s
        if self.ra:
            nodes = [0] if s.identity_mask >> a & 1 else [0, 1]
            if len(nodes) > self.m:
                return []
            fixed = {(0, 0): a} if len(nodes) == 1 else {(0, 1): a}
            nets = ra_completions(s, nodes, {}, fixed)
        else:
            n = s.dimension
            pattern: list[int] = []
            for i in range(n):
                for j in range(i):
                    if s.diag[i][j] >> a & 1:
                        pattern.append(pattern[j])
                        break
                else:
                    pattern.append(len(set(pattern)))
            nodes = sorted(set(pattern))
            if len(nodes) > self.m:
                return []
            nets = ca_completions(s, nodes, {}, {tuple(pattern): a})
        return _dedupe(nets, self.key)

    # -- demands ------------------------------------------------------------
    def _demands(self, N: Network) -> Iterator[tuple[Move, bool]]:
        """Every demand on N with a flag telling whether a witness exists."""
        s = self.s
        nodes = N.nodes
        if self.ra:
            for x, y in product(nodes, repeat=2):
                c = N.labels[(x, y)]
                for a in range(s.size):
                    row = s.table[a]
                    for b in range(s.size):
                        if row[b] >> c & 1:
                            wit = any(N.labels[(x, z)] == a and N.labels[(z, y)] == b for z in nodes)
                            yield TriangleMove(x, y, a, b), wit
            return
        n = s.dimension
        cls = s.class_of
        cm = s.class_masks
        first = nodes[0]
        for i in range(n):
            for rest in product(nodes, repeat=n - 1):
                t = rest[:i] + (first,) + rest[i:]
                mask = cm[i][cls[i][N.labels[t]]]
                present = 0
                for z in nodes:
                    present |= 1 << N.labels[t[:i] + (z,) + t[i + 1 :]]
                for a in iter_bits(mask):
                    yield CylMove(t, i, a), bool(present >> a & 1)

    def _face_nodes(self, mv: Move) -> set[int]:
        if isinstance(mv, TriangleMove):
            return {mv.x, mv.y}
        return {v for j, v in enumerate(mv.tuple) if j != mv.i}

    def legal_moves(self, N: Network) -> list[Move]:
        """Complete move list, including demands that already have witnesses."""
        out: list[Move] = []
        full = len(N.nodes) >= self.m
        for mv, _wit in self._demands(N):
            if self.bold and full:
                for k in N.nodes:
                    if k not in self._face_nodes(mv):
                        out.append(_with_reuse(mv, k))
            else:
                out.append(mv)
        out.sort(key=move_sort_key)
        return out

    def search_moves(self, N: Network) -> list[Move]:
        """Moves worth searching: witnessed demands on fresh nodes are skipped."""
        out: list[Move] = []
        full = len(N.nodes) >= self.m
        for mv, wit in self._demands(N):
            if self.bold and full:
                for k in N.nodes:
                    if k not in self._face_nodes(mv):
                        out.append(_with_reuse(mv, k))
            elif not wit:
                out.append(mv)
        out.sort(key=move_sort_key)
        return out

    def is_legal(self, N: Network, mv: Move) -> bool:
        """Membership in ``legal_moves`` without building the whole list."""
        s = self.s
        if isinstance(mv, TriangleMove):
            if not {mv.x, mv.y} <= set(N.nodes) or not (0 <= mv.a < s.size and 0 <= mv.b < s.size):
                return False
            ok = bool(s.table[mv.a][mv.b] >> N.labels[(mv.x, mv.y)] & 1)
        elif isinstance(mv, CylMove):
            t = mv.tuple
            if self.ra or len(t) != s.dimension or not set(t) <= set(N.nodes) or not 0 <= mv.i < len(t):
                return False
            if t[mv.i] != N.nodes[0] or not 0 <= mv.atom < s.size:
                return False
            ok = s.class_of[mv.i][N.labels[t]] == s.class_of[mv.i][mv.atom]
        else:
            return False
        if not ok or mv.source:
            return False
        full = len(N.nodes) >= self.m
        if self.bold and full:
            return mv.reuse is not None and mv.reuse in N.nodes and mv.reuse not in self._face_nodes(mv)
        return mv.reuse is None

    def witnessed(self, N: Network, mv: Move) -> bool:
        if isinstance(mv, TriangleMove):
            return any(N.labels[(mv.x, z)] == mv.a and N.labels[(z, mv.y)] == mv.b for z in N.nodes)
        t, i = mv.tuple, mv.i
        return any(N.labels[t[:i] + (z,) + t[i + 1 :]] == mv.atom for z in N.nodes)

    def responses(self, N: Network | None, mv: Move) -> list[Network]:
        ck = (None if N is None else N.exact_key(), mv)
        hit = self._resp_cache.get(ck)
        if hit is not None:
            return hit
        res = self._responses(N, mv)
        with self._lock:
            if len(self._resp_cache) < 300_000:
                self._resp_cache[ck] = res
        return res

    def _responses(self, N: Network, mv: Move) -> list[Network]:
        if isinstance(mv, AtomMove):
            return self.opening_responses(mv)
        if mv.reuse is None and self.witnessed(N, mv):
            return [N]
        if mv.reuse is not None:
            base = N.delete_node(mv.reuse)
            z = mv.reuse
        else:
            if len(N.nodes) >= self.m:
                return []
            z = next(v for v in range(self.m) if v not in N.nodes)
            base = N
        nodes = list(base.nodes) + [z]
        if isinstance(mv, TriangleMove):
            fixed = {(mv.x, z): mv.a, (z, mv.y): mv.b}
            nets = ra_completions(self.s, nodes, base.labels, fixed)
        else:
            t = mv.tuple[: mv.i] + (z,) + mv.tuple[mv.i + 1 :]
            nets = ca_completions(self.s, nodes, base.labels, {t: mv.atom})
        return _dedupe(nets, self.key)

    def network_json(self, N: Network) -> dict:
        return network_to_json(N)


def _with_reuse(mv: Move, k: int) -> Move:
    if isinstance(mv, TriangleMove):
        return TriangleMove(mv.x, mv.y, mv.a, mv.b, reuse=k, source=mv.source)
    assert isinstance(mv, CylMove)
    return CylMove(mv.tuple, mv.i, mv.atom, reuse=k, source=mv.source)


def network_to_json(N: Union[Network, Hypernetwork]) -> dict:
    if isinstance(N, Hypernetwork):
        d = network_to_json(N.core)
        d["hyperedges"] = [[list(t), str(lab)] for t, lab in sorted(N.hyper.items(), key=lambda kv: kv[0])]
        return d
    s = N.structure
    return {
        "nodes": list(N.nodes),
        "labels": [[list(t), str(s.atoms[a])] for t, a in sorted(N.labels.items())],
    }


# ---------------------------------------------------------------------------
# Hypernetwork games H and BoldH
# ---------------------------------------------------------------------------

HPosition = tuple  # sorted tuple of Hypernetworks


class HyperGame:
    """H and BoldH: cylindrifier, transformation and amalgamation moves.

    The position is the set of played hypernetworks.  Node names matter,
    so positions are compared by exact keys.  Hyperedges longer than the
    configured bound are not tracked.
    """

    def __init__(self, spec: GameSpec) -> None:
        if spec.variant not in ("H", "BoldH"):
            raise ValueError("HyperGame handles H and BoldH")
        self.spec = spec
        self.s = spec.structure
        self.ra = isinstance(self.s, RaAtomStructure)
        self.m = spec.nodes
        self.bold = spec.variant == "BoldH"
        self.base = NetworkGame(GameSpec("BoldG" if self.bold else "G", self.s, spec.nodes, spec.rounds))
        self.L = spec.hyper_length
        self._lock = threading.Lock()

    def key(self, pos: HPosition) -> Hashable:
        return tuple(h.exact_key() for h in pos)

    @staticmethod
    def position(hs: Iterable[Hypernetwork]) -> HPosition:
        uniq = {h.exact_key(): h for h in hs}
        return tuple(uniq[k] for k in sorted(uniq))

    def opening_moves(self) -> list[AtomMove]:
        return self.base.opening_moves()

    def opening_responses(self, move: AtomMove) -> list[HPosition]:
        out = []
        for net in self.base.opening_responses(move):
            for h in self._label_new(net, {}, set()):
                out.append(self.position([h]))
        return _dedupe(out, self.key)

    def _long_reps(self, core: Network) -> list[tuple]:
        probe = Hypernetwork(core, {}, self.spec.lam)
        reps = []
        for k in range(core.arity + 1, self.L + 1):
            for t in product(core.nodes, repeat=k):
                if classify_hyperedge(probe, t) == LONG and tuple(probe._rep[x] for x in t) == t:
                    reps.append(t)
        return reps

    def _label_new(self, core: Network, known: dict, old_nodes_sets: set) -> Iterator[Hypernetwork]:
        """All λ-neat labellings that keep ``known`` and label the remaining long hyperedges."""
        free = [t for t in self._long_reps(core) if t not in known]
        for choice in product(self.spec.labels, repeat=len(free)):
            hyp = dict(known)
            hyp.update(zip(free, choice))
            yield Hypernetwork(core, hyp, self.spec.lam)

    def legal_moves(self, pos: HPosition) -> list[Move]:
        moves: list[Move] = []
        for src, h in enumerate(pos):
            for mv in self.base.legal_moves(h.core):
                moves.append(_with_source(mv, src))
        moves.extend(self._transformations(pos))
        moves.extend(self._amalgamations(pos))
        return moves

    def search_moves(self, pos: HPosition) -> list[Move]:
        moves: list[Move] = []
        for src, h in enumerate(pos):
            for mv in self.base.search_moves(h.core):
                moves.append(_with_source(mv, src))
        moves.extend(self._transformations(pos))
        moves.extend(self._amalgamations(pos))
        return moves

    def _transformations(self, pos: HPosition) -> list[TransformMove]:
        out = []
        universe = range(self.m)
        for src, h in enumerate(pos):
            nodes = h.nodes
            for size in range(1, self.m + 1):
                for dom in _subsets(universe, size):
                    for img in product(nodes, repeat=size):
                        if set(img) != set(nodes):
                            continue
                        theta = tuple(zip(dom, img))
                        if all(a == b for a, b in theta) and len(dom) == len(nodes):
                            continue  # identity map reproduces h
                        out.append(TransformMove(src, theta))
        return out

    def _amalgamations(self, pos: HPosition) -> list[AmalgamationMove]:
        out = []
        for i, M in enumerate(pos):
            for j, N in enumerate(pos):
                if j <= i:
                    continue
                common = set(M.nodes) & set(N.nodes)
                if not common or set(M.nodes) <= set(N.nodes) or set(N.nodes) <= set(M.nodes):
                    continue
                if M.restrict(common).exact_key() == N.restrict(common).exact_key():
                    out.append(AmalgamationMove(i, j))
        return out

    def responses(self, pos: HPosition, mv: Move) -> list[HPosition]:
        if isinstance(mv, AtomMove):
            return self.opening_responses(mv)
        if isinstance(mv, TransformMove):
            h = pos[mv.source]
            return [self.position(list(pos) + [apply_map(h, dict(mv.theta))])]
        if isinstance(mv, AmalgamationMove):
            M, N = pos[mv.left], pos[mv.right]
            nodes = sorted(set(M.nodes) | set(N.nodes))
            known = dict(M.core.labels)
            known.update(N.core.labels)
            if self.ra:
                cores = ra_completions(self.s, nodes, known, diversity=False)
            else:
                cores = ca_completions(self.s, nodes, known)
            hyp = dict(M.hyper)
            hyp.update(N.hyper)
            out = []
            for core in cores:
                for L in self._label_new(core, hyp, set()):
                    out.append(self.position(list(pos) + [L]))
            return _dedupe(out, self.key)
        h = pos[mv.source]
        plain = _with_source(mv, 0)
        tries = [plain]
        if mv.reuse is None and len(h.nodes) >= self.m and not self.base.witnessed(h.core, plain):
            # a node sharing its class with another carries nothing of its own
            face = self.base._face_nodes(plain)
            tries = [_with_reuse(plain, z) for z in h.nodes
                     if z not in face and any(h._rep[w] == h._rep[z] for w in h.nodes if w != z)]
        out = []
        for tm in tries:
            for core in self.base.responses(h.core, tm):
                if core is h.core:
                    out.append(pos)
                    continue
                keep = set(core.nodes)
                if tm.reuse is not None:
                    keep.discard(tm.reuse)
                known = {t: lab for t, lab in h.hyper.items() if all(x in keep for x in t)}
                for L in self._label_new(core, known, set()):
                    out.append(self.position(list(pos) + [L]))
        return _dedupe(out, self.key)


def _with_source(mv: Move, src: int) -> Move:
    if isinstance(mv, TriangleMove):
        return TriangleMove(mv.x, mv.y, mv.a, mv.b, reuse=mv.reuse, source=src)
    if isinstance(mv, CylMove):
        return CylMove(mv.tuple, mv.i, mv.atom, reuse=mv.reuse, source=src)
    return mv


def _subsets(universe: Iterable[int], size: int) -> Iterator[tuple[int, ...]]:
    from itertools import combinations

    return combinations(list(universe), size)


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

Engine = Union[NetworkGame, HyperGame]
Hint = Callable[[Engine, Any], Sequence[Move]]


def make_engine(spec: GameSpec) -> Engine:
    return NetworkGame(spec) if spec.variant in ("G", "BoldG") else HyperGame(spec)


class Solver:
    """Exact minimax with a transposition table.

    A table entry stores the largest remaining-move count known to be an ∃
    win and the smallest known to be a ∀ win; both are sound by
    monotonicity in the number of remaining moves.
    """

    def __init__(self, spec: GameSpec, *, hint: Hint | None = None, budget: int | None = None, threads: int = 1) -> None:
        self.spec = spec
        self.engine = make_engine(spec)
        self.hint = hint
        self.budget = budget
        self.threads = max(1, threads)
        self.memo: dict[Hashable, list[int]] = {}
        self.evaluated = 0
        self._lock = threading.Lock()

    def _tick(self) -> None:
        with self._lock:
            self.evaluated += 1
            if self.budget is not None and self.evaluated > self.budget:
                raise BudgetExhausted

    def ordered_moves(self, pos) -> Iterator[Move]:
        """Hint moves first, then the remaining search moves in static order."""
        eng = self.engine
        head: list[Move] = []
        if self.hint is not None:
            if isinstance(eng, NetworkGame):
                for mv in self.hint(eng, pos):
                    if mv not in head and eng.is_legal(pos, mv) and (mv.reuse is not None or not eng.witnessed(pos, mv)):
                        head.append(mv)
            else:
                legal = set(eng.search_moves(pos))
                head = [mv for mv in dict.fromkeys(self.hint(eng, pos)) if mv in legal]
        yield from head
        seen = set(head)
        for mv in eng.search_moves(pos):
            if mv not in seen:
                yield mv

    def ordered_openings(self) -> list[AtomMove]:
        moves = self.engine.opening_moves()
        if self.hint is None:
            return moves
        pref = [mv for mv in self.hint(self.engine, None) if isinstance(mv, AtomMove)]
        return pref + [mv for mv in moves if mv not in set(pref)]

    def forall_wins(self, pos, d: int) -> bool:
        """Does ∀ win from ``pos`` with ``d`` moves left for him?"""
        if d <= 0:
            return False
        key = self.engine.key(pos)
        entry = self.memo.get(key)
        if entry is not None:
            if d <= entry[0]:
                return False
            if d >= entry[1]:
                return True
        self._tick()
        won = False
        for mv in self.ordered_moves(pos):
            if all(self.forall_wins(r, d - 1) for r in self.engine.responses(pos, mv)):
                won = True
                break
        with self._lock:
            entry = self.memo.setdefault(key, [0, 1 << 30])
            if won:
                entry[1] = min(entry[1], d)
            else:
                entry[0] = max(entry[0], d)
        return won

    def opening_wins(self, mv: AtomMove, d: int) -> bool:
        return all(self.forall_wins(r, d) for r in self.engine.responses(None, mv))

    def root_wins(self, k: int) -> AtomMove | None:
        """First opening move (in order) that wins a k-round game, if any."""
        if k <= 0:
            return None
        moves = self.ordered_openings()
        if self.threads == 1:
            for mv in moves:
                if self.opening_wins(mv, k - 1):
                    return mv
            return None
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for start in range(0, len(moves), self.threads):
                chunk = moves[start : start + self.threads]
                results = list(pool.map(lambda mv: self.opening_wins(mv, k - 1), chunk))
                for mv, ok in zip(chunk, results):
                    if ok:
                        return mv
        return None

    # -- certificates ---------------------------------------------------------
    def certificate(self, pos, d: int) -> dict:
        s = self.spec.structure
        for mv in self.ordered_moves(pos):
            rs = self.engine.responses(pos, mv)
            if all(self.forall_wins(r, d - 1) for r in rs):
                kids = []
                for r in rs:
                    kids.append({"position": _pos_json(r), "next": self.certificate(r, d - 1)})
                return {"move": mv.to_json(s), "responses": kids}
        raise AssertionError("position is not a ∀ win")

    def root_certificate(self, mv: AtomMove, d: int) -> dict:
        s = self.spec.structure
        kids = []
        for r in self.engine.responses(None, mv):
            kids.append({"position": _pos_json(r), "next": self.certificate(r, d)})
        return {"move": mv.to_json(s), "responses": kids}

    def exists_table(self, pos, d: int, table: dict) -> None:
        """Record one surviving ∃ response for every ∀ move, recursively."""
        if d <= 0:
            return
        key = json.dumps(_pos_json(pos), sort_keys=True)
        if key in table:
            return
        entry: dict = {}
        table[key] = entry
        s = self.spec.structure
        for mv in self.ordered_moves(pos):
            for idx, r in enumerate(self.engine.responses(pos, mv)):
                if not self.forall_wins(r, d - 1):
                    entry[json.dumps(mv.to_json(s), sort_keys=True)] = idx
                    self.exists_table(r, d - 1, table)
                    break


def _pos_json(pos) -> Any:
    if isinstance(pos, tuple):
        return [network_to_json(h) for h in pos]
    return network_to_json(pos)


def solve(
    spec: GameSpec,
    *,
    hint: Hint | None = None,
    budget: int | None = None,
    threads: int = 1,
    iterative: bool | None = None,
    certificate: bool = True,
    exists_table: bool = False,
    solver: Solver | None = None,
) -> Verdict:
    """Solve a finite game exactly, or report Unknown when the budget runs out."""
    sv = solver or Solver(spec, hint=hint, budget=budget, threads=threads)
    k = spec.rounds
    if iterative is None:
        iterative = hint is None
    try:
        depths = range(1, k + 1) if iterative else [k]
        for kk in depths:
            mv = sv.root_wins(kk)
            if mv is not None:
                v = Verdict(FORALL, depth=kk)
                if certificate:
                    v.certificate = sv.root_certificate(mv, kk - 1)
                break
        else:
            v = Verdict(EXISTS, depth=k)
            if exists_table and k > 0:
                table: dict = {}
                for mv in sv.engine.opening_moves():
                    for r in sv.engine.responses(None, mv):
                        if not sv.forall_wins(r, k - 1):
                            sv.exists_table(r, k - 1, table)
                            break
                v.exists_table = table
    except BudgetExhausted:
        v = Verdict(UNKNOWN, notes=[f"position budget {budget} exhausted"])
    v.stats = {"positions": sv.evaluated, "table_entries": len(sv.memo)}
    return v


def legal_forall_moves(spec: GameSpec, position=None) -> list[Move]:
    """Complete list of ∀'s moves; ``None`` stands for the opening round."""
    eng = make_engine(spec)
    if position is None:
        return list(eng.opening_moves())
    if isinstance(eng, HyperGame) and isinstance(position, Hypernetwork):
        position = eng.position([position])
    return eng.legal_moves(position)


def exists_responses(spec: GameSpec, position, move: Move) -> list:
    eng = make_engine(spec)
    if isinstance(eng, HyperGame) and isinstance(position, Hypernetwork):
        position = eng.position([position])
    return eng.responses(position, move)


# ---------------------------------------------------------------------------
# Certificate replay
# ---------------------------------------------------------------------------


_ATOM_NAMES: dict[int, tuple[Any, dict[str, int]]] = {}


def atom_by_name(s, name: str) -> int:
    hit = _ATOM_NAMES.get(id(s))
    if hit is None or hit[0] is not s:
        hit = (s, {str(a): k for k, a in enumerate(s.atoms)})
        _ATOM_NAMES[id(s)] = hit
    return hit[1][name]


def move_from_json(s, d: dict) -> Move:
    """Inverse of ``Move.to_json``."""
    kind = d["type"]
    if kind == "atom":
        return AtomMove(atom_by_name(s, d["atom"]))
    if kind == "cylindrifier":
        return CylMove(tuple(d["tuple"]), d["index"], atom_by_name(s, d["atom"]), d.get("reuse"), d.get("source", 0))
    if kind == "triangle":
        x, y = d["edge"]
        a, b = (atom_by_name(s, n) for n in d["atoms"])
        return TriangleMove(x, y, a, b, d.get("reuse"), d.get("source", 0))
    if kind == "transformation":
        return TransformMove(d["source"], tuple(tuple(p) for p in d["theta"]))
    if kind == "amalgamation":
        return AmalgamationMove(*d["pair"])
    raise ValueError(f"unknown move type {kind!r}")


@dataclass
class ReplayReport:
    ok: bool
    leaves: int = 0
    max_depth: int = 0
    problems: list[str] = field(default_factory=list)


def replay_certificate(spec: GameSpec, cert: dict) -> ReplayReport:
    """Re-run every branch of a ∀ strategy tree against the move engine.

    Each node's move must be legal, the listed responses must be exactly
    ∃'s responses, and every branch must end with ∃ unable to respond
    within the round budget.
    """
    eng = make_engine(spec)
    s = spec.structure
    rep = ReplayReport(ok=True)

    def walk(pos, node: dict, depth: int) -> None:
        if depth > spec.rounds:
            rep.ok = False
            rep.problems.append("certificate exceeds the round budget")
            return
        key = json.dumps(node["move"], sort_keys=True)
        try:
            mv = move_from_json(s, node["move"])
        except (KeyError, ValueError, TypeError):
            mv = None
        if mv is not None:
            if pos is None:
                legal = isinstance(mv, AtomMove)
            elif isinstance(eng, NetworkGame):
                legal = eng.is_legal(pos, mv)
            else:
                legal = mv in set(eng.legal_moves(pos))
            if not legal:
                mv = None
        if mv is None:
            rep.ok = False
            rep.problems.append(f"illegal move at depth {depth}: {key}")
            return
        rs = eng.responses(pos, mv)
        listed = [json.dumps(r["position"], sort_keys=True) for r in node["responses"]]
        actual = [json.dumps(_pos_json(r), sort_keys=True) for r in rs]
        if listed != actual:
            rep.ok = False
            rep.problems.append(f"responses differ at depth {depth}")
            return
        if not rs:
            rep.leaves += 1
            rep.max_depth = max(rep.max_depth, depth)
        for r, child in zip(rs, node["responses"]):
            walk(r, child["next"], depth + 1)

    walk(None, cert, 1)
    return rep


# ---------------------------------------------------------------------------
# Lyndon-style battery
# ---------------------------------------------------------------------------


def lyndon_battery(structure, max_k: int, max_nodes: int, *, budget: int | None = None, threads: int = 1) -> dict[int, Verdict]:
    """Verdicts of G(max_nodes, k) for k = 1..max_k sharing one table."""
    table: dict[int, Verdict] = {}
    spec = GameSpec("G", structure, max_nodes, max_k)
    sv = Solver(spec, budget=budget, threads=threads)
    lost_at = None
    for k in range(1, max_k + 1):
        if lost_at is not None:
            table[k] = Verdict(FORALL, depth=lost_at, notes=[f"monotone from k={lost_at}"])
            continue
        try:
            mv = sv.root_wins(k)
        except BudgetExhausted:
            table[k] = Verdict(UNKNOWN, notes=["budget exhausted"])
            continue
        if mv is None:
            table[k] = Verdict(EXISTS, depth=k)
        else:
            table[k] = Verdict(FORALL, depth=k)
            lost_at = k
    for v in table.values():
        v.stats = {"positions": sv.evaluated, "table_entries": len(sv.memo)}
    return table


def sort_moves(moves: Iterable[Move]) -> list[Move]:
    return sorted(moves, key=move_sort_key)


__all__ = [
    "EXISTS",
    "FORALL",
    "UNKNOWN",
    "AmalgamationMove",
    "AtomMove",
    "CylMove",
    "GameSpec",
    "HyperGame",
    "NetworkGame",
    "ReplayReport",
    "Solver",
    "TransformMove",
    "TriangleMove",
    "Verdict",
    "certificate_digest",
    "exists_responses",
    "legal_forall_moves",
    "lyndon_battery",
    "replay_certificate",
    "solve",
    "sort_key",
]
