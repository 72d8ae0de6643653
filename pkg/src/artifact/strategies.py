"""Scripted players for rainbow games and for pebble games on split algebras.

The rainbow scripts work on coloured graphs.  ``RainbowBoard`` fixes the
finite parameters (dimension 3, green tints, red index pool, yellow
shades); ``exists_rainbow_move`` is ∃'s script and
``ForallConeStrategy`` is ∀'s cone bombardment.  The cone strategy also
drives the network games of ``games`` on ``rainbow_finite`` structures.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Hashable, Iterator, Sequence

from .algebra_core import Atom, CaAtomStructure, RaAtomStructure
from .canonical import canonical_form
from .games import (
    EXISTS,
    FORALL,
    AtomMove,
    CylMove,
    GameSpec,
    Verdict,
    make_engine,
    _pos_json,
)
from .networks import AtomicNetwork
from .rainbow_rules import (
    ColouredGraph,
    Colour,
    cones,
    graph_payload,
    graph_problems,
    is_green,
    needs_yellow,
    payload_graph,
    reverse,
    triangle_ok,
)


class NoRedAvailable(Exception):
    """The red index pool cannot host the spacing the script needs."""


class ScriptFailure(Exception):
    """The scripted response would be inconsistent."""


class NoMatch(Exception):
    """No partner element satisfies the partition constraints."""


# ---------------------------------------------------------------------------
# ρ bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RhoBook:
    """Order-preserving map from green tints to red indices.

    Values are kept at least 3^(k-r) apart at round r; new values go to
    the floor midpoint of the admissible interval.  An interval open on one
    side stops short of the pool end by the spacing later rounds may need.
    """

    rho: tuple[tuple[int, int], ...] = ()
    rounds: int = 3
    pool: int = 27

    def as_dict(self) -> dict[int, int]:
        return dict(self.rho)

    def gap(self, r: int) -> int:
        return 3 ** max(self.rounds - r, 0)

    def reserve(self, r: int) -> int:
        """Room an open end must keep for insertions in later rounds."""
        return sum(self.gap(j) for j in range(r + 1, self.rounds))

    def interval(self, values: Sequence[int], r: int, below: int | None, above: int | None) -> tuple[int, int]:
        gap = self.gap(r)
        lo = below + gap if below is not None else self.reserve(r)
        hi = above - gap if above is not None else self.pool - 1 - self.reserve(r)
        return lo, hi

    def extend(self, tint: int, r: int) -> "RhoBook":
        d = self.as_dict()
        if tint in d:
            return self
        below = [d[t] for t in d if t < tint]
        above = [d[t] for t in d if t > tint]
        lo, hi = self.interval(list(d.values()), r, max(below) if below else None, min(above) if above else None)
        if lo > hi:
            raise NoRedAvailable(f"no index for tint {tint} between {lo} and {hi}")
        d[tint] = (lo + hi) // 2
        return RhoBook(tuple(sorted(d.items())), self.rounds, self.pool)

    def check(self, r: int) -> list[str]:
        """Violations of strict monotonicity or spacing at round r."""
        items = sorted(self.rho)
        bad = []
        for (t1, v1), (t2, v2) in zip(items, items[1:]):
            if v2 - v1 < self.gap(r):
                bad.append(f"tints {t1}<{t2} have indices {v1},{v2} closer than {self.gap(r)}")
        for _, v in items:
            if not 0 <= v < self.pool:
                bad.append(f"index {v} outside the pool")
        return bad

    def reachable(self, r: int) -> set[int]:
        """Every index the script could assign from round r on."""
        out: set[int] = set()

        def go(book: RhoBook, rr: int) -> None:
            if rr >= self.rounds:
                return
            d = book.as_dict()
            vals = sorted(d.values())
            for slot in range(len(vals) + 1):
                lo, hi = book.interval(vals, rr, vals[slot - 1] if slot else None, vals[slot] if slot < len(vals) else None)
                if lo <= hi:
                    v = (lo + hi) // 2
                    out.add(v)
                    # a fake tint keeps the ordering; only the values matter here
                    nd = dict(d)
                    nd[(-1, rr, slot)] = v  # type: ignore[index]
                    go(RhoBook(tuple(sorted(nd.items(), key=lambda kv: kv[1])), book.rounds, book.pool), rr + 1)

        go(self, r)
        return out


# ---------------------------------------------------------------------------
# Rainbow board
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RainbowBoard:
    """Finite rainbow board of dimension 3.

    ``shades`` lists the yellow shades; ``None`` means every subset of
    the tints.  ``forall_indices`` are the red indices ∀'s own red edges
    use, one per node, kept away from everything ∃ can assign.
    """

    tints: tuple[int, ...] = (1, 2, 3)
    red_pool: int = 27
    rounds: int = 3
    shades: tuple | None = None

    n = 3

    @property
    def shade_set(self) -> tuple:
        if self.shades is not None:
            return tuple(self.shades)
        out = []
        for k in range(len(self.tints) + 1):
            out.extend(combinations(self.tints, k))
        return tuple(out)

    @property
    def full(self) -> tuple:
        return tuple(self.tints)

    def rules(self):
        from .rainbow_rules import RainbowRules

        return RainbowRules(3, self.tints, tuple(range(self.red_pool)), self.shade_set)

    def forall_indices(self, count: int) -> list[int]:
        taken = RhoBook((), self.rounds, self.red_pool).reachable(0)
        free = [v for v in range(self.red_pool) if v not in taken]
        if len(free) < count:
            raise NoRedAvailable("red pool too small for the adversary's private indices")
        return free[:count]


@dataclass(frozen=True)
class GraphDemand:
    """New node δ with given colours (δ → face node) and yellows on {δ, face node}."""

    face: tuple[int, ...]
    colours: tuple[Colour, ...]
    yellows: tuple  # shade per face node, () for green edges

    def atom_graph(self, g: ColouredGraph, delta: int) -> ColouredGraph:
        nodes = list(self.face) + [delta]
        h = ColouredGraph(nodes)
        for x, y in combinations(self.face, 2):
            h.set_edge(x, y, g.edges[(x, y)])
            key = frozenset((x, y))
            if key in g.yellows:
                h.yellows[key] = g.yellows[key]
        for u, c, sh in zip(self.face, self.colours, self.yellows):
            h.set_edge(delta, u, c)
            if not is_green(c):
                h.yellows[frozenset((u, delta))] = sh
        return h


def _witness(g: ColouredGraph, d: GraphDemand) -> int | None:
    for y in g.nodes:
        if y in d.face:
            continue
        if all(g.edges[(y, u)] == c for u, c in zip(d.face, d.colours)) and all(
            is_green(c) or g.yellows.get(frozenset((u, y))) == sh for u, c, sh in zip(d.face, d.colours, d.yellows)
        ):
            return y
    return None


def _cone_tints(g: ColouredGraph, pair: Sequence[int]) -> tuple[int, ...]:
    a, b = pair
    ts = set()
    for base, _z, t in cones(g, 3):
        if set(base) == {a, b}:
            ts.add(t)
    return tuple(sorted(ts))


def _cone_tint_set(g: ColouredGraph) -> set[int]:
    return {t for _b, _z, t in cones(g, 3)}


def exists_rainbow_move(board: RainbowBoard, g: ColouredGraph, demand: GraphDemand, book: RhoBook, r: int
                        ) -> tuple[ColouredGraph, RhoBook]:
    """∃'s scripted answer in round r (r >= 1).

    A demand with a witness leaves the graph unchanged.  Otherwise δ is the
    least unused node.  Two apexes of cones on the same base with tints p
    and q are joined by r_{ρ(p),ρ(q)}; every other new edge gets the first
    white that creates no forbidden triangle.  Each new non-green pair gets
    the yellow whose tints are exactly the cones on that pair.
    """
    if _witness(g, demand) is not None:
        return g, book
    delta = max(g.nodes, default=-1) + 1
    h = g.copy()
    h.nodes.append(delta)
    for u, c, sh in zip(demand.face, demand.colours, demand.yellows):
        h.set_edge(delta, u, c)
        if not is_green(c):
            h.yellows[frozenset((u, delta))] = sh
    my_cone = _apex_base(demand)
    if my_cone is not None:
        book = book.extend(my_cone[1], r)
    rho = book.as_dict()
    for y in g.nodes:
        if y in demand.face:
            continue
        colour = None
        if my_cone is not None:
            (b0, b1), q = my_cone
            c0, c1 = g.edges[(y, b0)], g.edges[(y, b1)]
            if c0[0] == "g0" and c1 == ("g", 1):
                p = c0[1]
                if p == q:
                    raise ScriptFailure(f"apexes {y} and {delta} share tint {q} on base {(b0, b1)}")
                colour = ("r", rho[p], rho[q])
        if colour is None:
            for j in range(board.n - 1):
                w = ("w", j)
                if all(
                    triangle_ok(h.edges[(y, x)], h.edges[(x, delta)], w)
                    for x in h.nodes
                    if x not in (y, delta) and (x, delta) in h.edges
                ):
                    colour = w
                    break
        if colour is None:
            raise ScriptFailure(f"no colour for edge {y}-{delta}")
        h.set_edge(y, delta, colour)
    cs = list(cones(h, 3))
    for y in g.nodes:
        if y not in demand.face and not is_green(h.edges[(y, delta)]):
            pair = {y, delta}
            h.yellows[frozenset(pair)] = tuple(sorted({t for b, _z, t in cs if set(b) == pair}))
    for t in sorted({t for _b, _z, t in cs} - set(book.as_dict())):
        book = book.extend(t, r)
    probs = _local_problems(h, delta, board, cs)
    if probs:
        raise ScriptFailure("; ".join(probs))
    bad = book.check(r)
    if bad:
        raise ScriptFailure("; ".join(bad))
    return h, book


def _apex_base(d: GraphDemand) -> tuple[tuple[int, int], int] | None:
    """Base and tint of the cone whose apex is the demanded node, if any."""
    if len(d.face) != 2:
        return None
    (u, v), (cu, cv) = d.face, d.colours
    if cu[0] == "g0" and cv == ("g", 1):
        return (u, v), cu[1]
    if cv[0] == "g0" and cu == ("g", 1):
        return (v, u), cv[1]
    return None


def _local_problems(h: ColouredGraph, delta: int, board: RainbowBoard, cs: list | None = None) -> list[str]:
    """Rule violations that involve the node ``delta``."""
    out = []
    others = [x for x in h.nodes if x != delta]
    for x, y in combinations(others, 2):
        if not (
            triangle_ok(h.edges[(x, y)], h.edges[(y, delta)], h.edges[(x, delta)])
        ):
            out.append(f"forbidden triangle {(x, y, delta)}")
    shades = set(board.shade_set)
    for x in others:
        key = frozenset((x, delta))
        if needs_yellow(h, (x, delta)):
            if h.yellows.get(key) not in shades:
                out.append(f"bad yellow on {(x, delta)}")
    for base, z, t in cones(h, 3) if cs is None else cs:
        if delta in base or z == delta:
            sh = h.yellows.get(frozenset(base))
            if sh is None or t not in sh:
                out.append(f"cone {z} on {base} tint {t} not covered")
    return out


def board_graph_key(g: ColouredGraph, book: RhoBook) -> Hashable:
    nodes = sorted(g.nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    tuples = {}
    for (x, y), c in g.edges.items():
        sh = g.yellows.get(frozenset((x, y)), (-1,))
        tuples[(pos[x], pos[y])] = (c, sh)
    return (book.rho, canonical_form(len(nodes), [0] * len(nodes), tuples))


class ForallConeStrategy:
    """∀ opens with a cone and then demands new cones on the same base.

    Each demand uses the least tint not yet present on the base.  On a
    full BoldG board the first node that is neither on the base nor an
    apex is reused.
    """

    def __init__(self, tints: Sequence[int], full_shade: Sequence[int]) -> None:
        self.tints = tuple(tints)
        self.full = tuple(full_shade)

    @classmethod
    def for_structure(cls, s: CaAtomStructure) -> "ForallConeStrategy":
        rules = getattr(s, "rainbow_rules", None)
        if rules is None:
            raise ValueError("structure was not produced by rainbow_finite")
        return cls(rules.tints, rules.full)

    def opening_graph(self) -> ColouredGraph:
        g = ColouredGraph([0, 1, 2])
        g.set_edge(0, 1, ("w", 0))
        g.set_edge(0, 2, ("g0", self.tints[0]))
        g.set_edge(1, 2, ("g", 1))
        g.yellows[frozenset((0, 1))] = self.full
        return g

    def choose(self, g: ColouredGraph) -> tuple[tuple[int, int], int] | None:
        """Base (g0 end, g1 end) and tint for the next cone, if any."""
        by_base: dict[tuple[int, int], set[int]] = {}
        for base, _z, t in cones(g, 3):
            by_base.setdefault((base[0], base[1]), set()).add(t)
        for base in sorted(by_base, key=lambda b: (-len(by_base[b]), b)):
            sh = g.yellows.get(frozenset(base), ())
            for t in self.tints:
                if t not in by_base[base] and t in sh:
                    return base, t
        return None

    def graph_demand(self, g: ColouredGraph) -> GraphDemand | None:
        pick = self.choose(g)
        if pick is None:
            return None
        (x0, x1), t = pick
        return GraphDemand((x0, x1), (("g0", t), ("g", 1)), ((), ()))

    # -- network games ---------------------------------------------------------
    def opening_move(self, s: CaAtomStructure) -> AtomMove:
        payload = graph_payload((0, 1, 2), self.opening_graph())
        return AtomMove(s.index[Atom("rb", payload)])

    def network_move(self, s: CaAtomStructure, N: AtomicNetwork, m: int, bold: bool) -> CylMove | None:
        g = network_graph(N)
        pick = self.choose(g)
        if pick is None:
            return None
        (x0, x1), t = pick
        h = ColouredGraph([0, 1, 2])
        h.set_edge(0, 1, g.edges[(x0, x1)])
        if frozenset((x0, x1)) in g.yellows:
            h.yellows[frozenset((0, 1))] = g.yellows[frozenset((x0, x1))]
        h.set_edge(0, 2, ("g0", t))
        h.set_edge(1, 2, ("g", 1))
        atom = s.index.get(Atom("rb", graph_payload((0, 1, 2), h)))
        if atom is None:
            return None
        reuse = None
        if len(N.nodes) >= m:
            if not bold:
                return None
            apexes = {z for base, z, _t in cones(g, 3)}
            spare = [v for v in N.nodes if v not in (x0, x1) and v not in apexes]
            if not spare:
                return None
            reuse = spare[0]
        return CylMove((x0, x1, N.nodes[0]), 2, atom, reuse=reuse)

    def hint(self, engine, pos) -> list:
        s = engine.s
        if pos is None:
            return [self.opening_move(s)]
        mv = self.network_move(s, pos, engine.m, engine.bold)
        return [] if mv is None else [mv]


def network_graph(N: AtomicNetwork) -> ColouredGraph:
    """The coloured graph carried by a 3-dimensional rainbow network."""
    g = ColouredGraph(list(N.nodes))
    for x, y in combinations(N.nodes, 2):
        pattern, edges, yellows = N.atom((x, y, y)).index
        g.set_edge(x, y, edges[0][1])
        for _s, sh in yellows:
            g.yellows[frozenset((x, y))] = sh
    return g


def rainbow_forall_hint(s: CaAtomStructure):
    """Move-ordering hint for ``games.solve`` on rainbow structures."""
    return ForallConeStrategy.for_structure(s).hint


def forall_cone_strategy(s: CaAtomStructure) -> ForallConeStrategy:
    return ForallConeStrategy.for_structure(s)


def play_scripted_forall(spec: GameSpec, strategy: ForallConeStrategy) -> Verdict:
    """Scripted ∀ against every ∃ response; ForallWins iff every branch ends in time.

    The certificate has the same shape as the solver's, so it replays.
    """
    eng = make_engine(spec)
    s = spec.structure

    def node(pos, mv, depth: int) -> dict | None:
        rs = eng.responses(pos, mv)
        kids = []
        for r in rs:
            if depth >= spec.rounds:
                return None
            nxt = strategy.network_move(s, r, spec.nodes, spec.variant == "BoldG")
            if nxt is None:
                return None
            sub = node(r, nxt, depth + 1)
            if sub is None:
                return None
            kids.append({"position": _pos_json(r), "next": sub})
        return {"move": mv.to_json(s), "responses": kids}

    cert = node(None, strategy.opening_move(s), 1)
    if cert is None:
        return Verdict(EXISTS, depth=spec.rounds, notes=["scripted ∀ did not force a win"])
    return Verdict(FORALL, depth=_depth(cert), certificate=cert)


def _depth(cert: dict) -> int:
    return 1 + max((_depth(r["next"]) for r in cert["responses"]), default=0)


# ---------------------------------------------------------------------------
# Playouts and the exhaustive adversary on the board
# ---------------------------------------------------------------------------


@dataclass
class SurvivalReport:
    survived: bool
    positions: int = 0
    demands: int = 0
    failure: list | None = None
    notes: list[str] = field(default_factory=list)


class ForallEnumerator:
    """Every ∀ move on a rainbow board, up to the reductions below.

    * ∀'s yellows are the full shade: a larger shade only widens ∀'s later
      options and never changes ∃'s script.
    * ∀'s red edges follow one index per node (``RainbowBoard.forall_indices``),
      and a red to an existing node may also reuse that node's outgoing
      red indices.
    * Demands that already have a witness are skipped.
    """

    def __init__(self, board: RainbowBoard) -> None:
        self.board = board
        self.iota = board.forall_indices(8)
        self.greens: list[Colour] = [("g", 1)] + [("g0", t) for t in board.tints]
        self._atom_ok: dict = {}

    def _reds(self, g: ColouredGraph, src: int, dst: int) -> list[Colour]:
        own = {self.iota[dst]}
        for (x, _y), c in g.edges.items():
            if x == dst and c[0] == "r":
                own.add(c[1])
        return [("r", self.iota[src], a) for a in sorted(own) if a != self.iota[src]]

    def _edge_options(self, g: ColouredGraph, src: int, dst: int) -> list[Colour]:
        return self.greens + [("w", 0), ("w", 1)] + self._reds(g, src, dst)

    def openings(self) -> Iterator[ColouredGraph]:
        full = self.board.full
        for k in (1, 2, 3):
            g0 = ColouredGraph(list(range(k)))
            pairs = list(combinations(range(k), 2))
            opts = [self._edge_options(g0, u, v) for u, v in pairs]
            for choice in product(*opts):
                g = ColouredGraph(list(range(k)))
                for (u, v), c in zip(pairs, choice):
                    g.set_edge(u, v, c)
                for u, v in pairs:
                    if needs_yellow(g, (u, v)):
                        g.yellows[frozenset((u, v))] = full
                if not graph_problems(g, self.board.rules()):
                    yield g

    def demands(self, g: ColouredGraph) -> Iterator[GraphDemand]:
        delta = max(g.nodes) + 1
        full = self.board.full
        rules = self.board.rules()
        faces = [(u,) for u in g.nodes] + list(combinations(g.nodes, 2))
        for face in faces:
            opts = [self._edge_options(g, delta, u) for u in face]
            for cols in product(*opts):
                ys = tuple(() if is_green(c) else full for c in cols)
                d = GraphDemand(face, cols, ys)
                if _witness(g, d) is not None:
                    continue
                key = (d.colours, d.yellows) if len(face) == 1 else (
                    g.edges[face], g.yellows.get(frozenset(face)), d.colours, d.yellows)
                ok = self._atom_ok.get(key)
                if ok is None:
                    ok = self._atom_ok[key] = not graph_problems(d.atom_graph(g, delta), rules)
                if not ok:
                    continue
                yield d


def opening_book(board: RainbowBoard, g: ColouredGraph) -> RhoBook:
    book = RhoBook((), board.rounds, board.red_pool)
    for t in sorted(_cone_tint_set(g)):
        book = book.extend(t, 0)
    return book


def exhaustive_forall_survival(board: RainbowBoard, *, limit: int | None = None) -> SurvivalReport:
    """Run ∃'s script against every ∀ line of ``board.rounds`` rounds."""
    en = ForallEnumerator(board)
    rep = SurvivalReport(True)
    seen: set = set()

    def go(g: ColouredGraph, book: RhoBook, r: int, trace: list) -> bool:
        if r >= board.rounds:
            return True
        key = (r, board_graph_key(g, book))
        if key in seen:
            return True
        seen.add(key)
        rep.positions += 1
        for d in en.demands(g):
            rep.demands += 1
            try:
                h, nb = exists_rainbow_move(board, g, d, book, r)
            except (ScriptFailure, NoRedAvailable) as exc:
                rep.survived = False
                rep.failure = trace + [(d, str(exc))]
                return False
            if not go(h, nb, r + 1, trace + [d]):
                return False
            if limit is not None and rep.demands > limit:
                rep.notes.append("demand limit reached")
                return False
        return True

    for g in en.openings():
        try:
            book = opening_book(board, g)
        except NoRedAvailable as exc:
            rep.survived = False
            rep.failure = [(g, str(exc))]
            break
        if not go(g, book, 1, [g]):
            break
    return rep


def scripted_playout(board: RainbowBoard, strategy: ForallConeStrategy | None = None) -> tuple[bool, list]:
    """Cone-bombing ∀ against ∃'s script.  Returns (∃ survived, trace)."""
    strategy = strategy or ForallConeStrategy(board.tints, board.full)
    g = strategy.opening_graph()
    book = opening_book(board, g)
    trace: list = [("open", board_graph_key(g, book))]
    for r in range(1, board.rounds):
        d = strategy.graph_demand(g)
        if d is None:
            break
        try:
            g, book = exists_rainbow_move(board, g, d, book, r)
        except (ScriptFailure, NoRedAvailable) as exc:
            trace.append(("fail", str(exc)))
            return False, trace
        trace.append((d, book.rho))
    return True, trace


def random_red_relabel(g: ColouredGraph, mapping: dict[int, int]) -> ColouredGraph:
    h = g.copy()
    for (x, y), c in g.edges.items():
        if c[0] == "r":
            h.edges[(x, y)] = ("r", mapping.get(c[1], c[1]), mapping.get(c[2], c[2]))
    return h


def red_insensitivity_trial(board: RainbowBoard, rng: random.Random) -> bool:
    """One random ∀ line with ∀'s red indices drawn from the whole pool.

    Returns True when ∃'s script survives.  Used to test that the
    per-node index scheme loses nothing.
    """
    en = ForallEnumerator(board)
    opens = list(en.openings())
    g = rng.choice(opens)
    g = _scramble_reds(g, set(g.nodes), board, rng)
    if graph_problems(g, board.rules()):
        return True
    book = opening_book(board, g)
    for r in range(1, board.rounds):
        ds = list(en.demands(g))
        if not ds:
            return True
        d = rng.choice(ds)
        cols = tuple(
            ("r", rng.randrange(board.red_pool), rng.randrange(board.red_pool)) if c[0] == "r" else c for c in d.colours
        )
        cols = tuple(c if c[0] != "r" or c[1] != c[2] else d.colours[i] for i, c in enumerate(cols))
        d2 = GraphDemand(d.face, cols, d.yellows)
        if graph_problems(d2.atom_graph(g, max(g.nodes) + 1), board.rules()):
            d2 = d
        try:
            g, book = exists_rainbow_move(board, g, d2, book, r)
        except (ScriptFailure, NoRedAvailable):
            return False
    return True


def _scramble_reds(g: ColouredGraph, nodes: set, board: RainbowBoard, rng: random.Random) -> ColouredGraph:
    idx = {v: rng.randrange(board.red_pool) for v in nodes}
    if len(set(idx.values())) < len(idx):
        return g
    h = g.copy()
    for (x, y), c in g.edges.items():
        if c[0] == "r":
            h.edges[(x, y)] = ("r", idx[x], idx[y])
    return h


# ---------------------------------------------------------------------------
# Partition books for pebble games on split algebras
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionBook:
    """Pebbled elements of two algebras with matched split-part cells.

    ``left``/``right`` are the pebbled elements (atom bitmasks).  The cells
    of the split parts are the classes of split atoms with equal membership
    pattern across the pebbles; cells are matched by pattern.
    """

    split_left: int
    split_right: int
    left: tuple[int, ...] = ()
    right: tuple[int, ...] = ()
    threshold: int | None = None
    left_atoms: tuple[Atom, ...] = ()
    right_atoms: tuple[Atom, ...] = ()

    def cells(self, side: str) -> dict[tuple[bool, ...], int]:
        split = self.split_left if side == "L" else self.split_right
        pebs = self.left if side == "L" else self.right
        out: dict[tuple[bool, ...], int] = {}
        k = 0
        while split >> k:
            if split >> k & 1:
                pat = tuple(bool(p >> k & 1) for p in pebs)
                out[pat] = out.get(pat, 0) | (1 << k)
            k += 1
        return out

    def violations(self) -> list[str]:
        bad = []
        for a, b in zip(self.left, self.right):
            if self._outside(a, "L") != self._outside(b, "R"):
                bad.append("pebbles differ off the split parts")
        cl, cr = self.cells("L"), self.cells("R")
        for pat in set(cl) | set(cr):
            x, y = cl.get(pat, 0).bit_count(), cr.get(pat, 0).bit_count()
            if not _same_size(x, y, self.threshold):
                bad.append(f"cell {pat} sizes {x} and {y}")
        return bad


    def _outside(self, x: int, side: str) -> frozenset:
        split = self.split_left if side == "L" else self.split_right
        names = self.left_atoms if side == "L" else self.right_atoms
        rest = x & ~split
        ks = [k for k in range(rest.bit_length()) if rest >> k & 1]
        return frozenset(names[k] for k in ks) if names else frozenset(ks)

    def swapped(self) -> "PartitionBook":
        return PartitionBook(self.split_right, self.split_left, self.right, self.left, self.threshold,
                             self.right_atoms, self.left_atoms)


def _same_size(x: int, y: int, threshold: int | None) -> bool:
    if x == y:
        return True
    return threshold is not None and x >= threshold and y >= threshold


def split_parts(s: RaAtomStructure) -> int:
    return sum(1 << k for k, a in enumerate(s.atoms) if a.kind == "r0")


def mirror_atoms(left: RaAtomStructure, right: RaAtomStructure, x: int) -> int:
    """Image of the non-split atoms of x in the other structure."""
    out = 0
    for k in range(left.size):
        if x >> k & 1 and left.atoms[k].kind != "r0":
            out |= 1 << right.index[left.atoms[k]]
    return out


def exists_ef_partition_move(left: RaAtomStructure, right: RaAtomStructure, element: int, book: PartitionBook,
                             side: str = "L") -> tuple[int, PartitionBook]:
    """∃'s answer to a pebble on ``element`` (on ``side``) in the other algebra.

    Non-split atoms are mirrored.  Inside every current cell she takes as
    many split atoms (lowest first) as the pebble takes in the partner cell,
    or at least the threshold when both cells are that large.
    """
    if side == "R":
        y, nb = exists_ef_partition_move(right, left, element, book.swapped(), "L")
        return y, nb.swapped()
    y = mirror_atoms(left, right, element)
    cl, cr = book.cells("L"), book.cells("R")
    for pat, cell in sorted(cl.items()):
        partner = cr.get(pat, 0)
        want = (element & cell).bit_count()
        rest = cell.bit_count() - want
        have = partner.bit_count()
        take = want
        if not (_same_size(have - take, rest, book.threshold) and take <= have):
            t = book.threshold
            if t is not None and want >= t and rest >= t and have >= 2 * t:
                take = have - rest if have - rest >= t else t
            else:
                raise NoMatch(f"cell {pat}: need {want} of {have} leaving {rest}")
        picked = 0
        k = 0
        while picked < take:
            if partner >> k & 1:
                y |= 1 << k
                picked += 1
            k += 1
    nb = PartitionBook(book.split_left, book.split_right, book.left + (element,), book.right + (y,), book.threshold,
                       tuple(left.atoms), tuple(right.atoms))
    if nb.violations():
        raise NoMatch("; ".join(nb.violations()))
    return y, nb
