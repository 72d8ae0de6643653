"""Pebble Ehrenfeucht–Fraïssé games between finite relational structures."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Mapping

from .games import EXISTS, FORALL, Verdict

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class FiniteStructure:
    """Universe ``range(size)`` with named unary and binary relations."""

    size: int
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        rels = {}
        for r, tuples in self.relations.items():
            ts = frozenset(tuple(t) for t in tuples)
            for t in ts:
                if len(t) not in (1, 2) or not all(0 <= x < self.size for x in t):
                    raise ValueError(f"bad tuple {t} in relation {r}")
            rels[r] = ts
        object.__setattr__(self, "relations", dict(sorted(rels.items())))

    def holds(self, r: str, t: tuple) -> bool:
        return t in self.relations[r]


def complete_graph(n: int) -> FiniteStructure:
    return FiniteStructure(n, {"E": frozenset(permutations(range(n), 2))}, name=f"K{n}")


def _partial_iso(A: FiniteStructure, B: FiniteStructure, pairs: Iterable[tuple[int, int]], new: tuple[int, int]) -> bool:
    a, b = new
    for r in A.relations:
        arity = len(next(iter(A.relations[r] or B.relations[r] or [(0, 0)])))
        if arity == 1 and A.holds(r, (a,)) != B.holds(r, (b,)):
            return False
        if arity == 2 and A.holds(r, (a, a)) != B.holds(r, (b, b)):
            return False
    for x, y in pairs:
        if (x == a) != (y == b):
            return False
        for r in A.relations:
            if A.holds(r, (a, x)) != B.holds(r, (b, y)) or A.holds(r, (x, a)) != B.holds(r, (y, b)):
                return False
    return True


class EFSolver:
    """Exact minimax over pebble positions.

    A position is the set of pebbled pairs.  While a pebble is free, ∀ only
    places it; once all are down he must lift one first.  Lifting while a
    pebble is free never helps him, since fewer pairs only relax ∃'s task.
    Placing a pebble on an element that is already pebbled, with nothing
    lifted, leaves the position unchanged and is skipped.  The memo keeps, per position, the largest depth ∃ is known to survive and
    the least depth at which ∀ is known to win.
    """

    def __init__(self, A: FiniteStructure, B: FiniteStructure, pebbles: int) -> None:
        if set(A.relations) != set(B.relations):
            raise ValueError("structures must share a signature")
        self.A, self.B, self.p = A, B, pebbles
        self.memo: dict[frozenset, list] = {}

    def moves(self, pos: frozenset) -> list[tuple[tuple[int, int] | None, str, int]]:
        lifts: list = sorted(pos) if len(pos) >= self.p else [None]
        out = []
        for lift in lifts:
            for k, (side, st) in enumerate(((LEFT, self.A), (RIGHT, self.B))):
                taken = {pr[k] for pr in pos} if lift is None else set()
                for e in range(st.size):
                    if e not in taken:
                        out.append((lift, side, e))
        return out

    def responses(self, pos: frozenset, move) -> list[frozenset]:
        lift, side, e = move
        rest = pos - {lift} if lift is not None else pos
        out = []
        other = self.B if side == LEFT else self.A
        for f in range(other.size):
            pair = (e, f) if side == LEFT else (f, e)
            if _partial_iso(self.A, self.B, rest, pair):
                out.append(rest | {pair})
        return out

    def forall_wins(self, pos: frozenset, d: int) -> bool:
        if d <= 0 or self.p == 0:
            return False
        ent = self.memo.setdefault(pos, [0, None])
        if d <= ent[0]:
            return False
        if ent[1] is not None and d >= ent[1]:
            return True
        for mv in self.moves(pos):
            if all(self.forall_wins(r, d - 1) for r in self.responses(pos, mv)):
                ent[1] = d if ent[1] is None else min(ent[1], d)
                return True
        ent[0] = max(ent[0], d)
        return False

    def winning_move(self, pos: frozenset, d: int):
        for mv in self.moves(pos):
            if all(self.forall_wins(r, d - 1) for r in self.responses(pos, mv)):
                return mv
        return None

    def certificate(self, pos: frozenset, d: int) -> dict:
        mv = self.winning_move(pos, d)
        assert mv is not None
        lift, side, e = mv
        node: dict = {"move": {"lift": list(lift) if lift else None, "side": side, "element": e}, "responses": []}
        for r in self.responses(pos, mv):
            new = sorted(r - pos)
            node["responses"].append({"pair": list(new[0]), "next": self.certificate(r, d - 1)})
        return node


def ef_solve(A: FiniteStructure, B: FiniteStructure, pebbles: int, rounds: int, *,
             certificate: bool = True, solver: EFSolver | None = None) -> Verdict:
    """Solve the ``pebbles``-pebble ``rounds``-round game; ∃ must keep a partial isomorphism.

    A ``solver`` built for the same structures and pebble count may be passed
    in to share its table across round budgets.
    """
    if pebbles < 0 or rounds < 0:
        raise ValueError("pebbles and rounds must be non-negative")
    sv = solver or EFSolver(A, B, pebbles)
    if (sv.A, sv.B, sv.p) != (A, B, pebbles):
        raise ValueError("solver was built for a different game")
    start: frozenset = frozenset()
    for d in range(1, rounds + 1):
        if sv.forall_wins(start, d):
            v = Verdict(FORALL, depth=d)
            if certificate:
                v.certificate = sv.certificate(start, d)
            break
    else:
        v = Verdict(EXISTS, depth=rounds)
    return v


def ef_spec(A: FiniteStructure, B: FiniteStructure, pebbles: int, rounds: int) -> dict:
    return {"game": "EF", "left": A.name or A.size, "right": B.name or B.size, "pebbles": pebbles, "rounds": rounds}
