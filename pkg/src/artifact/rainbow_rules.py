"""Colour rules for finite rainbow atom structures.

Rules version 1.  Colours are tuples:

* ``("g", j)`` for 1 <= j <= n-2 and ``("g0", t)`` for tints t: greens
* ``("w", j)`` for 0 <= j <= n-2: whites
* ``("r", a, b)`` with a != b: reds, oriented (the reverse edge carries
  ``("r", b, a)``)

A shade of yellow is a sorted tuple of tints; the full shade holds every
tint.  Yellow labels sit on (n-1)-sets of nodes whose edges are all
non-green.

Forbidden triangles: three greens; two ``g0`` edges with ``w0``; two
``g_j`` edges with ``w_j``; three reds whose indices do not match up as
``r_ab, r_bc, r_ac``.  The white and yellow clauses follow the usual
rainbow conventions and are not derived here.
They are flagged by ``EXTERNAL_CLAUSES``.

Cone rule: if z has ``g0^t`` to x_0 and ``g_j`` to x_j (1 <= j <= n-2),
then the yellow on {x_0, ..., x_{n-2}} must contain t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Mapping, Sequence

RULES_VERSION = 1

# clauses taken from the standard rainbow literature rather than derived
EXTERNAL_CLAUSES = ("white", "yellow")

Colour = tuple
Shade = tuple


def is_green(c: Colour) -> bool:
    return c[0] in ("g", "g0")


def is_red(c: Colour) -> bool:
    return c[0] == "r"


def reverse(c: Colour) -> Colour:
    return ("r", c[2], c[1]) if c[0] == "r" else c


def triangle_ok(xy: Colour, yz: Colour, xz: Colour) -> bool:
    """Consistency of a triangle given the oriented colours x→y, y→z, x→z."""
    a, b, c = xy[0], yz[0], xz[0]
    if a == "r" and b == "r" and c == "r":
        return xy[1] == xz[1] and xy[2] == yz[1] and yz[2] == xz[2]
    ga, gb, gc = a[0] == "g", b[0] == "g", c[0] == "g"
    if ga and gb and gc:
        return False
    if a == "w":
        w, p, q = xy, yz, xz
    elif b == "w":
        w, p, q = yz, xy, xz
    elif c == "w":
        w, p, q = xz, xy, yz
    else:
        return True
    if p[0] == "w" or q[0] == "w":
        return True
    if w[1] == 0:
        return not (p[0] == "g0" and q[0] == "g0")
    return not (p == ("g", w[1]) and q == p)


@dataclass(frozen=True)
class RainbowRules:
    """Parameters of a finite rainbow colouring scheme."""

    n: int
    tints: tuple[int, ...]
    red_indices: tuple[int, ...]
    shades: tuple[Shade, ...]

    @staticmethod
    def make(n: int, green_count: int | None = None, red_indices: Iterable[int] | None = None,
             shades: Iterable[Iterable[int]] | None = None) -> "RainbowRules":
        if n < 3:
            raise ValueError("rainbow dimension must be at least 3")
        g = n + 1 if green_count is None else green_count
        if g < 1:
            raise ValueError("need at least one green tint")
        tints = tuple(range(1, g + 1))
        reds = tuple(range(n)) if red_indices is None else tuple(sorted(set(red_indices)))
        full = tints
        sh = {full} if shades is None else {tuple(sorted(set(s))) for s in shades} | {full}
        return RainbowRules(n, tints, reds, tuple(sorted(sh, key=lambda s: (len(s), s))))

    @property
    def full(self) -> Shade:
        return self.tints

    def colours(self) -> list[Colour]:
        out: list[Colour] = [("g", j) for j in range(1, self.n - 1)]
        out += [("g0", t) for t in self.tints]
        out += [("w", j) for j in range(self.n - 1)]
        out += [("r", a, b) for a in self.red_indices for b in self.red_indices if a != b]
        return out


# ---------------------------------------------------------------------------
# Coloured graphs
# ---------------------------------------------------------------------------


@dataclass
class ColouredGraph:
    """Complete coloured graph: ``edges[(x, y)]`` for x != y, both directions."""

    nodes: list[int]
    edges: dict[tuple[int, int], Colour] = field(default_factory=dict)
    yellows: dict[frozenset, Shade] = field(default_factory=dict)

    def colour(self, x: int, y: int) -> Colour:
        return self.edges[(x, y)]

    def set_edge(self, x: int, y: int, c: Colour) -> None:
        self.edges[(x, y)] = c
        self.edges[(y, x)] = reverse(c)

    def copy(self) -> "ColouredGraph":
        return ColouredGraph(list(self.nodes), dict(self.edges), dict(self.yellows))


def needs_yellow(g: ColouredGraph, nodes: Sequence[int]) -> bool:
    return all(not is_green(g.edges[(x, y)]) for x, y in combinations(nodes, 2))


def cones(g: ColouredGraph, n: int) -> Iterator[tuple[tuple[int, ...], int, int]]:
    """Yield (base, apex, tint): base[0] carries g0^tint, base[j] carries g_j."""
    for z in g.nodes:
        g0 = [(x, g.edges[(z, x)][1]) for x in g.nodes if x != z and g.edges[(z, x)][0] == "g0"]
        if not g0:
            continue
        rest: list[list[int]] = []
        for j in range(1, n - 1):
            rest.append([x for x in g.nodes if x != z and g.edges[(z, x)] == ("g", j)])
        for x0, t in g0:
            for tail in product(*rest):
                base = (x0,) + tuple(tail)
                if len(set(base)) == len(base):
                    yield base, z, t


def graph_problems(g: ColouredGraph, rules: RainbowRules) -> list[str]:
    """All violated rules; an empty list means the graph is consistent."""
    out: list[str] = []
    n = rules.n
    for x, y, z in combinations(g.nodes, 3):
        for a, b, c in permutations((x, y, z)):
            if not triangle_ok(g.edges[(a, b)], g.edges[(b, c)], g.edges[(a, c)]):
                out.append(f"forbidden triangle {(x, y, z)}")
                break
    for s in combinations(g.nodes, n - 1):
        key = frozenset(s)
        if needs_yellow(g, s):
            if key not in g.yellows:
                out.append(f"missing yellow on {s}")
            elif g.yellows[key] not in rules.shades:
                out.append(f"unknown shade on {s}")
        elif key in g.yellows:
            out.append(f"yellow on green set {s}")
    for base, z, t in cones(g, n):
        sh = g.yellows.get(frozenset(base))
        if sh is not None and t not in sh:
            out.append(f"cone apex {z} tint {t} outside shade of {base}")
    return out


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------

# An atom is (pattern, edges, yellows): ``pattern[i]`` is the node of
# coordinate i, nodes numbered by first appearance; ``edges`` lists
# ((u, v), colour) for u < v; ``yellows`` lists (set, shade).

AtomPayload = tuple


def _patterns(n: int) -> Iterator[tuple[int, ...]]:
    def go(prefix: tuple[int, ...], top: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            yield prefix
            return
        for v in range(top + 2):
            yield from go(prefix + (v,), max(top, v))

    yield from go((0,), 0)


def payload_graph(p: AtomPayload) -> ColouredGraph:
    pattern, edges, yellows = p
    g = ColouredGraph(sorted(set(pattern)))
    for (u, v), c in edges:
        g.set_edge(u, v, c)
    for s, sh in yellows:
        g.yellows[frozenset(s)] = sh
    return g


def graph_payload(pattern: Sequence[int], g: ColouredGraph) -> AtomPayload:
    """Payload of the surjection i ↦ pattern[i] into g, nodes renamed by first use."""
    ren: dict[int, int] = {}
    for v in pattern:
        ren.setdefault(v, len(ren))
    pat = tuple(ren[v] for v in pattern)
    inv = {b: a for a, b in ren.items()}
    k = len(ren)
    edges = tuple(((u, v), g.edges[(inv[u], inv[v])]) for u, v in combinations(range(k), 2))
    ys = []
    for s in combinations(range(k), len(pattern) - 1):
        key = frozenset(inv[u] for u in s)
        if key in g.yellows:
            ys.append((s, g.yellows[key]))
    return (pat, edges, tuple(ys))


def enumerate_atoms(rules: RainbowRules) -> list[AtomPayload]:
    """Every consistent coloured graph on at most n nodes with a surjection from n."""
    n = rules.n
    cols = rules.colours()
    out: list[AtomPayload] = []
    for pattern in _patterns(n):
        k = max(pattern) + 1
        pairs = list(combinations(range(k), 2))
        for choice in product(cols, repeat=len(pairs)):
            g = ColouredGraph(list(range(k)))
            for (u, v), c in zip(pairs, choice):
                g.set_edge(u, v, c)
            if not _triangles_ok(g):
                continue
            ysets = [s for s in combinations(range(k), n - 1) if needs_yellow(g, s)]
            for shades in product(rules.shades, repeat=len(ysets)):
                g.yellows = {frozenset(s): sh for s, sh in zip(ysets, shades)}
                if graph_problems(g, rules):
                    continue
                out.append(graph_payload(pattern, g))
    return out


def _triangles_ok(g: ColouredGraph) -> bool:
    for x, y, z in combinations(g.nodes, 3):
        if not triangle_ok(g.edges[(x, y)], g.edges[(y, z)], g.edges[(x, z)]):
            return False
    return True


def restriction_signature(p: AtomPayload, i: int) -> tuple:
    """The atom with coordinate i forgotten, up to renaming of nodes."""
    pattern, _, _ = p
    g = payload_graph(p)
    coords = [j for j in range(len(pattern)) if j != i]
    ren: dict[int, int] = {}
    for j in coords:
        ren.setdefault(pattern[j], len(ren))
    inv = {b: a for a, b in ren.items()}
    k = len(ren)
    sub = tuple(ren[pattern[j]] for j in coords)
    edges = tuple(g.edges[(inv[u], inv[v])] for u, v in combinations(range(k), 2))
    ys = []
    m = len(pattern) - 1
    for s in combinations(range(k), m):
        key = frozenset(inv[u] for u in s)
        if key in g.yellows:
            ys.append((s, g.yellows[key]))
    return (sub, edges, tuple(ys))


def coordinate_graph(assign: Mapping[int, int], p: AtomPayload) -> dict[tuple[int, int], Colour]:
    """Edge colours of an atom transported along coordinate → network node."""
    pattern, _, _ = p
    g = payload_graph(p)
    out: dict[tuple[int, int], Colour] = {}
    for i, j in permutations(range(len(pattern)), 2):
        if pattern[i] != pattern[j]:
            out[(assign[i], assign[j])] = g.edges[(pattern[i], pattern[j])]
    return out
