from __future__ import annotations

from itertools import permutations

from hypothesis import given
from hypothesis import strategies as st

from artifact.rainbow_rules import (
    ColouredGraph,
    RainbowRules,
    cones,
    enumerate_atoms,
    graph_payload,
    graph_problems,
    payload_graph,
    reverse,
    triangle_ok,
)

RULES = RainbowRules.make(3)
COLOURS = RULES.colours()


def naive_ok(xy, yz, xz) -> bool:
    """Independent reading of the triangle rules on unordered colour multisets."""
    kinds = [xy[0], yz[0], xz[0]]
    if all(k in ("g", "g0") for k in kinds):
        return False
    if all(k == "r" for k in kinds):
        # x ↦ xy[1], y ↦ xy[2], z ↦ yz[2]
        return xz == ("r", xy[1], yz[2]) and yz[1] == xy[2]
    for w, p, q in permutations((xy, yz, xz)):
        if w == ("w", 0) and p[0] == q[0] == "g0":
            return False
        if w[0] == "w" and w[1] > 0 and p == q == ("g", w[1]):
            return False
    return True


@given(st.sampled_from(COLOURS), st.sampled_from(COLOURS), st.sampled_from(COLOURS))
def test_triangle_rules_match_reference(a, b, c):
    assert triangle_ok(a, b, c) == naive_ok(a, b, c)


def test_triangle_rules_exhaustive():
    for a in COLOURS:
        for b in COLOURS:
            for c in COLOURS:
                assert triangle_ok(a, b, c) == naive_ok(a, b, c), (a, b, c)


@given(st.sampled_from(COLOURS), st.sampled_from(COLOURS), st.sampled_from(COLOURS))
def test_triangle_rules_respect_orientation(a, b, c):
    # reading the same triangle from z: z→y, y→x, z→x
    assert triangle_ok(a, b, c) == triangle_ok(reverse(b), reverse(a), reverse(c))


def test_red_triangle_examples():
    assert triangle_ok(("r", 0, 1), ("r", 1, 2), ("r", 0, 2))
    assert not triangle_ok(("r", 0, 1), ("r", 2, 1), ("r", 0, 2))


def cone_graph(tint: int) -> ColouredGraph:
    g = ColouredGraph([0, 1, 2])
    g.set_edge(0, 1, ("w", 0))
    g.set_edge(0, 2, ("g0", tint))
    g.set_edge(1, 2, ("g", 1))
    return g


class TestGraphs:
    def test_cone_is_detected(self):
        assert list(cones(cone_graph(2), 3)) == [((0, 1), 2, 2)]

    def test_uncovered_cone_is_a_problem(self):
        g = cone_graph(2)
        g.yellows[frozenset((0, 1))] = (1,)
        assert graph_problems(g, RainbowRules.make(3, shades=[(1,)]))

    def test_covered_cone_is_fine(self):
        g = cone_graph(2)
        g.yellows[frozenset((0, 1))] = RULES.full
        assert graph_problems(g, RULES) == []

    def test_payload_round_trip(self):
        g = cone_graph(1)
        g.yellows[frozenset((0, 1))] = RULES.full
        p = graph_payload((0, 1, 2), g)
        h = payload_graph(p)
        assert h.edges == g.edges and h.yellows == g.yellows


def test_atom_count():
    assert len(enumerate_atoms(RULES)) == 1851


def test_fewer_tints_fewer_atoms():
    assert len(enumerate_atoms(RainbowRules.make(3, green_count=2))) < 1851
