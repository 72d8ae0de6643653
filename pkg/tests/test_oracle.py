from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.algebra_core import Atom
from artifact.constructions import monk_ra
from artifact.games import FORALL
from artifact.oracle import (
    Exhausted,
    Found,
    OracleBudgetError,
    RepresentationCandidate,
    brute_force_represent,
    census,
    colouring_is_triangle_free,
    enumerate_small_ra,
    ramsey_colouring,
    ramsey_colouring_exists,
    representation_problems,
)


def forbids_ddd(s) -> bool:
    return (1, 1, 1) in s.forbidden


class TestEnumeration:
    def test_one_atom(self):
        [s] = enumerate_small_ra(1)
        assert s.size == 1

    def test_two_atoms_both_variants(self):
        twos = [s for s in enumerate_small_ra(2) if s.size == 2]
        assert sorted(forbids_ddd(s) for s in twos) == [False, True]

    def test_counts(self):
        # 1, 2 and 7 structures with one, two and three atoms
        sizes = [s.size for s in enumerate_small_ra(3)]
        assert [sizes.count(k) for k in (1, 2, 3)] == [1, 2, 7]

    def test_budget(self):
        with pytest.raises(OracleBudgetError):
            list(enumerate_small_ra(5))


class TestRepresentation:
    def structure(self, ddd_forbidden):
        return next(s for s in enumerate_small_ra(2) if s.size == 2 and forbids_ddd(s) == ddd_forbidden)

    def test_matching(self):
        r = brute_force_represent(self.structure(True), 4)
        assert isinstance(r, Found) and r.candidate.base_size == 2

    def test_triangle(self):
        r = brute_force_represent(self.structure(False), 4)
        assert isinstance(r, Found) and r.candidate.base_size == 3

    def test_monk31_has_none(self, monk31):
        r = brute_force_represent(monk31, 8)
        assert isinstance(r, Exhausted) and r.max_base == 8

    def test_monk11_is_the_pentagon(self):
        r = brute_force_represent(monk_ra(1, 1), 6)
        assert isinstance(r, Found) and r.candidate.base_size == 5

    def test_problems_are_reported(self):
        s = self.structure(True)
        d, i = Atom("d", 1), Atom("id", 0)
        cand = RepresentationCandidate(3, {(x, y): (i if x == y else d) for x in range(3) for y in range(3)})
        assert any("forbidden" in p for p in representation_problems(s, cand))

    def test_partial_labels(self):
        cand = RepresentationCandidate(2, {(0, 0): Atom("id", 0)})
        assert representation_problems(self.structure(True), cand)

    def test_budget(self, monk31):
        with pytest.raises(OracleBudgetError):
            brute_force_represent(monk31, 9)


class TestRamsey:
    @pytest.mark.parametrize("g, r, expected", [(2, 1, True), (3, 1, False), (5, 2, True), (6, 2, False)])
    def test_small(self, g, r, expected):
        assert ramsey_colouring_exists(g, r) is expected

    def test_three_colours_sixteen_nodes(self):
        col = ramsey_colouring(16, 3)
        assert col is not None and colouring_is_triangle_free(16, col)

    def test_budget(self):
        with pytest.raises(OracleBudgetError):
            ramsey_colouring(17, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(1, 2), st.data())
def test_triangle_free_check_agrees_with_definition(n, k, data):
    col = {e: data.draw(st.integers(0, k - 1)) for e in combinations(range(n), 2)}
    mono = any(col[(x, y)] == col[(y, z)] == col[(x, z)] for x, y, z in combinations(range(n), 3))
    assert colouring_is_triangle_free(n, col) is not mono


def test_census_has_no_contradictions():
    entries = census(3, max_base=6, rounds=4)
    assert len(entries) == 10
    assert not any(e.contradiction for e in entries)
    assert all(e.game != FORALL for e in entries if isinstance(e.representation, Found))
