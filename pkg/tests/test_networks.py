from __future__ import annotations

from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.algebra_core import Atom
from artifact.canonical import refinement_rounds
from artifact.constructions import full_set_structure, monk_ra
from artifact.games import GameSpec, exists_responses, legal_forall_moves
from artifact.networks import (
    LONG,
    SHORT,
    AtomicNetwork,
    EdgeNetwork,
    Hypernetwork,
    apply_map,
    canonical_key,
    check_consistency,
    classify_hyperedge,
    ra_completions,
)


def red_triangle(s):
    i, r = s.index[Atom("id", 0)], s.index[Atom("r", 1)]
    labels = {(x, y): (i if x == y else r) for x in range(3) for y in range(3)}
    return EdgeNetwork(s, range(3), labels)


class TestConsistency:
    def test_single_node_all_diagonal(self):
        s = full_set_structure(3, 1)
        N = AtomicNetwork.from_atom(s, 0)
        assert N.nodes == (0,)
        assert check_consistency(N).valid

    def test_forbidden_red_triangle_reported(self, monk31):
        rep = check_consistency(red_triangle(monk31))
        assert "triangle" in rep.rules()

    def test_wrong_label_count(self, monk31):
        with pytest.raises(ValueError):
            EdgeNetwork(monk31, [0, 1], {(0, 0): 0})

    def test_opening_responses_are_consistent(self, monk31):
        spec = GameSpec("G", monk31, 4, 3)
        for mv in legal_forall_moves(spec):
            for N in exists_responses(spec, None, mv):
                assert check_consistency(N).valid


class TestApplyMap:
    def net(self, s):
        g = s.index[Atom("g", 0)]
        return next(ra_completions(s, [0, 1, 2], {}, {(0, 1): g, (1, 2): g}))

    def test_identity(self, monk31):
        N = self.net(monk31)
        assert apply_map(N, {x: x for x in N.nodes}) == N

    def test_empty_domain(self, monk31):
        M = apply_map(self.net(monk31), {})
        assert M.nodes == () and M.labels == {}

    def test_collapse_is_consistent(self, monk31):
        s = monk31
        N = EdgeNetwork.single(s, s.index[Atom("g", 0)])
        M = apply_map(N, {0: 0, 1: 0, 2: 1})
        assert M.label((0, 1)) in {s.index[Atom("id", 0)]}
        assert check_consistency(M).valid

    def test_hypernetwork_pullback(self, monk31):
        N = self.net(monk31)
        H = Hypernetwork(N, {(0, 1, 2): "a"}, "lam")
        assert H.hyperlabel((0, 1, 2)) == "a"
        M = apply_map(H, {5: 2, 6: 1, 7: 0})
        assert M.hyperlabel((7, 6, 5)) == "a"


class TestHyperedges:
    def test_empty_tuple_is_short(self, monk31):
        assert classify_hyperedge(EdgeNetwork.single(monk31, 1), ()) == SHORT

    def test_new_node_without_links_is_long(self, monk31):
        N = TestApplyMap().net(monk31)
        assert classify_hyperedge(N, (0, 1, 2)) == LONG

    def test_identity_linked_nodes_are_short(self, monk31):
        M = apply_map(EdgeNetwork.single(monk31, 1), {0: 0, 1: 0, 2: 1})
        assert classify_hyperedge(M, (0, 1, 2)) == SHORT

    def test_short_edge_must_carry_lambda(self, monk31):
        N = EdgeNetwork.single(monk31, 1)
        with pytest.raises(ValueError):
            Hypernetwork(N, {(0, 1): "a"}, "lam")

    def test_lambda_on_long_edge_is_legal(self, monk31):
        H = Hypernetwork(TestApplyMap().net(monk31), {(0, 1, 2): "lam"}, "lam")
        assert check_consistency(H).valid

    def test_equivalent_tuples_share_a_label(self, monk31):
        base = TestApplyMap().net(monk31)
        M = apply_map(base, {0: 0, 1: 1, 2: 2, 3: 2})
        H = Hypernetwork(M, {(0, 1, 2): "a"}, "lam")
        assert H.hyperlabel((0, 1, 3)) == "a"
        with pytest.raises(ValueError):
            Hypernetwork(M, {(0, 1, 2): "a", (0, 1, 3): "b"}, "lam")


class TestCanonicalKeys:
    def test_permutation_invariant(self, monk31):
        N = TestApplyMap().net(monk31)
        for p in permutations(N.nodes):
            assert canonical_key(apply_map(N, dict(zip(N.nodes, p)))) == canonical_key(N)

    def test_different_labels_differ(self, monk31):
        a = EdgeNetwork.single(monk31, monk31.index[Atom("g", 0)])
        b = EdgeNetwork.single(monk31, monk31.index[Atom("r", 1)])
        assert canonical_key(a) != canonical_key(b)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.data())
def test_refinement_terminates_quickly(n, data):
    labels = {(x, y): data.draw(st.integers(0, 2)) for x in range(n) for y in range(n)}
    assert refinement_rounds(n, [0] * n, labels) <= n * n


@settings(max_examples=25, deadline=None)
@given(st.permutations(range(4)))
def test_keys_ignore_node_names(perm):
    s = monk_ra(2, 2)
    N = next(ra_completions(s, range(4), {}, {(0, 1): 1, (1, 2): 2, (2, 3): 3}))
    M = apply_map(N, dict(zip(range(4), perm)))
    assert canonical_key(M) == canonical_key(N)


@pytest.mark.parametrize("n, base", [(3, 3), (4, 3)])
def test_diagonal_link_some_equals_every(n, base):
    from artifact.networks import ca_completions, diag_linked

    s = full_set_structure(n, base)
    nets = list(ca_completions(s, range(3), {}, limit=200))
    assert nets
    for N in nets:
        for x in N.nodes:
            for y in N.nodes:
                assert diag_linked(N, x, y, "some") == diag_linked(N, x, y, "every")
