from __future__ import annotations

import pytest

from artifact.algebra_core import Atom, RaAtomStructure
from artifact.constructions import monk_ra
from artifact.games import (
    EXISTS,
    FORALL,
    UNKNOWN,
    AmalgamationMove,
    AtomMove,
    GameSpec,
    TransformMove,
    TriangleMove,
    exists_responses,
    legal_forall_moves,
    lyndon_battery,
    make_engine,
    replay_certificate,
    solve,
)
from artifact.networks import EdgeNetwork, Hypernetwork, apply_map

ID = Atom("id", 0)


def trivial() -> RaAtomStructure:
    return RaAtomStructure([ID], [ID], None, [])


def cert_leaves(node: dict, depth: int = 1):
    if not node["responses"]:
        yield depth, node
    for r in node["responses"]:
        yield from cert_leaves(r["next"], depth + 1)


class TestMoves:
    def test_round_zero_offers_every_atom(self, monk31):
        moves = legal_forall_moves(GameSpec("G", monk31, 4, 3))
        assert moves == [AtomMove(a) for a in range(monk31.size)]

    def test_hand_enumerated_move_count(self, monk21):
        spec = GameSpec("G", monk21, 3, 3)
        [N] = exists_responses(spec, None, AtomMove(1))
        moves = legal_forall_moves(spec, N)
        # four identity loops and seven factorisations per green edge
        assert len(moves) == 22
        g0, r1 = monk21.index[Atom("g", 0)], monk21.index[Atom("r", 1)]
        assert TriangleMove(0, 1, g0, r1) in moves

    def test_witnessed_demand_keeps_network(self, monk21):
        spec = GameSpec("G", monk21, 3, 3)
        [N] = exists_responses(spec, None, AtomMove(1))
        assert exists_responses(spec, N, TriangleMove(0, 1, 0, 1)) == [N]

    def test_bold_full_board_names_reuse(self, monk21):
        spec = GameSpec("BoldG", monk21, 2, 3)
        [N] = exists_responses(spec, None, AtomMove(1))
        moves = legal_forall_moves(spec, N)
        assert moves and all(m.reuse is not None for m in moves)

    def test_plain_full_board_has_no_answer(self, monk21):
        spec = GameSpec("G", monk21, 2, 3)
        [N] = exists_responses(spec, None, AtomMove(1))
        g1, r1 = monk21.index[Atom("g", 1)], monk21.index[Atom("r", 1)]
        assert exists_responses(spec, N, TriangleMove(0, 1, g1, r1)) == []

    def test_red_closing_move_has_no_answer(self, monk31):
        v = solve(GameSpec("G", monk31, 5, 6))
        assert v.outcome == FORALL
        leaves = list(cert_leaves(v.certificate))
        assert leaves
        for depth, node in leaves:
            # at most four nodes are in play, so the board is never full
            assert depth <= 3
            assert node["move"]["type"] == "triangle"

    def test_unknown_variant(self, monk31):
        with pytest.raises(ValueError):
            GameSpec("X", monk31, 3, 3)


class TestHyperMoves:
    def position(self, s):
        spec = GameSpec("H", s, 4, 3)
        eng = make_engine(spec)
        [pos] = eng.opening_responses(AtomMove(1))
        return spec, eng, pos

    def test_transformation_has_one_response(self, monk31):
        spec, eng, pos = self.position(monk31)
        mv = TransformMove(0, ((2, 0), (3, 1)))
        assert mv in eng.legal_moves(pos)
        [r] = eng.responses(pos, mv)
        assert len(r) == 2

    def test_amalgamation_offered_for_compatible_pair(self, monk31):
        spec, eng, pos = self.position(monk31)
        [pos2] = eng.responses(pos, TransformMove(0, ((1, 1), (2, 0))))
        moves = eng.legal_moves(pos2)
        amal = [m for m in moves if isinstance(m, AmalgamationMove)]
        assert amal == [AmalgamationMove(0, 1)]
        outs = eng.responses(pos2, amal[0])
        assert outs and all(len(o) == 3 for o in outs)

    def test_collapsed_full_board_recycles_a_node(self):
        s = monk_ra(1, 1)
        eng = make_engine(GameSpec("H", s, 3, 3))
        g = s.index[Atom("g", 0)]
        H = Hypernetwork(apply_map(EdgeNetwork.single(s, g), {0: 0, 1: 0, 2: 1}), {}, "lam")
        pos = eng.position([H])
        mv = TriangleMove(0, 2, g, s.index[Atom("r", 1)])
        assert mv in eng.legal_moves(pos)
        outs = eng.responses(pos, mv)
        assert outs
        for o in outs:
            assert all(len(h.nodes) <= 3 for h in o)

    def test_representable_structure_survives(self):
        assert solve(GameSpec("H", monk_ra(1, 1), 4, 3)).outcome == EXISTS

    def test_ramsey_obstruction_in_h(self, monk31):
        spec = GameSpec("H", monk31, 4, 3)
        v = solve(spec)
        assert v.outcome == FORALL
        assert replay_certificate(spec, v.certificate).ok


class TestSolver:
    @pytest.mark.parametrize("variant", ["G", "BoldG", "H", "BoldH"])
    def test_trivial_structure(self, variant):
        assert solve(GameSpec(variant, trivial(), 2, 4)).outcome == EXISTS

    def test_monk31_loses(self, monk31):
        spec = GameSpec("G", monk31, 5, 6)
        v = solve(spec)
        assert (v.outcome, v.depth) == (FORALL, 3)
        rep = replay_certificate(spec, v.certificate)
        assert rep.ok and rep.max_depth == 3

    def test_budget_gives_unknown(self, monk31):
        v = solve(GameSpec("G", monk31, 5, 6), budget=2)
        assert v.outcome == UNKNOWN and v.notes

    def test_threads_do_not_change_the_certificate(self, monk31):
        spec = GameSpec("G", monk31, 5, 6)
        a, b = solve(spec, threads=1), solve(spec, threads=4)
        assert a.report()["certificate_digest"] == b.report()["certificate_digest"]

    def test_tampered_certificate_rejected(self, monk31):
        spec = GameSpec("G", monk31, 5, 6)
        cert = solve(spec).certificate
        cert["responses"] = cert["responses"][:-1]
        assert not replay_certificate(spec, cert).ok

    def test_certificate_over_budget_rejected(self, monk31):
        cert = solve(GameSpec("G", monk31, 5, 6)).certificate
        assert not replay_certificate(GameSpec("G", monk31, 5, 2), cert).ok

    def test_exists_table(self):
        v = solve(GameSpec("G", monk_ra(1, 1), 4, 3), exists_table=True)
        assert v.outcome == EXISTS and v.exists_table


class TestLyndon:
    def test_trivial(self):
        table = lyndon_battery(trivial(), 4, 3)
        assert all(v.outcome == EXISTS for v in table.values())

    def test_monk31_monotone(self, monk31):
        table = lyndon_battery(monk31, 5, 5)
        assert [table[k].outcome for k in (1, 2)] == [EXISTS, EXISTS]
        assert all(table[k].outcome == FORALL for k in (3, 4, 5))
        assert table[5].notes == ["monotone from k=3"]

    def test_monk11_survives(self):
        table = lyndon_battery(monk_ra(1, 1), 4, 5)
        assert all(v.outcome == EXISTS for v in table.values())



@pytest.mark.parametrize("g, r, m, k", [(1, 1, 3, 3), (1, 1, 4, 4), (2, 2, 3, 3), (3, 1, 3, 3), (3, 1, 4, 4)])
def test_one_way_implications(g, r, m, k):
    s = monk_ra(g, r)
    plain = solve(GameSpec("G", s, m, k), certificate=False).outcome
    bold = solve(GameSpec("BoldG", s, m, k), certificate=False).outcome
    longer = solve(GameSpec("G", s, m, k + 1), certificate=False).outcome
    # play only differs once the board is full, where G leaves ∃ no answer
    assert plain != EXISTS or bold == EXISTS
    assert plain != FORALL or longer == FORALL
