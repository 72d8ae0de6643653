from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.algebra_core import (
    Atom,
    CaAtomStructure,
    ComplexAlgebra,
    Cyl,
    RaAtomStructure,
    ScWord,
    Subst,
    check_ca_axioms,
    check_ra_axioms,
    eval_sc_word,
    is_complete_subalgebra,
    is_dense_subalgebra,
    neat_reduct,
    peirce_closure,
    ra_compose,
    ra_reduct,
    sg_generate,
    subst_word,
    validate_ra_atom_structure,
)
from artifact.constructions import full_set_structure, monk_ra, split_ra

ID = Atom("id", 0)
D = Atom("d", 1)


def two_atom(dd_forbidden: bool) -> RaAtomStructure:
    forb = [(ID, ID, D), (ID, D, ID), (D, ID, ID)]
    if dd_forbidden:
        forb.append((D, D, D))
    return RaAtomStructure([ID, D], [ID], None, forb, close=True)


class TestValidation:
    def test_single_identity_atom(self):
        s = RaAtomStructure([ID], [ID], None, [])
        assert validate_ra_atom_structure(s).valid

    def test_monk_is_valid(self, monk31):
        assert validate_ra_atom_structure(monk31).valid

    def test_missing_peircean_transform_is_named(self):
        a, b = Atom("a", 0), Atom("b", 0)
        # (b, b, a) forbidden but its Peircean partner (a, b, b) left consistent
        s = RaAtomStructure([ID, a, b], [ID], None, [(b, b, a)], close=False)
        rep = validate_ra_atom_structure(s)
        assert not rep.valid
        assert any("peirce" in r for r in rep.rules())

    def test_duplicate_atoms_rejected(self):
        with pytest.raises(ValueError):
            RaAtomStructure([ID, ID], [ID], None, [])


class TestComposition:
    def test_green_pair_composes_to_red(self, monk21):
        A = ComplexAlgebra(monk21)
        x = A.atom_element(Atom("g", 0))
        y = A.atom_element(Atom("g", 1))
        assert A.atoms_of(ra_compose(A, x, y)) == [Atom("r", 1)]

    def test_two_atom_forbidden_diversity(self):
        A = ComplexAlgebra(two_atom(True))
        d = A.atom_element(D)
        assert A.atoms_of(A.compose(d, d)) == [ID]

    def test_foreign_element_rejected(self, monk21):
        A = ComplexAlgebra(monk21)
        with pytest.raises(ValueError):
            ra_compose(A, 1 << 10, 1)

    def test_identity_is_neutral(self, monk31):
        A = ComplexAlgebra(monk31)
        for x in range(0, A.top + 1, 7):
            assert A.compose(x, A.identity) == x == A.compose(A.identity, x)


class TestAxioms:
    def test_identity_only(self):
        assert check_ra_axioms(ComplexAlgebra(RaAtomStructure([ID], [ID], None, []))).ok

    @pytest.mark.parametrize("forbidden", [True, False])
    def test_two_atom_algebras(self, forbidden):
        assert check_ra_axioms(ComplexAlgebra(two_atom(forbidden))).ok

    def test_split_table_passes(self, split22):
        assert check_ra_axioms(ComplexAlgebra(split22)).ok

    @pytest.mark.parametrize("g", [2, 3])
    def test_monk_with_one_red_breaks_associativity(self, g):
        rep = check_ra_axioms(ComplexAlgebra(monk_ra(g, 1)))
        assert rep.status == "fail"
        assert {i.rule for i in rep.violations} == {"associativity"}

    def test_budget_gives_unknown(self):
        rep = check_ra_axioms(ComplexAlgebra(monk_ra(3, 2)), budget=5)
        assert rep.status == "unknown"

    def test_full_set_structure_passes(self):
        assert check_ca_axioms(ComplexAlgebra(full_set_structure(3, 2))).ok

    def test_missing_diagonal_atom_fails(self):
        s = full_set_structure(2, 2)
        atoms = list(s.atoms)
        classes = [s.class_of[i] for i in range(2)]
        diags = {(0, 0): atoms[1:], (0, 1): [a for a in atoms if a.index[0] == a.index[1]]}
        bad = CaAtomStructure(2, atoms, classes=classes, diagonals=diags)
        rep = check_ca_axioms(ComplexAlgebra(bad))
        assert rep.status == "fail"

    def test_cylindrifier_of_split_copy(self):
        from artifact.constructions import rainbow_finite, red_atoms, split_blur

        s = rainbow_finite(3)
        r = split_blur(s, red_atoms(s)[:4], 2)
        B = ComplexAlgebra(r.split)
        a = red_atoms(s)[0]
        c0 = B.cylindrify(0, B.atom_element(r.copy_map[a][0]))
        for b in red_atoms(s)[:4]:
            if s.class_of[0][s.index[a]] == s.class_of[0][s.index[b]]:
                for copy in r.copy_map[b]:
                    assert c0 & B.atom_element(copy)


class TestSubalgebras:
    def test_constants_generate_two_atom_algebra(self):
        A = ComplexAlgebra(two_atom(True))
        sub = sg_generate(A, [])
        assert set(sub.elements()) == set(range(A.top + 1))

    def test_whole_algebra_is_dense_and_complete(self, monk31):
        A = ComplexAlgebra(monk31)
        sub = sg_generate(A, [1 << k for k in range(A.width)])
        assert len(sub) == A.top + 1
        assert is_dense_subalgebra(sub, A) and is_complete_subalgebra(sub, A)

    def test_minimal_subalgebra_is_not_dense(self):
        A = ComplexAlgebra(monk_ra(3, 2))
        sub = sg_generate(A, [])
        assert len(sub.blocks) < A.width
        assert not is_dense_subalgebra(sub, A)
        assert is_complete_subalgebra(sub, A)

    def test_non_closed_set_rejected(self, monk31):
        A = ComplexAlgebra(monk31)
        with pytest.raises(ValueError):
            is_dense_subalgebra({0, 1, A.top}, A)


class TestReducts:
    def test_neat_reduct_same_dimension_is_identity(self):
        A = ComplexAlgebra(full_set_structure(3, 2))
        r = neat_reduct(A, 3)
        assert r.algebra is A

    def test_neat_reduct_of_full_structure(self):
        r = neat_reduct(ComplexAlgebra(full_set_structure(4, 2)), 3)
        assert r.algebra.width == 8
        assert check_ca_axioms(r.algebra).ok

    def test_ra_reduct_of_four_dimensional_set_algebra(self):
        r = ra_reduct(ComplexAlgebra(full_set_structure(4, 2)))
        assert r.algebra.width == 4
        assert check_ra_axioms(r.algebra).ok

    def test_ra_reduct_in_dimension_three_does_not_crash(self):
        r = ra_reduct(ComplexAlgebra(full_set_structure(3, 2)))
        assert check_ra_axioms(r.algebra).status in ("pass", "fail")

    def test_ra_reduct_needs_dimension_three(self):
        with pytest.raises(ValueError):
            ra_reduct(ComplexAlgebra(full_set_structure(2, 2)))


class TestScWords:
    def test_empty_word(self):
        assert eval_sc_word(ScWord((), 3)) == {0: 0, 1: 1, 2: 2}

    def test_cylindrifier_removes_index(self):
        assert eval_sc_word(ScWord((Cyl(2),), 4)) == {0: 0, 1: 1, 3: 3}

    def test_substitution_then_cylindrifier(self):
        assert eval_sc_word(ScWord((Subst(0, 1), Cyl(0)), 3)) == {1: 1, 2: 2}

    @pytest.mark.parametrize(
        "i, j, text",
        [(2, 1, "s_2^0 s_1^1"), (2, 0, "s_0^1 s_2^0"), (1, 0, "s_0^2 s_1^0 s_2^1")],
    )
    def test_subst_word_cases(self, i, j, text):
        assert str(subst_word(i, j, 4)) == text

    @given(st.integers(3, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 1), st.integers(0, n - 1))))
    def test_subst_word_sends_01_to_ij(self, args):
        n, i, j = args
        if i == j:
            return
        f = eval_sc_word(subst_word(i, j, n))
        assert (f[0], f[1]) == (i, j)

    def test_letters_out_of_range(self):
        with pytest.raises(ValueError):
            ScWord((Cyl(3),), 3)

    def test_concatenation_checks_arity(self):
        with pytest.raises(ValueError):
            ScWord((), 3) + ScWord((), 4)


@settings(max_examples=40, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), max_size=6))
def test_peirce_closure_is_idempotent(triples):
    conv = (0, 1, 2)
    once = peirce_closure(triples, conv)
    assert peirce_closure(once, conv) == once
    assert set(triples) <= once
