from __future__ import annotations

import pytest

from artifact.algebra_core import Atom, ComplexAlgebra, check_ra_axioms, validate_ra_atom_structure
from artifact.constructions import (
    MonkParams,
    SplitParams,
    monk_green_pairs,
    monk_ra,
    red_atoms,
    split_blur,
    split_ra,
    theta_embed,
)


class TestMonk:
    def test_smallest(self):
        s = monk_ra(1, 1)
        assert s.size == 3
        A = ComplexAlgebra(s)
        g = A.atom_element(Atom("g", 0))
        assert not any(a.kind == "g" for a in A.atoms_of(A.compose(g, g)))

    def test_green_pair(self, monk21):
        A = ComplexAlgebra(monk21)
        x = A.compose(A.atom_element(Atom("g", 0)), A.atom_element(Atom("g", 1)))
        assert A.atoms_of(x) == [Atom("r", 1)]

    @pytest.mark.xfail(strict=True, reason="one red cannot absorb g0;g1;r1, so associativity fails")
    def test_one_red_is_a_relation_algebra(self, monk31):
        assert check_ra_axioms(ComplexAlgebra(monk31)).ok

    @pytest.mark.parametrize("g", [1, 2, 3, 4])
    def test_two_reds_pass(self, g):
        assert check_ra_axioms(ComplexAlgebra(monk_ra(g, 2))).ok

    def test_symmetric(self, monk31):
        assert monk31.is_symmetric() and validate_ra_atom_structure(monk31).valid

    def test_green_pairs(self, monk31):
        assert len(monk_green_pairs(monk31)) == 6

    def test_bad_params(self):
        with pytest.raises(ValueError):
            MonkParams(0, 1)
        with pytest.raises(ValueError):
            monk_ra(1, 0)


class TestSplit:
    def test_smallest_atoms(self):
        s = split_ra(1, 1)
        assert [(a.kind, a.index) for a in s.atoms] == [("id", 0), ("r0", 0), ("y", 0), ("b", 0)]

    def test_smallest_forbidden_families(self):
        s = split_ra(1, 1)
        i = {a.kind: k for k, a in enumerate(s.atoms)}
        for x in ("r0", "y", "b"):
            assert (i[x], i[x], i[x]) in s.forbidden
        assert (i["y"], i["y"], i["b"]) not in s.forbidden

    def test_split_parts_exclude_reds(self, split22):
        A = ComplexAlgebra(split22)
        x = A.compose(A.atom_element(Atom("r0", 0)), A.atom_element(Atom("r0", 1)))
        assert not any(a.kind in ("r", "r0") for a in A.atoms_of(x))

    def test_axioms(self, split22):
        assert check_ra_axioms(ComplexAlgebra(split22)).ok

    def test_bad_params(self):
        with pytest.raises(ValueError):
            SplitParams(1, 0)


class TestRainbow:
    def test_size_and_rules(self, rainbow3):
        assert rainbow3.size == 1851
        assert rainbow3.dimension == 3
        assert rainbow3.rainbow_rules.tints == (1, 2, 3, 4)

    def test_diagonal_atoms_identify_coordinates(self, rainbow3):
        for k in range(0, rainbow3.size, 97):
            pattern = rainbow3.atoms[k].index[0]
            assert bool(rainbow3.diag[0][1] >> k & 1) == (pattern[0] == pattern[1])

    def test_reds_present(self, rainbow3):
        assert len(red_atoms(rainbow3)) > 0


class TestSplitBlur:
    def test_lambda_one_is_identity(self, rainbow3):
        r = split_blur(rainbow3, red_atoms(rainbow3), 1)
        assert r.split.size == rainbow3.size
        assert all(len(v) == 1 for v in r.copy_map.values())
        assert theta_embed(r).isomorphism

    def test_copies_are_indistinguishable(self, rainbow3):
        reds = red_atoms(rainbow3)[:30]
        r = split_blur(rainbow3, reds, 2)
        s = r.split
        for a in reds:
            p, q = (s.index[c] for c in r.copy_map[a])
            for i in range(3):
                assert s.rows[i][p] | (1 << p) | (1 << q) == s.rows[i][q] | (1 << p) | (1 << q)
            for i in range(3):
                for j in range(3):
                    assert (s.diag[i][j] >> p & 1) == (s.diag[i][j] >> q & 1)

    def test_theta_on_small_split(self, rainbow3):
        reds = red_atoms(rainbow3)[:40]
        rep = theta_embed(split_blur(rainbow3, reds, 2))
        assert rep.injective and rep.homomorphism and not rep.isomorphism
        assert rep.failures == []

    def test_complement_commutes_atomwise(self, rainbow3):
        reds = red_atoms(rainbow3)[:10]
        r = split_blur(rainbow3, reds, 3)
        A, B = ComplexAlgebra(rainbow3), ComplexAlgebra(r.split)

        def theta(x):
            out = 0
            for k, a in enumerate(rainbow3.atoms):
                if x >> k & 1:
                    out |= B.element(r.copy_map[a])
            return out

        for a in reds[:5] + list(rainbow3.atoms[:5]):
            x = A.atom_element(a)
            assert theta(A.complement(x)) == B.complement(theta(x))

    def test_lambda_must_be_positive(self, rainbow3):
        with pytest.raises(ValueError):
            split_blur(rainbow3, [], 0)

    def test_unknown_red(self, rainbow3):
        with pytest.raises(ValueError):
            split_blur(rainbow3, [Atom("zz", 0)], 2)
