import itertools
import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from npl import (
    AffineForm,
    FieldElement,
    MonomialIndex,
    PolySpace,
    PrimeField,
    SparsePoly,
    identity_forms,
    is_prime,
)
from npl.errors import (
    ArityMismatch,
    DivisionByZero,
    FieldMismatch,
    SpaceMismatch,
    TermCapExceeded,
)

from helpers import exponents_of_degree, random_dense_poly

F2 = PrimeField(2)
F3 = PrimeField(3)
F7 = PrimeField(7)
F13 = PrimeField(13)


class TestPrimeField:
    def test_worked_values(self):
        assert F7.inv(3) == 5
        assert F7.add(6, 5) == 4
        assert F7.pow(2, 5) == 4

    def test_inverse_of_zero(self):
        with pytest.raises(DivisionByZero):
            F7.inv(0)
        with pytest.raises(DivisionByZero):
            F7.inv(14)

    def test_composite_modulus_rejected(self):
        for bad in (0, 1, 4, 6, 9, 15, 341):
            with pytest.raises(ValueError):
                PrimeField(bad)

    def test_is_prime_spot(self):
        assert [n for n in range(2, 30) if is_prime(n)] == [
            2, 3, 5, 7, 11, 13, 17, 19, 23, 29,
        ]
        assert is_prime(2**31 - 1)
        assert not is_prime(2**32 - 1)

    def test_canon_range(self):
        for x in (-10, -1, 0, 6, 7, 100):
            assert 0 <= F7.canon(x) < 7

    @given(st.integers(-50, 50), st.integers(-50, 50))
    def test_field_ring_laws(self, a, b):
        assert F13.add(a, b) == (a + b) % 13
        assert F13.mul(a, b) == (a * b) % 13
        assert F13.sub(a, b) == (a - b) % 13
        if a % 13:
            assert F13.mul(a, F13.inv(a)) == 1


class TestFieldElement:
    def test_operator_surface(self):
        x = F7.elem(3)
        y = F7.elem(6)
        assert (x + y).value == 2
        assert (x - y).value == 4
        assert (x * y).value == 4
        assert (y / x).value == 2
        assert (-x).value == 4
        assert (x ** 2).value == 2
        assert (x ** -1).value == 5
        assert x.inverse().value == 5
        assert (x + 4).value == 0
        assert (2 * x).value == 6
        assert (1 / x).value == 5
        assert bool(x) and not bool(F7.elem(0))
        assert repr(x) == "F7(3)"

    def test_mixed_fields_rejected(self):
        with pytest.raises(FieldMismatch):
            F7.elem(1) + F13.elem(1)


class TestMonomialIndex:
    def test_worked_ranks(self):
        hom22 = MonomialIndex(PolySpace(2, 2, True))
        assert hom22.rank((2, 0)) == 0
        assert hom22.rank((1, 1)) == 1
        assert hom22.rank((0, 2)) == 2
        hom13 = MonomialIndex(PolySpace(3, 1, True))
        assert hom13.rank((0, 0, 1)) == 2

    def test_at_most_block_order(self):
        idx = MonomialIndex(PolySpace(2, 2, False))
        assert list(idx.monomials()) == [
            (2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0),
        ]

    def test_dimension_closed_forms(self):
        for v in range(1, 6):
            for d in range(0, 7):
                assert PolySpace(v, d, True).dimension == comb(v + d - 1, d)
                assert PolySpace(v, d, False).dimension == comb(v + d, d)
        assert PolySpace(2, 2, True).dimension == 3

    def test_round_trip_all_small_spaces(self):
        for v in range(1, 6):
            for d in range(0, 7):
                for homogeneous in (True, False):
                    idx = MonomialIndex(PolySpace(v, d, homogeneous))
                    seen = set()
                    for i in range(idx.dimension):
                        e = idx.unrank(i)
                        assert idx.rank(e) == i
                        seen.add(e)
                    assert len(seen) == idx.dimension
                    for e in seen:
                        assert sum(e) == d or (not homogeneous and sum(e) <= d)

    def test_rank_rejects_foreign_exponents(self):
        idx = MonomialIndex(PolySpace(2, 2, True))
        with pytest.raises(SpaceMismatch):
            idx.rank((1, 0))
        with pytest.raises(IndexError):
            idx.unrank(3)

    def test_monomials_enumeration_matches_oracle(self):
        for v in range(1, 5):
            for d in range(0, 5):
                idx = MonomialIndex(PolySpace(v, d, True))
                assert list(idx.monomials()) == exponents_of_degree(v, d)


class TestPolySpace:
    def test_validation(self):
        with pytest.raises(ValueError):
            PolySpace(0, 2, True)
        with pytest.raises(ValueError):
            PolySpace(2, -1, True)

    def test_json_round_trip(self):
        for sp in (PolySpace(2, 2, True), PolySpace(3, 4, False)):
            assert PolySpace.from_json(sp.to_json()) == sp

    def test_contains(self):
        sp = PolySpace(2, 2, True)
        assert sp.contains_exponents((1, 1))
        assert not sp.contains_exponents((1, 0))
        assert PolySpace(2, 2, False).contains_exponents((1, 0))


class TestCoeffVectors:
    def test_worked_vectors(self):
        idx = MonomialIndex(PolySpace(2, 2, True))
        f = SparsePoly(F7, 2, {(2, 0): 1, (1, 1): 4})
        assert f.coeff_vector(idx) == [1, 4, 0]
        xy = SparsePoly(F7, 2, {(1, 1): 1})
        assert xy.coeff_vector(idx) == [0, 1, 0]
        assert SparsePoly.zero(F7, 2).coeff_vector(idx) == [0, 0, 0]

    def test_round_trip_exhaustive_f3(self):
        idx = MonomialIndex(PolySpace(2, 2, True))
        for vec in itertools.product(range(3), repeat=3):
            f = SparsePoly.from_coeff_vector(F3, idx, vec)
            assert f.coeff_vector(idx) == list(vec)

    def test_space_mismatch(self):
        idx = MonomialIndex(PolySpace(2, 2, True))
        with pytest.raises(SpaceMismatch):
            SparsePoly(F7, 2, {(1, 0): 1}).coeff_vector(idx)


class TestEvaluation:
    def test_worked_values(self):
        f = SparsePoly(F7, 2, {(2, 0): 1, (1, 1): 4})
        assert f.evaluate((1, 1)) == 5
        xy = SparsePoly(F7, 2, {(1, 1): 1})
        assert xy.evaluate((2, 3)) == 6

    def test_at_origin_gives_constant_term(self):
        rng = random.Random(0)
        for _ in range(20):
            terms = {
                tuple(rng.randrange(3) for _ in range(3)): rng.randrange(1, 7)
                for _ in range(rng.randrange(1, 6))
            }
            f = SparsePoly(F7, 3, terms)
            assert f.evaluate((0, 0, 0)) == f.coefficient((0, 0, 0))

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            SparsePoly(F7, 2, {(1, 1): 1}).evaluate((1,))

    @given(
        st.integers(0, 6), st.integers(0, 6),
        st.integers(0, 6), st.integers(0, 6),
        st.integers(0, 6), st.integers(0, 6),
    )
    @settings(max_examples=60)
    def test_linearity_and_multiplicativity(self, a, b, c, d, x, y):
        f = SparsePoly(F7, 2, {(2, 0): a, (1, 1): b})
        g = SparsePoly(F7, 2, {(1, 1): c, (0, 2): d})
        pt = (x, y)
        assert (f + g).evaluate(pt) == (f.evaluate(pt) + g.evaluate(pt)) % 7
        assert (f * g).evaluate(pt) == (f.evaluate(pt) * g.evaluate(pt)) % 7


class TestArithmetic:
    def test_worked_products(self):
        x = SparsePoly.variable(F7, 2, 0)
        y = SparsePoly.variable(F7, 2, 1)
        assert (x + y) * (x - y) == x * x - y * y

    def test_characteristic(self):
        x2 = SparsePoly.variable(F2, 1, 0)
        assert (x2 + x2).is_zero
        x7 = SparsePoly.variable(F7, 1, 0)
        assert (x7 + x7) == x7.scale(2)

    def test_degree_conventions(self):
        assert SparsePoly.zero(F7, 2).degree == -1
        assert SparsePoly.constant(F7, 2, 3).degree == 0
        assert SparsePoly(F7, 2, {(2, 1): 1}).degree == 3

    def test_is_homogeneous(self):
        f = SparsePoly(F7, 2, {(2, 0): 1, (1, 1): 1})
        assert f.is_homogeneous(2) and f.is_homogeneous()
        assert not (f + SparsePoly.constant(F7, 2, 1)).is_homogeneous()
        assert SparsePoly.zero(F7, 2).is_homogeneous(5)

    def test_term_cap(self):
        # each factor doubles the term count; 40 of them overflow any 2^20 cap
        F = PrimeField(2**31 - 1)
        f = SparsePoly.constant(F, 40, 1)
        with pytest.raises(TermCapExceeded):
            for i in range(40):
                xi = SparsePoly.variable(F, 40, i)
                f = f * (xi + SparsePoly.constant(F, 40, 1))

    def test_pow(self):
        x = SparsePoly.variable(F7, 1, 0)
        assert (x + SparsePoly.constant(F7, 1, 1)).pow(2) == SparsePoly(
            F7, 1, {(2,): 1, (1,): 2, (0,): 1}
        )
        assert x.pow(0) == SparsePoly.constant(F7, 1, 1)

    def test_cross_field_rejected(self):
        with pytest.raises(FieldMismatch):
            SparsePoly.variable(F7, 1, 0) + SparsePoly.variable(F13, 1, 0)
        with pytest.raises(ArityMismatch):
            SparsePoly.variable(F7, 1, 0) + SparsePoly.variable(F7, 2, 0)


class TestSubstitution:
    def test_worked_values(self):
        xy = SparsePoly(F7, 2, {(1, 1): 1})
        plus = AffineForm(F7, (1, 1))
        minus = AffineForm(F7, (1, 6))
        got = xy.substitute((plus, minus))
        assert got == SparsePoly(F7, 2, {(2, 0): 1, (0, 2): 6})

    def test_identity(self):
        f = SparsePoly(F7, 2, {(2, 0): 3, (1, 1): 5})
        assert f.substitute(identity_forms(F7, 2)) == f

    def test_constant_form(self):
        F = F13
        x2 = SparsePoly(F, 1, {(2,): 1})
        got = x2.substitute((AffineForm(F, (0,), 3),))
        assert got == SparsePoly.constant(F, 1, 9)

    @given(st.integers(0, 2**30))
    @settings(max_examples=25)
    def test_composition(self, seed):
        rng = random.Random(seed)
        g = random_dense_poly(rng, F7, 2, 2)

        def rand_map():
            return tuple(
                AffineForm(
                    F7,
                    tuple(rng.randrange(7) for _ in range(2)),
                    rng.randrange(7),
                )
                for _ in range(2)
            )

        A, B = rand_map(), rand_map()
        composed = tuple(a.compose(B) for a in A)
        assert g.substitute(A).substitute(B) == g.substitute(composed)


class TestAffineForm:
    def test_evaluate_and_to_poly(self):
        form = AffineForm(F7, (2, 3), 1)
        assert form.evaluate((1, 1)) == 6
        assert form.to_poly() == SparsePoly(F7, 2, {(1, 0): 2, (0, 1): 3, (0, 0): 1})
        assert not form.is_homogeneous
        assert AffineForm(F7, (2, 3)).is_homogeneous


class TestSerialization:
    def test_poly_json_round_trip(self):
        f = SparsePoly(F7, 2, {(2, 0): 3, (1, 1): 5, (0, 2): 2})
        assert SparsePoly.from_json(f.to_json()) == f
        assert SparsePoly.from_json(SparsePoly.zero(F7, 2).to_json()).is_zero

    def test_json_terms_sorted_for_determinism(self):
        f = SparsePoly(F7, 2, {(0, 2): 2, (2, 0): 3, (1, 1): 5})
        exps = [tuple(t["e"]) for t in f.to_json()["terms"]]
        assert exps == sorted(exps, reverse=True)

    def test_semantic_equality_and_hash(self):
        a = SparsePoly(F7, 2, {(1, 1): 8})
        b = SparsePoly(F7, 2, {(1, 1): 1})
        assert a == b and hash(a) == hash(b)
        assert SparsePoly(F7, 2, {(1, 1): 7}).is_zero
