import itertools
import random
from math import comb

import pytest

from npl import (
    CircuitBuilder,
    CircuitMeta,
    MinorSelection,
    MonomialIndex,
    PolySpace,
    PrimeField,
    RankMethodSpec,
    SparsePoly,
    coordinate_meta,
    discriminant,
    eval_meta,
    linear_meta,
    matrix_det,
    matrix_rank,
    minor_meta,
    partials_matrix,
    rank_mod_p,
    shifted_partials_matrix,
)
from npl.errors import (
    ArityMismatch,
    CharacteristicTooSmall,
    DimensionCapExceeded,
    MinorOutOfRange,
    OrderOutOfRange,
)

from helpers import (
    int_cofactor_det,
    poly_derivative_order,
    random_dense_poly,
    random_product_of_linear_forms,
    row_rank,
)

F2 = PrimeField(2)
F5 = PrimeField(5)
F7 = PrimeField(7)
F101 = PrimeField(101)

SP22 = PolySpace(2, 2, True)


def quad(field, a, b, c):
    return SparsePoly(field, 2, {(2, 0): a, (1, 1): b, (0, 2): c})


class TestDiscriminant:
    def test_worked_values(self):
        disc = discriminant(F7)
        assert eval_meta(disc, [0, 1, 0]) == 1
        assert eval_meta(disc, [1, 2, 1]) == 0
        assert eval_meta(disc, [1, 0, 1]) == 3

    def test_matches_closed_form_everywhere(self):
        disc = discriminant(F7)
        for a, b, c in itertools.product(range(7), repeat=3):
            assert eval_meta(disc, [a, b, c]) == (b * b - 4 * a * c) % 7

    def test_degree_bound(self):
        assert discriminant(F7).degree_bound == 2


class TestPartialsMatrix:
    def test_worked_xy(self):
        f = SparsePoly(F7, 2, {(1, 1): 1})
        m = partials_matrix(f, 1)
        assert m.entries == ((0, 1), (1, 0))
        assert rank_mod_p(m) == 2

    def test_worked_x_squared(self):
        f = SparsePoly(F7, 2, {(2, 0): 1})
        m = partials_matrix(f, 1, space=SP22)
        assert m.entries == ((2, 0), (0, 0))
        assert rank_mod_p(m) == 1

    def test_symbolic_generic_quadratic(self):
        # the k=1 matrix of a x^2 + b xy + c y^2 is [[2a, b], [b, 2c]]
        for a, b, c in itertools.product(range(0, 7, 2), repeat=3):
            m = partials_matrix(quad(F7, a, b, c), 1, space=SP22)
            assert m.entries == (
                ((2 * a) % 7, b % 7),
                (b % 7, (2 * c) % 7),
            )

    def test_symbolic_forms_agree_with_numeric(self):
        f = quad(F7, 3, 5, 2)
        m = partials_matrix(f, 1, space=SP22)
        assert m.symbolic is not None
        assert m.symbolic_value_at(f.coeff_vector(MonomialIndex(SP22))) == m.entries
        assert m.entries == ((6, 5), (5, 4))

    def test_entries_against_derivative_oracle(self):
        rng = random.Random(3)
        for _ in range(15):
            v = rng.randrange(2, 4)
            d = rng.randrange(2, 5)
            f = random_dense_poly(rng, F101, v, d)
            k = rng.randrange(0, d + 1)
            m = partials_matrix(f, k)
            for r, alpha in enumerate(m.row_labels):
                g = poly_derivative_order(f, alpha)
                for c, mono in enumerate(m.col_labels):
                    assert m.entries[r][c] == g.coefficient(mono) % 101

    def test_preconditions(self):
        f = SparsePoly(F2, 1, {(2,): 1})
        with pytest.raises(CharacteristicTooSmall):
            partials_matrix(f, 1)
        g = quad(F7, 1, 0, 0)
        with pytest.raises(OrderOutOfRange):
            partials_matrix(g, 3, space=SP22)
        with pytest.raises(OrderOutOfRange):
            partials_matrix(g, -1, space=SP22)

    def test_dimension_cap(self):
        f = random_dense_poly(random.Random(0), F101, 4, 4)
        with pytest.raises(DimensionCapExceeded):
            shifted_partials_matrix(f, 2, 3, dimension_cap=10)

    def test_linearity_and_scaling(self):
        rng = random.Random(17)
        for _ in range(10):
            d = rng.randrange(2, 5)
            f = random_dense_poly(rng, F101, 3, d)
            g = random_dense_poly(rng, F101, 3, d)
            s = rng.randrange(1, 101)
            for k in range(0, d + 1):
                mf = partials_matrix(f, k).entries
                mg = partials_matrix(g, k).entries
                mfg = partials_matrix(f + g, k).entries
                msf = partials_matrix(f.scale(s), k).entries
                for r in range(len(mf)):
                    for c in range(len(mf[0])):
                        assert mfg[r][c] == (mf[r][c] + mg[r][c]) % 101
                        assert msf[r][c] == (s * mf[r][c]) % 101

    def test_rank_transposition_exhaustive_small(self):
        # p > d makes M_k and M_{d-k} ranks equal
        for a, b, c in itertools.product(range(7), repeat=3):
            f = quad(F7, a, b, c)
            r0 = matrix_rank(partials_matrix(f, 0, space=SP22).entries, 7)
            r2 = matrix_rank(partials_matrix(f, 2, space=SP22).entries, 7)
            r1a = matrix_rank(partials_matrix(f, 1, space=SP22).entries, 7)
            assert r0 == r2
            assert r1a == r1a  # symmetric slot, k = d-k

    def test_rank_transposition_random(self):
        rng = random.Random(23)
        for _ in range(10):
            f = random_dense_poly(rng, F101, 3, 4)
            for k in range(0, 5):
                rk = matrix_rank(partials_matrix(f, k).entries, 101)
                rdk = matrix_rank(partials_matrix(f, 4 - k).entries, 101)
                assert rk == rdk

    def test_product_of_linear_forms_bound(self):
        rng = random.Random(31)
        for _ in range(20):
            v = rng.randrange(2, 5)
            d = rng.randrange(1, 6)
            f = random_product_of_linear_forms(rng, F101, v, d)
            if f.is_zero:
                continue
            for k in range(0, d + 1):
                r = matrix_rank(partials_matrix(f, k).entries, 101)
                assert r <= comb(d, k)

    def test_power_extremal_rank_one(self):
        for v in (1, 2, 3):
            for d in (1, 2, 3, 4):
                f = SparsePoly(F101, v, {tuple([d] + [0] * (v - 1)): 1})
                for k in range(0, d + 1):
                    assert matrix_rank(partials_matrix(f, k).entries, 101) == 1

    def test_rank_agrees_with_oracle(self):
        rng = random.Random(41)
        for _ in range(15):
            f = random_dense_poly(rng, F101, 3, 3)
            k = rng.randrange(0, 4)
            m = partials_matrix(f, k)
            assert rank_mod_p(m) == row_rank(m.entries, 101)


class TestShiftedPartials:
    def test_zero_shift_equals_partials(self):
        f = SparsePoly(F7, 2, {(1, 1): 1})
        assert shifted_partials_matrix(f, 1, 0).entries == partials_matrix(f, 1).entries

    def test_worked_xy(self):
        f = SparsePoly(F7, 2, {(1, 1): 1})
        m = shifted_partials_matrix(f, 1, 1)
        assert m.shape == (4, 3)
        assert matrix_rank(m.entries, 7) == 3

    def test_worked_cube(self):
        f = SparsePoly(F101, 2, {(3, 0): 1})
        m = shifted_partials_matrix(f, 1, 1)
        assert matrix_rank(m.entries, 101) == 2

    def test_entries_against_multiplication_oracle(self):
        rng = random.Random(5)
        for _ in range(10):
            f = random_dense_poly(rng, F101, 2, 3)
            m = shifted_partials_matrix(f, 1, 1)
            for r, (beta, alpha) in enumerate(m.row_labels):
                shift_mono = SparsePoly(F101, 2, {tuple(beta): 1})
                g = shift_mono * poly_derivative_order(f, alpha)
                for c, mono in enumerate(m.col_labels):
                    assert m.entries[r][c] == g.coefficient(mono)


class TestMatrixKernels:
    def test_rank_worked(self):
        assert matrix_rank(((1, 2), (2, 4)), 5) == 1
        assert matrix_rank(((1, 0, 0), (0, 1, 0), (0, 0, 1)), 5) == 3
        assert matrix_rank(((2, 0), (0, 2)), 2) == 0
        assert matrix_rank((), 5) == 0

    def test_det_against_cofactor(self):
        rng = random.Random(77)
        for n in (1, 2, 3, 4):
            for _ in range(10):
                rows = [[rng.randrange(101) for _ in range(n)] for _ in range(n)]
                assert matrix_det(rows, 101) == int_cofactor_det(rows, 101)

    def test_det_permutation_sign(self):
        assert matrix_det(((0, 1), (1, 0)), 7) == 6
        assert matrix_det(((1, 0), (0, 1)), 7) == 1

    def test_rank_against_oracle_random(self):
        rng = random.Random(78)
        for _ in range(30):
            rows = [
                [rng.randrange(7) for _ in range(rng.randrange(1, 5))]
            ]
            cols = len(rows[0])
            for _ in range(rng.randrange(1, 5)):
                rows.append([rng.randrange(7) for _ in range(cols)])
            assert matrix_rank(rows, 7) == row_rank(rows, 7)


class TestMinorMeta:
    def full_minor(self, field=F7):
        spec = RankMethodSpec("partials", 1, 0, MinorSelection("leading", 2))
        return minor_meta(spec, SP22, field)

    def test_worked_values(self):
        T = self.full_minor()
        assert eval_meta(T, [1, 2, 1]) == 0
        assert eval_meta(T, [0, 1, 0]) == 6
        lead1 = minor_meta(
            RankMethodSpec("partials", 1, 0, MinorSelection("leading", 1)),
            SP22,
            F7,
        )
        assert eval_meta(lead1, [1, 0, 0]) == 2

    def test_equals_negated_discriminant_everywhere(self):
        T = self.full_minor()
        disc = discriminant(F7)
        for cv in itertools.product(range(7), repeat=3):
            assert eval_meta(T, cv) == (-eval_meta(disc, cv)) % 7

    def test_degree_bound_is_minor_size(self):
        assert self.full_minor().degree_bound == 2
        spec = RankMethodSpec("partials", 1, 0, MinorSelection("leading", 1))
        assert minor_meta(spec, SP22, F7).degree_bound == 1

    def test_degree_bound_honest_univariate_restriction(self):
        # along a random line the minor must interpolate as degree <= size
        rng = random.Random(6)
        T = self.full_minor(F101)
        base = [rng.randrange(101) for _ in range(3)]
        direction = [rng.randrange(101) for _ in range(3)]
        pts = []
        for t in range(T.degree_bound + 1):
            cv = [(b + t * d) % 101 for b, d in zip(base, direction)]
            pts.append((t, eval_meta(T, cv)))
        # Lagrange-extend to t = size+1 and compare
        t_next = T.degree_bound + 1
        cv = [(b + t_next * d) % 101 for b, d in zip(base, direction)]
        want = eval_meta(T, cv)
        acc = 0
        for i, (ti, yi) in enumerate(pts):
            num, den = yi, 1
            for j, (tj, _) in enumerate(pts):
                if i == j:
                    continue
                num = (num * (t_next - tj)) % 101
                den = (den * (ti - tj)) % 101
            acc = (acc + num * pow(den, 99, 101)) % 101
        assert acc == want

    def test_explicit_and_random_selection(self):
        ex = minor_meta(
            RankMethodSpec(
                "partials", 1, 0,
                MinorSelection("explicit", 1, rows=(1,), cols=(0,)),
            ),
            SP22,
            F7,
        )
        # row d/dy, col x^2 of [[2a, b], [b, 2c]] is b
        assert eval_meta(ex, [0, 3, 0]) == 3
        r1 = minor_meta(
            RankMethodSpec("partials", 1, 0, MinorSelection("random", 2, seed=4)),
            SP22,
            F7,
        )
        r2 = minor_meta(
            RankMethodSpec("partials", 1, 0, MinorSelection("random", 2, seed=4)),
            SP22,
            F7,
        )
        assert r1.meta_id == r2.meta_id
        for cv in ((1, 2, 3), (0, 1, 0), (5, 5, 5)):
            assert eval_meta(r1, cv) == eval_meta(r2, cv)

    def test_minor_out_of_range(self):
        with pytest.raises(MinorOutOfRange):
            minor_meta(
                RankMethodSpec("partials", 1, 0, MinorSelection("leading", 3)),
                SP22,
                F7,
            )
        with pytest.raises(MinorOutOfRange):
            minor_meta(
                RankMethodSpec(
                    "partials", 1, 0,
                    MinorSelection("explicit", 1, rows=(9,), cols=(0,)),
                ),
                SP22,
                F7,
            )

    def test_arity_check(self):
        with pytest.raises(ArityMismatch):
            eval_meta(self.full_minor(), [1, 2])

    def test_shifted_minor(self):
        spec = RankMethodSpec("shifted", 1, 1, MinorSelection("leading", 3))
        T = minor_meta(spec, SP22, F7)
        assert T.degree_bound == 3
        f = SparsePoly(F7, 2, {(1, 1): 1})
        cv = f.coeff_vector(MonomialIndex(SP22))
        m = shifted_partials_matrix(f, 1, 1)
        want = matrix_det([row[:3] for row in m.entries[:3]], 7)
        assert eval_meta(T, cv) == want

    def test_spec_json_round_trip(self):
        for spec in (
            RankMethodSpec("partials", 1, 0, MinorSelection("leading", 2)),
            RankMethodSpec("shifted", 2, 1, MinorSelection("random", 2, seed=9)),
            RankMethodSpec(
                "partials", 0, 0, MinorSelection("explicit", 1, rows=(0,), cols=(0,))
            ),
        ):
            assert RankMethodSpec.from_json(spec.to_json()) == spec


class TestCircuitMeta:
    def test_custom_meta_on_coordinates(self):
        sp = PolySpace(2, 4, True)
        T = coordinate_meta(sp, F5, 3)
        cv = [0] * sp.dimension
        cv[3] = 2
        assert eval_meta(T, cv) == 2
        assert T.degree_bound == 1

    def test_linear_meta(self):
        sp = PolySpace(2, 2, True)
        T = linear_meta(sp, F7, [1, 1, 1])
        assert eval_meta(T, [1, 2, 3]) == 6
        assert T.degree_bound == 1

    def test_circuit_meta_arity_contract(self):
        b = CircuitBuilder(F7, 2)
        c = b.build(b.mul(b.inp(0), b.inp(1)))
        with pytest.raises(ArityMismatch):
            CircuitMeta(SP22, c)
