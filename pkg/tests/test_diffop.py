from fractions import Fraction

import pytest

from dqkit.diffop import (
    PolyDiffOp,
    apply_op,
    cocycle_defect,
    compose_into_slot,
    find_nonzero_args,
    hochschild_delta,
    partial_apply,
    transpose_parts,
)
from dqkit.errors import ArityMismatchError
from dqkit.kernel import Poly

from conftest import rand_diffop1, rand_poly

x = Poly.variable(2, 1)
y = Poly.variable(2, 2)


def op2(terms):
    return PolyDiffOp(2, 2, terms)


class TestApply:
    def test_tensor_of_partials(self):
        D = op2({((1, 0), (0, 1)): 1})
        assert apply_op(D, x * x, x * y) == 2 * x * x

    def test_identity(self):
        f = 3 * x * y + y
        assert apply_op(PolyDiffOp.identity(2), f) == f

    def test_coefficient(self):
        D = PolyDiffOp(2, 2, {((1, 0), (0, 0)): y})
        assert apply_op(D, x, x) == y * x

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatchError):
            apply_op(PolyDiffOp.identity(2), x, y)

    def test_multilinear(self, rng):
        D = op2({((1, 0), (0, 1)): y, ((0, 0), (2, 0)): 1})
        f, g, h = (rand_poly(rng, 2) for _ in range(3))
        assert apply_op(D, f + h, g) == apply_op(D, f, g) + apply_op(D, h, g)
        assert apply_op(D, f.__mul__(Fraction(2, 3)), g) == apply_op(D, f, g) * Fraction(2, 3)


class TestCompose:
    def test_leibniz_through_multiplication(self):
        outer = op2({((0, 0), (1, 0)): 1})  # (f,g) -> f * dx g
        inner = PolyDiffOp.multiplication(2)
        comp = compose_into_slot(outer, 2, inner)
        f, g, h = x + y, x * y, y * y
        assert apply_op(comp, f, g, h) == f * (g.partial(1) * h + g * h.partial(1))

    def test_partial_into_partial(self):
        dxo = PolyDiffOp.partial(2, 1)
        assert compose_into_slot(dxo, 1, dxo) == PolyDiffOp(2, 1, {((2, 0),): 1})

    def test_evaluation_oracle(self, rng):
        for _ in range(20):
            outer = PolyDiffOp(
                2,
                2,
                {
                    ((rng.randint(0, 2), rng.randint(0, 1)), (rng.randint(0, 2), 0)): rand_poly(rng, 2)
                },
            )
            inner = PolyDiffOp(
                2,
                2,
                {((rng.randint(0, 1), rng.randint(0, 2)), (0, rng.randint(0, 2))): rand_poly(rng, 2)},
            )
            slot = rng.choice([1, 2])
            comp = compose_into_slot(outer, slot, inner)
            args = [rand_poly(rng, 2, max_degree=3) for _ in range(3)]
            mid = apply_op(inner, args[slot - 1], args[slot])
            rest = (
                [mid, args[2]] if slot == 1 else [args[0], mid]
            )
            assert apply_op(comp, *args) == apply_op(outer, *rest)

    def test_nested_associativity(self, rng):
        # composing into slot 1 twice agrees with evaluation either way
        for _ in range(10):
            A = rand_diffop1(rng, 2, unital=False)
            B = rand_diffop1(rng, 2, unital=False)
            C = rand_diffop1(rng, 2, unital=False)
            left = compose_into_slot(compose_into_slot(A, 1, B), 1, C)
            right = compose_into_slot(A, 1, compose_into_slot(B, 1, C))
            assert left == right

    def test_slot_out_of_range(self):
        with pytest.raises(ArityMismatchError):
            compose_into_slot(PolyDiffOp.identity(2), 2, PolyDiffOp.identity(2))


class TestTransposeParts:
    def test_tensor_split(self):
        P = op2({((1, 0), (0, 1)): 1})
        sym, skew = transpose_parts(P)
        h = Fraction(1, 2)
        assert sym == op2({((1, 0), (0, 1)): h, ((0, 1), (1, 0)): h})
        assert skew == op2({((1, 0), (0, 1)): h, ((0, 1), (1, 0)): -h})
        assert sym + skew == P

    def test_symmetric_operator(self):
        P = op2({((1, 0), (1, 0)): x})
        sym, skew = transpose_parts(P)
        assert sym == P and skew.is_zero()

    def test_moyal_p1_is_skew(self, moyal2):
        sym, skew = transpose_parts(moyal2.op(1))
        assert sym.is_zero() and skew == moyal2.op(1)


class TestHochschild:
    def test_derivation_has_zero_delta(self):
        assert hochschild_delta(PolyDiffOp.partial(2, 1)).is_zero()

    def test_half_square(self):
        Q = PolyDiffOp(2, 1, {((2, 0),): Fraction(1, 2)})
        assert hochschild_delta(Q) == op2({((1, 0), (1, 0)): 1})

    def test_multiplication_operator(self):
        Q = PolyDiffOp(2, 1, {((0, 0),): x})
        assert hochschild_delta(Q) == op2({((0, 0), (0, 0)): -x})

    def test_delta_delta_zero(self, rng):
        for _ in range(12):
            Q = rand_diffop1(rng, 2, max_order=3, unital=False)
            assert cocycle_defect(hochschild_delta(Q)).is_zero()

    def test_biderivation_is_cocycle(self, moyal2):
        assert cocycle_defect(moyal2.op(1)).is_zero()

    def test_order_zero_multiplication_is_cocycle(self):
        P = op2({((0, 0), (0, 0)): x})
        defect = cocycle_defect(P)
        assert defect.is_zero()
        # evaluation oracle agrees
        f, g, h = x, y, x + y
        val = (
            f * apply_op(P, g, h)
            - apply_op(P, f * g, h)
            + apply_op(P, f, g * h)
            - apply_op(P, f, g) * h
        )
        assert val.is_zero()


class TestHelpers:
    def test_partial_apply(self):
        P = op2({((1, 0), (0, 1)): 1})
        T = partial_apply(P, 1, x * x)
        assert T == PolyDiffOp(2, 1, {((0, 1),): 2 * x})

    def test_find_nonzero_args(self):
        D = op2({((1, 0), (1, 0)): 1})
        args = find_nonzero_args(D)
        assert args is not None and not apply_op(D, *args).is_zero()
        assert find_nonzero_args(PolyDiffOp.zero(2, 2)) is None
