"""Polydifferential operators: application, slotwise composition, Hochschild calculus.

Operators are kept in normal form (all derivatives to the right of the
coefficient), so equality is structural: zero defect means an empty term map.
Sampling on polynomials appears only as an independent test oracle.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb

from .errors import ArityMismatchError, DimensionMismatchError
from .kernel import Poly


def _zero_mi(dim):
    return (0,) * dim


class PolyDiffOp:
    """Operator in k arguments: (f_1..f_k) -> sum coeff * d^{a_1}f_1 ... d^{a_k}f_k.

    ``terms`` maps k-tuples of multi-indices (each of length dim) to nonzero
    Poly coefficients.
    """

    __slots__ = ("dim", "arity", "terms")

    def __init__(self, dim: int, arity: int, terms=None):
        if arity < 1:
            raise ArityMismatchError("arity must be >= 1")
        self.dim = dim
        self.arity = arity
        clean = {}
        if terms:
            for orders, coeff in terms.items():
                orders = tuple(tuple(o) for o in orders)
                if len(orders) != arity:
                    raise ArityMismatchError(f"order tuple {orders} has arity != {arity}")
                for o in orders:
                    if len(o) != dim or any(e < 0 for e in o):
                        raise DimensionMismatchError(f"bad multi-index {o} for dim {dim}")
                if isinstance(coeff, (int, Fraction)):
                    coeff = Poly.const(dim, coeff)
                if coeff.dim != dim:
                    raise DimensionMismatchError("coefficient dimension mismatch")
                if not coeff.is_zero():
                    acc = clean.get(orders)
                    clean[orders] = coeff if acc is None else acc + coeff
                    if clean[orders].is_zero():
                        del clean[orders]
        self.terms = clean

    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, dim, arity):
        return cls(dim, arity)

    @classmethod
    def identity(cls, dim):
        """The arity-1 identity operator."""
        return cls(dim, 1, {(_zero_mi(dim),): Poly.one(dim)})

    @classmethod
    def multiplication(cls, dim, arity=2):
        """(f_1..f_k) -> f_1 * ... * f_k."""
        return cls(dim, arity, {(_zero_mi(dim),) * arity: Poly.one(dim)})

    @classmethod
    def partial(cls, dim, index):
        """The arity-1 operator d/dx_index."""
        o = [0] * dim
        o[index - 1] = 1
        return cls(dim, 1, {(tuple(o),): Poly.one(dim)})

    def is_zero(self):
        return not self.terms

    def max_order(self):
        """Largest |alpha| over all slots and terms (0 for the zero operator)."""
        best = 0
        for orders in self.terms:
            for o in orders:
                best = max(best, sum(o))
        return best

    def total_order(self):
        """Largest total order (summed over slots) of any term."""
        best = 0
        for orders in self.terms:
            best = max(best, sum(sum(o) for o in orders))
        return best

    def sorted_terms(self):
        return sorted(self.terms.items())

    # ------------------------------------------------------------------

    def _check_same(self, other):
        if self.dim != other.dim:
            raise DimensionMismatchError("operator dimensions differ")
        if self.arity != other.arity:
            raise ArityMismatchError("operator arities differ")

    def __add__(self, other):
        self._check_same(other)
        out = dict(self.terms)
        for orders, c in other.terms.items():
            acc = out.get(orders)
            acc = c if acc is None else acc + c
            if acc.is_zero():
                out.pop(orders, None)
            else:
                out[orders] = acc
        return PolyDiffOp(self.dim, self.arity, out)

    def __neg__(self):
        return PolyDiffOp(self.dim, self.arity, {o: -c for o, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        if isinstance(factor, (int, Fraction)):
            factor = Poly.const(self.dim, factor)
        return PolyDiffOp(
            self.dim, self.arity, {o: c * factor for o, c in self.terms.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.dim, self.arity, frozenset(self.terms.items())))

    def __repr__(self):
        return f"PolyDiffOp(dim={self.dim}, arity={self.arity}, {len(self.terms)} terms)"


# ----------------------------------------------------------------------


def apply_op(D: PolyDiffOp, *args: Poly) -> Poly:
    """Exact evaluation on polynomial arguments."""
    if len(args) != D.arity:
        raise ArityMismatchError(f"operator arity {D.arity}, got {len(args)} arguments")
    for f in args:
        if f.dim != D.dim:
            raise DimensionMismatchError("argument dimension mismatch")
    out = Poly.zero(D.dim)
    for orders, coeff in D.terms.items():
        term = coeff
        dead = False
        for o, f in zip(orders, args):
            df = f.partial_multi(o)
            if df.is_zero():
                dead = True
                break
            term = term * df
        if not dead:
            out = out + term
    return out


def _splittings(alpha, parts):
    """Yield (multinomial coefficient, tuple of `parts` multi-indices summing to alpha).

    The multinomial coefficient is prod_coords alpha_c! / prod_j gamma_{j,c}!.
    """
    per_coord = []
    for a in alpha:
        per_coord.append(list(_compositions_with_coeff(a, parts)))
    for combo in product(*per_coord):
        coeff = 1
        for c, _ in combo:
            coeff *= c
        gammas = tuple(
            tuple(combo[coord][1][j] for coord in range(len(alpha)))
            for j in range(parts)
        )
        yield coeff, gammas


def _compositions_with_coeff(total, parts):
    """All ordered decompositions of `total` into `parts` non-negative ints,
    with their multinomial coefficients."""
    if parts == 1:
        yield 1, (total,)
        return
    for first in range(total + 1):
        c0 = comb(total, first)
        for c, rest in _compositions_with_coeff(total - first, parts - 1):
            yield c0 * c, (first,) + rest


def compose_into_slot(outer: PolyDiffOp, slot: int, inner: PolyDiffOp) -> PolyDiffOp:
    """Plug `inner` into argument slot `slot` (1-based) of `outer`.

    The derivative falling on inner's output is expanded by the multivariate
    Leibniz rule with multinomial coefficients, so the result is again in
    normal form and the identity
    apply(result, args) = apply(outer, ..., apply(inner, middle args), ...)
    holds for all polynomial arguments.
    """
    if not 1 <= slot <= outer.arity:
        raise ArityMismatchError(f"slot {slot} out of range 1..{outer.arity}")
    if outer.dim != inner.dim:
        raise DimensionMismatchError("operator dimensions differ")
    dim = outer.dim
    arity = outer.arity + inner.arity - 1
    out = {}
    j = slot - 1
    for o_orders, o_coeff in outer.terms.items():
        alpha = o_orders[j]
        for i_orders, i_coeff in inner.terms.items():
            # d^alpha (i_coeff * prod_l d^{beta_l} g_l): distribute alpha over
            # the coefficient (part 0) and the m argument factors.
            for mult, gammas in _splittings(alpha, inner.arity + 1):
                dcoeff = i_coeff.partial_multi(gammas[0])
                if dcoeff.is_zero():
                    continue
                coeff = o_coeff * dcoeff
                if mult != 1:
                    coeff = coeff * mult
                new_inner = tuple(
                    tuple(b + g for b, g in zip(i_orders[l], gammas[l + 1]))
                    for l in range(inner.arity)
                )
                orders = o_orders[:j] + new_inner + o_orders[j + 1 :]
                acc = out.get(orders)
                acc = coeff if acc is None else acc + coeff
                if acc.is_zero():
                    out.pop(orders, None)
                else:
                    out[orders] = acc
    return PolyDiffOp(dim, arity, out)


def transpose(P: PolyDiffOp) -> PolyDiffOp:
    """Swap the two argument slots of an arity-2 operator."""
    if P.arity != 2:
        raise ArityMismatchError("transpose needs arity 2")
    return PolyDiffOp(P.dim, 2, {(b, a): c for (a, b), c in P.terms.items()})


def transpose_parts(P: PolyDiffOp):
    """Symmetrization and skew-symmetrization: sym + skew = P."""
    if P.arity != 2:
        raise ArityMismatchError("transpose_parts needs arity 2")
    Pt = transpose(P)
    half = Fraction(1, 2)
    sym = (P + Pt).scale(half)
    skew = (P - Pt).scale(half)
    return sym, skew


def hochschild_delta(Q: PolyDiffOp) -> PolyDiffOp:
    """The Hochschild coboundary of an arity-1 operator:
    dQ(f,g) = Q(fg) - Q(f)g - fQ(g), as an exact operator identity."""
    if Q.arity != 1:
        raise ArityMismatchError("hochschild_delta needs arity 1")
    mul = PolyDiffOp.multiplication(Q.dim)
    return (
        compose_into_slot(Q, 1, mul)
        - compose_into_slot(mul, 1, Q)
        - compose_into_slot(mul, 2, Q)
    )


def cocycle_defect(P: PolyDiffOp) -> PolyDiffOp:
    """The degree-2 Hochschild cocycle condition of an arity-2 operator:
    (f,g,h) -> f P(g,h) - P(fg,h) + P(f,gh) - P(f,g) h."""
    if P.arity != 2:
        raise ArityMismatchError("cocycle_defect needs arity 2")
    mul = PolyDiffOp.multiplication(P.dim)
    return (
        compose_into_slot(mul, 2, P)
        - compose_into_slot(P, 1, mul)
        + compose_into_slot(P, 2, mul)
        - compose_into_slot(mul, 1, P)
    )


def partial_apply(D: PolyDiffOp, slot: int, f: Poly) -> PolyDiffOp:
    """Fill one argument slot with a fixed polynomial (arity drops by one)."""
    if D.arity < 2:
        raise ArityMismatchError("partial_apply needs arity >= 2")
    if not 1 <= slot <= D.arity:
        raise ArityMismatchError(f"slot {slot} out of range 1..{D.arity}")
    if f.dim != D.dim:
        raise DimensionMismatchError("argument dimension mismatch")
    j = slot - 1
    out = {}
    for orders, coeff in D.terms.items():
        df = f.partial_multi(orders[j])
        if df.is_zero():
            continue
        key = orders[:j] + orders[j + 1 :]
        c = coeff * df
        acc = out.get(key)
        acc = c if acc is None else acc + c
        if acc.is_zero():
            out.pop(key, None)
        else:
            out[key] = acc
    return PolyDiffOp(D.dim, D.arity - 1, out)


def find_nonzero_args(D: PolyDiffOp, max_total=12):
    """A tuple of monomials on which a nonzero operator evaluates nonzero.

    Searches monomial tuples of growing total degree; a canonically nonzero
    operator acts nonzero on some monomial tuple, so the search terminates.
    """
    if D.is_zero():
        return None
    for total in range(max_total + 1):
        exps = [e for e in product(range(total + 1), repeat=D.dim) if sum(e) <= total]
        for combo in product(exps, repeat=D.arity):
            if max(sum(e) for e in combo) != total:
                continue  # tuples dominated by smaller totals were already tried
            args = [Poly.monomial(D.dim, e) for e in combo]
            if not apply_op(D, *args).is_zero():
                return tuple(args)
    raise AssertionError("no witness found within search bound; operator inconsistent")
