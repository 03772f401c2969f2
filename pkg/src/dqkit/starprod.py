"""Truncated star products and their gauge theory.

Everything is truncated at a fixed order N: star products are P_1..P_N
(bidifferential operators, P_0 = multiplication), gauge operators are
R = 1 + sum R_i t^i, and all cited identities are checked order by order as
exact operator identities in normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial

from .calculus import MultiVec
from .diffop import (
    PolyDiffOp,
    apply_op,
    compose_into_slot,
    find_nonzero_args,
    hochschild_delta,
    partial_apply,
    transpose,
    transpose_parts,
)
from .errors import (
    DegreeError,
    DimensionMismatchError,
    OrderMismatchError,
    PreconditionError,
    SolveError,
)
from .kernel import Poly, TPoly
from .poisson import bracket, hamiltonian


class StarProduct:
    """f * g = fg + sum_{i=1..N} P_i(f,g) t^i, truncated at order N."""

    __slots__ = ("dim", "order", "P")

    def __init__(self, dim: int, order: int, P):
        if order < 1:
            raise OrderMismatchError("truncation order must be >= 1")
        P = list(P)
        if len(P) != order:
            raise OrderMismatchError(f"need {order} operators P_1..P_{order}, got {len(P)}")
        for op in P:
            if op.dim != dim:
                raise DimensionMismatchError("P_i dimension mismatch")
            if op.arity != 2:
                raise DegreeError("P_i must have arity 2")
        self.dim = dim
        self.order = order
        self.P = tuple(P)

    def op(self, k: int) -> PolyDiffOp:
        """P_k, with P_0 the plain multiplication."""
        if k == 0:
            return PolyDiffOp.multiplication(self.dim)
        return self.P[k - 1]

    @classmethod
    def commutative(cls, dim: int, order: int) -> "StarProduct":
        return cls(dim, order, [PolyDiffOp.zero(dim, 2) for _ in range(order)])

    def __eq__(self, other):
        if not isinstance(other, StarProduct):
            return NotImplemented
        return (self.dim, self.order, self.P) == (other.dim, other.order, other.P)

    def __hash__(self):
        return hash((self.dim, self.order, self.P))

    def __repr__(self):
        return f"StarProduct(dim={self.dim}, order={self.order})"


class GaugeOp:
    """R = 1 + sum_{i=1..N} R_i t^i with R_i differential operators (arity 1)."""

    __slots__ = ("dim", "order", "R")

    def __init__(self, dim: int, order: int, R):
        if order < 1:
            raise OrderMismatchError("truncation order must be >= 1")
        R = list(R)
        if len(R) != order:
            raise OrderMismatchError(f"need {order} operators R_1..R_{order}, got {len(R)}")
        for op in R:
            if op.dim != dim:
                raise DimensionMismatchError("R_i dimension mismatch")
            if op.arity != 1:
                raise DegreeError("R_i must have arity 1")
        self.dim = dim
        self.order = order
        self.R = tuple(R)

    def op(self, k: int) -> PolyDiffOp:
        """R_k, with R_0 the identity."""
        if k == 0:
            return PolyDiffOp.identity(self.dim)
        return self.R[k - 1]

    @classmethod
    def identity_gauge(cls, dim: int, order: int) -> "GaugeOp":
        return cls(dim, order, [PolyDiffOp.zero(dim, 1) for _ in range(order)])

    @classmethod
    def from_vector_field(cls, xi: MultiVec, order: int) -> "GaugeOp":
        """R_xi = 1 + xi t."""
        ops = [PolyDiffOp.zero(xi.dim, 1) for _ in range(order)]
        ops[0] = vector_field_op(xi)
        return cls(xi.dim, order, ops)

    def apply(self, f: TPoly) -> TPoly:
        """(R f)_k = sum_{i+j=k} R_i(f_j)."""
        if f.order != self.order or f.dim != self.dim:
            raise OrderMismatchError("gauge operator and argument disagree")
        out = [Poly.zero(self.dim) for _ in range(self.order + 1)]
        for k in range(self.order + 1):
            acc = f.coeff(k)  # R_0 = 1
            for i in range(1, k + 1):
                Ri = self.op(i)
                if not Ri.is_zero():
                    acc = acc + apply_op(Ri, f.coeff(k - i))
            out[k] = acc
        return TPoly(self.order, out)

    def apply_poly(self, f: Poly) -> TPoly:
        """The standard section determined by R: f -> sum R_i(f) t^i."""
        return self.apply(TPoly.from_poly(f, self.order))

    def __eq__(self, other):
        if not isinstance(other, GaugeOp):
            return NotImplemented
        return (self.dim, self.order, self.R) == (other.dim, other.order, other.R)

    def __hash__(self):
        return hash((self.dim, self.order, self.R))

    def __repr__(self):
        return f"GaugeOp(dim={self.dim}, order={self.order})"


def vector_field_op(xi: MultiVec) -> PolyDiffOp:
    """A degree-1 multivector as an arity-1 differential operator."""
    if xi.degree != 1:
        raise DegreeError("need a vector field")
    terms = {}
    for (i,), c in xi.terms.items():
        o = [0] * xi.dim
        o[i - 1] = 1
        terms[(tuple(o),)] = c
    return PolyDiffOp(xi.dim, 1, terms)


def derivation_to_vector_field(op: PolyDiffOp) -> MultiVec:
    """Inverse of vector_field_op; requires a first-order operator."""
    terms = {}
    for (o,), c in op.terms.items():
        if sum(o) != 1:
            raise DegreeError("operator is not a vector field (has order != 1 terms)")
        i = o.index(1) + 1
        terms[(i,)] = c
    return MultiVec(op.dim, 1, terms)


@dataclass(frozen=True)
class Section:
    """A standard section phi = R~ restricted to O, inside the star model."""

    base: StarProduct
    R: GaugeOp

    def __post_init__(self):
        if (self.base.dim, self.base.order) != (self.R.dim, self.R.order):
            raise OrderMismatchError("section gauge must match its base star product")

    def value(self, f: Poly) -> TPoly:
        return self.R.apply_poly(f)


@dataclass(frozen=True)
class Sigma1:
    """Class of the special standard section 1 + xi t modulo t^2."""

    base: StarProduct
    xi: MultiVec

    def __post_init__(self):
        if not is_special(self.base):
            raise PreconditionError("Sigma1 requires a special base star product")
        if self.xi.degree != 1 or self.xi.dim != self.base.dim:
            raise DegreeError("Sigma1 class must be a vector field of matching dimension")

    def section(self) -> Section:
        return Section(self.base, GaugeOp.from_vector_field(self.xi, self.base.order))


# ----------------------------------------------------------------------
# core operations


def star_mul(S: StarProduct, a: TPoly, b: TPoly) -> TPoly:
    """a * b mod t^{N+1}."""
    if a.order != S.order or b.order != S.order:
        raise OrderMismatchError("operand truncation orders must match the product")
    if a.dim != S.dim or b.dim != S.dim:
        raise DimensionMismatchError("operand dimensions must match the product")
    out = [Poly.zero(S.dim) for _ in range(S.order + 1)]
    for k in range(S.order + 1):
        acc = Poly.zero(S.dim)
        for l in range(k + 1):
            Pl = S.op(l)
            if Pl.is_zero():
                continue
            for i in range(k - l + 1):
                ai = a.coeff(i)
                if ai.is_zero():
                    continue
                bj = b.coeff(k - l - i)
                if bj.is_zero():
                    continue
                acc = acc + apply_op(Pl, ai, bj)
        out[k] = acc
    return TPoly(S.order, out)


def star_commutator(S: StarProduct, a: TPoly, b: TPoly) -> TPoly:
    return star_mul(S, a, b) - star_mul(S, b, a)


def moyal(pi: MultiVec, order: int) -> StarProduct:
    """The Weyl-Moyal product of a constant bivector:

    P_k(f,g) = 1/(2^k k!) sum pi^{i1 j1}..pi^{ik jk} d_{i..}f d_{j..}g.

    Special and associative; the standard witness that star products exist.
    """
    if pi.degree != 2:
        raise DegreeError("moyal needs a bivector")
    n = pi.dim
    entries = {}
    for (i, j), c in pi.terms.items():
        if not c.is_constant():
            raise PreconditionError(f"moyal needs constant coefficients; pi^{(i,j)} = {c!r}")
        v = c.constant_value()
        entries[(i, j)] = v
        entries[(j, i)] = -v
    ops = []
    for k in range(1, order + 1):
        scale = Fraction(1, 2**k * factorial(k))
        terms = {}
        for pairs in product(entries.items(), repeat=k):
            coeff = scale
            alpha = [0] * n
            beta = [0] * n
            for (i, j), v in pairs:
                coeff *= v
                alpha[i - 1] += 1
                beta[j - 1] += 1
            if coeff == 0:
                continue
            key = (tuple(alpha), tuple(beta))
            terms[key] = terms.get(key, Fraction(0)) + coeff
        ops.append(
            PolyDiffOp(n, 2, {k2: v for k2, v in terms.items() if v != 0})
        )
    return StarProduct(n, order, ops)


def unitality_defects(S: StarProduct):
    """Orders at which P_i(1,.) or P_i(.,1) fails to vanish, as operators."""
    one = Poly.one(S.dim)
    out = []
    for k in range(1, S.order + 1):
        left = partial_apply(S.op(k), 1, one)
        right = partial_apply(S.op(k), 2, one)
        if not (left.is_zero() and right.is_zero()):
            out.append((k, left, right))
    return out


def gauge_unitality_defects(R: GaugeOp):
    """Orders at which R_i(1) != 0, with the offending value."""
    one = Poly.one(R.dim)
    out = []
    for k in range(1, R.order + 1):
        val = apply_op(R.op(k), one)
        if not val.is_zero():
            out.append((k, val))
    return out


def assoc_defect(S: StarProduct):
    """Order-by-order associativity defects, one arity-3 operator per t-order:

    D_k = sum_{i+j=k} P_i(P_j(f,g), h) - P_i(f, P_j(g,h)),  P_0 = multiplication.

    S is associative iff every D_k is structurally zero.
    """
    out = []
    for k in range(1, S.order + 1):
        D = PolyDiffOp.zero(S.dim, 3)
        for i in range(k + 1):
            Pi, Pj = S.op(i), S.op(k - i)
            if Pi.is_zero() or Pj.is_zero():
                continue
            D = D + compose_into_slot(Pi, 1, Pj) - compose_into_slot(Pi, 2, Pj)
        out.append(D)
    return out


def is_associative(S: StarProduct) -> bool:
    return all(D.is_zero() for D in assoc_defect(S))


def is_special(S: StarProduct) -> bool:
    """Special: P_1 skew-symmetric."""
    sym, _ = transpose_parts(S.op(1))
    return sym.is_zero()


def assoc_poisson(S: StarProduct) -> MultiVec:
    """The associated Poisson bivector: value on (dx_i, dx_j) is
    P_1(x_i,x_j) - P_1(x_j,x_i)."""
    n = S.dim
    P1 = S.op(1)
    skew2 = P1 - transpose(P1)  # 2 * skew part
    xs = [Poly.variable(n, i) for i in range(1, n + 1)]
    terms = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            v = apply_op(skew2, xs[i - 1], xs[j - 1])
            if not v.is_zero():
                terms[(i, j)] = v
    result = MultiVec(n, 2, terms)
    # the skew part of P_1 must be the biderivation assembled from these values
    bider = {}
    for (i, j), c in result.terms.items():
        a = [0] * n
        b = [0] * n
        a[i - 1] = 1
        b[j - 1] = 1
        half = c * Fraction(1, 2)
        bider[(tuple(a), tuple(b))] = half
        bider[(tuple(b), tuple(a))] = -half
    if PolyDiffOp(n, 2, bider) != skew2.scale(Fraction(1, 2)):
        raise PreconditionError(
            "skew part of P_1 is not a biderivation", witness=skew2
        )
    return result


def gauge_transform(S: StarProduct, R: GaugeOp) -> StarProduct:
    """The unique S' with R(f *' g) = R(f) * R(g) as exact operator identities:

    P'_k = sum_{i+j+l=k} P_i(R_j ., R_l .) - sum_{i=1..k} R_i o P'_{k-i}.
    """
    if (S.dim, S.order) != (R.dim, R.order):
        raise OrderMismatchError("gauge operator must match the star product")
    new_P = []

    def p_prime(k):
        if k == 0:
            return PolyDiffOp.multiplication(S.dim)
        return new_P[k - 1]

    for k in range(1, S.order + 1):
        acc = PolyDiffOp.zero(S.dim, 2)
        for i in range(k + 1):
            Pi = S.op(i)
            if Pi.is_zero():
                continue
            for j in range(k - i + 1):
                l = k - i - j
                term = Pi
                if j:
                    Rj = R.op(j)
                    if Rj.is_zero():
                        continue
                    term = compose_into_slot(term, 1, Rj)
                if l:
                    Rl = R.op(l)
                    if Rl.is_zero():
                        continue
                    term = compose_into_slot(term, 2, Rl)
                acc = acc + term
        for i in range(1, k + 1):
            Ri = R.op(i)
            if Ri.is_zero():
                continue
            prev = p_prime(k - i)
            if prev.is_zero():
                continue
            acc = acc - compose_into_slot(Ri, 1, prev)
        new_P.append(acc)
    return StarProduct(S.dim, S.order, new_P)


def gauge_compose(R: GaugeOp, Q: GaugeOp) -> GaugeOp:
    """(R o Q)(f) = R(Q(f)); series composition order by order."""
    if (R.dim, R.order) != (Q.dim, Q.order):
        raise OrderMismatchError("gauge operators disagree")
    ops = []
    for k in range(1, R.order + 1):
        acc = PolyDiffOp.zero(R.dim, 1)
        for i in range(k + 1):
            Ri, Qj = R.op(i), Q.op(k - i)
            if Ri.is_zero() or Qj.is_zero():
                continue
            acc = acc + compose_into_slot(Ri, 1, Qj)
        ops.append(acc)
    return GaugeOp(R.dim, R.order, ops)


def invert_gauge(R: GaugeOp) -> GaugeOp:
    """Two-sided inverse mod t^{N+1} by the finite Neumann series."""
    N = R.order
    dim = R.dim
    # pure part A: valuation >= 1 series, composed iteratively
    power = {k: R.op(k) for k in range(1, N + 1) if not R.op(k).is_zero()}
    total = {k: PolyDiffOp.zero(dim, 1) for k in range(1, N + 1)}
    sign = -1
    while power:
        for k, op in power.items():
            total[k] = total[k] + (op if sign > 0 else -op)
        # next power: A^{m+1} = A o A^m, truncated
        nxt = {}
        for i in range(1, N + 1):
            Ai = R.op(i)
            if Ai.is_zero():
                continue
            for j, Bj in power.items():
                if i + j > N:
                    continue
                term = compose_into_slot(Ai, 1, Bj)
                if (i + j) in nxt:
                    nxt[i + j] = nxt[i + j] + term
                else:
                    nxt[i + j] = term
        power = {k: v for k, v in nxt.items() if not v.is_zero()}
        sign = -sign
    return GaugeOp(dim, N, [total[k] for k in range(1, N + 1)])


def exp_gauge(Q: PolyDiffOp, order: int) -> GaugeOp:
    """Truncated exp(tQ): R_i = Q^i / i!."""
    if Q.arity != 1:
        raise DegreeError("exp_gauge needs an arity-1 generator")
    ops = []
    power = Q
    for i in range(1, order + 1):
        ops.append(power.scale(Fraction(1, factorial(i))))
        if i < order:
            power = compose_into_slot(Q, 1, power)
    return GaugeOp(Q.dim, order, ops)


# ----------------------------------------------------------------------
# specialization (Hochschild coboundary solve)


def _delta_matrix_rows(op: PolyDiffOp):
    """Flatten an arity-2 operator into {(orders, coeff-exponents): Fraction}."""
    rows = {}
    for orders, coeff in op.terms.items():
        for exps, val in coeff.terms.items():
            rows[(orders, exps)] = val
    return rows


def _solve_exact(columns, target_rows, row_index):
    """Solve sum_j u_j col_j = target over Q.  Returns (solution, residual_rows).

    columns: list of row-dicts; target_rows: row-dict; row_index: ordered keys.
    On inconsistency the solution solves the consistent subsystem and the
    residual is nonzero.
    """
    m = len(row_index)
    n = len(columns)
    A = [[Fraction(0)] * (n + 1) for _ in range(m)]
    pos = {key: r for r, key in enumerate(row_index)}
    for j, col in enumerate(columns):
        for key, val in col.items():
            A[pos[key]][j] = val
    for key, val in target_rows.items():
        A[pos[key]][n] = val
    pivots = []
    perm = list(range(m))  # original row key per current position
    r = 0
    for c in range(n):
        pivot = None
        for rr in range(r, m):
            if A[rr][c] != 0:
                pivot = rr
                break
        if pivot is None:
            continue
        A[r], A[pivot] = A[pivot], A[r]
        perm[r], perm[pivot] = perm[pivot], perm[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for rr in range(m):
            if rr != r and A[rr][c] != 0:
                f = A[rr][c]
                A[rr] = [x - f * y for x, y in zip(A[rr], A[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    solution = [Fraction(0)] * n
    for rr, cc in pivots:
        solution[cc] = A[rr][n]
    residual = {}
    for rr in range(len(pivots), m):
        if A[rr][n] != 0:
            residual[row_index[perm[rr]]] = A[rr][n]
    return solution, residual


def specialize(S: StarProduct, degree_bound: int) -> GaugeOp:
    """A gauge R = exp(tQ) with gauge_transform(S, R) special.

    Q solves the Hochschild coboundary equation delta Q = sym(P_1) by an
    exact linear solve over operators with order <= total order of P_1 and
    polynomial coefficient degree <= degree_bound.
    """
    if not is_associative(S):
        raise PreconditionError("specialize requires an associative star product")
    sym, _ = transpose_parts(S.op(1))
    n = S.dim
    if sym.is_zero():
        return GaugeOp.identity_gauge(n, S.order)
    maxord = S.op(1).total_order()
    # unknown basis: monomial coefficient x^e times d^alpha
    alphas = [a for a in product(range(maxord + 1), repeat=n) if sum(a) <= maxord]
    monos = [e for e in product(range(degree_bound + 1), repeat=n) if sum(e) <= degree_bound]
    basis = []
    columns = []
    keys = {}
    for alpha in alphas:
        for e in monos:
            q = PolyDiffOp(n, 1, {(alpha,): Poly.monomial(n, e)})
            col = _delta_matrix_rows(hochschild_delta(q))
            if not col:
                continue  # derivative-free delta (a derivation); no constraint power
            basis.append(q)
            columns.append(col)
            for key in col:
                keys.setdefault(key, len(keys))
    target = _delta_matrix_rows(sym)
    for key in target:
        keys.setdefault(key, len(keys))
    row_index = sorted(keys, key=keys.get)
    solution, residual = _solve_exact(columns, target, row_index)
    if residual:
        Qp = PolyDiffOp.zero(n, 1)
        for u, q in zip(solution, basis):
            if u != 0:
                Qp = Qp + q.scale(u)
        raise SolveError(
            "no Hochschild coboundary solution within bounds",
            residual=sym - hochschild_delta(Qp),
        )
    Q = PolyDiffOp.zero(n, 1)
    for u, q in zip(solution, basis):
        if u != 0:
            Q = Q + q.scale(u)
    return exp_gauge(Q, S.order)


# ----------------------------------------------------------------------
# Sigma_1, subprincipal curvature, inner automorphisms


def sigma1_class(S: StarProduct, sec: Section) -> Sigma1:
    """Extract the class of a section special relative to S; it is R_1, which
    the speciality forces to be a derivation."""
    if not is_special(S):
        raise PreconditionError("Sigma1 classes live over a special base")
    if sec.base != S:
        raise PreconditionError("section is based on a different star product")
    R1 = sec.R.op(1)
    defect = hochschild_delta(R1)
    if not defect.is_zero():
        witness = find_nonzero_args(defect)
        raise PreconditionError(
            "section is not special: R_1 is not a derivation",
            witness=(witness[0], witness[1]),
        )
    return Sigma1(S, derivation_to_vector_field(R1))


def sigma1_act(phi: Sigma1, xi: MultiVec) -> Sigma1:
    """The torsor action: phi + xi."""
    if xi.dim != phi.base.dim or xi.degree != 1:
        raise DegreeError("action argument must be a matching vector field")
    return Sigma1(phi.base, phi.xi + xi)


def subprincipal(S: StarProduct, sec: Section) -> MultiVec:
    """The subprincipal curvature of a special section:

    c(phi)(f,g) = [coeff of t^2 in phi(f)*phi(g) - phi(g)*phi(f)]
                - [coeff of t^1 in phi({f,g})],

    assembled into a bivector from values on coordinate pairs.
    """
    if S.order < 2:
        raise OrderMismatchError("subprincipal curvature needs truncation order >= 2")
    if sec.base != S:
        raise PreconditionError("section is based on a different star product")
    gauged = gauge_transform(S, sec.R)
    sym, _ = transpose_parts(gauged.op(1))
    if not sym.is_zero():
        witness = find_nonzero_args(sym)
        raise PreconditionError(
            "section is not special: induced P_1 has a symmetric part",
            witness=witness,
        )
    n = S.dim
    pi = assoc_poisson(S)
    R1 = sec.R.op(1)
    xs = [Poly.variable(n, i) for i in range(1, n + 1)]
    terms = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            fi = sec.value(xs[i - 1])
            fj = sec.value(xs[j - 1])
            comm = star_commutator(S, fi, fj)
            val = comm.coeff(2) - apply_op(R1, bracket(pi, xs[i - 1], xs[j - 1]))
            if not val.is_zero():
                terms[(i, j)] = val
    return MultiVec(n, 2, terms)


def ad_exp(S: StarProduct, alpha: TPoly, b: TPoly) -> TPoly:
    """Ad(exp alpha)(b) = sum_i (ad alpha)^i(b) / i!, finite by truncation."""
    if alpha.order != S.order or b.order != S.order:
        raise OrderMismatchError("operands must match the star product order")
    acc = b
    term = b
    for i in range(1, S.order + 1):
        term = star_commutator(S, alpha, term)
        if term.is_zero():
            break
        acc = acc + term * Fraction(1, factorial(i))
    return acc


def sigma1_of_ad(S: StarProduct, alpha: TPoly, phi: Sigma1) -> Sigma1:
    """The class of f -> Ad(exp alpha)(phi(f)); asserted to equal
    phi + X_{sigma(alpha)} (the Hamiltonian field of the classical part)."""
    if phi.base != S:
        raise PreconditionError("class is based on a different star product")
    n = S.dim
    pi = assoc_poisson(S)
    sec = phi.section()
    xs = [Poly.variable(n, i) for i in range(1, n + 1)]
    vals = [ad_exp(S, alpha, sec.value(x)).coeff(1) for x in xs]
    terms = {}
    for i, v in enumerate(vals, start=1):
        if not v.is_zero():
            terms[(i,)] = v
    extracted = MultiVec(n, 1, terms)
    # derivation sanity on quadratic monomials
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            got = ad_exp(S, alpha, sec.value(xs[i - 1] * xs[j - 1])).coeff(1)
            want = xs[i - 1] * vals[j - 1] + xs[j - 1] * vals[i - 1]
            if got != want:
                raise AssertionError(
                    "inner automorphism class is not a derivation; convention breakage"
                )
    expected = sigma1_act(phi, hamiltonian(pi, alpha.sigma))
    if extracted != expected.xi:
        raise AssertionError(
            "Sigma1(Ad exp alpha) disagrees with phi + X_{sigma(alpha)}; convention breakage"
        )
    return expected


# ----------------------------------------------------------------------
# bimodules and the contravariant connection


@dataclass(frozen=True)
class BimoduleModel:
    """Free rank-one bimodule twisted by an algebra isomorphism.

    star1 is A_1; G encodes Phi: A_0 -> A_1 with A_0 = gauge_transform(star1, G);
    the bimodule action is a.m.b = a *1 m *1 Phi(b).  phi0 and phi1 are Sigma1
    classes over A_0 and A_1.
    """

    star1: StarProduct
    G: GaugeOp
    phi0: Sigma1
    phi1: Sigma1

    def __post_init__(self):
        if (self.star1.dim, self.star1.order) != (self.G.dim, self.G.order):
            raise OrderMismatchError("gauge operator must match the star product")
        if self.phi1.base != self.star1:
            raise PreconditionError("phi1 must be a class over star1")
        if self.phi0.base != self.star0:
            raise PreconditionError("phi0 must be a class over gauge_transform(star1, G)")

    @property
    def star0(self) -> StarProduct:
        return gauge_transform(self.star1, self.G)


def contravariant_nabla(M: BimoduleModel, f: Poly, m: Poly) -> Poly:
    """nabla_{df}(m): coefficient of t^1 in phi1(f) *1 m - m *1 Phi(phi0(f))."""
    S1 = M.star1
    if S1.order < 2:
        raise OrderMismatchError("the bimodule connection needs truncation order >= 2")
    if f.dim != S1.dim or m.dim != S1.dim:
        raise DimensionMismatchError("argument dimension mismatch")
    mf = TPoly.from_poly(m, S1.order)
    left = star_mul(S1, M.phi1.section().value(f), mf)
    right = star_mul(S1, mf, M.G.apply(M.phi0.section().value(f)))
    return (left - right).coeff(1)


def nabla_operator(M: BimoduleModel, f: Poly) -> PolyDiffOp:
    """nabla_{df} as an arity-1 operator in the module argument:

    P_1(f, .) - P_1(., f) + (xi1(f) - xi0(f) - G_1(f)) * id.
    """
    S1 = M.star1
    P1 = S1.op(1)
    op = partial_apply(P1, 1, f) - partial_apply(P1, 2, f)
    mult = (
        M.phi1.xi.apply_to(f)
        - M.phi0.xi.apply_to(f)
        - apply_op(M.G.op(1), f)
    )
    if not mult.is_zero():
        op = op + PolyDiffOp(S1.dim, 1, {((0,) * S1.dim,): mult})
    return op


def nabla_curvature(M: BimoduleModel) -> MultiVec:
    """c(nabla)(df,dg) = nabla_df nabla_dg - nabla_dg nabla_df - nabla_{[df,dg]_pi},
    evaluated as a multiplication operator and assembled into a bivector."""
    S1 = M.star1
    if S1.order < 2:
        raise OrderMismatchError("the bimodule connection needs truncation order >= 2")
    n = S1.dim
    pi = assoc_poisson(S1)
    xs = [Poly.variable(n, i) for i in range(1, n + 1)]
    zero_mi = (0,) * n
    terms = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            Di = nabla_operator(M, xs[i - 1])
            Dj = nabla_operator(M, xs[j - 1])
            # [df_i, df_j]_pi = d{f_i, f_j}: the bracket of exact forms is exact
            Dij = nabla_operator(M, bracket(pi, xs[i - 1], xs[j - 1]))
            curv = (
                compose_into_slot(Di, 1, Dj)
                - compose_into_slot(Dj, 1, Di)
                - Dij
            )
            for orders in curv.terms:
                if orders != (zero_mi,):
                    raise PreconditionError(
                        "connection curvature is not a multiplication operator",
                        witness=curv,
                    )
            val = curv.terms.get((zero_mi,))
            if val is not None:
                terms[(i, j)] = val
    return MultiVec(n, 2, terms)
