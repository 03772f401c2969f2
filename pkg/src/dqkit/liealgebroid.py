"""Finite presentations of Lie algebroids on free modules.

An algebroid is presented by an anchor matrix and structure functions on a
frame e_1..e_r; brackets of general sections follow from the Leibniz rule.
All sheaf-theoretic locality is dropped: the formulas here are pointwise
algebraic and fully exercised on free presentations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .calculus import Form, MultiVec, anchor, sort_indices
from .errors import DegreeError, DimensionMismatchError, PreconditionError
from .kernel import Poly
from .poisson import bracket, koszul_bracket


class AlgebroidForm:
    """Alternating p-form on the frame of an algebroid, with Poly coefficients.

    Same normal form as :class:`~dqkit.calculus.Form`, but indices refer to
    frame elements (1..rank), not coordinates.
    """

    __slots__ = ("dim", "rank", "degree", "terms")

    def __init__(self, dim: int, rank: int, degree: int, terms=None):
        # degrees above the rank are permitted and identically zero
        if degree < 0:
            raise DegreeError(f"degree {degree} is negative")
        self.dim = dim
        self.rank = rank
        self.degree = degree
        clean = {}
        if terms:
            for idx, coeff in terms.items():
                idx = tuple(idx)
                if len(idx) != degree:
                    raise DegreeError(f"index tuple {idx} has length != {degree}")
                if any(not 1 <= i <= rank for i in idx):
                    raise DegreeError(f"frame index out of range 1..{rank} in {idx}")
                if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
                    raise DegreeError(f"index tuple {idx} not strictly increasing")
                if isinstance(coeff, (int, Fraction)):
                    coeff = Poly.const(dim, coeff)
                if coeff.dim != dim:
                    raise DimensionMismatchError("coefficient dimension mismatch")
                if not coeff.is_zero():
                    acc = clean.get(idx)
                    clean[idx] = coeff if acc is None else acc + coeff
                    if clean[idx].is_zero():
                        del clean[idx]
        self.terms = clean

    @classmethod
    def zero(cls, dim, rank, degree):
        return cls(dim, rank, degree)

    @classmethod
    def from_poly(cls, rank: int, p: Poly):
        return cls(p.dim, rank, 0, {(): p})

    def as_poly(self) -> Poly:
        if self.degree != 0:
            raise DegreeError("only degree-0 forms reduce to a polynomial")
        return self.terms.get((), Poly.zero(self.dim))

    def value(self, idx) -> Poly:
        """Evaluation on a frame index sequence (antisymmetric in the indices)."""
        sign, key = sort_indices(idx)
        if sign == 0:
            return Poly.zero(self.dim)
        c = self.terms.get(key)
        if c is None:
            return Poly.zero(self.dim)
        return c if sign == 1 else -c

    def is_zero(self):
        return not self.terms

    def _check(self, other):
        if (self.dim, self.rank, self.degree) != (other.dim, other.rank, other.degree):
            raise DimensionMismatchError("algebroid form shape mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for idx, c in other.terms.items():
            acc = out.get(idx)
            acc = c if acc is None else acc + c
            if acc.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = acc
        return AlgebroidForm(self.dim, self.rank, self.degree, out)

    def __neg__(self):
        return AlgebroidForm(
            self.dim, self.rank, self.degree, {i: -c for i, c in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, AlgebroidForm):
            return NotImplemented
        return (
            (self.dim, self.rank, self.degree) == (other.dim, other.rank, other.degree)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.dim, self.rank, self.degree, frozenset(self.terms.items())))

    def __repr__(self):
        return (
            f"AlgebroidForm(dim={self.dim}, rank={self.rank}, deg={self.degree}, "
            f"{dict(sorted(self.terms.items()))!r})"
        )


class AlgebroidPresentation:
    """Anchor matrix and structure functions on a free frame.

    anchor[a][i] is the d_i-component of sigma(e_{a+1}); structure stores
    c_{ab}^k for a < b as vectors of length rank, with [e_a, e_b] =
    sum_k c_{ab}^k e_k extended to general sections by the Leibniz rule.
    """

    __slots__ = ("dim", "rank", "anchor", "structure")

    def __init__(self, dim: int, rank: int, anchor_rows, structure=None):
        self.dim = dim
        self.rank = rank
        rows = []
        for row in anchor_rows:
            row = list(row)
            if len(row) != dim:
                raise DimensionMismatchError("anchor row length != dim")
            row = [
                Poly.const(dim, p) if isinstance(p, (int, Fraction)) else p for p in row
            ]
            for p in row:
                if p.dim != dim:
                    raise DimensionMismatchError("anchor entry dimension mismatch")
            rows.append(tuple(row))
        if len(rows) != rank:
            raise DimensionMismatchError("anchor must have `rank` rows")
        self.anchor = tuple(rows)
        struct = {}
        if structure:
            for (a, b), cs in structure.items():
                if not (1 <= a < b <= rank):
                    raise DegreeError(f"structure key ({a},{b}) must satisfy a < b <= rank")
                cs = [
                    Poly.const(dim, p) if isinstance(p, (int, Fraction)) else p
                    for p in cs
                ]
                if len(cs) != rank:
                    raise DimensionMismatchError("structure vector length != rank")
                if any(p.dim != dim for p in cs):
                    raise DimensionMismatchError("structure entry dimension mismatch")
                if any(not p.is_zero() for p in cs):
                    struct[(a, b)] = tuple(cs)
        self.structure = struct

    # ------------------------------------------------------------------

    @classmethod
    def tangent(cls, dim: int) -> "AlgebroidPresentation":
        """The tangent algebroid: identity anchor, vanishing bracket."""
        rows = []
        for a in range(dim):
            row = [Poly.zero(dim)] * dim
            row[a] = Poly.one(dim)
            rows.append(row)
        return cls(dim, dim, rows)

    def anchor_vec(self, a: int) -> MultiVec:
        """sigma(e_a) as a vector field."""
        terms = {}
        for i, p in enumerate(self.anchor[a - 1], start=1):
            if not p.is_zero():
                terms[(i,)] = p
        return MultiVec(self.dim, 1, terms)

    def anchor_apply(self, a: int, f: Poly) -> Poly:
        """sigma(e_a)(f)."""
        out = Poly.zero(self.dim)
        for i, p in enumerate(self.anchor[a - 1], start=1):
            if not p.is_zero():
                out = out + p * f.partial(i)
        return out

    def frame_bracket(self, a: int, b: int):
        """[e_a, e_b] as a coefficient vector of length rank."""
        zero = Poly.zero(self.dim)
        if a == b:
            return tuple([zero] * self.rank)
        if a < b:
            return self.structure.get((a, b), tuple([zero] * self.rank))
        cs = self.structure.get((b, a))
        if cs is None:
            return tuple([zero] * self.rank)
        return tuple(-p for p in cs)

    def section_bracket(self, u, v):
        """Bracket of sections given as coefficient vectors, via the Leibniz rule:
        [sum_a u_a e_a, sum_b v_b e_b] = sum_{a,b} (u_a v_b [e_a,e_b]
            + u_a sigma(e_a)(v_b) e_b - v_b sigma(e_b)(u_a) e_a)."""
        zero = Poly.zero(self.dim)
        out = [zero] * self.rank
        for a in range(1, self.rank + 1):
            ua = u[a - 1]
            for b in range(1, self.rank + 1):
                vb = v[b - 1]
                if not (ua.is_zero() and vb.is_zero()):
                    if not ua.is_zero() and not vb.is_zero():
                        cs = self.frame_bracket(a, b)
                        for k in range(self.rank):
                            if not cs[k].is_zero():
                                out[k] = out[k] + ua * vb * cs[k]
                    if not ua.is_zero():
                        d = self.anchor_apply(a, vb)
                        if not d.is_zero():
                            out[b - 1] = out[b - 1] + ua * d
                    if not vb.is_zero():
                        d = self.anchor_apply(b, ua)
                        if not d.is_zero():
                            out[a - 1] = out[a - 1] - vb * d
        return tuple(out)


@dataclass(frozen=True)
class AlgebroidCheck:
    """Outcome of check_algebroid, with the first failing pair/triple."""

    ok: bool
    kind: Optional[str] = None  # "anchor" or "jacobi"
    witness: Optional[tuple] = None
    defect: Optional[tuple] = None

    def __bool__(self):
        return self.ok


def check_algebroid(A: AlgebroidPresentation) -> AlgebroidCheck:
    """Verify the axioms on the frame: the anchor is a morphism of Lie
    algebras, and the Jacobi defect (expanded through Leibniz) vanishes."""
    n, r = A.dim, A.rank
    # anchor morphism: sigma([e_a,e_b]) = [sigma(e_a), sigma(e_b)]
    for a in range(1, r + 1):
        for b in range(a + 1, r + 1):
            cs = A.frame_bracket(a, b)
            lhs = [Poly.zero(n)] * n
            for k in range(r):
                if cs[k].is_zero():
                    continue
                for i in range(n):
                    lhs[i] = lhs[i] + cs[k] * A.anchor[k][i]
            Xa, Xb = A.anchor_vec(a), A.anchor_vec(b)
            for i in range(1, n + 1):
                rhs_i = Xa.apply_to(Xb.coeff((i,))) - Xb.apply_to(Xa.coeff((i,)))
                if lhs[i - 1] != rhs_i:
                    return AlgebroidCheck(
                        False, "anchor", (a, b), (i, rhs_i - lhs[i - 1])
                    )
    # Jacobi on frame triples
    zero = Poly.zero(n)
    basis = []
    for a in range(r):
        e = [zero] * r
        e[a] = Poly.one(n)
        basis.append(tuple(e))
    for a, b, c in combinations(range(1, r + 1), 3):
        total = [zero] * r
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            inner = A.section_bracket(basis[y - 1], basis[z - 1])
            outer = A.section_bracket(basis[x - 1], inner)
            for k in range(r):
                total[k] = total[k] + outer[k]
        if any(not t.is_zero() for t in total):
            return AlgebroidCheck(False, "jacobi", (a, b, c), tuple(total))
    return AlgebroidCheck(True)


def algebroid_d(A: AlgebroidPresentation, omega: AlgebroidForm) -> AlgebroidForm:
    """The Cartan differential, evaluated on the frame:

    (d omega)(b_0..b_p) = sum_i (-1)^i sigma(b_i) omega(.. b_i ..)
                        + sum_{i<j} (-1)^{i+j} omega([b_i,b_j], .. b_i, b_j ..)
    """
    if omega.rank != A.rank or omega.dim != A.dim:
        raise DimensionMismatchError("form does not match the algebroid presentation")
    p = omega.degree
    terms = {}
    for key in combinations(range(1, A.rank + 1), p + 1):
        val = Poly.zero(A.dim)
        for i_pos, a in enumerate(key):
            rest = key[:i_pos] + key[i_pos + 1 :]
            term = A.anchor_apply(a, omega.value(rest))
            if i_pos % 2 == 1:
                term = -term
            val = val + term
        for i_pos in range(len(key)):
            for j_pos in range(i_pos + 1, len(key)):
                a, b = key[i_pos], key[j_pos]
                rest = tuple(k for t, k in enumerate(key) if t not in (i_pos, j_pos))
                cs = A.frame_bracket(a, b)
                term = Poly.zero(A.dim)
                for k in range(1, A.rank + 1):
                    ck = cs[k - 1]
                    if not ck.is_zero():
                        term = term + ck * omega.value((k,) + rest)
                if (i_pos + j_pos) % 2 == 1:
                    term = -term
                val = val + term
        if not val.is_zero():
            terms[key] = val
    return AlgebroidForm(A.dim, A.rank, p + 1, terms)


def from_poisson(pi: MultiVec) -> AlgebroidPresentation:
    """The Koszul algebroid of a bivector on the frame e_i = dx_i:
    anchor row i is pi~(dx_i), structure c_{ij}^k = d_k(pi^{ij})."""
    if pi.degree != 2:
        raise DegreeError("from_poisson needs a bivector")
    n = pi.dim
    rows = []
    for i in range(1, n + 1):
        v = anchor(pi, Form.basis(n, i))
        rows.append([v.coeff((j,)) for j in range(1, n + 1)])
    structure = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            pij = bracket(pi, Poly.variable(n, i), Poly.variable(n, j))
            cs = [pij.partial(k) for k in range(1, n + 1)]
            if any(not c.is_zero() for c in cs):
                structure[(i, j)] = cs
    return AlgebroidPresentation(n, n, rows, structure)


def koszul_frame_bracket(pi: MultiVec, i: int, j: int) -> Form:
    """[dx_i, dx_j]_pi as a 1-form (used to cross-check from_poisson)."""
    n = pi.dim
    return koszul_bracket(pi, Form.basis(n, i), Form.basis(n, j))


@dataclass(frozen=True)
class ExtensionData:
    """An abelian extension presented by a base algebroid and a closed 2-form
    twist; the central element is the distinguished O-summand."""

    base: AlgebroidPresentation
    twist: AlgebroidForm

    def __post_init__(self):
        if self.twist.degree != 2:
            raise DegreeError("extension twist must be a 2-form")
        if (self.twist.dim, self.twist.rank) != (self.base.dim, self.base.rank):
            raise DimensionMismatchError("twist does not match the base presentation")
        d = algebroid_d(self.base, self.twist)
        if not d.is_zero():
            raise PreconditionError(
                "extension twist is not closed", witness=d
            )


def extension_curvature(E: ExtensionData, lam: AlgebroidForm) -> AlgebroidForm:
    """Curvature of the splitting b -> (lam(b), b) of the extension:

    c(b_1,b_2) = sigma(b_1) lam(b_2) - sigma(b_2) lam(b_1) + twist(b_1,b_2)
               - lam([b_1,b_2])

    computed from the extension bracket
    [(f,b),(g,c)] = (sigma(b)g - sigma(c)f + twist(b,c), [b,c]).
    """
    A = E.base
    if lam.degree != 1 or (lam.dim, lam.rank) != (A.dim, A.rank):
        raise DegreeError("splitting datum must be a 1-form on the base frame")
    terms = {}
    for a in range(1, A.rank + 1):
        for b in range(a + 1, A.rank + 1):
            val = (
                A.anchor_apply(a, lam.value((b,)))
                - A.anchor_apply(b, lam.value((a,)))
                + E.twist.value((a, b))
            )
            cs = A.frame_bracket(a, b)
            for k in range(1, A.rank + 1):
                ck = cs[k - 1]
                if not ck.is_zero():
                    val = val - ck * lam.value((k,))
            if not val.is_zero():
                terms[(a, b)] = val
    return AlgebroidForm(A.dim, A.rank, 2, terms)


def line_curvature(A: AlgebroidPresentation, lam: AlgebroidForm) -> AlgebroidForm:
    """Curvature of nabla(b) = sigma(b) + lam(b) on the trivial rank-one
    module: d_B lam."""
    if lam.degree != 1:
        raise DegreeError("connection datum must be a 1-form")
    return algebroid_d(A, lam)


def unit_shift(A: AlgebroidPresentation, lam: AlgebroidForm, g: Poly) -> AlgebroidForm:
    """Change of trivialization by the unit e^g: lam + d_B g."""
    if lam.degree != 1:
        raise DegreeError("connection datum must be a 1-form")
    dg = algebroid_d(A, AlgebroidForm.from_poly(A.rank, g))
    return lam + dg
