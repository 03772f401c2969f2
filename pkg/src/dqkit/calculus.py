"""Exterior and multivector calculus with polynomial coefficients.

Multivectors and forms are stored in antisymmetry normal form: a finite map
from strictly increasing index tuples to nonzero :class:`~dqkit.kernel.Poly`
coefficients.  Degree 0 uses the empty tuple as its single key.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DegreeError, DimensionMismatchError
from .kernel import Poly


def sort_indices(indices):
    """Sort an index sequence, returning (sign, tuple) or (0, None) on repeats.

    The sign is the parity of the sorting permutation.
    """
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    # insertion sort; counts transpositions exactly
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class _AltTensor:
    """Shared storage for alternating tensors (multivectors and forms)."""

    __slots__ = ("dim", "degree", "terms")
    kind = "tensor"

    def __init__(self, dim: int, degree: int, terms=None):
        # degrees above dim are allowed: their term space is empty, so such
        # tensors are identically zero (needed e.g. for a zero 3-form on R^2)
        if degree < 0:
            raise DegreeError(f"degree {degree} is negative")
        self.dim = dim
        self.degree = degree
        clean = {}
        if terms:
            for idx, coeff in terms.items():
                idx = tuple(idx)
                if len(idx) != degree:
                    raise DegreeError(f"index tuple {idx} has length != degree={degree}")
                if any(not 1 <= i <= dim for i in idx):
                    raise DegreeError(f"index out of range 1..{dim} in {idx}")
                if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
                    raise DegreeError(f"index tuple {idx} not strictly increasing")
                if isinstance(coeff, (int, Fraction)):
                    coeff = Poly.const(dim, coeff)
                if coeff.dim != dim:
                    raise DimensionMismatchError(
                        f"coefficient dim {coeff.dim} != ambient dim {dim}"
                    )
                if not coeff.is_zero():
                    acc = clean.get(idx)
                    clean[idx] = coeff if acc is None else acc + coeff
                    if clean[idx].is_zero():
                        del clean[idx]
        self.terms = clean

    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree)

    @classmethod
    def from_poly(cls, p: Poly):
        """Degree-0 tensor holding a single polynomial."""
        return cls(p.dim, 0, {(): p})

    def as_poly(self) -> Poly:
        if self.degree != 0:
            raise DegreeError("only degree-0 tensors reduce to a polynomial")
        return self.terms.get((), Poly.zero(self.dim))

    def coeff(self, idx) -> Poly:
        sign, key = sort_indices(idx)
        if sign == 0:
            return Poly.zero(self.dim)
        c = self.terms.get(key)
        if c is None:
            return Poly.zero(self.dim)
        return c if sign == 1 else -c

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items())

    # ------------------------------------------------------------------

    def _check_same(self, other):
        if type(self) is not type(other):
            raise TypeError(f"mixed kinds: {type(self).__name__} vs {type(other).__name__}")
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check_same(other)
        if self.degree != other.degree:
            raise DegreeError(f"degrees differ: {self.degree} vs {other.degree}")
        out = dict(self.terms)
        for idx, c in other.terms.items():
            acc = out.get(idx)
            acc = c if acc is None else acc + c
            if acc.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = acc
        return type(self)(self.dim, self.degree, out)

    def __neg__(self):
        return type(self)(self.dim, self.degree, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        """Multiply every coefficient by a Poly or rational."""
        if isinstance(factor, (int, Fraction)):
            factor = Poly.const(self.dim, factor)
        return type(self)(
            self.dim, self.degree, {i: c * factor for i, c in self.terms.items()}
        )

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((type(self).__name__, self.dim, self.degree,
                     frozenset(self.terms.items())))

    def __repr__(self):
        name = type(self).__name__
        if not self.terms:
            return f"{name}({self.dim}, deg={self.degree}, 0)"
        body = ", ".join(f"{idx}: {c!r}" for idx, c in self.sorted_terms())
        return f"{name}({self.dim}, deg={self.degree}, {{{body}}})"


class MultiVec(_AltTensor):
    """Polynomial-coefficient p-vector field on R^n."""

    kind = "multivec"

    @classmethod
    def basis(cls, dim: int, index: int) -> "MultiVec":
        """The coordinate vector field along x_index."""
        return cls(dim, 1, {(index,): Poly.one(dim)})

    def apply_to(self, f: Poly) -> Poly:
        """Apply a vector field (degree 1) to a function as a derivation."""
        if self.degree != 1:
            raise DegreeError("only degree-1 multivectors act on functions")
        out = Poly.zero(self.dim)
        for (i,), c in self.terms.items():
            out = out + c * f.partial(i)
        return out


class Form(_AltTensor):
    """Polynomial-coefficient differential p-form on R^n."""

    kind = "form"

    @classmethod
    def basis(cls, dim: int, index: int) -> "Form":
        """The coordinate differential dx_index."""
        return cls(dim, 1, {(index,): Poly.one(dim)})

    @classmethod
    def d_of(cls, f: Poly) -> "Form":
        """df as a 1-form."""
        terms = {}
        for i in range(1, f.dim + 1):
            p = f.partial(i)
            if not p.is_zero():
                terms[(i,)] = p
        return cls(f.dim, 1, terms)


# ----------------------------------------------------------------------
# operations


def wedge(A, B):
    """Graded-commutative wedge product of two tensors of the same kind."""
    if type(A) is not type(B):
        raise TypeError("wedge requires two multivectors or two forms")
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimensions differ: {A.dim} vs {B.dim}")
    degree = A.degree + B.degree
    out = {}
    for i1, c1 in A.terms.items():
        for i2, c2 in B.terms.items():
            sign, key = sort_indices(i1 + i2)
            if sign == 0:
                continue
            c = c1 * c2
            if sign < 0:
                c = -c
            acc = out.get(key)
            acc = c if acc is None else acc + c
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
    return type(A)(A.dim, degree, out)


def exterior_d(omega: Form) -> Form:
    """De Rham differential; raises the degree by one and squares to zero."""
    if not isinstance(omega, Form):
        raise TypeError("exterior_d acts on forms")
    out = {}
    for idx, c in omega.terms.items():
        for i in range(1, omega.dim + 1):
            p = c.partial(i)
            if p.is_zero():
                continue
            sign, key = sort_indices((i,) + idx)
            if sign == 0:
                continue
            if sign < 0:
                p = -p
            acc = out.get(key)
            acc = p if acc is None else acc + p
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
    return Form(omega.dim, omega.degree + 1, out)


def interior(X: MultiVec, omega: Form) -> Form:
    """Contraction of a vector field into the first slot of a form."""
    if not (isinstance(X, MultiVec) and X.degree == 1):
        raise DegreeError("interior product needs a degree-1 multivector")
    if not isinstance(omega, Form):
        raise TypeError("interior product contracts a form")
    if X.dim != omega.dim:
        raise DimensionMismatchError(f"dimensions differ: {X.dim} vs {omega.dim}")
    if omega.degree == 0:
        raise DegreeError("cannot contract into a degree-0 form")
    out = {}
    for idx, c in omega.terms.items():
        for pos, i in enumerate(idx):
            xc = X.terms.get((i,))
            if xc is None:
                continue
            coeff = xc * c
            if pos % 2 == 1:
                coeff = -coeff
            key = idx[:pos] + idx[pos + 1 :]
            acc = out.get(key)
            acc = coeff if acc is None else acc + coeff
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
    return Form(omega.dim, omega.degree - 1, out)


def lie_derivative(X: MultiVec, omega: Form) -> Form:
    """Cartan formula L_X = i_X d + d i_X (exact, no flows)."""
    if not (isinstance(X, MultiVec) and X.degree == 1):
        raise DegreeError("Lie derivative needs a degree-1 multivector")
    if X.dim != omega.dim:
        raise DimensionMismatchError(f"dimensions differ: {X.dim} vs {omega.dim}")
    if omega.degree == 0:
        # L_X f = X(f); i_X of a 0-form is not defined
        return Form.from_poly(X.apply_to(omega.as_poly()))
    return interior(X, exterior_d(omega)) + exterior_d(interior(X, omega))


def pair(A: MultiVec, *alphas: Form) -> Poly:
    """Full antisymmetric contraction of a p-vector with p one-forms."""
    if not isinstance(A, MultiVec):
        raise TypeError("pair contracts a multivector with one-forms")
    if len(alphas) != A.degree:
        raise DegreeError(f"need {A.degree} one-forms, got {len(alphas)}")
    for a in alphas:
        if not (isinstance(a, Form) and a.degree == 1):
            raise DegreeError("pair arguments must be 1-forms")
        if a.dim != A.dim:
            raise DimensionMismatchError("dimension mismatch in pair")
    if A.degree == 0:
        return A.as_poly()
    out = Poly.zero(A.dim)
    for idx, c in A.terms.items():
        # determinant of the matrix alpha_col(partial_row) by Leibniz expansion
        out = out + c * _det([[a.coeff((i,)) for a in alphas] for i in idx])
    return out


def form_eval(omega: Form, vectors) -> Poly:
    """Evaluate a p-form on p vector fields."""
    vectors = list(vectors)
    if len(vectors) != omega.degree:
        raise DegreeError(f"need {omega.degree} vectors, got {len(vectors)}")
    for v in vectors:
        if not (isinstance(v, MultiVec) and v.degree == 1):
            raise DegreeError("form_eval arguments must be vector fields")
        if v.dim != omega.dim:
            raise DimensionMismatchError("dimension mismatch in form_eval")
    if omega.degree == 0:
        return omega.as_poly()
    out = Poly.zero(omega.dim)
    for idx, c in omega.terms.items():
        out = out + c * _det([[v.coeff((i,)) for v in vectors] for i in idx])
    return out


def _det(rows) -> Poly:
    """Exact determinant of a small square matrix of Polys (Laplace expansion)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    out = None
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        if j % 2 == 1:
            term = -term
        out = term if out is None else out + term
    return out


def schouten(A: MultiVec, B: MultiVec) -> MultiVec:
    """Schouten-Nijenhuis bracket of multivector fields.

    Sign convention (validated against the Leibniz/antisymmetry recursion in
    the test suite):  with each stored term c*d_I decomposed as
    (c d_{i1}) ^ d_{i2} ^ ... the bracket of decomposables is

        [c d_I, e d_J] = sum_r (-1)^(a+r) c (d_{i_r} e) d_{I\\i_r} ^ d_J
                       + sum_s (-1)^s     e (d_{j_s} c) d_I ^ d_{J\\j_s}

    where a = |I| and r, s count from 1.
    """
    if not (isinstance(A, MultiVec) and isinstance(B, MultiVec)):
        raise TypeError("schouten bracket acts on multivectors")
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimensions differ: {A.dim} vs {B.dim}")
    dim = A.dim
    degree = A.degree + B.degree - 1
    if degree < 0:  # [f, g] = 0 lives in degree -1; report as scalar zero
        return MultiVec.zero(dim, 0)
    out = {}

    def add(seq, coeff):
        if coeff.is_zero():
            return
        sign, key = sort_indices(seq)
        if sign == 0:
            return
        if sign < 0:
            coeff = -coeff
        acc = out.get(key)
        acc = coeff if acc is None else acc + coeff
        if acc.is_zero():
            out.pop(key, None)
        else:
            out[key] = acc

    for I, c in A.terms.items():
        a = len(I)
        for J, e in B.terms.items():
            b = len(J)
            if a == 0 and b == 0:
                continue
            # first half: A differentiates B's coefficient
            for r0, i in enumerate(I):
                d_e = e.partial(i)
                if d_e.is_zero():
                    continue
                coeff = c * d_e
                if (a + r0 + 1) % 2 == 1:
                    coeff = -coeff
                add(I[:r0] + I[r0 + 1 :] + J, coeff)
            # second half: B differentiates A's coefficient
            for s0, j in enumerate(J):
                d_c = c.partial(j)
                if d_c.is_zero():
                    continue
                coeff = e * d_c
                if (s0 + 1) % 2 == 1:
                    coeff = -coeff
                add(I + J[:s0] + J[s0 + 1 :], coeff)
    return MultiVec(dim, degree, out)


def pi_matrix_entry(pi: MultiVec, i: int, j: int) -> Poly:
    """The antisymmetric matrix entry pi^{ij} of a bivector."""
    if pi.degree != 2:
        raise DegreeError("pi must be a bivector")
    if i == j:
        return Poly.zero(pi.dim)
    if i < j:
        return pi.terms.get((i, j), Poly.zero(pi.dim))
    c = pi.terms.get((j, i))
    return Poly.zero(pi.dim) if c is None else -c


def anchor(pi: MultiVec, alpha: Form) -> MultiVec:
    """The anchor map: pi~(alpha)^j = sum_i alpha_i pi^{ij}, a vector field."""
    if not (isinstance(alpha, Form) and alpha.degree == 1):
        raise DegreeError("anchor applies to 1-forms")
    if pi.dim != alpha.dim:
        raise DimensionMismatchError("dimension mismatch in anchor")
    terms = {}
    for (i,), ai in alpha.terms.items():
        for j in range(1, pi.dim + 1):
            pij = pi_matrix_entry(pi, i, j)
            if pij.is_zero():
                continue
            c = ai * pij
            acc = terms.get((j,))
            acc = c if acc is None else acc + c
            if acc.is_zero():
                terms.pop((j,), None)
            else:
                terms[(j,)] = acc
    return MultiVec(pi.dim, 1, terms)


def anchor_pullback(pi: MultiVec, omega: Form) -> MultiVec:
    """Raise every index of a p-form through the bivector.

    Each index of omega is contracted against the first slot of a copy of pi:
    T^{k_1..k_p} = omega_{j_1..j_p} pi^{j_1 k_1} .. pi^{j_p k_p}.
    Equivalently, T evaluated on covectors a^1..a^p equals
    (-1)^p omega(pi~ a^1, .., pi~ a^p); for p = 1 this is the anchor itself,
    and for p = 2 the value on (dx_i, dx_j) is omega(pi~ dx_i, pi~ dx_j).
    The result is reconstructed from its values on coordinate differentials,
    which is valid because it is a multiderivation.
    """
    if pi.degree != 2:
        raise DegreeError("anchor_pullback needs a bivector")
    if pi.dim != omega.dim:
        raise DimensionMismatchError(f"dimensions differ: {pi.dim} vs {omega.dim}")
    dim, p = pi.dim, omega.degree
    if p == 0:
        return MultiVec.from_poly(omega.as_poly())
    images = {i: anchor(pi, Form.basis(dim, i)) for i in range(1, dim + 1)}
    sign = -1 if p % 2 else 1
    terms = {}
    for key in _increasing_tuples(dim, p):
        val = form_eval(omega, [images[i] for i in key])
        if not val.is_zero():
            terms[key] = val if sign == 1 else -val
    return MultiVec(dim, p, terms)


def _increasing_tuples(dim: int, p: int):
    """All strictly increasing p-tuples from 1..dim."""
    from itertools import combinations

    return combinations(range(1, dim + 1), p)


def schouten_by_recursion(A: MultiVec, B: MultiVec) -> MultiVec:
    """Reference Schouten bracket, reduced term by term through the defining
    recursion: [X,f] = X(f), [X,Y] = Lie bracket, the graded Leibniz rule in
    the second slot, and graded antisymmetry.  Exponential-time; kept as the
    independent oracle for the coordinate implementation.
    """
    if A.dim != B.dim:
        raise DimensionMismatchError("dimension mismatch")
    dim = A.dim
    degree = max(A.degree + B.degree - 1, 0)
    total = MultiVec.zero(dim, degree)
    for I, c in A.terms.items():
        for J, e in B.terms.items():
            u = _factors(dim, I, c)
            v = _factors(dim, J, e)
            total = total + _sn_rec(dim, u, v)
    return total


def _factors(dim, idx, coeff):
    """Decompose c*d_I into vector-field factors; degree 0 stays a scalar."""
    if not idx:
        return [("f", coeff)]
    out = [("v", MultiVec(dim, 1, {(idx[0],): coeff}))]
    for i in idx[1:]:
        out.append(("v", MultiVec.basis(dim, i)))
    return out


def _wedge_factors(dim, factors):
    acc = None
    scalar = None
    for kind, val in factors:
        if kind == "f":
            scalar = val if scalar is None else scalar * val
        else:
            acc = val if acc is None else wedge(acc, val)
    if acc is None:
        return MultiVec.from_poly(scalar if scalar is not None else Poly.one(dim))
    if scalar is not None:
        acc = acc.scale(scalar)
    return acc


def _sn_rec(dim, u, v):
    """[u, v] for lists of factors (each ('v', vector) or a single ('f', poly))."""
    a = sum(1 for k, _ in u if k == "v")
    b = sum(1 for k, _ in v if k == "v")
    if a == 0 and b == 0:
        return MultiVec.zero(dim, 0)
    if b == 0:
        # [A, f] = -(-1)^{(a-1)(0-1)} [f, A]
        res = _sn_rec(dim, v, u)
        if (a - 1) % 2 == 0:
            res = -res
        return res
    if a == 0:
        f = u[0][1]
        if b == 1:
            # [f, X] = -X(f)
            return MultiVec.from_poly(-v[0][1].apply_to(f))
        # [f, Y ^ C] = [f,Y] ^ C + (-1)^{(0-1)*1} Y ^ [f,C]
        head, tail = v[0][1], v[1:]
        first = _wedge_factors(dim, tail).scale(_sn_rec(dim, u, [("v", head)]).as_poly())
        second = wedge(head, _sn_rec(dim, u, tail))
        return first - second
    if a == 1 and b == 1:
        X, Y = u[0][1], v[0][1]
        terms = {}
        for (j,), yc in Y.terms.items():
            c = X.apply_to(yc)
            if not c.is_zero():
                acc = terms.get((j,))
                terms[(j,)] = c if acc is None else acc + c
        for (i,), xc in X.terms.items():
            c = Y.apply_to(xc)
            if not c.is_zero():
                acc = terms.get((i,))
                nc = -c
                terms[(i,)] = nc if acc is None else acc + nc
        return MultiVec(dim, 1, {k: v2 for k, v2 in terms.items() if not v2.is_zero()})
    if b > 1:
        # [A, Y ^ C] = [A,Y] ^ C + (-1)^{(a-1)*1} Y ^ [A,C]
        head, tail = v[0][1], v[1:]
        left = _sn_rec(dim, u, [("v", head)])
        first = _wedge_or_scale(dim, left, tail)
        second = wedge(head, _sn_rec(dim, u, tail))
        if (a - 1) % 2 == 1:
            second = -second
        return first + second
    # a > 1, b == 1: swap via graded antisymmetry
    res = _sn_rec(dim, v, u)
    if ((a - 1) * (b - 1)) % 2 == 0:
        res = -res
    return res


def _wedge_or_scale(dim, left, factors):
    right = _wedge_factors(dim, factors)
    if left.degree == 0:
        return right.scale(left.as_poly())
    if right.degree == 0:
        return left.scale(right.as_poly())
    return wedge(left, right)
