"""Poisson brackets, the Koszul bracket on 1-forms, and the Lichnerowicz differential.

Sign conventions, pinned by the evaluation formulas below and asserted in the
test suite against the Schouten bracket of :mod:`dqkit.calculus`:

    schouten(pi, A) = EPSILON[p] * lichnerowicz_d(pi, A)   (p = A.degree)

with the realized table EPSILON = {0: -1, 1: +1, 2: +1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .calculus import (
    Form,
    MultiVec,
    anchor,
    exterior_d,
    lie_derivative,
    pair,
)
from .errors import DegreeError, DimensionMismatchError, PreconditionError
from .kernel import Poly

#: Realized sign table relating schouten(pi, .) to lichnerowicz_d(pi, .) per degree.
EPSILON = {0: -1, 1: 1, 2: 1}


@dataclass(frozen=True)
class PoissonCheck:
    """Outcome of a Jacobi verification; carries the first failing witness."""

    ok: bool
    witness: Optional[tuple] = None
    defect: Optional[Poly] = None

    def __bool__(self):
        return self.ok


class PoissonStructure:
    """A bivector together with the result of its Jacobi verification."""

    __slots__ = ("pi", "checked")

    def __init__(self, pi: MultiVec, check: bool = True):
        if pi.degree != 2:
            raise DegreeError("a Poisson structure is a bivector")
        self.pi = pi
        self.checked = False
        if check:
            result = is_poisson(pi)
            if not result:
                raise PreconditionError(
                    f"bivector is not Poisson: jacobiator{result.witness} = {result.defect!r}",
                    witness=result,
                )
            self.checked = True


def bracket(pi: MultiVec, f: Poly, g: Poly) -> Poly:
    """{f,g} = pi(df, dg) = sum pi^{ij} d_i f d_j g."""
    if pi.degree != 2:
        raise DegreeError("bracket needs a bivector")
    if pi.dim != f.dim or pi.dim != g.dim:
        raise DimensionMismatchError("dimension mismatch in bracket")
    out = Poly.zero(pi.dim)
    for (i, j), c in pi.terms.items():
        out = out + c * (f.partial(i) * g.partial(j) - f.partial(j) * g.partial(i))
    return out


def jacobiator(pi: MultiVec, f: Poly, g: Poly, h: Poly) -> Poly:
    """{f,{g,h}} + {g,{h,f}} + {h,{f,g}}."""
    return (
        bracket(pi, f, bracket(pi, g, h))
        + bracket(pi, g, bracket(pi, h, f))
        + bracket(pi, h, bracket(pi, f, g))
    )


def is_poisson(pi: MultiVec) -> PoissonCheck:
    """Jacobi on all coordinate triples (sufficient: brackets are derivations)."""
    if pi.degree != 2:
        raise DegreeError("is_poisson needs a bivector")
    n = pi.dim
    xs = [Poly.variable(n, i) for i in range(1, n + 1)]
    for i, j, k in combinations(range(n), 3):
        defect = jacobiator(pi, xs[i], xs[j], xs[k])
        if not defect.is_zero():
            return PoissonCheck(False, (i + 1, j + 1, k + 1), defect)
    return PoissonCheck(True)


def hamiltonian(pi: MultiVec, f: Poly) -> MultiVec:
    """The Hamiltonian vector field X_f = pi~(df), so X_f(g) = {f,g}.

    Also realizes d_Pi log on exponential-form units: a unit e^g is carried
    as its logarithm g, and d_Pi log(e^g) := X_g.
    """
    if pi.dim != f.dim:
        raise DimensionMismatchError("dimension mismatch in hamiltonian")
    return anchor(pi, Form.d_of(f))


def koszul_bracket(pi: MultiVec, alpha: Form, beta: Form) -> Form:
    """[alpha, beta]_pi = L_{pi~ alpha} beta - L_{pi~ beta} alpha - d pi(alpha, beta)."""
    if not (alpha.degree == 1 and beta.degree == 1):
        raise DegreeError("koszul_bracket acts on 1-forms")
    if pi.dim != alpha.dim or pi.dim != beta.dim:
        raise DimensionMismatchError("dimension mismatch in koszul_bracket")
    return (
        lie_derivative(anchor(pi, alpha), beta)
        - lie_derivative(anchor(pi, beta), alpha)
        - exterior_d(Form.from_poly(pair(pi, alpha, beta)))
    )


def multivec_eval(A: MultiVec, polys) -> Poly:
    """Evaluate a p-vector on the differentials of p polynomials."""
    return pair(A, *[Form.d_of(f) for f in polys])


def lichnerowicz_d(pi: MultiVec, A: MultiVec) -> MultiVec:
    """The algebroid differential of the Poisson structure, degree +1.

    Normative per-degree evaluation on exact differentials (f_i ranging over
    coordinates; the output is a multiderivation, so coordinate values
    determine it):

      p = 0:  d f := X_f
      p >= 1: (dA)(df_0..df_p) = sum_i (-1)^i {f_i, A(.. f_i omitted ..)}
              + sum_{i<j} (-1)^{i+j} A(d{f_i,f_j}, .. f_i, f_j omitted ..)

    which reduces to the displayed degree-1 and degree-2 identities.
    """
    if pi.degree != 2:
        raise DegreeError("lichnerowicz_d needs a bivector")
    if pi.dim != A.dim:
        raise DimensionMismatchError("dimension mismatch in lichnerowicz_d")
    n = pi.dim
    p = A.degree
    if p == 0:
        return hamiltonian(pi, A.as_poly())
    xs = {i: Poly.variable(n, i) for i in range(1, n + 1)}
    dxs = {i: Form.d_of(xs[i]) for i in range(1, n + 1)}
    terms = {}
    for key in combinations(range(1, n + 1), p + 1):
        val = Poly.zero(n)
        for i_pos, i in enumerate(key):
            rest = key[:i_pos] + key[i_pos + 1 :]
            inner = pair(A, *[dxs[r] for r in rest])
            term = bracket(pi, xs[i], inner)
            if i_pos % 2 == 1:
                term = -term
            val = val + term
        for i_pos in range(len(key)):
            for j_pos in range(i_pos + 1, len(key)):
                i, j = key[i_pos], key[j_pos]
                rest = tuple(k for t, k in enumerate(key) if t not in (i_pos, j_pos))
                fij = bracket(pi, xs[i], xs[j])
                term = pair(A, Form.d_of(fij), *[dxs[r] for r in rest])
                if (i_pos + j_pos) % 2 == 1:
                    term = -term
                val = val + term
        if not val.is_zero():
            terms[key] = val
    return MultiVec(n, p + 1, terms)
