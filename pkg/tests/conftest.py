import random
from fractions import Fraction

import pytest
from hypothesis import settings

from dqkit.calculus import Form, MultiVec
from dqkit.diffop import PolyDiffOp
from dqkit.kernel import Poly
from dqkit.starprod import GaugeOp, moyal

settings.register_profile("dqkit", max_examples=40, deadline=None)
settings.load_profile("dqkit")


def rand_poly(rng, dim, max_degree=2, terms=2, span=3):
    out = {}
    for _ in range(terms):
        e = [0] * dim
        for _ in range(rng.randint(0, max_degree)):
            e[rng.randrange(dim)] += 1
        out[tuple(e)] = out.get(tuple(e), 0) + Fraction(rng.randint(-span, span))
    return Poly(dim, {k: v for k, v in out.items() if v})


def rand_vector_field(rng, dim, max_degree=2):
    terms = {}
    for i in range(1, dim + 1):
        p = rand_poly(rng, dim, max_degree, terms=1)
        if not p.is_zero():
            terms[(i,)] = p
    return MultiVec(dim, 1, terms)


def rand_multivec(rng, dim, degree, max_degree=2, nterms=2):
    from itertools import combinations

    keys = list(combinations(range(1, dim + 1), degree))
    rng.shuffle(keys)
    terms = {}
    for key in keys[:nterms]:
        p = rand_poly(rng, dim, max_degree, terms=1)
        if not p.is_zero():
            terms[key] = p
    return MultiVec(dim, degree, terms)


def rand_form(rng, dim, degree, max_degree=2, nterms=2):
    from itertools import combinations

    keys = list(combinations(range(1, dim + 1), degree))
    rng.shuffle(keys)
    terms = {}
    for key in keys[:nterms]:
        p = rand_poly(rng, dim, max_degree, terms=1)
        if not p.is_zero():
            terms[key] = p
    return Form(dim, degree, terms)


def rand_diffop1(rng, dim, max_order=2, max_degree=2, nterms=2, unital=True):
    """Random arity-1 operator; unital means no order-0 part (R(1) = 0)."""
    terms = {}
    for _ in range(nterms):
        a = [0] * dim
        lo = 1 if unital else 0
        for _ in range(rng.randint(lo, max_order)):
            a[rng.randrange(dim)] += 1
        if unital and sum(a) == 0:
            a[rng.randrange(dim)] += 1
        p = rand_poly(rng, dim, max_degree, terms=1)
        if not p.is_zero():
            terms[(tuple(a),)] = p
    return PolyDiffOp(dim, 1, terms)


def rand_gauge(rng, dim, order, max_order=2, max_degree=2):
    return GaugeOp(dim, order, [rand_diffop1(rng, dim, max_order, max_degree) for _ in range(order)])


@pytest.fixture
def rng():
    return random.Random(20260810)


@pytest.fixture
def pi_std():
    return MultiVec(2, 2, {(1, 2): 1})


@pytest.fixture
def pi_std3():
    return MultiVec(3, 2, {(1, 2): 1})


@pytest.fixture
def pi_so3():
    x, y, z = (Poly.variable(3, i) for i in (1, 2, 3))
    return MultiVec(3, 2, {(1, 2): z, (1, 3): -y, (2, 3): x})


@pytest.fixture
def pi_bad():
    return MultiVec(3, 2, {(1, 2): Poly.one(3), (2, 3): Poly.variable(3, 2)})


@pytest.fixture
def moyal2(pi_std):
    return moyal(pi_std, 2)


@pytest.fixture
def moyal3(pi_std):
    return moyal(pi_std, 3)
