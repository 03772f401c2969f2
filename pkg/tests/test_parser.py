import glob
import os
from fractions import Fraction

import pytest

from dqkit.calculus import MultiVec
from dqkit.errors import PolyParseError, SchemaError
from dqkit.kernel import Poly, TPoly
from dqkit.parser import (
    parse_document,
    parse_poly,
    poly_to_text,
    serialize_document,
)

from conftest import rand_poly

CORPUS = os.path.join(os.path.dirname(__file__), "..", "corpus")

x = Poly.variable(2, 1)
y = Poly.variable(2, 2)


class TestGrammar:
    def test_direct_reading(self):
        got = parse_poly("3/2*x^2*y - y + 1", 2)
        assert got == Poly.const(2, Fraction(3, 2)) * x * x * y - y + 1

    def test_unary_minus_of_square(self):
        assert parse_poly("-(x - y)^2", 2) == -(x * x) + 2 * x * y - y * y

    def test_fractional_exponent_rejected(self):
        with pytest.raises(PolyParseError) as info:
            parse_poly("x^(1/2)", 2)
        assert "exponent not a non-negative integer" in str(info.value)

    def test_negative_exponent_rejected(self):
        with pytest.raises(PolyParseError):
            parse_poly("x^(0-2)", 2)

    # one accepted and one rejected input per production
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("42", 42),
            ("7/3", Fraction(7, 3)),
            ("x", None),
            ("x1", None),
            ("x + y", None),
            ("x - y - 1", None),
            ("2*x*y", None),
            ("x^3", None),
            ("x^2^3", None),  # right-associative exponent tower
            ("-x^2", None),
            ("((x))", None),
            ("x/2 + 1/2", None),
        ],
    )
    def test_accepted(self, text, expected):
        p = parse_poly(text, 2)
        if expected is not None:
            assert p == Poly.const(2, expected)

    @pytest.mark.parametrize(
        "text",
        [
            "",          # empty atom
            "x +",       # dangling operator
            "* x",       # leading operator
            "x y",       # no implicit multiplication
            "(x",        # unclosed paren
            "x)",        # stray paren
            "z",         # out-of-range alias for dim 2
            "x3",        # out-of-range numbered variable
            "q",         # unknown name
            "1/x",       # non-constant divisor
            "1/0",       # zero divisor
            "x^y",       # non-constant exponent
            "x^-1",      # negative exponent
            "x$",        # illegal character
        ],
    )
    def test_rejected(self, text):
        with pytest.raises(PolyParseError):
            parse_poly(text, 2)

    def test_positions_reported(self):
        with pytest.raises(PolyParseError) as info:
            parse_poly("x + q", 2)
        assert info.value.position == 4

    def test_aliases_only_low_dims(self):
        assert parse_poly("z", 3) == Poly.variable(3, 3)
        with pytest.raises(PolyParseError):
            parse_poly("y", 4)
        assert parse_poly("x2", 4) == Poly.variable(4, 2)


class TestCanonicalText:
    def test_round_trip_random(self, rng):
        for _ in range(30):
            p = rand_poly(rng, 3, max_degree=4, terms=4)
            text = poly_to_text(p)
            assert parse_poly(text, 3) == p
            assert poly_to_text(parse_poly(text, 3)) == text

    def test_zero(self):
        assert poly_to_text(Poly.zero(2)) == "0"
        assert parse_poly("0", 2).is_zero()

    def test_descending_graded_lex(self):
        p = parse_poly("1 + x + y + x^2*y", 2)
        assert poly_to_text(p) == "x1^2*x2 + x1 + x2 + 1"


class TestDocuments:
    def test_minimal_bivector(self):
        doc = parse_document(
            '{"kind":"multivec","dim":2,"payload":[{"indices":[1,2],"coeff":"1"}]}'
        )
        assert doc.payload == MultiVec(2, 2, {(1, 2): 1})

    def test_star_with_one_p1(self):
        doc = parse_document(
            '{"kind":"star","dim":2,"payload":{"P":[{"arity":2,"terms":'
            '[{"coeff":"1/2","orders":[[1,0],[0,1]]}]}]}}'
        )
        assert doc.payload.order == 1

    def test_kind_payload_mismatch(self):
        with pytest.raises(SchemaError):
            parse_document('{"kind":"star","dim":2,"payload":{"R":[]}}')

    def test_unknown_kind(self):
        with pytest.raises(SchemaError):
            parse_document('{"kind":"mystery","dim":2,"payload":"x"}')

    def test_leaf_error_carries_path(self):
        with pytest.raises(SchemaError) as info:
            parse_document(
                '{"kind":"multivec","dim":2,"payload":[{"indices":[1,2],"coeff":"3***"}]}'
            )
        assert "$.payload[0].coeff" in str(info.value)

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            parse_document("{nope")

    def test_tseries_poly(self):
        doc = parse_document('{"kind":"poly","dim":2,"order":2,"payload":["x","y","0"]}')
        assert isinstance(doc.payload, TPoly)
        assert doc.payload.coeff(1) == y

    def test_tseries_requires_order(self):
        with pytest.raises(SchemaError):
            parse_document('{"kind":"poly","dim":2,"payload":["x","y"]}')

    def test_explicit_degree_zero_form(self):
        doc = parse_document(
            '{"kind":"form","dim":2,"payload":{"degree":3,"terms":[]}}'
        )
        assert doc.payload.degree == 3 and doc.payload.is_zero()

    def test_idempotent_serialization(self):
        text = (
            '{"kind":"bundle","payload":{"a":{"kind":"poly","dim":2,"payload":"y + x"},'
            '"b":{"kind":"form","dim":2,"payload":[{"indices":[1],"coeff":"2*x"}]}}}'
        )
        doc = parse_document(text)
        once = serialize_document(doc)
        assert serialize_document(parse_document(once)) == once


def test_idempotence_over_shipped_corpus():
    files = sorted(glob.glob(os.path.join(CORPUS, "*.json")))
    assert files, "corpus files missing"
    for path in files:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        doc = parse_document(text)
        once = serialize_document(doc)
        assert serialize_document(parse_document(once)) == once, path
        # shipped files are already canonical
        assert once == text, path
