import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from conftest import random_poly
from locsolv.corpus import load, manifest, spec_text
from locsolv.expr import opaque, variables
from locsolv.operator import OperatorSpec, Region
from locsolv.specfile import ParseError, ValidationError, parse_spec, render_spec
from locsolv.symbols import FirstOrderOp

HEAD = "name = t\ndim = 2\nvars = x1, x2\nregion = [[-1, 1], [-1, 1]]\ncenter = [0, 0]\n"


def test_example4_fields():
    P = load("example4")
    x1, x2 = P.variables
    assert len(P.pairs) == 2
    assert P.X0 == FirstOrderOp(P.variables, (1, -1))
    assert P.XN1 == FirstOrderOp(P.variables, (x2, 0))
    assert [f for _, f in P.pairs] == [x1, -x2]


def test_empty_xn1_is_zero():
    P = parse_spec(HEAD + "X0 = [1, 0]\nXN1 = []\na0 = 0\n[pair]\nX = [0, 1]\nf = x1\n")
    assert P.XN1.is_zero()


def test_complex_field_rejected():
    with pytest.raises(ValidationError) as info:
        parse_spec(HEAD + "X0 = [1, 0]\nXN1 = []\na0 = 0\n[pair]\nX = [i*x1, 0]\nf = 1\n")
    assert "real" in str(info.value)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_spec(HEAD + "X0 = [1, 0\n")
    assert info.value.line == 6
    assert info.value.column == 11


@pytest.mark.parametrize(
    "body, fragment",
    [
        ("X0 = [1, 0]\nXN1 = [x1^1.5, 0]\n", "integer"),
        ("X0 = [1, 0, 0]\n", "coefficients"),
        ("X0 = [1, 0]\nXN1 = [y, 0]\n", "y"),
        ("X0 = [1, 0]\nbogus = 3\n", "bogus"),
        ("opaque g(x1)\nX0 = [g(x2), 0]\n", "g"),
    ],
)
def test_input_errors(body, fragment):
    with pytest.raises((ParseError, ValidationError)) as info:
        parse_spec(HEAD + body + "a0 = 0\n")
    assert fragment in str(info.value)


def test_decimals_are_exact():
    P = parse_spec(HEAD + "X0 = [0.1, 1]\nXN1 = []\na0 = 0\n")
    assert P.X0.coeffs[0] == sp.Rational(1, 10)


def test_defaults():
    P = parse_spec("name = d\ndim = 2\nvars = x1, x2\nX0 = [1, 0]\nXN1 = []\na0 = 0\n")
    assert P.region == Region.cube(2)
    assert P.pairs == ()


def test_corpus_round_trip():
    for entry in manifest():
        P = parse_spec(spec_text(entry["file"]))
        text = render_spec(P)
        assert parse_spec(text) == P
        assert render_spec(parse_spec(text)) == text


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(0, 10**6), st.integers(0, 2), st.booleans())
def test_random_round_trip(seed, npairs, with_opaque):
    rng = random.Random(seed)
    vs = variables("x1 x2")
    opaques, bindings = {}, {}
    xn1 = [random_poly(rng, vs, 2), random_poly(rng, vs, 2)]
    if with_opaque:
        g = opaque("g", [vs[0]])
        opaques["g"] = ("x1",)
        bindings["g"] = sp.sin(vs[0]) + random_poly(rng, vs[:1], 2)
        xn1[1] = xn1[1] + g
    pairs = [
        (FirstOrderOp(vs, (random_poly(rng, vs, 2), random_poly(rng, vs, 1))), random_poly(rng, vs, 3))
        for _ in range(npairs)
    ]
    P = OperatorSpec(
        vs,
        pairs,
        FirstOrderOp(vs, (1, random_poly(rng, vs, 1))),
        FirstOrderOp(vs, tuple(xn1)),
        random_poly(rng, vs, 2) + sp.I * random_poly(rng, vs, 1),
        Region(((-1, sp.Rational(1, 2)), (0, 2)), (0, 1)),
        opaques,
        bindings,
        "random",
    )
    text = render_spec(P)
    Q = parse_spec(text)
    assert Q == P
    assert render_spec(Q) == text
