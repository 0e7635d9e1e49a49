import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from symred.expr import (Context, ExprError, MissingDerivativeRule, ParseError, Product,
                         Rational, Sum, UndeclaredName, diff, evaluate, evaluate_tree,
                         is_zero, normalize, substitute, substitute_functions, to_string)
from symred.expr.core import AlgebraicGenerator

import randexpr


@pytest.fixture
def ctx():
    c = Context()
    c.symbols_("x", "y", "z", "t")
    c.generator("r", "x^2 + y^2 + z^2")
    c.function("f", ["r"])
    c.function("v", ["r", "t"])
    return c


def test_cancellation_and_canonical_form(ctx):
    P = ctx.parse
    assert P("(x^2 - 1)/(x - 1)") == P("x + 1")
    assert P("x + y") == P("y + x")
    assert hash(P("x*y")) == hash(P("y*x"))
    assert P("2/4*x") == P("x/2")
    assert is_zero(P("(x + y)^2 - x^2 - 2*x*y - y^2"))


def test_generator_reduction(ctx):
    P = ctx.parse
    assert P("r^2") == P("x^2 + y^2 + z^2")
    assert P("r^3") == P("r*(x^2 + y^2 + z^2)")
    # denominators are rationalized, so these two spellings agree
    assert P("1/r") == P("r/(x^2 + y^2 + z^2)")
    assert is_zero(P("1/(1 + r)") - P("(r - 1)/(r^2 - 1)"))


def test_derivative_of_generator(ctx):
    P, x = ctx.parse, ctx.symbols["x"]
    assert diff(P("r"), x) == P("x/r")
    assert diff(P("1/r"), x) == P("-x/r^3")
    # Laplacian of 1/r vanishes away from the origin
    lap = sum((diff(P("1/r"), s, s) for s in ctx.symbols_("x", "y", "z")), Rational(0))
    assert is_zero(lap)


def test_chain_rule_through_declared_functions(ctx):
    P = ctx.parse
    x, t = ctx.symbols["x"], ctx.symbols["t"]
    assert diff(P("f(r)"), x) == P("f_r*x/r")
    assert diff(P("v(r, t)"), t) == P("v_t")
    assert diff(P("v_r"), t) == P("v_rt")
    assert diff(P("v_t"), x) == P("v_rt*x/r")


def test_substitute_functions():
    # functions on a quotient are declared over plain symbols
    c = Context()
    c.symbol("r")
    f = c.function("f", ["r"])
    P = c.parse
    e = P("f_rr + 2*f_r/r")
    assert is_zero(substitute_functions(e, {f: P("1/r")}))
    assert not is_zero(substitute_functions(e, {f: P("r")}))


def test_evaluate_exact_and_float(ctx):
    P = ctx.parse
    assert evaluate(P("x/y"), {"x": 1, "y": 3}, exact=True) == Fraction(1, 3)
    assert evaluate(P("x*y + r"), {"x": 1.0, "y": 2.0, "z": 2.0}) == pytest.approx(5.0)


def test_parse_errors(ctx):
    with pytest.raises(UndeclaredName):
        ctx.parse("x + w")
    with pytest.raises(ParseError):
        ctx.parse("x + * y")
    with pytest.raises(ExprError):
        ctx.parse("x/(y - y)")
    with pytest.raises(ZeroDivisionError):
        ctx.parse("1/(r^2 - x^2 - y^2 - z^2)")
    with pytest.raises(ExprError):
        ctx.symbol("f")       # already a function


def test_generator_rules():
    c = Context()
    x, s = c.symbols_("x", "s")
    q = c.generator("q", "x^2 + 1", rules={"x": "x/q"})
    assert diff(q * q, x) == c.parse("2*x")
    assert is_zero(diff(q, s))
    # the relation mentions s but no rule is given for it
    with pytest.raises(MissingDerivativeRule):
        c.generator("w", "x^2 + s^2", rules={"x": "x/w"})
    # inconsistent with differentiating the relation
    with pytest.raises(ExprError):
        c.generator("w2", "x^2 + 1", rules={"x": "x"})


def test_printing_round_trip(ctx):
    for text in ["x*(y + 1)", "-x^2/(y^2 + 1)", "r*v_r + 3*v", "f_rr + 2*f_r/r", "1/2*x - 3"]:
        e = ctx.parse(text)
        assert ctx.parse(to_string(e)) == e


# -- properties --------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def _pair(seed):
    rng = random.Random(seed)
    c = randexpr.context()
    return c, rng, randexpr.tree(rng, c), randexpr.tree(rng, c)


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_normalize_idempotent(seed):
    c, rng, a, b = _pair(seed)
    n = normalize(a)
    assert normalize(n) == n
    assert hash(normalize(n)) == hash(n)


@settings(max_examples=120, deadline=None)
@given(seeds)
def test_ring_identities(seed):
    c, rng, a, b = _pair(seed)
    assert normalize(Sum((a, b))) == normalize(Sum((b, a)))
    assert normalize(Product((a, b))) == normalize(Product((b, a)))
    d = randexpr.tree(rng, c)
    lhs = Product((a, Sum((b, d))))
    rhs = Sum((Product((a, b)), Product((a, d))))
    assert normalize(lhs) == normalize(rhs)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_leibniz_and_mixed_partials(seed):
    c, rng, a, b = _pair(seed)
    x, y = c.symbols["x"], c.symbols["y"]
    assert is_zero(diff(a * b, x) - diff(a, x) * b - a * diff(b, x))
    assert diff(a, x, y) == diff(a, y, x)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_normal_form_evaluates_like_the_tree(seed):
    c, rng, a, b = _pair(seed)
    pt = randexpr.point(rng)
    want = evaluate_tree(a, pt)
    got = evaluate(normalize(a), pt)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_derivative_matches_finite_differences(seed):
    c, rng, a, b = _pair(seed)
    pt = randexpr.point(rng)
    h = 1e-5
    up, dn = dict(pt, x=pt["x"] + h), dict(pt, x=pt["x"] - h)
    fd = (evaluate_tree(a, up) - evaluate_tree(a, dn)) / (2 * h)
    got = evaluate(diff(a, c.symbols["x"]), pt)
    assert got == pytest.approx(fd, rel=1e-4, abs=1e-4)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_substitution_commutes_with_evaluation(seed):
    c, rng, a, b = _pair(seed)
    x = c.symbols["x"]
    pt = randexpr.point(rng)
    bx = evaluate_tree(b, pt)
    got = evaluate(substitute(a, {x: b}), pt)
    want = evaluate_tree(a, dict(pt, x=bx))
    assert got == pytest.approx(want, rel=1e-8, abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_print_parse_round_trip(seed):
    c, rng, a, b = _pair(seed)
    e = normalize(a)
    assert c.parse(to_string(e)) == e


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_generator_values_are_square_roots(v):
    c = Context()
    c.symbols_("x", "y", "z")
    r = c.generator("r", "x^2 + y^2 + z^2")
    pt = dict(zip("xyz", map(float, v)))
    assert evaluate(r, pt) == pytest.approx(math.sqrt(sum(a * a for a in v)))
