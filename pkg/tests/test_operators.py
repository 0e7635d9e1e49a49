import random
from fractions import Fraction

import pytest
import sympy

from symred import operators as ops
from symred.expr import Context, Rational, diff, evaluate, from_rf, is_zero, substitute, to_rf
from symred.expr.core import RatFunc
from symred.geometry import sym2_pairs

import ricci_oracle


def _metric_getter(entries, coords):
    """Exact jet getter for a metric given as Exprs g_ij, i <= j."""
    def get(a, idx):
        e = entries[a]
        for i in idx:
            e = diff(e, coords[i])
        return to_rf(e)
    return get


def _ricci_exact(texts, names):
    c = Context()
    coords = c.symbols_(*names)
    entries = [c.parse(t) for t in texts]
    op = ops.ricci_operator(len(names), names)
    return [from_rf(x) for x in op.recipe(_metric_getter(entries, coords), RatFunc.const(0))], c


def test_flat_metric():
    texts = ["1", "0", "0", "0", "1", "0", "0", "1", "0", "-1"]
    R, _ = _ricci_exact(texts, ["x", "y", "z", "t"])
    assert all(is_zero(e) for e in R)


def test_round_sphere_has_positive_ricci():
    # stereographic metric of the unit sphere: R_ij = g_ij
    g = "4/(1 + u^2 + v^2)^2"
    R, c = _ricci_exact([g, "0", g], ["u", "v"])
    G = c.parse(g)
    assert is_zero(R[0] - G) and is_zero(R[1]) and is_zero(R[2] - G)


@pytest.mark.parametrize("texts", [
    ["1 + x^2", "x*y", "2 + y^2"],
    ["1 + y^2", "x", "1 + x^2*y"],
])
def test_ricci_against_sympy(texts):
    names = ["x", "y"]
    R, c = _ricci_exact(texts, names)
    xs = sympy.symbols("x y")
    pairs = sym2_pairs(2)
    M = sympy.zeros(2, 2)
    for (i, j), t in zip(pairs, texts):
        M[i, j] = M[j, i] = sympy.sympify(t.replace("^", "**"), locals=dict(zip(names, xs)))
    want = ricci_oracle.ricci(M, xs)
    for (i, j), got in zip(pairs, R):
        for pt in [(Fraction(1, 3), Fraction(2, 5)), (Fraction(-3, 2), Fraction(1, 7))]:
            a = evaluate(got, dict(zip(names, pt)), exact=True)
            b = want[i, j].subs(dict(zip(xs, map(sympy.Rational, pt))))
            assert sympy.Rational(a.numerator, a.denominator) == sympy.nsimplify(b)


def test_ricci_three_dimensional_against_sympy():
    names = ["x", "y", "z"]
    texts = ["1 + z^2", "0", "x*y", "2", "0", "1 + x^2"]
    R, c = _ricci_exact(texts, names)
    xs = sympy.symbols("x y z")
    M = sympy.zeros(3, 3)
    for (i, j), t in zip(sym2_pairs(3), texts):
        M[i, j] = M[j, i] = sympy.sympify(t.replace("^", "**"), locals=dict(zip(names, xs)))
    want = ricci_oracle.ricci(M, xs)
    pt = (Fraction(1, 2), Fraction(-1, 3), Fraction(2, 3))
    for (i, j), got in zip(sym2_pairs(3), R):
        a = evaluate(got, dict(zip(names, pt)), exact=True)
        b = sympy.nsimplify(want[i, j].subs(dict(zip(xs, map(sympy.Rational, pt)))))
        assert sympy.Rational(a.numerator, a.denominator) == b


def test_recipe_on_floats_matches_exact():
    names = ["x", "y"]
    texts = ["1 + x^2", "x*y", "2 + y^2"]
    R, c = _ricci_exact(texts, names)
    entries = [c.parse(t) for t in texts]
    coords = [c.symbols[n] for n in names]
    pt = {"x": 0.3, "y": -0.7}

    def get(a, idx):
        e = entries[a]
        for i in idx:
            e = diff(e, coords[i])
        return evaluate(e, pt)

    out = ops.ricci_operator(2, names).recipe(get, 0.0)
    for a, b in zip(out, R):
        assert a == pytest.approx(evaluate(b, pt), rel=1e-10, abs=1e-12)


def test_degenerate_metric():
    with pytest.raises(ops.DegenerateMetric):
        _ricci_exact(["1", "1", "1"], ["x", "y"])


def test_adjugate_inverse():
    m = [[RatFunc.const(2), RatFunc.const(1)], [RatFunc.const(1), RatFunc.const(1)]]
    inv = ops.adjugate_inverse(m, RatFunc.const(0))
    assert [[from_rf(v) for v in row] for row in inv] == \
        [[Rational(1), Rational(-1)], [Rational(-1), Rational(2)]]


def test_laplacian_of_harmonic_polynomial():
    op = ops.laplacian_operator(3)
    c = Context()
    xs = c.symbols_("x", "y", "z")
    rng = random.Random(3)
    for _ in range(5):
        a, b = rng.randint(-4, 4), rng.randint(-4, 4)
        u = c.parse("%d*(x^2 - y^2) + %d*x*y*z + z^3 - 3*z*x^2" % (a, b))
        J = op.jets
        binds = {}
        for s, (k, idx) in J.lookup(2).items():
            e = u
            for i in idx:
                e = diff(e, xs[i])
            binds[s] = e
        assert is_zero(substitute(op.components[0], binds))


def test_euler_components():
    op = ops.euler_operator(3)
    J = op.jets
    ctx = J.context(1)
    assert op.components[3] == ctx.parse("u1_x + u2_y + u3_z")
    assert op.components[0] == ctx.parse("u1_t + u1*u1_x + u2*u1_y + u3*u1_z + p_x")
    one = ops.euler_operator(1)
    assert [s.name for s in one.fiber] == ["u", "p"]


def test_explicit_operator_validation():
    J = ops.laplacian_operator(2).jets
    ctx = J.context(2)
    with pytest.raises(ops.OperatorError):
        ops.OperatorSpec("bad", 1, 1, ops.SCALAR, [ctx.parse("u_xx")], base=J.base,
                         fiber=J.fiber)
    with pytest.raises(ops.OperatorError):
        ops.OperatorSpec("bad", 2, 2, ops.SCALAR, [ctx.parse("u_xx")], base=J.base,
                         fiber=J.fiber)
    with pytest.raises(ops.OperatorError):
        ops.OperatorSpec("bad", 2, 1, ops.SCALAR, None, None)


def test_ricci_labels():
    op = ops.ricci_operator(4)
    assert op.labels[:4] == ["R_xx", "R_xy", "R_xz", "R_xt"]
    assert op.d == 10
