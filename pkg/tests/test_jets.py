import pytest

from symred import geometry as geo, kinematic as kin
from symred.expr import Rational, Symbol, diff, is_zero, normalize, substitute
from symred.jets import (AnsatzError, JetError, JetSpace, build_ansatz, prolong,
                         prolong_generator)
from symred.operators import euler_operator

from conftest import loaded


def test_jet_names():
    J = JetSpace((Symbol("x"), Symbol("y"), Symbol("t")), (Symbol("u1"), Symbol("p")))
    assert J.coord("u1", ("y", "x")).name == "u1_xy"
    assert J.coord(1, (2,)).name == "p_t"
    assert J.coord("p").name == "p"
    assert len(J.coords(2)) == 2 * (1 + 3 + 6)
    long = JetSpace((Symbol("x1"), Symbol("x2")), (Symbol("g"),))
    assert long.coord("g", ("x2", "x1")).name == "g_x1_x2"


def test_total_derivative():
    J = JetSpace((Symbol("x"),), (Symbol("u"),))
    u, ux, uxx = J.coord("u"), J.coord("u", ("x",)), J.coord("u", ("x", "x"))
    x = Symbol("x")
    assert J.total_derivative(x * u * u, 0, 1) == normalize(u * u + 2 * x * u * ux)
    assert J.total_derivative(ux, 0, 1) == uxx


def test_euler_ansatz_section():
    p, _, st = loaded("euler.json")
    a = st["ansatz"]
    P = a.context.parse
    assert [normalize(s) for s in a.section] == [P("v(r,t)*x"), P("v(r,t)*y"), P("v(r,t)*z"),
                                                 P("p(r,t)")]
    assert geo.verify_invariant_section(a.section, p.action)


def test_first_order_invariant_jets():
    """u^i_j = v_r x^i x^j / r + v delta^i_j on the invariant sections."""
    p, _, st = loaded("euler.json")
    a = st["ansatz"]
    P = a.context.parse
    pa = prolong(a, 1)
    xs = ["x", "y", "z"]
    for i in range(3):
        for j in range(3):
            want = P("v_r*%s*%s/r" % (xs[i], xs[j]) + (" + v" if i == j else ""))
            assert is_zero(pa.entry("u%d" % (i + 1), (xs[j],)) - want)
        assert is_zero(pa.entry("u%d" % (i + 1), ("t",)) - P("v_t*%s" % xs[i]))
    assert is_zero(pa.entry("p", ("x",)) - P("p_r*x/r"))


def test_prolonged_entries_are_derivatives():
    p, _, st = loaded("radial_laplace.json")
    pa = prolong(st["ansatz"], 2)
    x, y = p.bundle.base[0], p.bundle.base[1]
    assert is_zero(pa.entry("u", ("x", "y")) - diff(pa.entry("u", ("x",)), y))
    assert pa.entry("u", ("y", "x")) == pa.entry("u", ("x", "y"))
    lap = sum((pa.entry("u", (c, c)) for c in "xyz"), Rational(0))
    P = st["ansatz"].context.parse
    assert is_zero(lap - P("f_rr + 2*f_r/r"))


def test_constant_ansatz_has_zero_derivatives():
    p, _, st = loaded("transverse_demo.json")
    a = st["ansatz"]
    sol = a.lift({"u": Rational(5)})
    assert sol == [Rational(5)]
    pa = prolong(a, 2)
    assert pa.entry("u", ("t",)) == Rational(0)


def test_non_invariant_basis_is_rejected():
    p = loaded("example1a.json")[0]
    P = p.context.parse
    basis = kin.KinematicBasis(None, [[P("x"), P("0"), P("0")]], ["v"])
    with pytest.raises(AnsatzError) as exc:
        build_ansatz(basis, p.chart, p.action)
    assert exc.value.defects


def test_ansatz_name_checks():
    p, _, st = loaded("euler.json")
    with pytest.raises(AnsatzError):
        build_ansatz(st["basis"], p.chart, p.action, ["v"])
    with pytest.raises(AnsatzError):
        build_ansatz(st["basis"], p.chart, p.action, ["v", "v"])


def test_quotient_round_trip():
    p, _, st = loaded("euler.json")
    q = st["ansatz"].quotient
    e = q.context.parse("v_r*r + 3*v + p_t/r")
    back = q.to_base(e)
    binds = geo.slice_bindings(p.chart, p.bundle)
    assert q.to_quotient(back, binds) == e
    assert q.is_pure(e) and not q.is_pure(back)


def test_lift():
    p, _, st = loaded("euler.json")
    a = st["ansatz"]
    P = a.quotient.context.parse
    sec = a.lift({"v": P("1/r^3"), "p": P("-1/(2*r^4)")})
    B = p.context.parse
    assert is_zero(sec[0] - B("x/r^3"))
    with pytest.raises(JetError):
        a.lift({"v": P("1")})


def test_euler_operator_is_equivariant():
    """pr X (Delta) = (d phi / d u) Delta for every rotation generator."""
    p = loaded("euler.json")[0]
    op = euler_operator(3)
    for g in p.action.generators:
        pr = prolong_generator(g, p.bundle, 1)
        for a in range(op.d):
            lhs = pr.apply(op.components[a])
            rhs = sum((diff(g.phi[a], u) * op.components[b]
                       for b, u in enumerate(p.bundle.fiber)), Rational(0))
            assert is_zero(lhs - rhs)


def test_second_prolongation_preserves_laplacian():
    p = loaded("radial_laplace.json")[0]
    J = JetSpace(p.bundle.base, p.bundle.fiber)
    lap = sum((J.coord("u", (c, c)) for c in p.bundle.base), Rational(0))
    for g in p.action.generators:
        assert is_zero(prolong_generator(g, p.bundle, 2).apply(lap))
    with pytest.raises(JetError):
        prolong_generator(p.action.generators[0], p.bundle, 3)


def test_prolonged_generator_tangent_to_invariant_jets():
    """The prolonged rotation field vanishes on the image of Inv^1 (it only moves x)."""
    p, _, st = loaded("euler.json")
    pa = prolong(st["ansatz"], 1)
    for g in p.action.generators:
        pr = prolong_generator(g, p.bundle, 1)
        for s, coeff in pr.coefficients.items():
            # coefficient along the section equals xi . grad of the entry
            on = substitute(coeff, pa.entries)
            flow = sum((x * diff(pa.entries[s], c) for x, c in zip(g.xi, p.bundle.base)),
                       Rational(0))
            assert is_zero(on - flow)
