import time

import pytest
import sympy

from symred import kinematic as kin, reduce as red
from symred.geometry import DomainError
from symred.expr import Rational, is_zero
from symred.jets import prolong
from symred.operators import OperatorError, OperatorSpec, SCALAR, euler_operator

from conftest import loaded


def _reduce(name, order=None):
    p, _, st = loaded(name)
    system, pa, delta = red.reduce_operator(p.operator, st["ansatz"], order or p.order,
                                            names=st["ansatz"].names,
                                            preferred=p.kinematic_basis
                                            if p.operator.target_rep == "fiber" else None)
    return p, st, system, delta


@pytest.fixture(scope="module")
def euler():
    t0 = time.perf_counter()
    out = _reduce("euler.json")
    return out + (time.perf_counter() - t0,)


@pytest.fixture(scope="module")
def schwarzschild():
    t0 = time.perf_counter()
    out = _reduce("schwarzschild.json")
    return out + (time.perf_counter() - t0,)


def test_euler_reduced_equations(euler):
    p, st, system, delta, elapsed = euler
    assert elapsed < 1.0
    q = system.ansatz.quotient.context.parse
    assert system.components == [q("v_t + v^2 + r*v*v_r + p_r/r"), q("3*v + r*v_r")]
    assert system.consistent
    assert [c.name for c in system.coords] == ["r", "t"]


def test_euler_reduced_components_lift_back(euler):
    p, st, system, delta, _ = euler
    for c, b in zip(system.components, system.base_components):
        assert is_zero(system.ansatz.quotient.to_base(c) - b)


def test_kappa_of_target(euler, schwarzschild):
    assert euler[2].basis.dimension == 2
    assert schwarzschild[2].basis.dimension == 3


def test_schwarzschild_reduction(schwarzschild):
    p, st, system, delta, elapsed = schwarzschild
    assert elapsed < 60.0
    assert len(system.components) == 3 and system.consistent
    q = system.ansatz.quotient.context.parse
    iso = {"A": q("0"), "B": q("(1 + m/(2*r))^4"), "C": q("-((1 - m/(2*r))/(1 + m/(2*r)))^2")}
    assert red.verify_reduced_solution(system, iso)
    assert red.verify_reduced_solution(system, {"A": q("0"), "B": q("1"), "C": q("-1")})
    wrong = {"A": q("0"), "B": q("(1 + m/r)^2"), "C": q("-1")}
    assert not red.verify_reduced_solution(system, wrong)


def test_schwarzschild_numeric_lift(schwarzschild):
    p, st, system, delta, _ = schwarzschild
    q = system.ansatz.quotient.context.parse
    iso = {"A": q("0"), "B": q("(1 + m/(2*r))^4"), "C": q("-((1 - m/(2*r))/(1 + m/(2*r)))^2")}
    pts = p.sample_points[:2]
    a = red.numeric_lift_check(system, iso, p.operator, pts, 1e-3, {"m": 1})
    b = red.numeric_lift_check(system, iso, p.operator, pts, 5e-4, {"m": 1})
    assert a < 1e-5 and a / b > 3.5


def test_euler_steady_solution_symbolic_and_oracle(euler):
    p, st, system, delta, _ = euler
    q = system.ansatz.quotient.context.parse
    sol = {"v": q("c/r^3"), "p": q("-c^2/(2*r^4)")}
    assert red.verify_reduced_solution(system, sol)
    # oracle: the lifted field solves the full equations, checked in sympy
    x, y, z, t, c = sympy.symbols("x y z t c")
    r = sympy.sqrt(x ** 2 + y ** 2 + z ** 2)
    u = [c * s / r ** 3 for s in (x, y, z)]
    pr = -c ** 2 / (2 * r ** 4)
    xs = (x, y, z)
    for i in range(3):
        e = sympy.diff(u[i], t) + sum(u[j] * sympy.diff(u[i], xs[j]) for j in range(3)) \
            + sympy.diff(pr, xs[i])
        assert sympy.simplify(e) == 0
    assert sympy.simplify(sum(sympy.diff(u[j], xs[j]) for j in range(3))) == 0


def test_euler_non_solutions(euler):
    p, st, system, delta, _ = euler
    q = system.ansatz.quotient.context.parse
    res = red.reduced_residuals(system, {"v": q("r"), "p": q("0")})
    assert res[1] == q("4*r")
    assert not red.verify_reduced_solution(system, {"v": q("1"), "p": q("0")})


def test_finite_difference_convergence(euler):
    p, st, system, delta, _ = euler
    q = system.ansatz.quotient.context.parse
    sol = {"v": q("1/r^3"), "p": q("-1/(2*r^4)")}
    pts = red.random_points(p.bundle, 10, seed=0)
    a = red.numeric_lift_check(system, sol, p.operator, pts, 1e-3)
    b = red.numeric_lift_check(system, sol, p.operator, pts, 5e-4)
    assert a <= 1e-5 and a / b >= 3.5
    bad = red.numeric_lift_check(system, {"v": q("r"), "p": q("0")}, p.operator, pts, 1e-3)
    assert bad > 1.0


def test_singular_sample_point(euler):
    p, st, system, delta, _ = euler
    q = system.ansatz.quotient.context.parse
    with pytest.raises(DomainError):
        red.numeric_lift_check(system, {"v": q("1"), "p": q("0")}, p.operator,
                               [{"x": 0, "y": 0, "z": 0, "t": 0}])


def test_random_points_are_rational_and_in_range():
    p = loaded("euler.json")[0]
    pts = red.random_points(p.bundle, 20, seed=4)
    assert len(pts) == 20
    for pt in pts:
        r2 = sum(pt[c] ** 2 for c in p.bundle.base[:3])
        assert 1 <= r2 <= 9
    assert pts == red.random_points(p.bundle, 20, seed=4)


def test_radial_laplace_and_transverse():
    system = _reduce("radial_laplace.json")[2]
    q = system.ansatz.quotient.context.parse
    assert system.components == [q("f_rr + 2*f_r/r")]
    system = _reduce("transverse_demo.json")[2]
    q = system.ansatz.quotient.context.parse
    assert system.components == [q("u_xx")]


def test_wrong_target_basis_is_detected(euler):
    p, st, system, delta, _ = euler
    only_velocity = kin.KinematicBasis(None, [st["basis"].vectors[0]], ["v"])
    with pytest.raises(red.ExtractionError) as exc:
        red.extract(delta, only_velocity, st["ansatz"])
    assert any(not is_zero(r) for r in exc.value.residual)


def test_zero_operator():
    p, _, st = loaded("radial_laplace.json")
    J = p.operator.jets
    op = OperatorSpec("zero", 2, 1, SCALAR, [Rational(0)], base=J.base, fiber=J.fiber)
    system, _, _ = red.reduce_operator(op, st["ansatz"])
    assert system.components == [Rational(0)] and system.consistent


def test_non_invariant_operator_fails_extraction():
    # u_x is not rotation invariant: its restriction leaves the target fiber
    p, _, st = loaded("radial_laplace.json")
    J = p.operator.jets
    op = OperatorSpec("ux", 1, 1, SCALAR, [J.coord("u", ("x",))], base=J.base, fiber=J.fiber)
    with pytest.raises(red.ExtractionError):
        red.reduce_operator(op, st["ansatz"])


def test_order_too_low():
    p, _, st = loaded("radial_laplace.json")
    pa = prolong(st["ansatz"], 1)
    with pytest.raises(red.ReductionError):
        red.restrict(p.operator, pa)


def test_operator_bundle_mismatch():
    p, _, st = loaded("radial_laplace.json")
    with pytest.raises(OperatorError):
        red.restrict(euler_operator(3), prolong(st["ansatz"], 1))
