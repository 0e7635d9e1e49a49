"""Rotation-invariant incompressible flows.

Walks through the reduction by hand: the rotation group acts on positions
and velocities at once, so it is not transverse, the invariant fields live
in a two-dimensional subbundle (radial velocity times v, plus p), and the
Euler equations collapse to two PDEs in (r, t).
"""

from symred import cli, geometry as geo, kinematic as kin, reduce as red
from symred.expr import to_string
from symred.jets import build_ansatz, prolong
from symred.problem import load

problem = load("euler.json")
action = problem.action

tr = geo.check_transverse(action)
print("rank of the base vector fields: %d, with fiber parts: %d" % (tr.rank_xi, tr.rank_full))
print("transverse:", tr.transverse)

# Fixed vectors of the isotropy at a generic point.  We ask for the basis
# (x, y, z, 0), (0, 0, 0, 1) so the unknowns come out as v and p.
basis = kin.kinematic_basis(action, None, ["v", "p"], problem.kinematic_basis)
print("\nkinematic fiber has dimension", basis.dimension)

ansatz = build_ansatz(basis, problem.chart, action, parameters=problem.parameters)
for u, s in zip(problem.bundle.fiber, ansatz.section):
    print("  %s = %s" % (u.name, to_string(s)))

pa = prolong(ansatz, 1)
print("\nsome first-order invariant jets:")
for name in ["u1_x", "u1_y", "u1_t", "p_z"]:
    print("  %s = %s" % (name, to_string(pa.entries[pa.jets.coord(name[:-2], (name[-1],))])))

delta = red.restrict(problem.operator, pa)
target = red.kappa_of_D(problem.operator, action, None, ["v", "p"], problem.kinematic_basis)
system = red.extract(delta, target, ansatz)
print("\nreduced equations on (r, t):")
for lab, c in zip(system.labels, system.components):
    print("  %s = %s" % (lab, to_string(c)))

# The second equation says r^3 v is constant in r.  With v = c/r^3 the
# first fixes p up to a function of t; p = -c^2/(2 r^4) is a solution.
q = ansatz.quotient.context.parse
sol = {"v": q("c/r^3"), "p": q("-c^2/(2*r^4)")}
print("\nsteady solution exact:", red.verify_reduced_solution(system, sol))

pts = red.random_points(problem.bundle, 10, seed=0)
for h in (1e-3, 5e-4):
    res = red.numeric_lift_check(system, sol, problem.operator, pts, h, {"c": 1})
    print("  full-operator residual of the lifted field, h = %g: %.2e" % (h, res))

# The CLI does the same in one go.
print("\nsymred reduce euler.json, last lines:")
print("\n".join(cli.render("reduce", cli.run("reduce", "euler.json")).splitlines()[-3:]))
