"""What happens at singular orbits.

At the origin of R^3 every rotation fixes the point, so the Taylor
coefficients of an invariant function must be invariant tensors.  Odd
orders vanish, which is the familiar parity condition at r = 0.  A second
example: maps from the sphere to the sphere commuting with rotations about
z must send the poles to poles.
"""

from symred import kinematic as kin
from symred.expr import to_string
from symred.problem import load

for name in ["so3_origin.json", "so2_plane.json"]:
    p = load(name)
    algebra, discrete = kin.taylor_isotropy(p.action, p.jet_kappa["point"])
    table = kin.jet_kappa_table(algebra, p.jet_kappa["max_order"], discrete, n=p.bundle.n)
    print("%s: isotropy of dimension %d at the origin" % (p.name, len(algebra)))
    for row in table:
        print("  order %d: invariants %d, symmetric power %d" % (row.order, row.dimension,
                                                               len(row.monomials)))

p = load("so3_origin.json")
algebra, _ = kin.taylor_isotropy(p.action, p.jet_kappa["point"])
k2 = kin.jet_kappa_dimension(algebra, 2)
print("\nthe order-2 invariant is", {m: to_string(c) for m, c in zip(k2.monomials, k2.basis[0])
                                    if to_string(c) != "0"})

s2 = load("s2_equivariant.json")
rep = kin.isotropy_rep(s2.action, s2.point)
fs = kin.fixed_points_constrained(rep, s2.bundle.constraints, s2.bundle.fiber)
print("\nat the north pole the image must be one of:")
for pt in fs.points:
    print("  (%s)" % ", ".join(to_string(x) for x in pt))
