"""Fixed-point fiber spaces and the kinematic bundle.

The fiber over a base point carries the linear action of the isotropy
algebra (matrices ``L_a``) and of discrete isotropy elements (``S_b``);
the kinematic fiber is ``cap ker L_a  cap  ker(S_b - I)``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, isqrt
import os

from . import geometry as geo
from . import linalg
from .expr import (Rational, Symbol, coefficients_in, free_symbols, is_zero, normalize,
                   substitute, to_rf)
from .expr.core import RatFunc, from_rf


class KinematicError(geo.GeometryError):
    pass


class DimensionCapExceeded(KinematicError):
    pass


class UnsupportedIntersection(KinematicError):
    pass


@dataclass
class FiberRep:
    m: int
    infinitesimal: list          # m x m Expr matrices
    discrete: list = field(default_factory=list)
    tag: str = geo.EXPLICIT
    point: object = None

    def stacked(self):
        rows = []
        for L in self.infinitesimal:
            rows.extend(L)
        for S in self.discrete:
            rows.extend([[S[i][j] - (1 if i == j else 0) for j in range(self.m)]
                         for i in range(self.m)])
        return rows


@dataclass
class KinematicBasis:
    point: object
    vectors: list                # basis sections, each a list of m Exprs
    names: list
    rank_of_conditions: int = 0
    warnings: list = field(default_factory=list)

    @property
    def dimension(self):
        return len(self.vectors)


def isotropy_rep(action, x0=None, tag=None):
    """FiberRep of the isotropy at ``x0`` acting on the fiber of ``action.bundle``."""
    basis = geo.isotropy_subalgebra(action, x0)
    Ls = [geo.fiber_isotropy_matrix(action, c, x0) for c in basis]
    Ss = []
    for d in action.discrete:
        if geo.discrete_fixes_point(d, action.bundle, x0):
            Ss.append(geo.discrete_fiber_matrix(action, d, x0))
    if tag is None:
        tag = "+".join(action.bundle.rep) if action.bundle.rep else geo.EXPLICIT
    return FiberRep(action.bundle.m, Ls, Ss, tag, x0)


def _independent(vectors):
    return linalg.rank(vectors) == len(vectors) if vectors else True


def fixed_space(rep, names=None, preferred=None, generic_rep=None):
    """Basis of the common fixed space of an isotropy representation.

    ``preferred`` is an optional list of basis vectors to report instead of
    the elimination output; they are checked to lie in the fixed space and
    to span it.  ``generic_rep`` (the same representation at the generic
    point) lets a rank drop at a special point be reported.
    """
    rows = rep.stacked()
    kernel = linalg.nullspace(rows, ncols=rep.m) if rows else [
        [Rational(int(i == j)) for i in range(rep.m)] for j in range(rep.m)]
    r = linalg.rank(rows) if rows else 0
    if r + len(kernel) != rep.m:
        raise KinematicError("rank-nullity violated")
    vectors = kernel
    if preferred is not None:
        preferred = [[normalize(x) for x in v] for v in preferred]
        for v in preferred:
            if len(v) != rep.m:
                raise KinematicError("preferred basis vector has wrong length")
            for row in rows:
                if not is_zero(geo.from_sum(row, v)):
                    raise KinematicError("preferred vector %s is not fixed" % [str(x) for x in v])
        if len(preferred) != len(kernel) or not _independent(preferred):
            raise KinematicError("preferred vectors do not form a basis of the fixed space "
                                 "(dimension %d)" % len(kernel))
        vectors = preferred
    if names is None:
        names = ["w%d" % (k + 1) for k in range(len(vectors))]
    if len(names) != len(vectors):
        raise KinematicError("%d names given for a %d-dimensional fixed space"
                             % (len(names), len(vectors)))
    warnings = []
    if generic_rep is not None:
        rows_g = generic_rep.stacked()
        dim_g = rep.m - (linalg.rank(rows_g) if rows_g else 0)
        if dim_g != len(vectors):
            warnings.append("fixed space has dimension %d at this point but %d generically"
                            % (len(vectors), dim_g))
    return KinematicBasis(rep.point, vectors, list(names), r, warnings)


def kinematic_basis(action, x0=None, names=None, preferred=None):
    rep = isotropy_rep(action, x0)
    generic = isotropy_rep(action, None) if x0 is not None else None
    return fixed_space(rep, names, preferred, generic)


# --------------------------------------------------------------------------
# nonlinear fibers

@dataclass
class ConstrainedFixedSet:
    kind: str                     # "empty", "points", "variety"
    points: list = field(default_factory=list)
    parameters: list = field(default_factory=list)
    equations: list = field(default_factory=list)
    linear_basis: list = field(default_factory=list)


def _rational_roots_quadratic(a, b, c):
    """Rational roots of a*l^2 + b*l + c (Fractions); None if irrational."""
    if a == 0:
        if b == 0:
            return None if c == 0 else []
        return [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    num, den = disc.numerator, disc.denominator
    sn, sd = isqrt(num), isqrt(den)
    if sn * sn != num or sd * sd != den:
        return None
    root = Fraction(sn, sd)
    return sorted({(-b + root) / (2 * a), (-b - root) / (2 * a)})


def fixed_points_constrained(rep, constraints, fiber):
    """Intersect the linear fixed space with polynomial fiber constraints.

    Supported: an empty or zero-dimensional linear part, a one-parameter
    line meeting quadric constraints in finitely many rational points, and
    the degenerate case where the constraints vanish identically.  Anything
    else is returned as a ``variety`` in the basis coefficients.
    """
    basis = fixed_space(rep).vectors
    lam = [Symbol("lambda%d" % (k + 1)) for k in range(len(basis))]
    point = [sum((l * v[i] for l, v in zip(lam, basis)), Rational(0)) for i in range(rep.m)]
    on_space = dict(zip(fiber, point))
    eqs = [substitute(c, on_space) for c in constraints]
    eqs = [e for e in eqs if not is_zero(e)]
    if not basis:
        zero = {u: Rational(0) for u in fiber}
        if all(is_zero(substitute(c, zero)) for c in constraints):
            return ConstrainedFixedSet("points", [[Rational(0)] * rep.m], [], [], basis)
        return ConstrainedFixedSet("empty", [], [], [], basis)
    if not eqs:
        return ConstrainedFixedSet("variety", [], lam, [], basis)
    if len(basis) == 1:
        l = lam[0]
        roots = None
        for e in eqs:
            if free_symbols(e) - {l}:
                roots = None
                break
            coeffs = {0: Fraction(0), 1: Fraction(0), 2: Fraction(0)}
            parts = coefficients_in(e, l)
            if any(d > 2 for d in parts):
                raise UnsupportedIntersection("constraint of degree > 2 along the fixed line")
            for d, part in parts.items():
                v = to_rf(part).constant_value()
                if v is None:
                    raise UnsupportedIntersection("non-constant coefficients on the fixed line")
                coeffs[d] = v
            rs = _rational_roots_quadratic(coeffs[2], coeffs[1], coeffs[0])
            if rs is None:
                raise UnsupportedIntersection("irrational intersection points")
            rs = set(rs)
            roots = rs if roots is None else roots & rs
        if roots is None:
            return ConstrainedFixedSet("variety", [], lam, eqs, basis)
        pts = [[normalize(substitute(x, {l: Rational(q)})) for x in point] for q in sorted(roots)]
        pts.sort(key=lambda p: [to_rf(x).constant_value() or 0 for x in p])
        return ConstrainedFixedSet("points" if pts else "empty", pts, [], [], basis)
    return ConstrainedFixedSet("variety", [], lam, eqs, basis)


# --------------------------------------------------------------------------
# symmetric powers (jet-level kappa)

def dim_cap():
    return int(os.environ.get("SYMRED_DIM_CAP", "2000"))


def symmetric_monomials(n, k):
    """Exponent tuples of degree-k monomials in n variables, lex order."""
    out = []
    for combo in combinations_with_replacement(range(n), k):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def _rf_const(x):
    v = to_rf(x).constant_value() if not isinstance(x, (int, Fraction)) else Fraction(x)
    if v is None:
        raise KinematicError("symmetric powers need numeric matrices")
    return v


def symmetric_power_derivation(A, k):
    """Matrix of the Leibniz extension of ``A`` (n x n) to degree-k monomials.

    ``A`` acts on the variables by ``e_i -> sum_j A[j][i] e_j``.
    """
    n = len(A)
    A = [[_rf_const(x) for x in row] for row in A]
    mons = symmetric_monomials(n, k)
    index = {m: i for i, m in enumerate(mons)}
    M = [[Fraction(0)] * len(mons) for _ in mons]
    for col, m in enumerate(mons):
        for i in range(n):
            if not m[i]:
                continue
            for j in range(n):
                if A[j][i] == 0:
                    continue
                new = list(m)
                new[i] -= 1
                new[j] += 1
                M[index[tuple(new)]][col] += m[i] * A[j][i]
    return M


def symmetric_power_map(S, k):
    """Matrix of ``e_i -> sum_j S[j][i] e_j`` on degree-k monomials."""
    n = len(S)
    S = [[_rf_const(x) for x in row] for row in S]
    mons = symmetric_monomials(n, k)
    index = {m: i for i, m in enumerate(mons)}
    M = [[Fraction(0)] * len(mons) for _ in mons]
    for col, m in enumerate(mons):
        poly = {tuple([0] * n): Fraction(1)}
        for i in range(n):
            for _ in range(m[i]):
                new = {}
                for mono, c in poly.items():
                    for j in range(n):
                        if S[j][i] == 0:
                            continue
                        nm = list(mono)
                        nm[j] += 1
                        nm = tuple(nm)
                        new[nm] = new.get(nm, 0) + c * S[j][i]
                poly = new
        for mono, c in poly.items():
            if c:
                M[index[mono]][col] += c
    return M


@dataclass
class JetKappa:
    order: int
    dimension: int
    basis: list
    monomials: list


def jet_kappa_dimension(algebra, k, discrete=(), cap=None, n=None):
    """Dimension and basis of the invariants in the k-th symmetric power.

    ``algebra`` is a list of n x n matrices (the linear isotropy algebra at
    the singular point); ``discrete`` optional n x n isotropy matrices.
    """
    if k < 0:
        raise KinematicError("order must be non-negative")
    mats = list(algebra) + list(discrete)
    if n is None:
        if not mats:
            raise KinematicError("need n when there are no matrices")
        n = len(mats[0])
    size = comb(n + k - 1, k)
    cap = dim_cap() if cap is None else cap
    if size > cap:
        raise DimensionCapExceeded("symmetric power has dimension %d > cap %d" % (size, cap))
    rows = []
    for A in algebra:
        rows.extend(symmetric_power_derivation(A, k))
    for S in discrete:
        M = symmetric_power_map(S, k)
        rows.extend([[M[i][j] - (1 if i == j else 0) for j in range(size)] for i in range(size)])
    rows = [[RatFunc.const(x) for x in row] for row in rows]
    kernel = linalg.nullspace_rf(rows, ncols=size) if rows else linalg.identity(size)
    basis = [[from_rf(x) for x in v] for v in kernel]
    return JetKappa(k, len(basis), basis, symmetric_monomials(n, k))


def jet_kappa_table(algebra, max_order, discrete=(), cap=None, n=None):
    return [jet_kappa_dimension(algebra, k, discrete, cap, n) for k in range(max_order + 1)]


def taylor_isotropy(action, x0):
    """Isotropy matrices acting on Taylor coefficients of scalar functions at ``x0``.

    A function's differential transforms as a covector, so each linear
    isotropy matrix J enters as ``-J^T``; discrete isotropy elements enter
    through the inverse transpose of their Jacobian.
    """
    bundle = action.bundle
    n = bundle.n
    algebra = []
    for c in geo.isotropy_subalgebra(action, x0):
        J = geo.linear_isotropy_rep(action, c, x0)
        algebra.append([[-J[j][i] for j in range(n)] for i in range(n)])
    discrete = []
    for d in action.discrete:
        if geo.discrete_fixes_point(d, bundle, x0):
            dg = [[geo.at_point(x, bundle, x0) for x in row]
                  for row in geo.jacobian(d.base_map, bundle.base)]
            inv = linalg.to_expr_matrix(linalg.inverse_rf(dg))
            discrete.append([[inv[j][i] for j in range(n)] for i in range(n)])
    return algebra, discrete


# --------------------------------------------------------------------------
# kinematic reduction diagram

@dataclass
class KinematicDiagram:
    quotient_corner: list        # coordinates on kappa(E)/G
    kappa_corner: list           # coordinates on kappa(E)
    total_corner: list           # coordinates on E
    base_corner: list
    orbit_corner: list
    inclusion: dict              # fiber coordinate name -> Expr in base coords and kappa names
    projection: dict             # quotient coordinate name -> defining invariant
    transverse: bool
    unchecked: list = field(default_factory=lambda: [
        "the action is assumed regular on the base (orbit space is a manifold)"])


def assemble_kinematic_diagram(action, chart, basis):
    bundle = action.bundle
    transverse = basis.dimension == bundle.m and all(
        is_zero(v[i] - (1 if i == k else 0)) for k, v in enumerate(basis.vectors)
        for i in range(bundle.m))
    default = ["w%d" % (k + 1) for k in range(basis.dimension)]
    names = [s.name for s in bundle.fiber] if transverse and basis.names == default \
        else basis.names
    name_syms = [Symbol(n) for n in names]
    inclusion = {}
    for a, u in enumerate(bundle.fiber):
        inclusion[u.name] = sum((s * v[a] for s, v in zip(name_syms, basis.vectors)), Rational(0))
    base = [c.name for c in bundle.base]
    quot = [q.name for q in chart.coords]
    return KinematicDiagram(
        quotient_corner=quot + names,
        kappa_corner=base + names,
        total_corner=base + [u.name for u in bundle.fiber],
        base_corner=base,
        orbit_corner=quot,
        inclusion=inclusion,
        projection={q.name: d for q, d in zip(chart.coords, chart.definitions)},
        transverse=transverse,
    )
