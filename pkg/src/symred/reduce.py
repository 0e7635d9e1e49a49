"""Restriction to invariant jets, extraction of the reduced operator, checks."""

from dataclasses import dataclass, field
from fractions import Fraction
import random

from . import geometry as geo
from . import kinematic as kin
from . import linalg
from .expr import (ExprError, Rational, Symbol, evaluate, from_rf, is_zero, normalize,
                   substitute, substitute_functions, to_rf)
from .expr.core import RatFunc
from .jets import JetError, prolong
from .operators import FIBER, SCALAR, OperatorError, DegenerateMetric


class ReductionError(ExprError):
    pass


class ExtractionError(ReductionError):
    def __init__(self, message, residual=()):
        super().__init__(message)
        self.residual = list(residual)


@dataclass
class ReducedSystem:
    ansatz: object
    coords: tuple
    functions: list
    components: list              # reduced Exprs in quotient coordinates
    basis: object                 # kinematic basis of the target fiber
    base_components: list         # the same coefficients before the slice rewrite
    residual: list
    labels: list = field(default_factory=list)

    @property
    def consistent(self):
        return all(is_zero(r) for r in self.residual)


# --------------------------------------------------------------------------

def _jet_getter(pa, convert):
    jets = pa.jets

    def get(a, idx):
        key = jets.coord(a, tuple(idx))
        if key not in pa.entries:
            raise ReductionError("jet %s is beyond the prolongation order %d" % (key.name, pa.order))
        return convert(pa.entries[key])
    return get


def restrict(op, pa):
    """Components of the operator along the prolonged ansatz."""
    if pa.order < op.order:
        raise ReductionError("operator has order %d but the ansatz is prolonged to %d"
                             % (op.order, pa.order))
    op.check_bundle(pa.ansatz.action.bundle)
    try:
        if op.flavor == "explicit":
            binds = dict(pa.entries)
            return [substitute(c, binds) for c in op.components]
        out = op.recipe(_jet_getter(pa, to_rf), RatFunc.const(0))
        return [from_rf(x) for x in out]
    except (ZeroDivisionError, DegenerateMetric) as exc:
        raise ReductionError("restriction is singular: %s" % exc) from None


def target_action(op, action):
    """The group action on the operator's target fiber."""
    bundle = action.bundle
    rep = op.target_rep
    if rep == FIBER:
        if op.d != bundle.m:
            raise OperatorError("target transforms like the fiber but has %d components" % op.d)
        names = [Symbol("D_" + u.name) for u in bundle.fiber]
        ren = dict(zip(bundle.fiber, names))
        tb = geo.BundleSpec(bundle.base, names, rep=bundle.rep, nonzero=bundle.nonzero)
        gens = [geo.InfinitesimalGenerator(g.xi, [substitute(e, ren) for e in g.phi], g.name)
                for g in action.generators]
        disc = [geo.DiscreteGenerator(d.base_map,
                                      None if d.fiber_map is None else
                                      [substitute(e, ren) for e in d.fiber_map], d.name)
                for d in action.discrete]
        return geo.GroupAction(tb, gens, disc, action.name)
    if rep == SCALAR:
        rep = (geo.SCALAR,) * op.d
    rep = tuple(rep)
    size = sum(geo.block_size(t, bundle.n) for t in rep)
    if size != op.d:
        raise OperatorError("target rep %s has dimension %d, operator has %d"
                            % (rep, size, op.d))
    names = [Symbol("D%d" % (k + 1)) for k in range(op.d)]
    tb = geo.BundleSpec(bundle.base, names, rep=rep, nonzero=bundle.nonzero)
    gens = [geo.InfinitesimalGenerator(g.xi, (), g.name) for g in action.generators]
    disc = [geo.DiscreteGenerator(d.base_map, None, d.name) for d in action.discrete]
    return geo.GroupAction(tb, gens, disc, action.name)


def kappa_of_D(op, action, x0=None, names=None, preferred=None):
    return kin.kinematic_basis(target_action(op, action), x0, names, preferred)


def extract(delta_inv, basis, ansatz, slice_binds=None):
    """Solve ``delta_inv = sum_k Dt_k b_k`` and rewrite the Dt_k on the quotient."""
    d = len(delta_inv)
    if basis.dimension == 0:
        residual = [normalize(e) for e in delta_inv]
        if not all(is_zero(r) for r in residual):
            raise ExtractionError("the target kinematic fiber is zero but the restricted "
                                  "operator is not", residual)
        coeffs = []
    else:
        A = [[v[a] for v in basis.vectors] for a in range(d)]
        x, residual = linalg.solve_rf(A, delta_inv)
        residual = [from_rf(r) for r in residual]
        if not all(is_zero(r) for r in residual):
            raise ExtractionError("restricted operator is not in the span of the target "
                                  "kinematic basis", residual)
        coeffs = [from_rf(c) for c in x]
    quot = ansatz.quotient
    if slice_binds is None:
        slice_binds = geo.slice_bindings(ansatz.chart, ansatz.action.bundle)
    reduced = []
    for c in coeffs:
        q = quot.to_quotient(c, slice_binds)
        if not quot.is_pure(q):
            raise ExtractionError("reduced component %s still involves base coordinates" % q)
        if not is_zero(quot.to_base(q) - c):
            raise ExtractionError("coefficient %s is not a function on the quotient" % c,
                                  [normalize(quot.to_base(q) - c)])
        reduced.append(q)
    labels = ["Dt%d" % (k + 1) for k in range(len(reduced))]
    return ReducedSystem(ansatz, quot.coords, quot.functions, reduced, basis, coeffs,
                         residual, labels)


def reduce_operator(op, ansatz, order=None, x0=None, names=None, preferred=None):
    """Prolong, restrict, compute the target kinematic fiber, and extract."""
    order = op.order if order is None else order
    pa = prolong(ansatz, order)
    delta = restrict(op, pa)
    basis = kappa_of_D(op, ansatz.action, x0, names, preferred)
    return extract(delta, basis, ansatz), pa, delta


# --------------------------------------------------------------------------
# solutions

def _solution_exprs(system, solution):
    quot = system.ansatz.quotient
    out = {}
    for f in quot.functions:
        if f.name not in solution:
            raise JetError("no expression for %s" % f.name)
        out[f] = solution[f.name]
    return out


def reduced_residuals(system, solution):
    repl = _solution_exprs(system, solution)
    return [substitute_functions(c, repl) for c in system.components]


def verify_reduced_solution(system, solution):
    return all(is_zero(r) for r in reduced_residuals(system, solution))


def _float_point(bundle, point):
    out = {}
    for c in bundle.base:
        v = point[c] if c in point else point[c.name]
        out[c] = float(v.value if isinstance(v, Rational) else v)
    return out


def numeric_lift_check(system, solution, op, points, h=1e-3, values=None):
    """Max |component| of the operator on the lifted section, by finite differences.

    Derivatives are central differences of step ``h``; the error is O(h^2)
    for smooth sections.  ``values`` binds parameters numerically.
    """
    ansatz = system.ansatz
    bundle = ansatz.action.bundle
    section = ansatz.lift(solution)
    values = {k if isinstance(k, str) else k.name: float(v) for k, v in (values or {}).items()}
    n = bundle.n
    jets = op.jets
    worst = 0.0
    for point in points:
        x0 = _float_point(bundle, point)
        for e in bundle.nonzero:
            if evaluate(e, dict(values, **{c.name: v for c, v in x0.items()})) == 0:
                raise geo.DomainError("sample point is singular (%s = 0)" % e)

        def s_at(shift):
            pt = dict(values)
            for i, c in enumerate(bundle.base):
                pt[c.name] = x0[c] + shift[i] * h
            return [evaluate(e, pt) for e in section]

        zero = [0] * n
        s0 = s_at(zero)
        cache = {}

        def shifted(*pairs):
            key = tuple(sorted(pairs))
            if key not in cache:
                sh = list(zero)
                for i, step in pairs:
                    sh[i] += step
                cache[key] = s_at(sh)
            return cache[key]

        def get(a, idx):
            idx = tuple(sorted(idx))
            if not idx:
                return s0[a]
            if len(idx) == 1:
                i, = idx
                return (shifted((i, 1))[a] - shifted((i, -1))[a]) / (2 * h)
            if len(idx) == 2:
                i, j = idx
                if i == j:
                    return (shifted((i, 1))[a] - 2 * s0[a] + shifted((i, -1))[a]) / (h * h)
                return (shifted((i, 1), (j, 1))[a] - shifted((i, 1), (j, -1))[a]
                        - shifted((i, -1), (j, 1))[a] + shifted((i, -1), (j, -1))[a]) / (4 * h * h)
            raise ReductionError("finite differences are implemented up to order 2")

        if op.flavor == "explicit":
            pt = dict(values)
            for c in bundle.base:
                pt[c.name] = x0[c]
            lookup = jets.lookup(op.order)
            for s, (a, idx) in lookup.items():
                pt[s.name] = get(a, idx)
            comps = [evaluate(c, pt) for c in op.components]
        else:
            comps = op.recipe(get, 0.0)
        worst = max([worst] + [abs(c) for c in comps])
    return worst


def random_points(bundle, count, seed=0, radius=(1, 3), denominator=8):
    """Rational points whose first three coordinates have norm in ``radius``."""
    rng = random.Random(seed)
    out = []
    spatial = min(3, bundle.n)
    while len(out) < count:
        pt = {c: Fraction(rng.randint(-3 * denominator, 3 * denominator), denominator)
              for c in bundle.base}
        r2 = sum(pt[c] ** 2 for c in bundle.base[:spatial])
        if radius[0] ** 2 <= r2 <= radius[1] ** 2:
            out.append(pt)
    return out
