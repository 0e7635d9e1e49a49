"""Bundles, projectable group actions and quotient charts.

An action is given by infinitesimal generators ``(xi, phi)`` on the total
space plus a finite list of discrete generators.  Base points are either a
mapping ``{Symbol: value}`` or ``None`` for the generic symbolic point (the
base coordinates themselves).

Discrete generators may use *point parameters*: a symbol named ``<coord>0``
stands for the ``coord`` value of the base point being examined, so a
reflection about the time of the base point is written ``2*t0 - t``.
"""

from dataclasses import dataclass, field
import warnings

from . import linalg
from .expr import (Context, ExprError, Rational, SubstitutionError, Symbol, diff, evaluate,
                   free_symbols, is_zero, normalize, substitute)

VECTOR, COVECTOR, SYM2_COVECTOR, SCALAR, EXPLICIT = (
    "vector", "covector", "sym2_covector", "scalar", "explicit")
TENSOR_TAGS = (VECTOR, COVECTOR, SYM2_COVECTOR, SCALAR)


class GeometryError(ExprError):
    pass


class DomainError(GeometryError):
    pass


def sym2_pairs(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym2_names(prefix, base_names):
    sep = "" if all(len(b) == 1 for b in base_names) else "_"
    return ["%s_%s%s%s" % (prefix, base_names[i], sep, base_names[j])
            for i, j in sym2_pairs(len(base_names))]


def block_size(tag, n):
    return {VECTOR: n, COVECTOR: n, SCALAR: 1, SYM2_COVECTOR: n * (n + 1) // 2}[tag]


@dataclass
class BundleSpec:
    base: tuple
    fiber: tuple
    constraints: tuple = ()
    fiber_linear: bool = True
    rep: tuple = ()             # tensor blocks, e.g. ("vector", "scalar"); empty = explicit
    nonzero: tuple = ()         # base expressions that must not vanish (domain)

    def __post_init__(self):
        self.base = tuple(self.base)
        self.fiber = tuple(self.fiber)
        self.constraints = tuple(self.constraints)
        self.rep = tuple(self.rep)
        names = [s.name for s in self.base + self.fiber]
        if len(set(names)) != len(names):
            raise GeometryError("base and fiber coordinate names must be distinct")
        if self.constraints and self.fiber_linear:
            raise GeometryError("a fiber-linear bundle cannot carry constraints")
        fiber = set(self.fiber)
        for c in self.constraints:
            if not free_symbols(c) <= fiber:
                raise GeometryError("constraint %s involves non-fiber coordinates" % c)
        if self.rep and sum(block_size(t, self.n) for t in self.rep) != self.m:
            raise GeometryError("tensor blocks %s do not match fiber dimension %d"
                                % (self.rep, self.m))

    @property
    def n(self):
        return len(self.base)

    @property
    def m(self):
        return len(self.fiber)

    def blocks(self):
        """Yield (tag, fiber coordinate slice) for each tensor block."""
        start = 0
        for tag in self.rep:
            size = block_size(tag, self.n)
            yield tag, self.fiber[start:start + size]
            start += size


@dataclass
class InfinitesimalGenerator:
    xi: tuple
    phi: tuple = ()
    name: str = ""

    def __post_init__(self):
        self.xi = tuple(normalize(e) for e in self.xi)
        self.phi = tuple(normalize(e) for e in self.phi)


@dataclass
class DiscreteGenerator:
    base_map: tuple
    fiber_map: tuple = None     # explicit fiber map in base+fiber coordinates
    name: str = ""

    def __post_init__(self):
        self.base_map = tuple(normalize(e) for e in self.base_map)
        if self.fiber_map is not None:
            self.fiber_map = tuple(normalize(e) for e in self.fiber_map)


@dataclass
class GroupAction:
    bundle: BundleSpec
    generators: list
    discrete: list = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        for g in self.generators:
            if len(g.xi) != self.bundle.n:
                raise GeometryError("generator %s has %d base components, expected %d"
                                    % (g.name, len(g.xi), self.bundle.n))
            bad = set().union(*(free_symbols(e) for e in g.xi)) & set(self.bundle.fiber)
            if bad:
                raise GeometryError("generator %s is not projectable: xi depends on %s"
                                    % (g.name, sorted(s.name for s in bad)))
            if not g.phi:
                g.phi = tensor_phi(self.bundle, g.xi)
            if len(g.phi) != self.bundle.m:
                raise GeometryError("generator %s has %d fiber components, expected %d"
                                    % (g.name, len(g.phi), self.bundle.m))
        for d in self.discrete:
            if len(d.base_map) != self.bundle.n:
                raise GeometryError("discrete generator %s has a wrong base map" % d.name)
            bad = set().union(*(free_symbols(e) for e in d.base_map)) & set(self.bundle.fiber)
            if bad:
                raise GeometryError("discrete generator %s is not projectable" % d.name)
            if d.fiber_map is None and not self.bundle.rep:
                raise GeometryError("discrete generator %s needs a fiber map" % d.name)


@dataclass
class QuotientChart:
    """Invariant functions giving coordinates on the orbit space.

    ``coords`` are plain symbols of the quotient; ``definitions`` are the
    matching invariant expressions on the base; ``slice`` maps each base
    coordinate to an expression in quotient coordinates that is a right
    inverse of the chart (used to rewrite invariant expressions).
    """

    coords: tuple
    definitions: tuple
    slice: dict = None

    def __post_init__(self):
        self.coords = tuple(self.coords)
        self.definitions = tuple(normalize(d) for d in self.definitions)
        if len(self.coords) != len(self.definitions):
            raise GeometryError("chart needs one definition per quotient coordinate")


# --------------------------------------------------------------------------
# tensor representations

def jacobian(exprs, coords):
    return [[diff(e, c) for c in coords] for e in exprs]


def tensor_phi(bundle, xi):
    """Fiber components of the lifted vector field for tensor-type fibers."""
    if not bundle.rep:
        raise GeometryError("explicit bundles need explicit phi components")
    J = jacobian(xi, bundle.base)
    n = bundle.n
    out = []
    for tag, coords in bundle.blocks():
        if tag == SCALAR:
            out.append(Rational(0))
        elif tag == VECTOR:
            for a in range(n):
                out.append(sum((J[a][b] * coords[b] for b in range(n)), Rational(0)))
        elif tag == COVECTOR:
            for a in range(n):
                out.append(-sum((J[b][a] * coords[b] for b in range(n)), Rational(0)))
        else:
            index = {p: k for k, p in enumerate(sym2_pairs(n))}

            def g(i, j):
                return coords[index[(min(i, j), max(i, j))]]

            for i, j in sym2_pairs(n):
                s = Rational(0)
                for k in range(n):
                    s = s + J[k][i] * g(k, j) + J[k][j] * g(i, k)
                out.append(-s)
    return tuple(out)


def tensor_fiber_matrix(bundle, dg, dg_inv):
    """Matrix of the induced map on a tensor fiber for base Jacobian ``dg``."""
    n = bundle.n
    blocks = []
    for tag, coords in bundle.blocks():
        if tag == SCALAR:
            blocks.append([[Rational(1)]])
        elif tag == VECTOR:
            blocks.append(dg)
        elif tag == COVECTOR:
            blocks.append([[dg_inv[b][a] for b in range(n)] for a in range(n)])
        else:
            pairs = sym2_pairs(n)
            # (dg^-T gamma dg^-1)_{ij} = sum_kl inv[k][i] inv[l][j] gamma_kl
            mat = []
            for i, j in pairs:
                row = []
                for k, l in pairs:
                    c = dg_inv[k][i] * dg_inv[l][j]
                    if k != l:
                        c = c + dg_inv[l][i] * dg_inv[k][j]
                    row.append(c)
                mat.append(row)
            blocks.append(mat)
    size = sum(len(b) for b in blocks)
    out = [[Rational(0)] * size for _ in range(size)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return out


# --------------------------------------------------------------------------
# points

def point_bindings(bundle, x0):
    """Substitution for evaluating at ``x0`` (``None`` = generic point).

    Also binds point parameters ``<coord>0`` to the point's coordinates.
    """
    values = {}
    for c in bundle.base:
        v = c if x0 is None else x0.get(c, x0.get(c.name))
        if v is None:
            raise DomainError("point does not give a value for %s" % c.name)
        values[c] = v if not isinstance(v, (int, float)) else Rational(v)
        values[Symbol(c.name + "0")] = values[c]
    return values


def at_point(e, bundle, x0):
    binds = point_bindings(bundle, x0)
    if x0 is None:
        binds = {k: v for k, v in binds.items() if k not in bundle.base}
    try:
        value = substitute(e, binds)
    except ZeroDivisionError as exc:
        raise DomainError("expression is singular at the point: %s" % exc) from None
    return value


def check_domain(bundle, x0):
    if x0 is None:
        return
    for e in bundle.nonzero:
        try:
            zero = is_zero(at_point(e, bundle, x0))
        except SubstitutionError:
            # irrational generator value (e.g. r = sqrt(2)); decide numerically
            pt = {c.name: float(v.value if isinstance(v, Rational) else v)
                  for c, v in point_bindings(bundle, x0).items() if c in bundle.base}
            zero = evaluate(e, pt) == 0
        if zero:
            raise DomainError("point lies outside the domain (%s = 0)" % e)


# --------------------------------------------------------------------------
# operations

def generator_matrix(generators, bundle, x0):
    """Columns are the generators' base components at ``x0``."""
    check_domain(bundle, x0)
    cols = [[at_point(e, bundle, x0) for e in g.xi] for g in generators]
    return [[cols[a][i] for a in range(len(generators))] for i in range(bundle.n)]


def isotropy_subalgebra(action, x0=None):
    """Basis of coefficient vectors c with sum_a c^a xi_a(x0) = 0."""
    gens = action.generators
    if not gens:
        return []
    m = generator_matrix(gens, action.bundle, x0)
    return linalg.nullspace(m, ncols=len(gens))


def linear_isotropy_rep(action, coefficients, x0=None):
    """Jacobian at ``x0`` of the base vector field ``sum c^a xi_a``.

    ``coefficients`` are constants attached to the point (they are not
    differentiated).
    """
    bundle = action.bundle
    check_domain(bundle, x0)
    n = bundle.n
    field_at = [Rational(0)] * n
    J = [[Rational(0)] * n for _ in range(n)]
    for c, g in zip(coefficients, action.generators):
        if is_zero(c):
            continue
        for i, e in enumerate(g.xi):
            field_at[i] = field_at[i] + c * at_point(e, bundle, x0)
            for j, s in enumerate(bundle.base):
                J[i][j] = J[i][j] + c * at_point(diff(e, s), bundle, x0)
    if not all(is_zero(v) for v in field_at):
        raise GeometryError("the combined vector field does not vanish at the point")
    return J


def fiber_isotropy_matrix(action, coefficients, x0=None):
    """Linear fiber action ``sum c^a d(phi_a)/du`` at ``x0``."""
    bundle = action.bundle
    m = bundle.m
    L = [[Rational(0)] * m for _ in range(m)]
    for c, g in zip(coefficients, action.generators):
        if is_zero(c):
            continue
        for a, e in enumerate(g.phi):
            for b, u in enumerate(bundle.fiber):
                d = diff(e, u)
                if any(s in bundle.fiber for s in free_symbols(d)):
                    raise GeometryError("fiber action of %s is not linear" % g.name)
                L[a][b] = L[a][b] + c * at_point(d, bundle, x0)
    return L


def discrete_fixes_point(d, bundle, x0):
    binds = point_bindings(bundle, x0)
    return all(is_zero(substitute(e, binds) - binds[c]) for e, c in zip(d.base_map, bundle.base))


def discrete_fiber_matrix(action, d, x0=None):
    """Matrix of a discrete isotropy element on the fiber over ``x0``."""
    bundle = action.bundle
    if not discrete_fixes_point(d, bundle, x0):
        raise GeometryError("discrete generator %s does not fix the point" % d.name)
    if d.fiber_map is not None:
        m = jacobian(d.fiber_map, bundle.fiber)
        for row in m:
            for x in row:
                if any(s in bundle.fiber for s in free_symbols(x)):
                    raise GeometryError("fiber map of %s is not linear" % d.name)
        return [[at_point(x, bundle, x0) for x in row] for row in m]
    dg = [[at_point(x, bundle, x0) for x in row] for row in jacobian(d.base_map, bundle.base)]
    dg_inv = linalg.to_expr_matrix(linalg.inverse_rf(dg))
    return tensor_fiber_matrix(bundle, dg, dg_inv)


@dataclass
class TransversalityReport:
    transverse: bool
    rank_xi: int
    rank_full: int
    point: object = None
    note: str = ("ranks are computed at the given (or generic symbolic) point; "
                 "they can drop on special subvarieties")


def check_transverse(action, x0=None):
    """Compare rank[xi] with rank[xi, phi] for generic fiber values."""
    bundle = action.bundle
    check_domain(bundle, x0)
    rows_xi, rows_full = [], []
    for g in action.generators:
        xi = [at_point(e, bundle, x0) for e in g.xi]
        phi = [at_point(e, bundle, x0) for e in g.phi]
        rows_xi.append(xi)
        rows_full.append(xi + phi)
    r1 = linalg.rank(rows_xi) if rows_xi else 0
    r2 = linalg.rank(rows_full) if rows_full else 0
    return TransversalityReport(r1 == r2, r1, r2, x0)


def apply_vector_field(xi, coords, f):
    return sum((a * diff(f, c) for a, c in zip(xi, coords)), Rational(0))


def verify_invariants(chart, action):
    """True when every chart function is invariant under the whole action."""
    bundle = action.bundle
    for f in chart.definitions:
        for g in action.generators:
            if not is_zero(apply_vector_field(g.xi, bundle.base, f)):
                return False
        for d in action.discrete:
            if not is_zero(_compose_base(f, d, bundle) - f):
                return False
    return True


def _compose_base(f, d, bundle):
    return substitute(f, dict(zip(bundle.base, d.base_map)))


def invariance_defects(section, action):
    """Defect expressions of a section; all zero iff it is invariant.

    Infinitesimal defects ``phi(x, s(x)) - xi . grad s``; for each discrete
    generator ``F(x, s(x)) - s(g x)`` with ``F`` its fiber map.
    """
    bundle = action.bundle
    section = [normalize(s) for s in section]
    if len(section) != bundle.m:
        raise GeometryError("section has %d components, fiber has %d" % (len(section), bundle.m))
    on_section = dict(zip(bundle.fiber, section))
    defects = []
    for g in action.generators:
        for a, phi in enumerate(g.phi):
            lhs = substitute(phi, on_section)
            defects.append(lhs - apply_vector_field(g.xi, bundle.base, section[a]))
    for d in action.discrete:
        moved = [_compose_base(s, d, bundle) for s in section]
        if d.fiber_map is not None:
            image = [substitute(e, on_section) for e in d.fiber_map]
        else:
            dg = jacobian(d.base_map, bundle.base)
            dg_inv = linalg.to_expr_matrix(linalg.inverse_rf(dg))
            # compare in pulled-back form: mat(x) acting on s(x) equals s(gx)
            mat = tensor_fiber_matrix(bundle, dg, dg_inv)
            image = [from_sum(row, section) for row in mat]
        defects.extend(i - mv for i, mv in zip(image, moved))
    return defects


def from_sum(row, vec):
    return sum((a * b for a, b in zip(row, vec) if not is_zero(a)), Rational(0))


def verify_invariant_section(section, action):
    return all(is_zero(d) for d in invariance_defects(section, action))


# --------------------------------------------------------------------------
# charts

def default_slice(chart, bundle):
    """Right inverse of the chart for coordinates and square-root radii.

    A quotient coordinate defined by a base coordinate maps back to it; one
    defined by a generator ``sqrt(c1^2 + ... + ck^2)`` sets ``c1`` to the
    quotient coordinate and the other ``ci`` to 0.  Remaining base
    coordinates are set to 0.
    """
    out = {}
    for q, d in zip(chart.coords, chart.definitions):
        if isinstance(d, Symbol) and d.generator is None and d in bundle.base:
            out[d] = q
        elif isinstance(d, Symbol) and d.generator is not None:
            rad = d.generator.radicand
            cs = sorted(free_symbols(rad), key=lambda s: [b.name for b in bundle.base].index(s.name)
                        if s in bundle.base else 99)
            if not cs or not all(c in bundle.base for c in cs):
                raise GeometryError("cannot derive a slice for %s" % q.name)
            if not is_zero(rad - sum((c * c for c in cs), Rational(0))):
                raise GeometryError("cannot derive a slice for %s = %s; give one explicitly"
                                    % (q.name, d))
            out[cs[0]] = q
            for c in cs[1:]:
                out.setdefault(c, Rational(0))
        else:
            raise GeometryError("cannot derive a slice for %s = %s; give one explicitly"
                                % (q.name, d))
    for c in bundle.base:
        out.setdefault(c, Rational(0))
    return out


def slice_bindings(chart, bundle):
    """Substitution base -> quotient along the slice, generators included."""
    sl = chart.slice if chart.slice is not None else default_slice(chart, bundle)
    binds = dict(sl)
    for q, d in zip(chart.coords, chart.definitions):
        if isinstance(d, Symbol) and d.generator is not None:
            rad = substitute(d.generator.radicand, sl)
            if not is_zero(rad - q * q):
                raise GeometryError("slice does not invert %s" % q.name)
            binds[d] = q
        elif not is_zero(substitute(d, binds) - q):
            raise GeometryError("slice does not invert %s" % q.name)
    return binds


def warn_unchecked_regularity():
    warnings.warn("regularity of the action (M/G a manifold) is assumed, not checked",
                  stacklevel=2)


def context_for(bundle, extra_symbols=()):
    """A parsing context holding the bundle's coordinates."""
    ctx = Context()
    for s in bundle.base + bundle.fiber + tuple(extra_symbols):
        ctx.symbols[s.name] = s
    return ctx

