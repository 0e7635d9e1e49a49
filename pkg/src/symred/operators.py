"""Built-in differential operators.

An operator is either *explicit* (component expressions in jet symbols) or
*procedural* (a recipe evaluated on jet values).  Recipes only use field
operations, so they run on exact rational functions and on floats alike.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import geometry as geo
from .expr import ExprError, Rational, Symbol, free_symbols, normalize
from .expr.core import RatFunc
from .jets import JetSpace

FIBER, SCALAR = "fiber", "scalar"


class OperatorError(ExprError):
    pass


class DegenerateMetric(OperatorError):
    pass


@dataclass
class OperatorSpec:
    name: str
    order: int
    d: int
    target_rep: object = FIBER        # "fiber", "scalar" or a tuple of tensor tags
    components: list = None           # explicit flavor
    recipe: object = None             # procedural flavor: recipe(get) -> list
    base: tuple = ()
    fiber: tuple = ()
    labels: list = field(default_factory=list)
    parameters: tuple = ()

    @property
    def flavor(self):
        return "explicit" if self.components is not None else "procedural"

    @property
    def jets(self):
        return JetSpace(tuple(self.base), tuple(self.fiber))

    def __post_init__(self):
        if (self.components is None) == (self.recipe is None):
            raise OperatorError("an operator is either explicit or procedural")
        if self.components is not None:
            self.components = [normalize(c) for c in self.components]
            if len(self.components) != self.d:
                raise OperatorError("operator has %d components, expected %d"
                                    % (len(self.components), self.d))
            allowed = (set(self.base) | set(self.jets.coords(self.order))
                       | set(self.parameters))
            for c in self.components:
                extra = free_symbols(c) - allowed
                if extra:
                    raise OperatorError("component %s uses %s, which are not jet coordinates "
                                        "of order <= %d" % (c, sorted(s.name for s in extra),
                                                            self.order))
        if not self.labels:
            self.labels = ["D%d" % (k + 1) for k in range(self.d)]

    def check_bundle(self, bundle):
        if [s.name for s in bundle.base] != [s.name for s in self.base] or \
                [s.name for s in bundle.fiber] != [s.name for s in self.fiber]:
            raise OperatorError("operator %s is written for base %s and fiber %s"
                                % (self.name, [s.name for s in self.base],
                                   [s.name for s in self.fiber]))


def _symbols(names):
    return tuple(Symbol(n) for n in names)


def euler_operator(n, spatial=None, time="t", velocity=None, pressure="p"):
    """Incompressible Euler equations (unit density) in n space dimensions.

    Components ``u^i_t + u^i_j u^j + p_i`` and the divergence ``u^j_j``.
    """
    if n < 1:
        raise OperatorError("need at least one space dimension")
    if spatial is None:
        spatial = ["x", "y", "z"][:n] if n <= 3 else ["x%d" % (i + 1) for i in range(n)]
    if velocity is None:
        velocity = ["u"] if n == 1 else ["u%d" % (i + 1) for i in range(n)]
    if len(spatial) != n or len(velocity) != n:
        raise OperatorError("need %d spatial and velocity names" % n)
    base = _symbols(list(spatial) + [time])
    fiber = _symbols(list(velocity) + [pressure])
    J = JetSpace(base, fiber)
    t = base[-1]
    comps = []
    for i in range(n):
        e = J.coord(velocity[i], (t,)) + J.coord(pressure, (base[i],))
        for j in range(n):
            e = e + J.coord(velocity[i], (base[j],)) * fiber[j]
        comps.append(e)
    comps.append(sum((J.coord(velocity[j], (base[j],)) for j in range(n)), Rational(0)))
    return OperatorSpec("euler", 1, n + 1, FIBER, comps, base=base, fiber=fiber)


def laplacian_operator(n, coords=None, field_name="u"):
    if coords is None:
        coords = ["x", "y", "z"][:n] if n <= 3 else ["x%d" % (i + 1) for i in range(n)]
    base = _symbols(coords)
    fiber = _symbols([field_name])
    J = JetSpace(base, fiber)
    comp = sum((J.coord(field_name, (c, c)) for c in base), Rational(0))
    return OperatorSpec("laplacian", 2, 1, SCALAR, [comp], base=base, fiber=fiber)


# --------------------------------------------------------------------------
# Ricci

def _nonzero(x):
    return bool(x.num) if isinstance(x, RatFunc) else x != 0


def _dot(pairs, zero):
    out = zero
    for a, b in pairs:
        if _nonzero(a) and _nonzero(b):
            out = out + a * b
    return out


def _total(items, zero):
    out = zero
    for x in items:
        if _nonzero(x):
            out = out + x
    return out


def _det(m, zero):
    n = len(m)
    if n == 1:
        return m[0][0]
    out = zero
    for j in range(n):
        if not _nonzero(m[0][j]):
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor, zero)
        out = out + term if j % 2 == 0 else out - term
    return out


def _one(zero):
    return RatFunc.const(1) if isinstance(zero, RatFunc) else 1.0


def adjugate_inverse(m, zero):
    """Inverse as adjugate / determinant; DegenerateMetric if singular."""
    n = len(m)
    det = _det(m, zero)
    if not _nonzero(det):
        raise DegenerateMetric("metric determinant vanishes")
    inv = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:i] + row[i + 1:] for k, row in enumerate(m) if k != j]
            c = _det(minor, zero) if minor else _one(zero)
            if (i + j) % 2:
                c = zero - c
            inv[i][j] = c / det
    return inv


def ricci_recipe(n, index_of):
    """Recipe computing R_ij (i <= j) from metric jets.

    ``get(a, idx)`` returns the jet value of fiber component ``a`` along the
    base index tuple ``idx``; ``index_of[(i, j)]`` is the fiber position of
    g_ij.
    """

    def recipe(get, zero):
        def g(i, j, *d):
            return get(index_of[(min(i, j), max(i, j))], d)

        metric = [[g(i, j) for j in range(n)] for i in range(n)]
        inv = adjugate_inverse(metric, zero)
        dg = [[[g(i, j, k) for k in range(n)] for j in range(n)] for i in range(n)]
        half = RatFunc.const(Fraction(1, 2)) if isinstance(zero, RatFunc) else 0.5
        # first-kind symbols G[l][i][j] and their derivatives
        G = [[[(dg[j][l][i] + dg[i][l][j] - dg[i][j][l]) * half for j in range(n)]
              for i in range(n)] for l in range(n)]

        def dG(l, i, j, m):
            return (g(j, l, i, m) + g(i, l, j, m) - g(i, j, l, m)) * half

        # d_m g^{kl} = -g^{ka} d_m g_ab g^{bl}
        dinv = {}
        for m in range(n):
            tmp = [[_dot(((inv[k][a], dg[a][b][m]) for a in range(n)), zero)
                    for b in range(n)] for k in range(n)]
            for k in range(n):
                for l in range(n):
                    dinv[k, l, m] = zero - _dot(((tmp[k][b], inv[b][l]) for b in range(n)), zero)
        Gam = [[[_dot(((inv[k][l], G[l][i][j]) for l in range(n)), zero)
                 for j in range(n)] for i in range(n)] for k in range(n)]
        trace = [_total((Gam[k][k][j] for k in range(n)), zero) for j in range(n)]
        out = []
        for i in range(n):
            for j in range(i, n):
                t1 = zero
                for k in range(n):
                    for l in range(n):
                        t1 = t1 + _dot([(dinv[k, l, k], G[l][i][j]),
                                        (inv[k][l], dG(l, i, j, k))], zero)
                t2 = zero
                for k in range(n):
                    for l in range(n):
                        t2 = t2 + _dot([(dinv[k, l, i], G[l][k][j]),
                                        (inv[k][l], dG(l, k, j, i))], zero)
                quad = _dot(((trace[l], Gam[l][i][j]) for l in range(n)), zero)
                for k in range(n):
                    quad = quad - _dot(((Gam[k][i][l], Gam[l][k][j]) for l in range(n)), zero)
                out.append(t1 - t2 + quad)
        return out

    return recipe


def ricci_operator(dim, coords=None, prefix="g"):
    """Ricci tensor of the metric in the fiber, one component per i <= j."""
    if coords is None:
        coords = ["x", "y", "z", "t"][:dim] if dim <= 4 else ["x%d" % (i + 1) for i in range(dim)]
    if len(coords) != dim:
        raise OperatorError("need %d coordinate names" % dim)
    base = _symbols(coords)
    names = geo.sym2_names(prefix, coords)
    fiber = _symbols(names)
    pairs = geo.sym2_pairs(dim)
    index_of = {p: k for k, p in enumerate(pairs)}
    labels = ["R_%s%s" % (coords[i], coords[j]) if all(len(c) == 1 for c in coords)
              else "R_%s_%s" % (coords[i], coords[j]) for i, j in pairs]
    return OperatorSpec("ricci", 2, len(pairs), FIBER, None, ricci_recipe(dim, index_of),
                        base=base, fiber=fiber, labels=labels)
