"""Invariant ansatze, their prolongations, and prolonged generators.

Jet coordinates are plain symbols named ``<fiber>_<index>``, e.g. ``u1_x``
or ``g_xy_zt``; the index is sorted by base-coordinate order so each
symmetric multi-index has one representative.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from . import geometry as geo
from .expr import (Context, DeclaredFunction, DerivativeAtom, ExprError, FunctionApplication,
                   Rational, Symbol, atoms, diff, is_zero, normalize, substitute)


class JetError(ExprError):
    pass


class AnsatzError(JetError):
    def __init__(self, message, defects=()):
        super().__init__(message)
        self.defects = list(defects)


def _name(s):
    return s if isinstance(s, str) else s.name


@dataclass(frozen=True)
class JetSpace:
    base: tuple
    fiber: tuple

    @property
    def n(self):
        return len(self.base)

    def _position(self, c):
        if isinstance(c, int):
            return c
        names = [b.name for b in self.base]
        return names.index(_name(c))

    def sorted_index(self, index):
        return tuple(sorted((self._position(c) for c in index)))

    def coord(self, alpha, index=()):
        """Jet symbol of fiber coordinate ``alpha`` differentiated along ``index``."""
        if isinstance(alpha, int):
            alpha = self.fiber[alpha]
        alpha = _name(alpha)
        if not index:
            return Symbol(alpha)
        pos = self.sorted_index(index)
        names = [self.base[i].name for i in pos]
        sep = "" if all(len(b.name) == 1 for b in self.base) else "_"
        return Symbol("%s_%s" % (alpha, sep.join(names)))

    def indices(self, k):
        return list(combinations_with_replacement(range(self.n), k))

    def coords(self, order, include_zero=True):
        out = list(self.fiber) if include_zero else []
        for k in range(1, order + 1):
            for idx in self.indices(k):
                for a in self.fiber:
                    out.append(self.coord(a, idx))
        return out

    def lookup(self, order):
        """Map jet symbol -> (fiber position, index positions) up to ``order``."""
        out = {}
        for k in range(order + 1):
            for idx in self.indices(k):
                for a, u in enumerate(self.fiber):
                    out[self.coord(u, idx) if idx else u] = (a, idx)
        return out

    def context(self, order, extra=()):
        ctx = Context()
        for s in list(self.base) + list(extra) + self.coords(order):
            ctx.symbols[s.name] = s
        return ctx

    def total_derivative(self, e, i, order):
        """``D_i e`` for ``e`` depending on jets up to ``order``."""
        base = self.base[i]
        out = diff(e, base)
        for s, (a, idx) in self.lookup(order).items():
            d = diff(e, s)
            if not is_zero(d):
                out = out + d * self.coord(a, tuple(idx) + (i,))
        return normalize(out)


# --------------------------------------------------------------------------
# quotient side

@dataclass
class QuotientPicture:
    """Unknown functions on the orbit space and their lift to the base.

    ``coords`` are plain symbols; ``base_args`` the chart definitions they
    stand for (base coordinates or generator symbols).  Each unknown exists
    twice: over ``coords`` (quotient side) and over ``base_args`` (used in
    the ansatz so that the chain rule applies).
    """

    coords: tuple
    base_args: tuple
    functions: list
    base_functions: list
    parameters: tuple = ()
    context: Context = None

    def function(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        raise JetError("unknown function %r" % name)

    def _atom_map(self, e, src, dst):
        binds = {}
        pairs = {f.name: g for f, g in zip(src, dst)}
        for a in atoms(e):
            if isinstance(a, (FunctionApplication, DerivativeAtom)) and a.function in src:
                g = pairs[a.function.name]
                binds[a] = g() if isinstance(a, FunctionApplication) else g.d(*a.index)
        return binds

    def to_base(self, e):
        """Pull a quotient expression back to the base."""
        binds = self._atom_map(e, self.functions, self.base_functions)
        for q, d in zip(self.coords, self.base_args):
            if q != d:
                binds[q] = d
        return substitute(e, binds)

    def to_quotient(self, e, slice_binds):
        """Restrict a base expression to the slice and rename the unknowns."""
        binds = dict(slice_binds)
        binds.update(self._atom_map(e, self.base_functions, self.functions))
        return substitute(e, binds)

    def is_pure(self, e):
        allowed = set(self.coords) | set(self.parameters)
        for a in atoms(e):
            if isinstance(a, Symbol):
                if a not in allowed:
                    return False
            elif a.function not in self.functions:
                return False
        return True


def quotient_picture(chart, names, parameters=()):
    base_args = []
    for q, d in zip(chart.coords, chart.definitions):
        if not isinstance(d, Symbol):
            raise JetError("quotient coordinate %s must be defined by a base coordinate or a "
                           "declared generator, got %s" % (q.name, d))
        base_args.append(d)
    coords = tuple(chart.coords)
    funcs = [DeclaredFunction(n, coords) for n in names]
    base_funcs = [DeclaredFunction(n, tuple(base_args)) for n in names]
    ctx = Context()
    for s in coords + tuple(parameters):
        ctx.symbols[s.name] = s
    for f in funcs:
        ctx.functions[f.name] = f
    return QuotientPicture(coords, tuple(base_args), funcs, base_funcs, tuple(parameters), ctx)


# --------------------------------------------------------------------------
# ansatz

@dataclass
class Ansatz:
    action: object
    chart: object
    basis: object
    quotient: QuotientPicture
    section: list
    context: Context = None

    @property
    def functions(self):
        return self.quotient.base_functions

    @property
    def names(self):
        return [f.name for f in self.quotient.functions]

    def lift(self, solution):
        """Section obtained by inserting quotient-side expressions for the unknowns."""
        from .expr import substitute_functions
        repl = {}
        for f, g in zip(self.quotient.functions, self.quotient.base_functions):
            if f.name in solution:
                repl[g] = self.quotient.to_base(solution[f.name])
        missing = [f.name for f in self.quotient.functions if f.name not in solution]
        if missing:
            raise JetError("no expression for %s" % ", ".join(missing))
        return [substitute_functions(s, repl) for s in self.section]


def build_ansatz(basis, chart, action, names=None, parameters=()):
    names = list(names if names is not None else basis.names)
    if len(names) != basis.dimension:
        raise AnsatzError("need %d function names, got %d" % (basis.dimension, len(names)))
    if len(set(names)) != len(names):
        raise AnsatzError("function names must be distinct")
    quot = quotient_picture(chart, names, parameters)
    m = action.bundle.m
    section = []
    for a in range(m):
        s = Rational(0)
        for f, v in zip(quot.base_functions, basis.vectors):
            if not is_zero(v[a]):
                s = s + f() * v[a]
        section.append(normalize(s))
    defects = [d for d in geo.invariance_defects(section, action) if not is_zero(d)]
    if defects:
        raise AnsatzError("the ansatz is not invariant; defect %s" % normalize(defects[0]),
                          defects)
    ctx = geo.context_for(action.bundle)
    for c in action.bundle.fiber:
        ctx.symbols.pop(c.name, None)
    for d in quot.base_args:
        ctx.symbols[d.name] = d
    for s in parameters:
        ctx.symbols[s.name] = s
    for f in quot.base_functions:
        ctx.functions[f.name] = f
    return Ansatz(action, chart, basis, quot, section, ctx)


@dataclass
class ProlongedAnsatz:
    ansatz: Ansatz
    order: int
    jets: JetSpace
    entries: dict = field(default_factory=dict)   # jet Symbol -> Expr

    def entry(self, alpha, index=()):
        return self.entries[self.jets.coord(alpha, index)]

    def rows(self):
        """(jet name, Expr) in a fixed order."""
        return [(s.name, self.entries[s]) for s in self.jets.coords(self.order)]


def prolong(ansatz, k):
    if k < 0:
        raise JetError("order must be non-negative")
    bundle = ansatz.action.bundle
    jets = JetSpace(bundle.base, bundle.fiber)
    entries = {}
    for a, u in enumerate(bundle.fiber):
        entries[u] = ansatz.section[a]
    for order in range(1, k + 1):
        for idx in jets.indices(order):
            parent = idx[:-1]
            c = bundle.base[idx[-1]]
            for u in bundle.fiber:
                prev = entries[jets.coord(u, tuple(bundle.base[i] for i in parent))]
                entries[jets.coord(u, tuple(bundle.base[i] for i in idx))] = diff(prev, c)
    return ProlongedAnsatz(ansatz, k, jets, entries)


# --------------------------------------------------------------------------
# prolonged generators

@dataclass
class ProlongedField:
    jets: JetSpace
    order: int
    xi: tuple
    coefficients: dict            # jet Symbol -> Expr

    def apply(self, e):
        out = Rational(0)
        for c, x in zip(self.jets.base, self.xi):
            if not is_zero(x):
                out = out + x * diff(e, c)
        for s, coeff in self.coefficients.items():
            if not is_zero(coeff):
                d = diff(e, s)
                if not is_zero(d):
                    out = out + coeff * d
        return normalize(out)


def prolong_generator(g, bundle, k):
    """Standard prolongation of ``xi d_x + phi d_u`` to order ``k`` (at most 2).

    Uses the characteristic ``Q = phi - xi^i u_i``:
    ``phi^J = D_J Q + xi^i u_{J,i}``.
    """
    if k > 2 or k < 0:
        raise JetError("prolongation is supported for orders 0, 1 and 2")
    jets = JetSpace(bundle.base, bundle.fiber)
    coeffs = {}
    for a, u in enumerate(bundle.fiber):
        coeffs[u] = g.phi[a]
    if k:
        Q = []
        for a, u in enumerate(bundle.fiber):
            q = g.phi[a]
            for i, x in enumerate(g.xi):
                if not is_zero(x):
                    q = q - x * jets.coord(u, (bundle.base[i],))
            Q.append(normalize(q))
        current = {(): Q}
        for order in range(1, k + 1):
            nxt = {}
            for idx in jets.indices(order):
                parent = idx[:-1]
                nxt[idx] = [jets.total_derivative(q, idx[-1], order)
                            for q in current[parent]]
            current = nxt
            for idx, qs in current.items():
                for a, u in enumerate(bundle.fiber):
                    c = qs[a]
                    for i, x in enumerate(g.xi):
                        if not is_zero(x):
                            c = c + x * jets.coord(u, tuple(bundle.base[j] for j in idx + (i,)))
                    coeffs[jets.coord(u, tuple(bundle.base[j] for j in idx))] = normalize(c)
    return ProlongedField(jets, k, tuple(g.xi), coeffs)
