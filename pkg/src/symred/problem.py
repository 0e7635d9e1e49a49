"""JSON problem files.

A problem declares the bundle, the action, the quotient chart, optional
hints for the kinematic basis, an operator and candidate solutions.  All
expressions are strings in the expression grammar.  See ``data/*.json``
for complete examples.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import json
import os

from . import geometry as geo
from . import operators as ops
from .expr import Context, ExprError, Rational, Symbol, coefficients_in, is_zero, normalize

try:
    from importlib.resources import files as _resource_files
except ImportError:  # pragma: no cover
    _resource_files = None


class ProblemError(ExprError):
    """Validation error; ``where`` is the JSON path of the offending entry."""

    def __init__(self, message, where=None, source=None):
        self.where = where
        self.source = source
        prefix = ""
        if source:
            prefix += "%s: " % source
        if where:
            prefix += "%s: " % where
        super().__init__(prefix + message)


@dataclass
class Candidate:
    name: str
    functions: dict               # function name -> expression text
    values: dict = field(default_factory=dict)
    expect: object = None


@dataclass
class Problem:
    name: str
    source: str
    context: Context
    bundle: geo.BundleSpec
    action: geo.GroupAction
    chart: geo.QuotientChart = None
    parameters: tuple = ()
    kinematic_names: list = None
    kinematic_basis: list = None
    target_names: list = None
    target_basis: list = None
    operator: ops.OperatorSpec = None
    order: int = None
    point: dict = None
    candidates: list = field(default_factory=list)
    sample_points: list = None
    jet_kappa: dict = None
    description: str = ""


def bundled_path(name):
    """Path of a bundled fixture (``euler.json`` etc.)."""
    if _resource_files is not None:
        return str(_resource_files("symred") / "data" / name)
    return os.path.join(os.path.dirname(__file__), "data", name)


def bundled_names():
    folder = os.path.dirname(bundled_path("euler.json"))
    return sorted(f for f in os.listdir(folder) if f.endswith(".json"))


class _Loader:
    def __init__(self, raw, source):
        self.raw = raw
        self.source = source

    def fail(self, message, where=None):
        raise ProblemError(message, where, self.source)

    def get(self, key, kind, default=None, required=False):
        if key not in self.raw:
            if required:
                self.fail("missing required key", key)
            return default
        v = self.raw[key]
        if not isinstance(v, kind):
            self.fail("expected %s" % getattr(kind, "__name__", kind), key)
        return v

    def expr(self, ctx, text, where):
        if isinstance(text, (int, float)) and not isinstance(text, bool):
            if isinstance(text, float) and not text.is_integer():
                self.fail("floating-point coefficients are not supported", where)
            text = str(int(text))
        if not isinstance(text, str):
            self.fail("expected an expression string", where)
        try:
            return ctx.parse(text)
        except ExprError as exc:
            self.fail(str(exc), where)

    def names(self, key, required=False):
        v = self.get(key, list, [], required)
        for i, n in enumerate(v):
            if not isinstance(n, str) or not n.isidentifier():
                self.fail("expected a name", "%s[%d]" % (key, i))
        return v


def _generator(loader, ctx, spec, where):
    if not isinstance(spec, dict) or "name" not in spec or "relation" not in spec:
        loader.fail("a generator needs 'name' and 'relation'", where)
    name = spec["name"]
    tmp = ctx.copy()
    r = tmp.symbol(name)
    relation = loader.expr(tmp, spec["relation"], where + ".relation")
    parts = coefficients_in(relation, r)
    if set(parts) - {0, 2} or 2 not in parts or not is_zero(parts[2] - 1):
        loader.fail("relation must read %s^2 - P with P free of %s" % (name, name),
                    where + ".relation")
    radicand = normalize(-parts.get(0, 0))
    rules = spec.get("rules")
    try:
        if rules is None:
            return ctx.generator(name, radicand)
        if not isinstance(rules, dict):
            loader.fail("rules must map coordinate names to expressions", where + ".rules")
        return ctx.generator(name, radicand, rules)
    except ExprError as exc:
        loader.fail(str(exc), where)


def _builtin_operator(loader, name, bundle, parameters):
    base = [s.name for s in bundle.base]
    fiber = [s.name for s in bundle.fiber]
    where = "operator.builtin"
    if name == "euler":
        if len(base) < 2 or len(fiber) != len(base):
            loader.fail("euler needs base (space..., time) and fiber (velocity..., pressure)",
                        where)
        n = len(base) - 1
        return ops.euler_operator(n, base[:-1], base[-1], fiber[:-1], fiber[-1])
    if name == "laplacian":
        if len(fiber) != 1:
            loader.fail("laplacian needs a scalar fiber", where)
        return ops.laplacian_operator(len(base), base, fiber[0])
    if name == "ricci":
        prefix = fiber[0].split("_")[0] if fiber else "g"
        if fiber != geo.sym2_names(prefix, base):
            loader.fail("ricci needs the fiber %s" % geo.sym2_names(prefix, base), where)
        return ops.ricci_operator(len(base), base, prefix)
    loader.fail("unknown builtin operator %r" % name, where)


def _operator(loader, ctx, spec, bundle, parameters):
    if not isinstance(spec, dict):
        loader.fail("expected an object", "operator")
    if "builtin" in spec:
        return _builtin_operator(loader, spec["builtin"], bundle, parameters)
    if "explicit" not in spec:
        loader.fail("operator needs 'builtin' or 'explicit'", "operator")
    ex = spec["explicit"]
    order = ex.get("order")
    if not isinstance(order, int) or order < 0:
        loader.fail("order must be a non-negative integer", "operator.explicit.order")
    jets = ops.JetSpace(bundle.base, bundle.fiber)
    jctx = jets.context(order, parameters)
    comps = [loader.expr(jctx, c, "operator.explicit.components[%d]" % i)
             for i, c in enumerate(ex.get("components", []))]
    rep = ex.get("target_rep", ops.FIBER)
    if isinstance(rep, list):
        rep = tuple(rep)
    try:
        return ops.OperatorSpec(ex.get("name", "explicit"), order, len(comps), rep, comps,
                                base=bundle.base, fiber=bundle.fiber,
                                parameters=tuple(parameters))
    except ExprError as exc:
        loader.fail(str(exc), "operator.explicit")


def _point(loader, ctx, spec, bundle, where):
    if not isinstance(spec, dict):
        loader.fail("a point maps base coordinate names to rationals", where)
    out = {}
    for c in bundle.base:
        if c.name not in spec:
            loader.fail("no value for %s" % c.name, where)
        v = loader.expr(ctx, spec[c.name], "%s.%s" % (where, c.name))
        if not isinstance(v, Rational):
            loader.fail("point coordinates must be rational numbers", "%s.%s" % (where, c.name))
        out[c] = v
    return out


def _basis(loader, ctx, spec, m, where):
    if spec is None:
        return None
    if not isinstance(spec, list):
        loader.fail("basis must be a list of vectors", where)
    out = []
    for k, v in enumerate(spec):
        if not isinstance(v, list) or len(v) != m:
            loader.fail("basis vector must have %d entries" % m, "%s[%d]" % (where, k))
        out.append([loader.expr(ctx, e, "%s[%d][%d]" % (where, k, i)) for i, e in enumerate(v)])
    return out


def load(source):
    """Load a problem from a path, a bundled fixture name, or a dict."""
    if isinstance(source, dict):
        raw, label = source, "<dict>"
    else:
        path = source
        if not os.path.exists(path) and os.path.basename(path) == path:
            candidate = bundled_path(path)
            if os.path.exists(candidate):
                path = candidate
        label = str(source)
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ProblemError("cannot read file: %s" % exc.strerror, None, label) from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProblemError("invalid JSON: %s (line %d, column %d)"
                               % (exc.msg, exc.lineno, exc.colno), None, label) from None
    if not isinstance(raw, dict):
        raise ProblemError("top level must be an object", None, label)
    return build(raw, label)


def build(raw, label="<dict>"):
    L = _Loader(raw, label)
    ctx = Context()
    base_names = L.names("base_coords", required=True)
    fiber_names = L.names("fiber_coords", required=True)
    params = L.names("parameters")
    try:
        base = ctx.symbols_(*base_names)
        fiber = ctx.symbols_(*fiber_names)
        parameters = tuple(ctx.symbols_(*params))
    except ExprError as exc:
        L.fail(str(exc), "coordinates")
    for c in base_names:
        if c + "0" not in ctx.symbols and c + "0" not in ctx.functions:
            ctx.symbol(c + "0")
    for i, g in enumerate(L.get("algebraic_generators", list, [])):
        _generator(L, ctx, g, "algebraic_generators[%d]" % i)
    constraints = [L.expr(ctx, c, "fiber_constraints[%d]" % i)
                   for i, c in enumerate(L.get("fiber_constraints", list, []))]
    nonzero = [L.expr(ctx, c, "nonzero[%d]" % i) for i, c in enumerate(L.get("nonzero", list, []))]
    rep = L.get("fiber_rep", list, [])
    try:
        bundle = geo.BundleSpec(base, fiber, constraints, not constraints, rep, nonzero)
    except ExprError as exc:
        L.fail(str(exc), "fiber_coords")

    gens = []
    for i, g in enumerate(L.get("generators", list, [])):
        where = "generators[%d]" % i
        if not isinstance(g, dict) or "xi" not in g:
            L.fail("a generator needs 'xi'", where)
        xi = [L.expr(ctx, e, "%s.xi[%d]" % (where, k)) for k, e in enumerate(g["xi"])]
        phi = [L.expr(ctx, e, "%s.phi[%d]" % (where, k)) for k, e in enumerate(g.get("phi", []))]
        gens.append(geo.InfinitesimalGenerator(xi, phi, g.get("name", "X%d" % (i + 1))))
    disc = []
    for i, d in enumerate(L.get("discrete_generators", list, [])):
        where = "discrete_generators[%d]" % i
        if not isinstance(d, dict) or "base_map" not in d:
            L.fail("a discrete generator needs 'base_map'", where)
        bm = [L.expr(ctx, e, "%s.base_map[%d]" % (where, k)) for k, e in enumerate(d["base_map"])]
        fm = None
        if "fiber_map" in d:
            fm = [L.expr(ctx, e, "%s.fiber_map[%d]" % (where, k))
                  for k, e in enumerate(d["fiber_map"])]
        elif "fiber_matrix" in d:
            mat = _basis(L, ctx, d["fiber_matrix"], len(fiber), where + ".fiber_matrix")
            if len(mat) != len(fiber):
                L.fail("fiber matrix must be %dx%d" % (len(fiber), len(fiber)),
                       where + ".fiber_matrix")
            fm = [sum((a * u for a, u in zip(row, fiber)), 0) for row in mat]
            fm = [normalize(e) for e in fm]
        disc.append(geo.DiscreteGenerator(bm, fm, d.get("name", "S%d" % (i + 1))))
    try:
        action = geo.GroupAction(bundle, gens, disc, L.get("name", str, ""))
    except ExprError as exc:
        L.fail(str(exc), "generators")

    chart = None
    qc = L.get("quotient_chart", dict)
    if qc is not None:
        coords, defs = [], []
        for q, text in qc.items():
            d = L.expr(ctx, text, "quotient_chart.%s" % q)
            coords.append(Symbol(q))
            defs.append(d)
        sl = None
        if "slice" in raw:
            sl = {}
            qctx = Context()
            for q in coords:
                qctx.symbols[q.name] = q
            for p in parameters:
                qctx.symbols[p.name] = p
            for c, text in L.get("slice", dict).items():
                if c not in ctx.symbols or ctx.symbols[c] not in base:
                    L.fail("not a base coordinate", "slice.%s" % c)
                sl[ctx.symbols[c]] = L.expr(qctx, text, "slice.%s" % c)
        chart = geo.QuotientChart(coords, defs, sl)
        if not geo.verify_invariants(chart, action):
            L.fail("quotient chart functions are not invariant under the action",
                   "quotient_chart")

    kin = L.get("kinematic", dict, {})
    tgt = L.get("target_kinematic", dict, {})
    op = None
    if "operator" in raw:
        op = _operator(L, ctx, raw["operator"], bundle, parameters)
    order = L.get("order", int, op.order if op is not None else 0)
    point = None
    if "point" in raw:
        point = _point(L, ctx, raw["point"], bundle, "point")
    cands = []
    for i, c in enumerate(L.get("candidate_solutions", list, [])):
        where = "candidate_solutions[%d]" % i
        if not isinstance(c, dict) or not isinstance(c.get("functions"), dict):
            L.fail("a candidate needs a 'functions' object", where)
        values = {}
        for k, v in c.get("values", {}).items():
            try:
                values[k] = Fraction(str(v))
            except (ValueError, ZeroDivisionError):
                L.fail("values must be rational numbers", "%s.values.%s" % (where, k))
        cands.append(Candidate(c.get("name", "candidate%d" % (i + 1)), dict(c["functions"]),
                               values, c.get("expect")))
    samples = None
    if "sample_points" in raw:
        samples = [_point(L, ctx, p, bundle, "sample_points[%d]" % i)
                   for i, p in enumerate(L.get("sample_points", list))]
    jk = L.get("jet_kappa", dict)
    if jk is not None:
        jk = dict(jk)
        jk["point"] = _point(L, ctx, jk.get("point"), bundle, "jet_kappa.point")
        if not isinstance(jk.get("max_order", 0), int):
            L.fail("max_order must be an integer", "jet_kappa.max_order")

    return Problem(
        name=L.get("name", str, "problem"),
        source=label,
        context=ctx,
        bundle=bundle,
        action=action,
        chart=chart,
        parameters=parameters,
        kinematic_names=kin.get("names"),
        kinematic_basis=_basis(L, ctx, kin.get("basis"), len(fiber), "kinematic.basis"),
        target_names=tgt.get("names"),
        target_basis=_basis(L, ctx, tgt.get("basis"), op.d if op else len(fiber),
                            "target_kinematic.basis"),
        operator=op,
        order=order,
        point=point,
        candidates=cands,
        sample_points=samples,
        jet_kappa=jk,
        description=L.get("description", str, ""),
    )
