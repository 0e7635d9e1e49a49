"""``symred`` command line: kappa, reduce, check and jet-kappa reports.

Exit codes: 0 success, 2 validation error, 3 reduction inconsistency
(nonzero extraction residual), 4 dimension cap exceeded.
"""

import argparse
import json
import sys

from . import geometry as geo
from . import jets
from . import kinematic as kin
from . import reduce as red
from .expr import ExprError, free_symbols, is_zero, to_string
from .problem import ProblemError, load

EXIT_OK, EXIT_VALIDATION, EXIT_INCONSISTENT, EXIT_CAP = 0, 2, 3, 4


def _s(e):
    return to_string(e)


def _vec(v):
    return [_s(x) for x in v]


def _point_json(bundle, x0):
    if x0 is None:
        return "generic"
    return {c.name: _s(x0[c]) for c in bundle.base}


# --------------------------------------------------------------------------
# pipeline

def kinematic_part(problem):
    action, bundle = problem.action, problem.bundle
    tr = geo.check_transverse(action)
    iso = geo.isotropy_subalgebra(action)
    report = {
        "problem": problem.name,
        "transversality": {"transverse": tr.transverse, "rank_xi": tr.rank_xi,
                           "rank_xi_phi": tr.rank_full, "point": "generic", "note": tr.note},
        "isotropy_dimension": len(iso),
        "unchecked": ["the action is assumed regular on the base (orbit space is a manifold)"],
    }
    state = {}
    if bundle.fiber_linear:
        basis = kin.kinematic_basis(action, None, problem.kinematic_names,
                                    problem.kinematic_basis)
        state["basis"] = basis
        report["kappa"] = {"dimension": basis.dimension, "names": list(basis.names),
                           "basis": [_vec(v) for v in basis.vectors],
                           "warnings": list(basis.warnings)}
        if problem.chart is not None:
            diagram = kin.assemble_kinematic_diagram(action, problem.chart, basis)
            names = diagram.kappa_corner[bundle.n:]
            basis.names = list(names)
            report["kappa"]["names"] = list(names)
            ansatz = jets.build_ansatz(basis, problem.chart, action, names,
                                       problem.parameters)
            state["ansatz"] = ansatz
            report["ansatz"] = {u.name: _s(s) for u, s in zip(bundle.fiber, ansatz.section)}
            report["diagram"] = {
                "quotient_corner": diagram.quotient_corner,
                "kappa_corner": diagram.kappa_corner,
                "total_corner": diagram.total_corner,
                "base_corner": diagram.base_corner,
                "orbit_corner": diagram.orbit_corner,
                "inclusion": {k: _s(v) for k, v in diagram.inclusion.items()},
                "projection": {k: _s(v) for k, v in diagram.projection.items()},
                "transverse": diagram.transverse,
            }
    if problem.point is not None:
        x0 = problem.point
        trp = geo.check_transverse(action, x0)
        at = {"point": _point_json(bundle, x0),
              "transversality": {"transverse": trp.transverse, "rank_xi": trp.rank_xi,
                                 "rank_xi_phi": trp.rank_full},
              "isotropy_dimension": len(geo.isotropy_subalgebra(action, x0))}
        rep = kin.isotropy_rep(action, x0)
        if bundle.fiber_linear:
            b = kin.fixed_space(rep, None, None, kin.isotropy_rep(action, None))
            at["kappa"] = {"dimension": b.dimension, "basis": [_vec(v) for v in b.vectors],
                           "warnings": list(b.warnings)}
        else:
            fs = kin.fixed_points_constrained(rep, bundle.constraints, bundle.fiber)
            at["constrained_fixed_set"] = {
                "kind": fs.kind,
                "points": [_vec(p) for p in fs.points],
                "linear_basis": [_vec(v) for v in fs.linear_basis],
                "equations": [_s(e) for e in fs.equations],
            }
        report["at_point"] = at
    return report, state


def reduction_part(problem, report, state, order=None):
    op = problem.operator
    if op is None:
        raise ProblemError("the problem has no operator", "operator", problem.source)
    if "ansatz" not in state:
        raise ProblemError("reduction needs a linear fiber and a quotient chart", None,
                           problem.source)
    order = problem.order if order is None else order
    if order < op.order:
        raise ProblemError("order %d is below the operator order %d" % (order, op.order),
                           "order", problem.source)
    ansatz = state["ansatz"]
    pa = jets.prolong(ansatz, order)
    delta = red.restrict(op, pa)
    names, preferred = problem.target_names, problem.target_basis
    if op.target_rep == "fiber":
        names = names or ansatz.names
        if preferred is None:
            preferred = problem.kinematic_basis
    target = red.kappa_of_D(op, problem.action, None, names, preferred)
    system = red.extract(delta, target, ansatz)
    report["order"] = order
    report["operator"] = {"name": op.name, "flavor": op.flavor, "order": op.order,
                          "components": op.d, "labels": list(op.labels)}
    report["inclusion_map"] = [[n, _s(e)] for n, e in pa.rows()]
    report["restricted"] = [[lab, _s(e)] for lab, e in zip(op.labels, delta)]
    report["kappa_D"] = {"dimension": target.dimension, "names": list(target.names),
                         "basis": [_vec(v) for v in target.vectors]}
    report["reduced"] = {
        "coords": [q.name for q in system.coords],
        "functions": ["%s(%s)" % (f.name, ",".join(f.arg_names)) for f in system.functions],
        "equations": [[lab, _s(c)] for lab, c in zip(system.labels, system.components)],
    }
    report["residual"] = "zero" if system.consistent else [_s(r) for r in system.residual]
    state["system"] = system
    state["prolonged"] = pa
    return report


def _parse_solution(problem, system, cand):
    ctx = system.ansatz.quotient.context
    out = {}
    for name, text in sorted(cand.functions.items()):
        try:
            out[name] = ctx.parse(text)
        except ExprError as exc:
            raise ProblemError(str(exc), "candidate %s.%s" % (cand.name, name),
                               problem.source) from None
    return out


def check_part(problem, report, state, points=None, h=1e-3):
    system = state["system"]
    op = problem.operator
    if points is None:
        points = problem.sample_points
    if points is None:
        points = red.random_points(problem.bundle, 10, seed=0)
    rows = []
    for cand in problem.candidates:
        sol = _parse_solution(problem, system, cand)
        residuals = red.reduced_residuals(system, sol)
        ok = all(is_zero(r) for r in residuals)
        row = {"name": cand.name, "symbolic": ok,
               "residuals": [_s(r) for r in residuals], "expect": cand.expect}
        used = set().union(*(free_symbols(e) for e in sol.values()))
        missing = [p.name for p in problem.parameters if p in used and p.name not in cand.values]
        if missing:
            row["numeric"] = {"skipped": "no values for %s" % ", ".join(missing)}
        else:
            values = {k: float(v) for k, v in cand.values.items()}
            good, warnings, r1, r2 = [], [], 0.0, 0.0
            for pt in points:
                try:
                    a = red.numeric_lift_check(system, sol, op, [pt], h, values)
                    b = red.numeric_lift_check(system, sol, op, [pt], h / 2, values)
                except (geo.DomainError, ZeroDivisionError, ExprError) as exc:
                    warnings.append("point %s skipped: %s" % (_point_json(problem.bundle, pt), exc))
                    continue
                good.append(pt)
                r1, r2 = max(r1, a), max(r2, b)
            row["numeric"] = {"h": h, "points": len(good), "max_residual": float("%.3e" % r1),
                              "max_residual_half_h": float("%.3e" % r2),
                              "ratio": float("%.2f" % (r1 / r2)) if r2 > 0 else None,
                              "warnings": warnings}
        rows.append(row)
    report["candidates"] = rows
    return report


def jet_kappa_part(problem, max_order=None):
    spec = problem.jet_kappa
    if spec is None:
        raise ProblemError("the problem has no 'jet_kappa' section", "jet_kappa", problem.source)
    x0 = spec["point"]
    K = spec.get("max_order", 3) if max_order is None else max_order
    algebra, discrete = kin.taylor_isotropy(problem.action, x0)
    table = kin.jet_kappa_table(algebra, K, discrete, n=problem.bundle.n)
    rows = [{"k": t.order, "dimension": t.dimension, "symmetric_power_dimension": len(t.monomials),
             "odd_vanishes": t.order % 2 == 1 and t.dimension == 0} for t in table]
    return {"problem": problem.name, "point": _point_json(problem.bundle, x0),
            "isotropy_dimension": len(algebra), "max_order": K, "table": rows}


# --------------------------------------------------------------------------
# text rendering

def _render_kappa(r, out):
    t = r["transversality"]
    out.append("problem: %s" % r["problem"])
    out.append("transverse: %s (rank[xi] = %d, rank[xi, phi] = %d at the generic point)"
               % (str(t["transverse"]).lower(), t["rank_xi"], t["rank_xi_phi"]))
    out.append("isotropy dimension: %d" % r["isotropy_dimension"])
    if "kappa" in r:
        k = r["kappa"]
        if r.get("diagram", {}).get("transverse"):
            out.append("kappa(E) = E")
        out.append("kappa(E) dimension: %d" % k["dimension"])
        for name, v in zip(k["names"], k["basis"]):
            out.append("  %s: (%s)" % (name, ", ".join(v)))
        for w in k["warnings"]:
            out.append("  warning: %s" % w)
    if "ansatz" in r:
        out.append("ansatz:")
        for u, e in r["ansatz"].items():
            out.append("  %s = %s" % (u, e))
    if "diagram" in r:
        d = r["diagram"]
        out.append("kinematic diagram:")
        out.append("  (%s) <- (%s) -> (%s)" % (", ".join(d["quotient_corner"]),
                                                ", ".join(d["kappa_corner"]),
                                                ", ".join(d["total_corner"])))
        out.append("  (%s) <- (%s)" % (", ".join(d["orbit_corner"]), ", ".join(d["base_corner"])))
        for q, e in d["projection"].items():
            out.append("  %s = %s" % (q, e))
    if "at_point" in r:
        a = r["at_point"]
        pt = a["point"]
        out.append("at point (%s):" % ", ".join("%s=%s" % kv for kv in pt.items()))
        ta = a["transversality"]
        out.append("  transverse: %s (rank[xi] = %d, rank[xi, phi] = %d)"
                   % (str(ta["transverse"]).lower(), ta["rank_xi"], ta["rank_xi_phi"]))
        out.append("  isotropy dimension: %d" % a["isotropy_dimension"])
        if "kappa" in a:
            out.append("  kappa dimension: %d" % a["kappa"]["dimension"])
            for v in a["kappa"]["basis"]:
                out.append("    (%s)" % ", ".join(v))
            for w in a["kappa"]["warnings"]:
                out.append("  warning: %s" % w)
        if "constrained_fixed_set" in a:
            c = a["constrained_fixed_set"]
            out.append("  constrained fixed set: %s" % c["kind"])
            for p in c["points"]:
                out.append("    (%s)" % ", ".join(p))
    for u in r["unchecked"]:
        out.append("unchecked: %s" % u)


def _render_reduce(r, out):
    out.append("order: %d" % r["order"])
    op = r["operator"]
    out.append("operator: %s (%s, order %d, %d component%s)"
               % (op["name"], op["flavor"], op["order"], op["components"],
                  "" if op["components"] == 1 else "s"))
    out.append("Inv^%d inclusion:" % r["order"])
    for n, e in r["inclusion_map"]:
        out.append("  %s = %s" % (n, e))
    k = r["kappa_D"]
    out.append("kappa(D) dimension: %d" % k["dimension"])
    for name, v in zip(k["names"], k["basis"]):
        out.append("  %s: (%s)" % (name, ", ".join(v)))
    red_ = r["reduced"]
    out.append("reduced system on (%s), unknowns %s:" % (", ".join(red_["coords"]),
                                                         ", ".join(red_["functions"])))
    for lab, e in red_["equations"]:
        out.append("  %s = %s" % (lab, e))
    out.append("extraction residual: %s" % ("zero" if r["residual"] == "zero" else "NONZERO"))


def _render_check(r, out):
    out.append("candidates:")
    for c in r["candidates"]:
        out.append("  %s: symbolic %s" % (c["name"], "PASS" if c["symbolic"] else "FAIL"))
        if not c["symbolic"]:
            for e in c["residuals"]:
                out.append("    residual %s" % e)
        n = c.get("numeric", {})
        if "skipped" in n:
            out.append("    numeric: skipped (%s)" % n["skipped"])
        elif n:
            out.append("    numeric: %d points, h = %g, max residual %.3e, at h/2 %.3e, ratio %s"
                       % (n["points"], n["h"], n["max_residual"], n["max_residual_half_h"],
                          n["ratio"]))
            for w in n["warnings"]:
                out.append("    warning: %s" % w)


def _render_jet_kappa(r, out):
    out.append("problem: %s" % r["problem"])
    out.append("point: (%s)" % ", ".join("%s=%s" % kv for kv in r["point"].items()))
    out.append("isotropy dimension: %d" % r["isotropy_dimension"])
    out.append("k  dim  sym^k")
    for row in r["table"]:
        flag = "odd: vanishes" if row["odd_vanishes"] else ""
        out.append(("%-2d %-4d %-5d %s" % (row["k"], row["dimension"],
                                           row["symmetric_power_dimension"], flag)).rstrip())


def render(command, report):
    out = []
    if command == "jet-kappa":
        _render_jet_kappa(report, out)
    else:
        _render_kappa(report, out)
        if command in ("reduce", "check"):
            _render_reduce(report, out)
        if command == "check":
            _render_check(report, out)
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------

def run(command, path, order=None, max_order=None, points=None):
    problem = load(path)
    if command == "jet-kappa":
        return jet_kappa_part(problem, max_order)
    report, state = kinematic_part(problem)
    report["command"] = command
    if command in ("reduce", "check"):
        reduction_part(problem, report, state, order)
    if command == "check":
        check_part(problem, report, state, points)
    return report


def _load_points(path, problem_path):
    from .problem import _Loader, _point
    problem = load(problem_path)
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ProblemError("points file must hold a list of points", None, path)
    L = _Loader({}, path)
    return [_point(L, problem.context, p, problem.bundle, "[%d]" % i) for i, p in enumerate(raw)]


def main(argv=None):
    parser = argparse.ArgumentParser(prog="symred", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=["kappa", "reduce", "check", "jet-kappa"])
    parser.add_argument("file", help="problem file (path or bundled name such as euler.json)")
    parser.add_argument("--order", type=int, default=None, help="jet order for reduce/check")
    parser.add_argument("--max-order", type=int, default=None, help="largest k for jet-kappa")
    parser.add_argument("--json", metavar="OUT", default=None,
                        help="also write the report as JSON ('-' for stdout only)")
    parser.add_argument("--points", default=None, help="JSON list of sample points for check")
    args = parser.parse_args(argv)
    try:
        points = _load_points(args.points, args.file) if args.points else None
        report = run(args.command, args.file, args.order, args.max_order, points)
    except red.ExtractionError as exc:
        print("error: %s" % exc, file=sys.stderr)
        for r in exc.residual:
            print("  residual: %s" % to_string(r), file=sys.stderr)
        return EXIT_INCONSISTENT
    except kin.DimensionCapExceeded as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CAP
    except (ExprError, OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if args.json == "-":
        sys.stdout.write(text)
        return EXIT_OK
    sys.stdout.write(render(args.command, report))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
