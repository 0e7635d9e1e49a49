"""Sparse integer polynomials over interned atom ids.

A polynomial is a plain ``dict`` mapping a monomial to a nonzero ``int``.
A monomial is a tuple of ``(atom_id, exponent)`` pairs sorted by id, with
``()`` the unit monomial.  Nothing here knows about expression trees; the
atom table lives in :mod:`symred.expr.core`.
"""

from functools import lru_cache
from math import gcd
import threading

from sympy import Symbol as _SympySymbol
from sympy.polys.domains import ZZ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

ONE_MONO = ()
ONE = {ONE_MONO: 1}

_ring_lock = threading.Lock()


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        ka, ea = a[i]
        kb, eb = b[j]
        if ka == kb:
            out.append((ka, ea + eb))
            i += 1
            j += 1
        elif ka < kb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def mono_div(a, b):
    """a / b, assuming b divides a."""
    d = dict(a)
    for k, e in b:
        r = d[k] - e
        if r:
            d[k] = r
        else:
            del d[k]
    return tuple(sorted(d.items()))


def mono_degree(m):
    return sum(e for _, e in m)


def mono_exp(m, k):
    for kk, e in m:
        if kk == k:
            return e
    return 0


def variables(p):
    out = set()
    for m in p:
        for k, _ in m:
            out.add(k)
    return out


def add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def neg(p):
    return {m: -c for m, c in p.items()}


def sub(p, q):
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, 0) - c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def scale(p, c):
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def exact_div_int(p, c):
    return {m: v // c for m, v in p.items()}


def mul(p, q):
    if not p or not q:
        return {}
    if len(p) == 1 and ONE_MONO in p:
        return scale(q, p[ONE_MONO])
    if len(q) == 1 and ONE_MONO in q:
        return scale(p, q[ONE_MONO])
    out = {}
    get = out.get
    for ma, ca in p.items():
        for mb, cb in q.items():
            m = mono_mul(ma, mb)
            out[m] = get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c}


def mul_mono(p, mono, c=1):
    return {mono_mul(m, mono): v * c for m, v in p.items()}


def power(p, n):
    result = ONE
    base = p
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def content(p):
    g = 0
    for c in p.values():
        g = gcd(g, c)
        if g == 1:
            break
    return g


def is_constant(p):
    return not p or (len(p) == 1 and ONE_MONO in p)


def constant_value(p):
    return p.get(ONE_MONO, 0) if is_constant(p) else None


def derivative(p, k):
    """Partial derivative with respect to the atom with id ``k``."""
    out = {}
    for m, c in p.items():
        e = mono_exp(m, k)
        if not e:
            continue
        nm = tuple((kk, ee - 1) if kk == k else (kk, ee) for kk, ee in m if not (kk == k and ee == 1))
        out[nm] = out.get(nm, 0) + c * e
    return {m: c for m, c in out.items() if c}


def split_by(p, k):
    """Group ``p`` by powers of atom ``k``: ``{exponent: coefficient poly}``."""
    out = {}
    for m, c in p.items():
        e = mono_exp(m, k)
        rest = tuple(t for t in m if t[0] != k) if e else m
        out.setdefault(e, {})[rest] = c
    return out


def flip_sign_of(p, k):
    """Substitute atom ``k`` -> ``-k`` (the conjugate for a square-root generator)."""
    return {m: (-c if mono_exp(m, k) % 2 else c) for m, c in p.items()}


# gcd ------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _ring(nvars):
    with _ring_lock:
        gens = [_SympySymbol("_g%d" % i) for i in range(nvars)]
        return PolyRing(gens, ZZ, lex)


def _monomial_gcd(mono, c, q):
    """gcd of the single term ``c*mono`` with polynomial ``q``."""
    exps = dict(mono)
    for m in q:
        if not exps:
            break
        md = dict(m)
        for k in list(exps):
            e = min(exps[k], md.get(k, 0))
            if e:
                exps[k] = e
            else:
                del exps[k]
    g = gcd(c, content(q))
    return tuple(sorted(exps.items())), g


def cofactors(p, q):
    """Return ``(g, p/g, q/g)`` with ``g`` the gcd over ``ZZ[atoms]``.

    The sign of ``g`` is not normalized; callers fix signs themselves.
    """
    if not p:
        return q, {}, ONE
    if not q:
        return p, ONE, {}
    if len(p) == 1 or len(q) == 1:
        (mono, c), other = (next(iter(p.items())), q) if len(p) == 1 else (next(iter(q.items())), p)
        gm, gc = _monomial_gcd(mono, abs(c), other)
        if gm == ONE_MONO and gc == 1:
            return ONE, p, q
        return ({gm: gc},
                {mono_div(m, gm): v // gc for m, v in p.items()},
                {mono_div(m, gm): v // gc for m, v in q.items()})
    ids = sorted(variables(p) | variables(q))
    if not ids:
        g = gcd(p[ONE_MONO], q[ONE_MONO])
        return {ONE_MONO: g}, {ONE_MONO: p[ONE_MONO] // g}, {ONE_MONO: q[ONE_MONO] // g}
    index = {k: i for i, k in enumerate(ids)}
    n = len(ids)
    ring = _ring(n)

    def to_dense(poly):
        out = {}
        for m, c in poly.items():
            v = [0] * n
            for k, e in m:
                v[index[k]] = e
            out[tuple(v)] = c
        return ring.from_dict(out)

    def from_dense(poly):
        out = {}
        for v, c in poly.items():
            out[tuple((ids[i], e) for i, e in enumerate(v) if e)] = int(c)
        return out

    h, cp, cq = to_dense(p).cofactors(to_dense(q))
    return from_dense(h), from_dense(cp), from_dense(cq)
