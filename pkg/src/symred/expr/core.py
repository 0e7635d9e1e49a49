"""Expression trees and their canonical rational-function form.

Trees (:class:`Expr` subclasses) are immutable values.  Every tree maps to a
:class:`RatFunc`, a pair of integer polynomials over interned atoms, reduced
modulo the square-root relations of any :class:`AlgebraicGenerator` present.
The canonical tree of a rational function is rebuilt from that pair, so two
trees are equal after :func:`normalize` exactly when they denote the same
function.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd, isqrt, sqrt
import threading

from . import _poly as P


class ExprError(Exception):
    """Base class for expression-kernel errors."""


class MissingDerivativeRule(ExprError):
    pass


class DivisionByZero(ExprError, ZeroDivisionError):
    pass


class SubstitutionError(ExprError):
    pass


# --------------------------------------------------------------------------
# tree nodes

class Expr:
    __slots__ = ("_rf", "_hash")

    def __init__(self):
        self._rf = None
        self._hash = None

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if isinstance(other, (int, Fraction)):
            other = Rational(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return type(self) is type(other) and self._key() == other._key()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._key()))
        return self._hash

    def __str__(self):
        from .printing import to_string
        return to_string(self)

    def __repr__(self):
        return "%s(%r)" % (type(self).__name__, str(self))

    # arithmetic always returns normalized trees
    def __add__(self, other):
        return from_rf(to_rf(self) + _as_rf(other))

    def __radd__(self, other):
        return from_rf(_as_rf(other) + to_rf(self))

    def __sub__(self, other):
        return from_rf(to_rf(self) - _as_rf(other))

    def __rsub__(self, other):
        return from_rf(_as_rf(other) - to_rf(self))

    def __mul__(self, other):
        return from_rf(to_rf(self) * _as_rf(other))

    def __rmul__(self, other):
        return from_rf(_as_rf(other) * to_rf(self))

    def __truediv__(self, other):
        return from_rf(to_rf(self) / _as_rf(other))

    def __rtruediv__(self, other):
        return from_rf(_as_rf(other) / to_rf(self))

    def __neg__(self):
        return from_rf(-to_rf(self))

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return from_rf(to_rf(self) ** n)

    @property
    def is_atom(self):
        return False


class Rational(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        super().__init__()
        self.value = Fraction(value)

    def _key(self):
        return (self.value,)


@dataclass(frozen=True)
class AlgebraicGenerator:
    """A positive square root ``name = sqrt(radicand)``.

    ``rules`` maps base-coordinate names to the partial derivative of the
    generator; it is excluded from equality because the rule expressions
    refer back to the generator symbol itself.
    """

    name: str
    radicand: "Expr"
    rules: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def symbol(self):
        return Symbol(self.name, self)

    def set_rules(self, rules):
        """Install derivative rules after checking them against the relation."""
        rules = dict(rules)
        r = self.symbol
        for coord in free_symbols(self.radicand):
            if coord.name not in rules:
                raise MissingDerivativeRule(
                    "generator %s needs a rule for %s" % (self.name, coord.name))
        for name, rule in rules.items():
            coord = Symbol(name)
            defect = to_rf(r) * to_rf(rule) * 2 - rf_diff(to_rf(self.radicand), coord)
            if not defect.is_zero():
                raise ExprError("rule d%s/d%s = %s is inconsistent with %s^2 = %s"
                                % (self.name, name, rule, self.name, self.radicand))
        self.rules.clear()
        self.rules.update(rules)

    @classmethod
    def sqrt(cls, name, radicand):
        """Generator for ``sqrt(radicand)`` with rules d/dc = (dP/dc) / (2 name)."""
        gen = cls(name, normalize(radicand))
        r = gen.symbol
        rules = {}
        for coord in sorted(free_symbols(gen.radicand), key=lambda s: s.name):
            rules[coord.name] = from_rf(rf_diff(to_rf(gen.radicand), coord) / (to_rf(r) * 2))
        gen.set_rules(rules)
        return gen


class Symbol(Expr):
    __slots__ = ("name", "generator")

    def __init__(self, name, generator=None):
        super().__init__()
        self.name = name
        self.generator = generator

    def _key(self):
        return (self.name, self.generator)

    @property
    def is_atom(self):
        return True

    def sort_key(self):
        return (self.name, 0, (), self.generator is not None)


@dataclass(frozen=True)
class DeclaredFunction:
    """An unknown function of the given argument symbols, e.g. ``v(r, t)``."""

    name: str
    args: tuple

    @property
    def arg_names(self):
        return tuple(a.name for a in self.args)

    def __call__(self):
        return FunctionApplication(self)

    def d(self, *names):
        if not names:
            return FunctionApplication(self)
        return DerivativeAtom(self, names)


class FunctionApplication(Expr):
    __slots__ = ("function",)

    def __init__(self, function):
        super().__init__()
        self.function = function

    def _key(self):
        return (self.function,)

    @property
    def is_atom(self):
        return True

    def sort_key(self):
        return (self.function.name, 1, (), False)


class DerivativeAtom(Expr):
    __slots__ = ("function", "index")

    def __init__(self, function, index):
        super().__init__()
        order = function.arg_names
        for name in index:
            if name not in order:
                raise ExprError("%s is not an argument of %s" % (name, function.name))
        if not index:
            raise ExprError("empty derivative multi-index")
        self.function = function
        self.index = tuple(sorted(index, key=order.index))

    def _key(self):
        return (self.function, self.index)

    @property
    def is_atom(self):
        return True

    def sort_key(self):
        order = self.function.arg_names
        return (self.function.name, 1 + len(self.index),
                tuple(order.index(n) for n in self.index), False)


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, *terms):
        super().__init__()
        if len(terms) == 1 and isinstance(terms[0], (list, tuple)):
            terms = terms[0]
        self.terms = tuple(_as_expr(t) for t in terms)

    def _key(self):
        return self.terms


class Product(Expr):
    __slots__ = ("factors",)

    def __init__(self, *factors):
        super().__init__()
        if len(factors) == 1 and isinstance(factors[0], (list, tuple)):
            factors = factors[0]
        self.factors = tuple(_as_expr(f) for f in factors)

    def _key(self):
        return self.factors


class Power(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        super().__init__()
        if not isinstance(exp, int):
            raise ExprError("non-integer exponent %r" % (exp,))
        self.base = _as_expr(base)
        self.exp = exp

    def _key(self):
        return (self.base, self.exp)


def _as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Rational(x)
    raise TypeError("cannot convert %r to an expression" % (x,))


# --------------------------------------------------------------------------
# atom table

_atom_lock = threading.Lock()
_atom_ids = {}
_atoms = []
_atom_keys = []
_radicands = {}      # atom id of a generator -> integer radicand polynomial
_radicand_powers = {}


def atom_id(atom):
    i = _atom_ids.get(atom)
    if i is not None:
        return i
    radicand = None
    if isinstance(atom, Symbol) and atom.generator is not None:
        rf = to_rf(atom.generator.radicand)
        if not P.is_constant(rf.den) or rf.den[P.ONE_MONO] != 1:
            raise ExprError("radicand of %s must be an integer polynomial" % atom.name)
        radicand = rf.num
    with _atom_lock:
        i = _atom_ids.get(atom)
        if i is None:
            i = len(_atoms)
            _atoms.append(atom)
            _atom_keys.append(atom.sort_key())
            if radicand is not None:
                _radicands[i] = radicand
            _atom_ids[atom] = i
    return i


def atom_of(i):
    return _atoms[i]


def _radicand_power(k, n):
    key = (k, n)
    p = _radicand_powers.get(key)
    if p is None:
        p = P.power(_radicands[k], n)
        _radicand_powers[key] = p
    return p


def _reduce(p):
    """Rewrite every ``g^e`` with e >= 2 via ``g^2 = radicand``."""
    if not _radicands:
        return p
    while True:
        out = None
        for m, c in p.items():
            hit = False
            for k, e in m:
                if e >= 2 and k in _radicands:
                    hit = True
                    break
            if not hit:
                continue
            if out is None:
                out = {}
            extra = P.ONE
            rest = []
            for k, e in m:
                if e >= 2 and k in _radicands:
                    q, rm = divmod(e, 2)
                    extra = P.mul(extra, _radicand_power(k, q))
                    if rm:
                        rest.append((k, 1))
                else:
                    rest.append((k, e))
            out[m] = (extra, tuple(rest), c)
        if out is None:
            return p
        np_ = {m: c for m, c in p.items() if m not in out}
        for extra, rest, c in out.values():
            np_ = P.add(np_, P.mul_mono(extra, rest, c))
        p = np_


def _mono_cmp(a, b):
    """Graded lexicographic comparison in canonical atom order."""
    da, db = P.mono_degree(a), P.mono_degree(b)
    if da != db:
        return da - db
    ka = sorted((_atom_keys[k], e) for k, e in a)
    kb = sorted((_atom_keys[k], e) for k, e in b)
    for (xa, ea), (xb, eb) in zip(ka, kb):
        if xa != xb:
            return 1 if xa < xb else -1
        if ea != eb:
            return ea - eb
    return 0


mono_sort_key = cmp_to_key(_mono_cmp)


def _leading_coefficient(p):
    return p[max(p, key=mono_sort_key)]


# --------------------------------------------------------------------------
# rational functions

class RatFunc:
    """``num / den`` in canonical form.

    Invariants: each generator appears in ``num`` with degree <= 1 and not
    at all in ``den``; ``num`` and ``den`` are coprime over the integers;
    the leading coefficient of ``den`` is positive.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=P.ONE):
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def const(cls, value):
        value = Fraction(value)
        if not value:
            return ZERO
        return cls({P.ONE_MONO: value.numerator}, {P.ONE_MONO: value.denominator})

    @classmethod
    def atom(cls, atom):
        return cls({((atom_id(atom), 1),): 1})

    @classmethod
    def make(cls, num, den):
        if not den:
            raise DivisionByZero("division by zero expression")
        if not num:
            return ZERO
        num = _reduce(num)
        den = _reduce(den)
        if not num:
            return ZERO
        while _radicands:
            gens = sorted(k for k in P.variables(den) if k in _radicands)
            if not gens:
                break
            for k in gens:
                conj = P.flip_sign_of(den, k)
                num = _reduce(P.mul(num, conj))
                den = _reduce(P.mul(den, conj))
                if not den:
                    raise DivisionByZero("denominator vanishes modulo generator relations")
        if not num:
            return ZERO
        c = P.constant_value(den)
        if c is not None:
            g = gcd(P.content(num), c)
            if c < 0:
                g = -g
            if g != 1:
                num = P.exact_div_int(num, g)
                den = {P.ONE_MONO: c // g}
            return cls(num, den)
        _, num, den = P.cofactors(num, den)
        if _leading_coefficient(den) < 0:
            num = P.neg(num)
            den = P.neg(den)
        return cls(num, den)

    def is_zero(self):
        return not self.num

    def is_constant(self):
        return P.is_constant(self.num) and P.is_constant(self.den)

    def constant_value(self):
        if not self.is_constant():
            return None
        if not self.num:
            return Fraction(0)
        return Fraction(self.num[P.ONE_MONO], self.den[P.ONE_MONO])

    def is_polynomial(self):
        return P.is_constant(self.den)

    def atoms(self):
        return {_atoms[k] for k in P.variables(self.num) | P.variables(self.den)}

    def size(self):
        return len(self.num) + len(self.den)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction)):
                other = RatFunc.const(other)
            else:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def __add__(self, other):
        other = _as_rf(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RatFunc.make(P.add(self.num, other.num), self.den)
        if P.is_constant(self.den) or P.is_constant(other.den):
            return RatFunc.make(P.add(P.mul(self.num, other.den), P.mul(other.num, self.den)),
                                P.mul(self.den, other.den))
        g, a, b = P.cofactors(self.den, other.den)
        return RatFunc.make(P.add(P.mul(self.num, b), P.mul(other.num, a)), P.mul(self.den, b))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(P.neg(self.num), self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) + (-self)

    def __mul__(self, other):
        other = _as_rf(other)
        if not self.num or not other.num:
            return ZERO
        if P.is_constant(self.den) and P.is_constant(other.den) and not _radicands:
            return RatFunc.make(P.mul(self.num, other.num), P.mul(self.den, other.den))
        # cross-cancel first to keep intermediate sizes down
        _, n1, d2 = P.cofactors(self.num, other.den)
        _, n2, d1 = P.cofactors(other.num, self.den)
        return RatFunc.make(P.mul(n1, n2), P.mul(d1, d2))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("division by zero expression")
        return RatFunc.make(self.den, self.num)

    def __truediv__(self, other):
        return self * _as_rf(other).inverse()

    def __rtruediv__(self, other):
        return _as_rf(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return ONE_RF
        return RatFunc.make(P.power(self.num, n), P.power(self.den, n))

    def __repr__(self):
        return "RatFunc(%s)" % from_rf(self)


ZERO = RatFunc({}, P.ONE)
ONE_RF = RatFunc(dict(P.ONE), P.ONE)


def _as_rf(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Expr):
        return to_rf(x)
    if isinstance(x, (int, Fraction)):
        return RatFunc.const(x)
    raise TypeError("cannot convert %r to a rational function" % (x,))


def _sum_rfs(rfs):
    groups = {}
    for f in rfs:
        if not f.num:
            continue
        key = frozenset(f.den.items())
        if key in groups:
            groups[key] = (P.add(groups[key][0], f.num), f.den)
        else:
            groups[key] = (f.num, f.den)
    total = ZERO
    for num, den in groups.values():
        total = total + RatFunc.make(num, den)
    return total


def to_rf(e):
    """Canonical rational function of a tree (cached on the node)."""
    if isinstance(e, RatFunc):
        return e
    if isinstance(e, (int, Fraction)):
        return RatFunc.const(e)
    rf = e._rf
    if rf is not None:
        return rf
    if isinstance(e, Rational):
        rf = RatFunc.const(e.value)
    elif e.is_atom:
        rf = RatFunc.atom(e)
    elif isinstance(e, Sum):
        rf = _sum_rfs([to_rf(t) for t in e.terms])
    elif isinstance(e, Product):
        rf = ONE_RF
        for f in e.factors:
            rf = rf * to_rf(f)
    elif isinstance(e, Power):
        rf = to_rf(e.base) ** e.exp
    else:
        raise TypeError("unknown node %r" % (e,))
    e._rf = rf
    return rf


def _atom_power(atom, e):
    return atom if e == 1 else Power(atom, e)


def _term_tree(coeff, factors):
    """``coeff * prod(atom^e)`` as a canonical tree; ``factors`` sorted."""
    nodes = [_atom_power(a, e) for a, e in factors]
    if coeff == 1 and len(nodes) == 1:
        return nodes[0]
    if not nodes:
        return Rational(coeff)
    if coeff != 1:
        nodes.insert(0, Rational(coeff))
    return Product(tuple(nodes))


def _poly_tree(p, shift=(), divisor=1):
    """Tree for ``p / (divisor * shift_monomial)`` with terms in descending order."""
    shift = dict(shift)
    terms = []
    for m in sorted(p, key=mono_sort_key, reverse=True):
        exps = dict(m)
        for k, e in shift.items():
            exps[k] = exps.get(k, 0) - e
        factors = [(_atoms[k], e) for k, e in sorted(
            ((k, e) for k, e in exps.items() if e), key=lambda t: _atom_keys[t[0]])]
        terms.append(_term_tree(Fraction(p[m], divisor), factors))
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def from_rf(rf):
    """Canonical tree of a rational function.

    Monomial denominators are distributed over the numerator terms (giving
    negative powers); any other denominator becomes ``Power(den, -1)``.
    """
    if not rf.num:
        node = Rational(0)
    elif len(rf.den) == 1:
        (mono, c), = rf.den.items()
        node = _poly_tree(rf.num, mono, c)
    else:
        node = Product((_poly_tree(rf.num), Power(_poly_tree(rf.den), -1)))
    node._rf = rf
    return node


def normalize(e):
    return from_rf(to_rf(e))


def is_zero(e):
    return to_rf(e).is_zero()


def atoms(e):
    return to_rf(e).atoms()


def free_symbols(e):
    """Plain (non-generator) symbols on which ``e`` depends.

    Generators contribute the symbols of their radicands.
    """
    out = set()
    for a in atoms(e):
        if isinstance(a, Symbol):
            if a.generator is None:
                out.add(a)
            else:
                out |= free_symbols(a.generator.radicand)
        else:
            for arg in a.function.args:
                if arg.generator is None:
                    out.add(arg)
                else:
                    out |= free_symbols(arg.generator.radicand)
    return out


# --------------------------------------------------------------------------
# differentiation

_deriv_cache = {}


def _symbol_derivative(sym, s):
    if sym == s:
        return ONE_RF
    if sym.generator is None:
        return ZERO
    rule = sym.generator.rules.get(s.name)
    if rule is not None:
        return to_rf(rule)
    if s in free_symbols(sym.generator.radicand):
        raise MissingDerivativeRule("no rule for d%s/d%s" % (sym.name, s.name))
    return ZERO


def _atom_derivative(k, s, sid):
    key = (k, sid)
    d = _deriv_cache.get(key)
    if d is not None:
        return d
    a = _atoms[k]
    if isinstance(a, Symbol):
        d = _symbol_derivative(a, s)
    else:
        f = a.function
        base = a.index if isinstance(a, DerivativeAtom) else ()
        parts = []
        for arg in f.args:
            da = _symbol_derivative(arg, s)
            if da.num:
                parts.append(RatFunc.atom(DerivativeAtom(f, base + (arg.name,))) * da)
        d = _sum_rfs(parts)
    _deriv_cache[key] = d
    return d


def _poly_diff(p, s, sid):
    poly_part = {}
    rational_parts = []
    for k in P.variables(p):
        dk = _atom_derivative(k, s, sid)
        if not dk.num:
            continue
        dp = P.derivative(p, k)
        if P.is_constant(dk.den) and dk.den[P.ONE_MONO] == 1:
            poly_part = P.add(poly_part, P.mul(dp, dk.num))
        else:
            rational_parts.append(RatFunc.make(P.mul(dp, dk.num), dk.den))
    rational_parts.append(RatFunc.make(poly_part, P.ONE) if poly_part else ZERO)
    return _sum_rfs(rational_parts)


def rf_diff(f, s):
    if not isinstance(s, Symbol):
        raise ExprError("can only differentiate with respect to a symbol, got %r" % (s,))
    if s.generator is not None:
        raise ExprError("cannot differentiate with respect to generator %s" % s.name)
    f = _as_rf(f)
    if not f.num:
        return ZERO
    sid = atom_id(s)
    dn = _poly_diff(f.num, s, sid)
    if P.is_constant(f.den):
        return dn * RatFunc.const(Fraction(1, f.den[P.ONE_MONO]))
    dd = _poly_diff(f.den, s, sid)
    n = RatFunc(f.num)
    d = RatFunc(f.den)
    return (dn * d - n * dd) / (d * d)


def diff(e, s, *more):
    """Total derivative with respect to the symbol(s) ``s``, in order."""
    rf = to_rf(e)
    for sym in (s,) + more:
        rf = rf_diff(rf, sym)
    return from_rf(rf)


# --------------------------------------------------------------------------
# substitution and evaluation

def _is_square(q):
    if q < 0:
        return None
    r = isqrt(q)
    return r if r * r == q else None


def _rational_sqrt(value):
    a = _is_square(value.numerator)
    b = _is_square(value.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def _subs_poly(p, values):
    """Numerator and denominator polynomials of ``p`` under ``values``.

    ``values`` maps atom id to a RatFunc.  Uses one common denominator.
    """
    if not p:
        return {}, P.ONE
    maxexp = {}
    for m in p:
        for k, e in m:
            if k in values and maxexp.get(k, 0) < e:
                maxexp[k] = e
    powcache = {}

    def pw(poly, key, e):
        ck = (key, e)
        r = powcache.get(ck)
        if r is None:
            r = P.power(poly, e)
            powcache[ck] = r
        return r

    common = P.ONE
    for k, e in maxexp.items():
        common = P.mul(common, pw(values[k].den, ("d", k), e))
    total = {}
    for m, c in p.items():
        term = {P.ONE_MONO: c}
        keep = []
        for k, e in m:
            if k in values:
                v = values[k]
                term = P.mul(term, pw(v.num, ("n", k), e))
                if maxexp[k] > e:
                    term = P.mul(term, pw(v.den, ("d", k), maxexp[k] - e))
            else:
                keep.append((k, e))
        for k, e in maxexp.items():
            if P.mono_exp(m, k) == 0:
                term = P.mul(term, pw(values[k].den, ("d", k), e))
        if keep:
            term = P.mul_mono(term, tuple(keep))
        total = P.add(total, term)
    return total, common


def _generator_values(ids, values):
    """Extend ``values`` with images of unbound generators whose radicand moves."""
    extra = {}
    for k in ids:
        if k in values or k not in _radicands:
            continue
        radicand = _radicands[k]
        if not (P.variables(radicand) & set(values)):
            continue
        num, den = _subs_poly(radicand, values)
        image = RatFunc.make(num, den)
        if image == RatFunc(radicand):
            continue
        c = image.constant_value()
        root = _rational_sqrt(c) if c is not None else None
        if root is None:
            raise SubstitutionError(
                "radicand of %s becomes %s, which is not a rational square; "
                "bind %s explicitly" % (_atoms[k].name, from_rf(image), _atoms[k].name))
        extra[k] = RatFunc.const(root)
    return extra


def rf_substitute(f, bindings):
    """Simultaneous substitution; ``bindings`` maps atoms to Expr/RatFunc/numbers."""
    f = _as_rf(f)
    values = {}
    for key, val in bindings.items():
        if not (isinstance(key, Expr) and key.is_atom):
            raise SubstitutionError("cannot substitute for non-atom %r" % (key,))
        values[atom_id(key)] = _as_rf(val)
    ids = P.variables(f.num) | P.variables(f.den)
    values.update(_generator_values(ids, values))
    if not (ids & set(values)):
        return f
    nn, nd = _subs_poly(f.num, values)
    dn, dd = _subs_poly(f.den, values)
    den = P.mul(dn, nd)
    if not den:
        raise SubstitutionError("substitution makes the denominator vanish")
    return RatFunc.make(P.mul(nn, dd), den)


def substitute(e, bindings):
    return from_rf(rf_substitute(to_rf(e), bindings))


def derivative_atoms(e, function):
    return {a for a in atoms(e)
            if isinstance(a, (FunctionApplication, DerivativeAtom)) and a.function == function}


def function_bindings(e, function, replacement):
    """Bindings that replace ``function`` and all its derivatives in ``e``."""
    out = {}
    for a in derivative_atoms(e, function):
        value = to_rf(replacement)
        if isinstance(a, DerivativeAtom):
            for name in a.index:
                value = rf_diff(value, function.args[function.arg_names.index(name)])
        out[a] = value
    return out


def substitute_functions(e, replacements):
    """Replace unknown functions (and their derivatives) by expressions."""
    bindings = {}
    for function, replacement in replacements.items():
        bindings.update(function_bindings(e, function, replacement))
    return substitute(e, bindings)


def _lookup(values, atom):
    if atom in values:
        return values[atom]
    name = atom.name if isinstance(atom, Symbol) else str(atom)
    return values.get(name)


def evaluate(e, values, exact=False):
    """Evaluate the normal form of ``e`` at a point.

    ``values`` maps atoms (or symbol names) to numbers.  Unbound generators
    take the positive root of their radicand.  With ``exact=True`` the
    result is a Fraction and generator roots must be rational.
    """
    rf = to_rf(e)
    cache = {}

    def atom_value(k):
        if k in cache:
            return cache[k]
        a = _atoms[k]
        v = _lookup(values, a)
        if v is None:
            if k not in _radicands:
                raise ExprError("no value for %s" % a)
            rad = poly_value(_radicands[k])
            if exact:
                v = _rational_sqrt(Fraction(rad))
                if v is None:
                    raise ExprError("sqrt(%s) is irrational" % rad)
            else:
                if rad < 0:
                    raise ExprError("negative radicand for %s" % a)
                v = sqrt(rad)
        v = Fraction(v) if exact else float(v)
        cache[k] = v
        return v

    def poly_value(p):
        total = Fraction(0) if exact else 0.0
        for m, c in p.items():
            t = Fraction(c) if exact else float(c)
            for k, ex in m:
                t *= atom_value(k) ** ex
            total += t
        return total

    den = poly_value(rf.den)
    if den == 0:
        raise DivisionByZero("denominator vanishes at the evaluation point")
    return poly_value(rf.num) / den


def evaluate_tree(e, values, exact=False):
    """Evaluate a tree node by node, without normalizing it."""
    if isinstance(e, Rational):
        return e.value if exact else float(e.value)
    if e.is_atom:
        v = _lookup(values, e)
        if v is None:
            if isinstance(e, Symbol) and e.generator is not None:
                rad = evaluate_tree(e.generator.radicand, values, exact)
                if exact:
                    root = _rational_sqrt(Fraction(rad))
                    if root is None:
                        raise ExprError("sqrt(%s) is irrational" % rad)
                    return root
                return sqrt(rad)
            raise ExprError("no value for %s" % e)
        return Fraction(v) if exact else float(v)
    if isinstance(e, Sum):
        total = Fraction(0) if exact else 0.0
        for t in e.terms:
            total += evaluate_tree(t, values, exact)
        return total
    if isinstance(e, Product):
        total = Fraction(1) if exact else 1.0
        for f in e.factors:
            total *= evaluate_tree(f, values, exact)
        return total
    if isinstance(e, Power):
        return evaluate_tree(e.base, values, exact) ** e.exp
    raise TypeError("unknown node %r" % (e,))


def polynomial_degree(e, sym):
    """Degree of the numerator of ``e`` in ``sym``."""
    rf = to_rf(e)
    k = atom_id(sym)
    return max((P.mono_exp(m, k) for m in rf.num), default=0)


def coefficients_in(e, sym):
    """Numerator of ``e`` split by powers of ``sym``: ``{power: Expr}``."""
    rf = to_rf(e)
    k = atom_id(sym)
    den = RatFunc(rf.den)
    return {power: from_rf(RatFunc.make(part, P.ONE) / den)
            for power, part in P.split_by(rf.num, k).items()}
