"""Printer emitting the same grammar the parser reads.

Declared functions print as their bare name and derivatives as ``v_rt``
when every argument name is a single character (``D(v,rho,t)`` otherwise);
a parsing :class:`~symred.expr.context.Context` resolves both back.
"""

from fractions import Fraction

from .core import (DerivativeAtom, FunctionApplication, Power, Product, Rational,
                   Sum, Symbol)


def _atom_string(e):
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, FunctionApplication):
        return e.function.name
    f = e.function
    if all(len(n) == 1 for n in f.arg_names):
        return "%s_%s" % (f.name, "".join(e.index))
    return "D(%s,%s)" % (f.name, ",".join(e.index))


def _rational_string(q):
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)


def _is_simple(e):
    """True when ``e`` can be a power base without parentheses."""
    if e.is_atom:
        return True
    if isinstance(e, Rational):
        return e.value >= 0 and e.value.denominator == 1
    return False


def _base(e):
    s = to_string(e)
    return s if _is_simple(e) else "(" + s + ")"


def _power_string(base, exp):
    if exp == 1:
        return _base(base)
    return "%s^%d" % (_base(base), exp)


def _factor_string(f):
    """A product factor; sums and negative constants get parentheses."""
    if isinstance(f, Sum):
        return "(" + to_string(f) + ")"
    if isinstance(f, Rational) and f.value < 0:
        return "(" + _rational_string(f.value) + ")"
    if isinstance(f, Product):
        return "(" + to_string(f) + ")"
    return to_string(f)


def _product_parts(e):
    """Split a product into (coefficient, numerator factors, denominator factors)."""
    coeff = Fraction(1)
    num, den = [], []
    factors = list(e.factors) if isinstance(e, Product) else [e]
    while factors:
        f = factors.pop(0)
        if isinstance(f, Product):
            factors[:0] = f.factors
        elif isinstance(f, Rational):
            coeff *= f.value
        elif isinstance(f, Power) and f.exp < 0:
            den.append(_power_string(f.base, -f.exp))
        else:
            num.append(_factor_string(f))
    return coeff, num, den


def _product_string(e, sign_out):
    coeff, num, den = _product_parts(e)
    negative = coeff < 0
    coeff = abs(coeff)
    if coeff.numerator != 1 or not num:
        num.insert(0, str(coeff.numerator))
    if coeff.denominator != 1:
        den.insert(0, str(coeff.denominator))
    s = "*".join(num)
    if den:
        s += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
    if negative:
        if sign_out is not None:
            sign_out.append(True)
            return s
        return "-" + s
    return s


def _term(t):
    """(negative, magnitude string) for a summand."""
    if isinstance(t, Rational):
        return t.value < 0, _rational_string(abs(t.value))
    if isinstance(t, Product):
        flag = []
        s = _product_string(t, flag)
        return bool(flag), s
    if isinstance(t, Power) and t.exp < 0:
        return False, _product_string(t, None)
    if isinstance(t, Sum):
        return False, "(" + to_string(t) + ")"
    return False, to_string(t)


def to_string(e):
    if isinstance(e, Rational):
        return _rational_string(e.value)
    if e.is_atom:
        return _atom_string(e)
    if isinstance(e, Power):
        if e.exp < 0:
            return _product_string(e, None)
        return _power_string(e.base, e.exp)
    if isinstance(e, Product):
        return _product_string(e, None)
    if isinstance(e, Sum):
        if not e.terms:
            return "0"
        out = []
        for i, t in enumerate(e.terms):
            negative, s = _term(t)
            if i == 0:
                out.append("-" + s if negative else s)
            else:
                out.append((" - " if negative else " + ") + s)
        return "".join(out)
    raise TypeError("unknown node %r" % (e,))
