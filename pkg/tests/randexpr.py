"""Random expression trees for property tests and the identity sweep."""

import random
from fractions import Fraction

from symred.expr import Context, Rational, Sum, Product, Power

NAMES = ("x", "y", "z")


def context():
    c = Context()
    c.symbols_(*NAMES)
    return c


def tree(rng, ctx, depth=3):
    """A random tree with no division by anything that can vanish on the reals.

    Denominators are always ``q^2 + c`` with ``c >= 1``.
    """
    syms = [ctx.symbols[n] for n in NAMES]
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return rng.choice(syms)
        return Rational(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
    kind = rng.randrange(5)
    a = tree(rng, ctx, depth - 1)
    if kind == 0:
        return Sum((a, tree(rng, ctx, depth - 1)))
    if kind == 1:
        return Product((a, tree(rng, ctx, depth - 1)))
    if kind == 2:
        return Power(a, rng.randint(0, 3))
    if kind == 3:
        b = tree(rng, ctx, depth - 1)
        den = Sum((Power(b, 2), Rational(rng.randint(1, 4))))
        return Product((a, Power(den, -1)))
    return Sum((a, Product((Rational(-1), tree(rng, ctx, depth - 1)))))


def point(rng):
    return {n: rng.uniform(-2, 2) for n in NAMES}
