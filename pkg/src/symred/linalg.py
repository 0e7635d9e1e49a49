"""Gaussian elimination over the field of rational functions.

Matrices are lists of rows.  Entries may be :class:`~symred.expr.Expr`,
:class:`~symred.expr.RatFunc` or Python rationals; results are returned as
``Expr`` unless a function says otherwise.
"""

from fractions import Fraction

from .expr import core as _core
from .expr import _poly as P
from .expr.core import RatFunc, from_rf, to_rf


def _rf(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, (int, Fraction)):
        return RatFunc.const(x)
    return to_rf(x)


def to_rf_matrix(m):
    return [[_rf(x) for x in row] for row in m]


def to_expr_matrix(m):
    return [[from_rf(x) for x in row] for row in m]


def _echelon(m):
    """Reduced row echelon form in place; returns pivot columns.

    Pivots are chosen as the smallest nonzero entry in the column to limit
    expression growth.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        best = None
        for i in range(r, rows):
            if m[i][c].num:
                size = m[i][c].size()
                if best is None or size < best[0]:
                    best = (size, i)
        if best is None:
            continue
        i = best[1]
        m[r], m[i] = m[i], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv if x.num else x for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c].num:
                f = m[i][c]
                m[i] = [a - f * b if b.num else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return pivots


def rank(m):
    if not m or not m[0]:
        return 0
    work = to_rf_matrix(m)
    return len(_echelon(work))


def primitive(vec):
    """Scale a vector by a nonzero rational function to a tidy representative.

    Clears denominators, removes the common polynomial factor of the
    numerators and makes the first nonzero entry's leading coefficient
    positive.
    """
    vec = [_rf(x) for x in vec]
    if not any(x.num for x in vec):
        return vec
    common = RatFunc(P.ONE)
    for x in vec:
        if x.num:
            common = _lcm(common, RatFunc(x.den))
    vec = [x * common for x in vec]
    g = None
    for x in vec:
        if x.num:
            g = x.num if g is None else P.cofactors(g, x.num)[0]
    if g is not None:
        gi = RatFunc.make(P.ONE, g)
        vec = [x * gi for x in vec]
    lead = next(x for x in vec if x.num)
    if _core._leading_coefficient(lead.num) < 0:
        vec = [-x for x in vec]
    return vec


def _lcm(a, b):
    # a, b polynomial RatFuncs
    g, _, bq = P.cofactors(a.num, b.num)
    return RatFunc.make(P.mul(a.num, bq), P.ONE)


def nullspace_rf(m, ncols=None):
    """Basis (list of RatFunc vectors) of the right kernel of ``m``."""
    if not m:
        n = ncols or 0
        return [[RatFunc.const(int(i == j)) for i in range(n)] for j in range(n)]
    work = to_rf_matrix(m)
    n = len(work[0])
    pivots = _echelon(work)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [_core.ZERO] * n
        v[f] = _core.ONE_RF
        for row, pc in enumerate(pivots):
            v[pc] = -work[row][f]
        basis.append(primitive(v))
    return basis


def nullspace(m, ncols=None):
    return [[from_rf(x) for x in v] for v in nullspace_rf(m, ncols)]


def solve_rf(a, b):
    """Solve ``a x = b`` for one solution; returns (x, residual) as RatFunc lists.

    Free variables are set to zero.  ``residual`` is ``b - a x`` and is all
    zero exactly when the system is consistent.
    """
    rows = len(a)
    n = len(a[0]) if rows else 0
    aug = [[_rf(x) for x in row] + [_rf(bi)] for row, bi in zip(a, b)]
    pivots = _echelon(aug)
    x = [_core.ZERO] * n
    for row, pc in enumerate(pivots):
        if pc < n:
            x[pc] = aug[row][n]
    residual = []
    for row, bi in zip(a, b):
        s = _rf(bi)
        for aij, xj in zip(row, x):
            aij = _rf(aij)
            if aij.num and xj.num:
                s = s - aij * xj
        residual.append(s)
    return x, residual


def solve(a, b):
    x, residual = solve_rf(a, b)
    return [from_rf(v) for v in x], [from_rf(v) for v in residual]


def matmul(a, b):
    a = to_rf_matrix(a)
    b = to_rf_matrix(b)
    out = []
    for row in a:
        new = []
        for j in range(len(b[0])):
            s = _core.ZERO
            for k, aik in enumerate(row):
                if aik.num and b[k][j].num:
                    s = s + aik * b[k][j]
            new.append(s)
        out.append(new)
    return out


def matvec(a, v):
    return [row[0] for row in matmul(a, [[x] for x in v])]


def inverse_rf(m):
    """Inverse by Gauss-Jordan; raises ZeroDivisionError when singular."""
    n = len(m)
    aug = [[_rf(x) for x in row] + [RatFunc.const(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    pivots = _echelon(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in aug]


def identity(n):
    return [[RatFunc.const(int(i == j)) for j in range(n)] for i in range(n)]
