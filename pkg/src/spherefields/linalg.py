"""Exact linear algebra over the rationals.

Rows are cleared to integers and reduced by fraction-free (Bareiss)
elimination; back substitution happens in ``mpq``.
"""
from __future__ import annotations

from math import gcd, lcm

from gmpy2 import mpq, mpz

from .poly import Q


def _integer_row(row):
    den = lcm(*[int(Q(v).denominator) for v in row]) if row else 1
    return [mpz(Q(v) * den) for v in row]


def echelon(rows, ncols=None):
    """Fraction-free row echelon form.

    Returns ``(E, pivots)`` where ``E`` is an integer matrix (list of lists of
    mpz) whose first ``len(pivots)`` rows are the nonzero echelon rows and
    ``pivots`` lists their pivot columns.
    """
    E = [_integer_row(r) for r in rows]
    if ncols is None:
        ncols = len(E[0]) if E else 0
    m = len(E)
    pivots = []
    prev = mpz(1)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if E[i][c]), None)
        if p is None:
            continue
        E[r], E[p] = E[p], E[r]
        piv = E[r][c]
        prow = E[r]
        for i in range(r + 1, m):
            row = E[i]
            a = row[c]
            for j in range(c + 1, ncols):
                num = piv * row[j] - a * prow[j]
                q, rem = divmod(num, prev)
                assert not rem, "Bareiss division must be exact"
                row[j] = q
            row[c] = mpz(0)
        # rows above the pivot row keep their scale; only rows below were updated
        prev = piv
        pivots.append(c)
        r += 1
    return E, pivots


def rank(rows, ncols=None) -> int:
    if not rows:
        return 0
    return len(echelon(rows, ncols)[1])


def _back_substitute(E, pivots, ncols, fixed):
    """Solve the echelon system for pivot variables given values of the others."""
    x = [mpq(0)] * ncols
    for j, v in fixed.items():
        x[j] = mpq(v)
    for r in reversed(range(len(pivots))):
        c = pivots[r]
        row = E[r]
        s = mpq(0)
        for j in range(c + 1, ncols):
            if row[j] and x[j]:
                s += row[j] * x[j]
        x[c] = -s / row[c]
    return x


def nullspace(rows, ncols=None):
    """Basis of ``{v : rows @ v = 0}`` as lists of mpq (integer-primitive)."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        E, pivots = [], []
    else:
        E, pivots = echelon(rows, ncols)
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = _back_substitute(E, pivots, ncols, {f: 1})
        basis.append(primitive_vector(v))
    return basis


def primitive_vector(v):
    den = lcm(*[int(x.denominator) for x in v])
    ints = [int(x * den) for x in v]
    g = 0
    for a in ints:
        g = gcd(g, a)
    g = g or 1
    first = next((a for a in ints if a), 1)
    if first < 0:
        g = -g
    return [mpq(a, g) for a in ints]


def solve(rows, rhs):
    """One rational solution of ``rows @ x = rhs`` (free variables 0), or None."""
    if not rows:
        return []
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    E, pivots = echelon(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    # the augmented column is carried as a fixed "variable" equal to -1
    x = _back_substitute(E, pivots, ncols + 1, {ncols: -1})
    return x[:ncols]


def mat_vec(M, v):
    return [sum((Q(a) * Q(b) for a, b in zip(row, v)), mpq(0)) for row in M]


def transpose(M):
    return [list(col) for col in zip(*M)]
