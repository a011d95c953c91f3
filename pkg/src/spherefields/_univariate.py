"""Dense univariate helpers over Q used by the root searches.

A univariate polynomial is a list of mpq coefficients, lowest degree first,
with no trailing zeros (the zero polynomial is ``[]``).
"""
from __future__ import annotations

from math import lcm

from gmpy2 import mpq

from .poly import Polynomial


def trim(c):
    c = [mpq(v) for v in c]
    while c and not c[-1]:
        c.pop()
    return c


def from_polynomial(p: Polynomial, var: int):
    """Coefficients of ``p`` as a polynomial in ``var`` (other variables must be absent)."""
    out = [mpq(0)] * (p.degree_in(var) + 1 if p else 0)
    for mono, c in p.terms.items():
        if any(e for i, e in enumerate(mono) if i != var):
            raise ValueError("polynomial depends on more than one variable")
        out[mono[var]] += c
    return trim(out)


def coefficients_in(p: Polynomial, var: int):
    """Group ``p`` by the monomial in the other variables.

    Returns a dict mapping the exponent tuple with ``var`` zeroed to the
    univariate coefficient list in ``var``.
    """
    groups = {}
    for mono, c in p.terms.items():
        key = mono[:var] + (0,) + mono[var + 1:]
        row = groups.setdefault(key, {})
        row[mono[var]] = row.get(mono[var], mpq(0)) + c
    out = {}
    for key, row in groups.items():
        dense = [mpq(0)] * (max(row) + 1)
        for e, c in row.items():
            dense[e] = c
        out[key] = trim(dense)
    return out


def degree(f):
    return len(f) - 1


def evaluate(f, x):
    acc = mpq(0)
    for c in reversed(f):
        acc = acc * x + c
    return acc


def derivative(f):
    return trim([f[i] * i for i in range(1, len(f))])


def divmod_(f, g):
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(f)
    q = [mpq(0)] * max(len(f) - len(g) + 1, 0)
    lead = g[-1]
    dg = len(g) - 1
    while len(r) - 1 >= dg and r:
        shift = len(r) - 1 - dg
        c = r[-1] / lead
        q[shift] = c
        for i, gc in enumerate(g):
            r[shift + i] -= c * gc
        r = trim(r)
    return trim(q), r


def monic(f):
    if not f:
        return []
    lc = f[-1]
    return [c / lc for c in f]


def gcd(f, g):
    f, g = trim(f), trim(g)
    while g:
        f, g = g, divmod_(f, g)[1]
    return monic(f)


def primitive_integer(f):
    """Integer coefficients with content 1 and positive leading coefficient."""
    if not f:
        return []
    den = lcm(*[int(c.denominator) for c in f])
    ints = [int(c * den) for c in f]
    from math import gcd as igcd

    g = 0
    for a in ints:
        g = igcd(g, a)
    if ints[-1] < 0:
        g = -g
    return [a // g for a in ints]


def squarefree(f):
    f = trim(f)
    if len(f) <= 1:
        return monic(f)
    return monic(divmod_(f, gcd(f, derivative(f)))[0])


def sturm_sequence(f):
    seq = [trim(f), derivative(f)]
    while seq[-1]:
        r = divmod_(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(seq, x):
    signs = []
    for p in seq:
        v = evaluate(p, x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(f, lo, hi):
    """Distinct real roots of ``f`` in the open interval ``(lo, hi)``."""
    sf = squarefree(f)
    if len(sf) <= 1:
        return 0
    seq = sturm_sequence(sf)
    # Sturm counts roots in (lo, hi]; drop a root sitting exactly at hi
    n = _sign_changes(seq, mpq(lo)) - _sign_changes(seq, mpq(hi))
    if evaluate(sf, mpq(hi)) == 0:
        n -= 1
    return n


def root_bound(f):
    lead = abs(f[-1])
    return 1 + max((abs(c) / lead for c in f[:-1]), default=mpq(0))


def isolate_real_roots(f, width=None):
    """Disjoint half-open intervals ``(lo, hi]`` each holding exactly one root.

    An interval with ``lo == hi`` marks an exact rational root met while
    bisecting.  Without ``width`` the intervals are merely isolating.
    """
    sf = squarefree(f)
    if len(sf) <= 1:
        return []
    seq = sturm_sequence(sf)
    B = root_bound(sf)
    out = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        # Sturm with zeros dropped counts roots in (lo, hi]
        n = _sign_changes(seq, lo) - _sign_changes(seq, hi)
        if n == 0:
            continue
        if n == 1:
            if evaluate(sf, hi) == 0:
                out.append((hi, hi))
                continue
            if width is None or hi - lo < width:
                out.append((lo, hi))
                continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out)


def root_multiplicity(f, r):
    m = 0
    lin = [-mpq(r), mpq(1)]
    while f:
        q, rem = divmod_(f, lin)
        if rem:
            break
        f = q
        m += 1
    return m


def rational_roots(f):
    """Sorted ``[(root, multiplicity)]`` of the rational roots of ``f``.

    Every rational root of a primitive integer polynomial has the form
    ``k / lc``, so isolating the real roots of the squarefree part to
    width below ``1 / lc`` leaves one candidate per interval.
    """
    f = trim(f)
    if len(f) <= 1:
        return []
    sf = primitive_integer(squarefree(f))
    lc = sf[-1]
    sfq = [mpq(c) for c in sf]
    found = []
    for lo, hi in isolate_real_roots(sfq, width=mpq(1, 2 * lc)):
        if lo == hi:
            cand = lo
        else:
            k = round((lo + hi) / 2 * lc)
            cand = mpq(k, lc)
            if not (lo < cand < hi) or evaluate(sfq, cand):
                continue
        found.append(cand)
    return [(r, root_multiplicity(f, r)) for r in sorted(set(found))]


def strip_roots(f, roots):
    """Divide out ``(x - r)^mult`` for each ``(r, mult)``."""
    for r, m in roots:
        for _ in range(m):
            q, rem = divmod_(f, [-mpq(r), mpq(1)])
            if rem:
                raise ValueError("root does not divide")
            f = q
    return f


def to_string(f, var="t"):
    if not f:
        return "0"
    parts = []
    for e in range(len(f) - 1, -1, -1):
        c = f[e]
        if not c:
            continue
        if e == 0:
            parts.append(str(c))
        else:
            mono = var if e == 1 else f"{var}^{e}"
            parts.append(mono if c == 1 else ("-" + mono if c == -1 else f"{c}*{mono}"))
    return " + ".join(parts).replace("+ -", "- ")
