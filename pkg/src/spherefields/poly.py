"""Sparse multivariate polynomials over the rationals.

A :class:`Polynomial` is an immutable map from exponent tuples to nonzero
``gmpy2.mpq`` coefficients.  Variables are addressed by 0-based index, so
index ``i`` is printed as ``x{i+1}``.
"""
from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq, mpz

from .errors import ClearingFailed, DimensionMismatch, NotDivisible, ParseError

Monomial = tuple

_INT_TYPES = (int, type(mpz(0)))


def Q(value) -> mpq:
    """Coerce ``value`` to an exact rational; floats are rejected."""
    if isinstance(value, str):
        try:
            return mpq(value.strip())
        except ValueError:
            raise ValueError(f"not a rational literal: {value!r}") from None
    if isinstance(value, float):
        raise TypeError("floating point values are not allowed; pass a string or Fraction")
    if isinstance(value, (Fraction, Rational)) or isinstance(value, _INT_TYPES):
        return mpq(value)
    if isinstance(value, type(mpq(0))):
        return value
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def _add_exp(a, b):
    return tuple([x + y for x, y in zip(a, b)])


class Polynomial:
    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping | Iterable | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for mono, coeff in items:
                mono = tuple(int(e) for e in mono)
                if len(mono) != nvars or any(e < 0 for e in mono):
                    raise ValueError(f"bad exponent vector {mono} for {nvars} variables")
                c = Q(coeff)
                if mono in clean:
                    c += clean[mono]
                if c:
                    clean[mono] = c
                else:
                    clean.pop(mono, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # terms must already be normalized: mpq values, no zeros
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # constructors --------------------------------------------------------
    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, c, nvars):
        c = Q(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars):
        return cls.constant(1, nvars)

    @classmethod
    def var(cls, i, nvars):
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        mono = [0] * nvars
        mono[i] = 1
        return cls._raw(nvars, {tuple(mono): mpq(1)})

    @classmethod
    def monomial(cls, exponents, coeff=1):
        exponents = tuple(exponents)
        return cls(len(exponents), {exponents: coeff})

    @classmethod
    def linear(cls, coeffs, const=0):
        """``sum(coeffs[i] * x_i) + const``."""
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            mono = [0] * n
            mono[i] = 1
            terms[tuple(mono)] = c
        terms[(0,) * n] = const
        return cls(n, terms)

    # basic queries -------------------------------------------------------
    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def degree_in(self, i) -> int:
        if not self._terms:
            return -1
        return max(m[i] for m in self._terms)

    def is_constant(self):
        return self.degree() <= 0

    def constant_term(self) -> mpq:
        return self._terms.get((0,) * self.nvars, mpq(0))

    def coeff(self, mono) -> mpq:
        return self._terms.get(tuple(mono), mpq(0))

    def is_homogeneous(self):
        degs = {sum(m) for m in self._terms}
        return len(degs) <= 1

    def variables(self):
        """Indices of variables that actually occur."""
        return sorted({i for m in self._terms for i, e in enumerate(m) if e})

    def leading_term(self, order: "MonomialOrder | None" = None):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        order = order or LEX
        mono = max(self._terms, key=order.key)
        return mono, self._terms[mono]

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionMismatch(
                    f"polynomials in {self.nvars} and {other.nvars} variables")
            return other
        try:
            return Polynomial.constant(Q(other), self.nvars)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        res = dict(self._terms)
        for m, c in other._terms.items():
            v = res.get(m)
            if v is None:
                res[m] = c
            else:
                v = v + c
                if v:
                    res[m] = v
                else:
                    del res[m]
        return Polynomial._raw(self.nvars, res)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                c = Q(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        other = self._coerce(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial.zero(self.nvars)
        if len(a) < len(b):
            a, b = b, a
        res = {}
        get = res.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple([x + y for x, y in zip(ma, mb)])
                v = get(m)
                res[m] = ca * cb if v is None else v + ca * cb
        return Polynomial._raw(self.nvars, {m: c for m, c in res.items() if c})

    __rmul__ = __mul__

    def scale(self, c):
        c = Q(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {m: v * c for m, v in self._terms.items()})

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            return exact_divide(self, other)
        c = Q(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self.scale(1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        try:
            c = Q(other)
        except TypeError:
            return NotImplemented
        return self.degree() <= 0 and self.constant_term() == c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # calculus / evaluation ---------------------------------------------------
    def partial(self, i):
        return partial_derivative(self, i)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = point[0]
        return evaluate(self, point)

    # text ---------------------------------------------------------------
    def to_string(self, prefix="x"):
        return format_polynomial(self, prefix)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"


def variables(nvars):
    """``(x1, ..., x_nvars)`` as polynomials."""
    return tuple(Polynomial.var(i, nvars) for i in range(nvars))


def sum_of_squares(nvars):
    terms = {}
    for i in range(nvars):
        mono = [0] * nvars
        mono[i] = 2
        terms[tuple(mono)] = mpq(1)
    return Polynomial._raw(nvars, terms)


def arith(p: Polynomial, q: Polynomial, op: str) -> Polynomial:
    if p.nvars != q.nvars:
        raise DimensionMismatch(f"polynomials in {p.nvars} and {q.nvars} variables")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# monomial orders and division


@dataclass(frozen=True)
class MonomialOrder:
    """Lexicographic or graded-lexicographic order.

    ``perm`` lists variable indices from most to least significant; ``None``
    means the natural order x1 > x2 > ... .
    """

    kind: str = "lex"
    perm: tuple | None = None
    _key: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("lex", "grlex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        perm = self.perm
        if perm is None:
            base = tuple
        else:
            perm = tuple(perm)
            if sorted(perm) != list(range(len(perm))):
                raise ValueError("perm must be a permutation of variable indices")
            base = lambda m: tuple([m[i] for i in perm])  # noqa: E731
        if self.kind == "lex":
            key = base
        else:
            key = lambda m: (sum(m),) + tuple(base(m))  # noqa: E731
        object.__setattr__(self, "_key", key)

    def key(self, mono):
        return self._key(mono)


LEX = MonomialOrder("lex")
GRLEX = MonomialOrder("grlex")


def _divide(g: Polynomial, f: Polynomial, order: MonomialOrder, exact: bool):
    if f.nvars != g.nvars:
        raise DimensionMismatch(f"polynomials in {g.nvars} and {f.nvars} variables")
    if f.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    key = order.key
    lm, lc = f.leading_term(order)
    tail = [(m, c) for m, c in f._terms.items() if m != lm]
    p = dict(g._terms)
    heap = [(tuple([-k for k in key(m)]), m) for m in p]
    heapq.heapify(heap)
    quot, rem = {}, {}
    while heap:
        _, m = heapq.heappop(heap)
        c = p.pop(m, None)
        if c is None:
            continue
        if all(a >= b for a, b in zip(m, lm)):
            t = tuple([a - b for a, b in zip(m, lm)])
            tc = c / lc
            quot[t] = tc
            for fm, fc in tail:
                nm = tuple([x + y for x, y in zip(t, fm)])
                v = p.get(nm)
                if v is None:
                    p[nm] = -tc * fc
                    heapq.heappush(heap, (tuple([-k for k in key(nm)]), nm))
                else:
                    v = v - tc * fc
                    if v:
                        p[nm] = v
                    else:
                        del p[nm]
        else:
            if exact:
                raise NotDivisible("polynomial is not divisible")
            rem[m] = c
    n = g.nvars
    return Polynomial._raw(n, quot), Polynomial._raw(n, rem)


def divide_with_remainder(g: Polynomial, f: Polynomial, order: MonomialOrder = LEX):
    """Multivariate division of ``g`` by the single divisor ``f``.

    Returns ``(q, r)`` with ``g == q*f + r`` and no monomial of ``r``
    divisible by the leading monomial of ``f``.  For a single divisor the
    remainder vanishes exactly when ``f`` divides ``g``.
    """
    return _divide(g, f, order, exact=False)


def exact_divide(g: Polynomial, f: Polynomial, order: MonomialOrder = LEX) -> Polynomial:
    """Quotient ``g / f``; raises :class:`NotDivisible` if it is not a polynomial."""
    return _divide(g, f, order, exact=True)[0]


def divides(f: Polynomial, g: Polynomial) -> bool:
    try:
        _divide(g, f, LEX, exact=True)
    except NotDivisible:
        return False
    return True


# ---------------------------------------------------------------------------
# substitution, grading, derivatives


def evaluate(p: Polynomial, point: Sequence) -> mpq:
    if len(point) != p.nvars:
        raise DimensionMismatch(f"point has {len(point)} coordinates, expected {p.nvars}")
    pt = [Q(v) for v in point]
    total = mpq(0)
    for mono, c in p._terms.items():
        t = c
        for v, e in zip(pt, mono):
            if e:
                t *= v ** e
        total += t
    return total


class _PowerCache:
    def __init__(self, base: Polynomial):
        self.powers = [Polynomial.one(base.nvars), base]

    def __getitem__(self, k):
        pw = self.powers
        while len(pw) <= k:
            pw.append(pw[-1] * pw[1])
        return pw[k]


def substitute_rational_map(p: Polynomial, numerators: Sequence[Polynomial],
                            denominator: Polynomial, clearing_power: int) -> Polynomial:
    """``denominator**clearing_power * p(numerators / denominator)``.

    If ``clearing_power`` is below ``deg p`` the result is still returned when
    the division happens to be exact; otherwise :class:`ClearingFailed`.
    """
    if len(numerators) != p.nvars:
        raise DimensionMismatch(f"need {p.nvars} images, got {len(numerators)}")
    target = denominator.nvars
    if any(q.nvars != target for q in numerators):
        raise DimensionMismatch("images live in different rings")
    if clearing_power < 0:
        raise ValueError("clearing power must be non-negative")
    if p.is_zero():
        return Polynomial.zero(target)
    top = max(p.degree(), clearing_power)
    num_pows = [_PowerCache(q) for q in numerators]
    den_pows = _PowerCache(denominator)
    acc = Polynomial.zero(target)
    for mono, c in p._terms.items():
        term = den_pows[top - sum(mono)].scale(c)
        for cache, e in zip(num_pows, mono):
            if e:
                term = term * cache[e]
        acc = acc + term
    if top == clearing_power:
        return acc
    try:
        return exact_divide(acc, den_pows[top - clearing_power])
    except NotDivisible:
        raise ClearingFailed(
            f"clearing power {clearing_power} does not clear denominators of a degree {p.degree()} polynomial"
        ) from None


def compose(p: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Substitute polynomial ``images`` for the variables of ``p``."""
    if not images:
        return p
    one = Polynomial.one(images[0].nvars)
    return substitute_rational_map(p, images, one, max(p.degree(), 0))


def grading(p: Polynomial):
    """Homogeneous parts of ``p`` as ``[(degree, part), ...]`` in increasing degree."""
    parts = {}
    for mono, c in p._terms.items():
        parts.setdefault(sum(mono), {})[mono] = c
    return [(d, Polynomial._raw(p.nvars, parts[d])) for d in sorted(parts)]


def homogeneous_part(p: Polynomial, degree: int) -> Polynomial:
    return Polynomial._raw(p.nvars, {m: c for m, c in p._terms.items() if sum(m) == degree})


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    if not 0 <= i < p.nvars:
        raise IndexError(f"variable index {i} out of range for {p.nvars} variables")
    res = {}
    for mono, c in p._terms.items():
        e = mono[i]
        if e:
            m = list(mono)
            m[i] = e - 1
            res[tuple(m)] = c * e
    return Polynomial._raw(p.nvars, res)


def gradient(p: Polynomial):
    return tuple(partial_derivative(p, i) for i in range(p.nvars))


def content(p: Polynomial) -> mpq:
    """Positive rational c such that p/c has coprime integer coefficients."""
    if p.is_zero():
        return mpq(0)
    from math import gcd, lcm

    nums = [int(c.numerator) for c in p._terms.values()]
    dens = [int(c.denominator) for c in p._terms.values()]
    g = 0
    for v in nums:
        g = gcd(g, v)
    return mpq(g, lcm(*dens))


def primitive(p: Polynomial) -> Polynomial:
    """``p`` scaled to coprime integer coefficients with positive leading coefficient (grlex)."""
    if p.is_zero():
        return p
    q = p.scale(1 / content(p))
    if q.leading_term(GRLEX)[1] < 0:
        q = -q
    return q


# ---------------------------------------------------------------------------
# text format


def _format_monomial(mono, prefix):
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(f"{prefix}{i + 1}")
        elif e > 1:
            parts.append(f"{prefix}{i + 1}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial, prefix: str = "x") -> str:
    if p.is_zero():
        return "0"
    out = []
    for mono in sorted(p._terms, key=GRLEX.key, reverse=True):
        c = p._terms[mono]
        body = _format_monomial(mono, prefix)
        neg = c < 0
        a = -c if neg else c
        if not body:
            s = str(a)
        elif a == 1:
            s = body
        else:
            s = f"{a}*{body}"
        if not out:
            out.append(("-" if neg else "") + s)
        else:
            out.append((" - " if neg else " + ") + s)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]+)(\d+)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(0) + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("var", (m.group(2), int(m.group(3))), start))
        else:
            op = m.group(4)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end(0)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text, nvars, prefix):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefix = prefix
        if nvars is None:
            idx = [t[1][1] for t in self.tokens if t[0] == "var"]
            nvars = max(idx, default=1)
        self.nvars = nvars

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty polynomial")
        p = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        sign = 1
        tok = self.peek()
        if tok == ("op", "-", tok[2]) or tok == ("op", "+", tok[2]):
            self.take()
            sign = -1 if tok[1] == "-" else 1
        acc = self.term().scale(sign)
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                t = self.term()
                acc = acc + t if tok[1] == "+" else acc - t
            else:
                return acc

    def term(self):
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.error("exponent must be a non-negative integer", tok)
            base = base ** tok[1]
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                den = self.take()
                if den[0] != "num" or den[1] == 0:
                    self.error("expected a nonzero integer denominator", den)
                return Polynomial.constant(mpq(val, den[1]), self.nvars)
            return Polynomial.constant(val, self.nvars)
        if kind == "var":
            name, idx = val
            if name != self.prefix:
                self.error(f"unknown variable {name}{idx} (expected {self.prefix}1..{self.prefix}{self.nvars})", tok)
            if not 1 <= idx <= self.nvars:
                self.error(f"variable {name}{idx} out of range 1..{self.nvars}", tok)
            return Polynomial.var(idx - 1, self.nvars)
        if kind == "op" and val == "(":
            inner = self.expr()
            close = self.take()
            if close[0] != "op" or close[1] != ")":
                self.error("expected ')'", close)
            return inner
        if kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected token {val!r}", tok)


def parse_polynomial(text: str, nvars: int | None = None, prefix: str = "x") -> Polynomial:
    """Parse ``text`` such as ``"3/2*x1^2*x3 - x2 + 1"``.

    Parentheses and products of sums are accepted as a convenience; the
    printer only ever emits flat signed sums of terms.
    """
    return _Parser(text, nvars, prefix).parse()
