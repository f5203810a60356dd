"""Sparse multivariate polynomials over Q in X1..Xn, Y1..Y(n-1).

Terms are stored as ``{exponent tuple: Fraction}`` with no zero
coefficients. The monomial order is graded lexicographic with
X1 > X2 > ... > Xn > Y1 > ... > Y(n-1).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .exact import Sphere, as_rational

Exponent = Tuple[int, ...]


class PolynomialError(ValueError):
    pass


def _grlex_key(e: Exponent):
    return (sum(e), e)


class MultiPoly:
    __slots__ = ("n", "terms", "_degree")

    def __init__(self, n: int, terms: Mapping[Exponent, object] | None = None):
        if n < 2:
            raise PolynomialError("need at least two X variables")
        self.n = n
        nv = 2 * n - 1
        clean: Dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nv:
                raise PolynomialError(f"exponent {e} has wrong length for n={n}")
            c = as_rational(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean
        self._degree = max((sum(e) for e in clean), default=-1)

    # -- constructors --------------------------------------------------------
    @property
    def nvars(self) -> int:
        return 2 * self.n - 1

    @classmethod
    def constant(cls, n: int, c) -> "MultiPoly":
        return cls(n, {(0,) * (2 * n - 1): c})

    @classmethod
    def zero(cls, n: int) -> "MultiPoly":
        return cls(n)

    @classmethod
    def var(cls, n: int, name: str) -> "MultiPoly":
        e = [0] * (2 * n - 1)
        e[var_index(n, name)] = 1
        return cls(n, {tuple(e): 1})

    # -- basic structure -----------------------------------------------------
    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return self._degree

    def is_zero(self) -> bool:
        return not self.terms

    def y_free(self) -> bool:
        return all(not any(e[self.n:]) for e in self.terms)

    def variables_used(self) -> set:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def leading(self) -> Tuple[Exponent, Fraction]:
        if not self.terms:
            raise PolynomialError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(self.n, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MultiPoly({self.n}, {to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.n != self.n:
                raise PolynomialError("polynomials live in different rings")
            return other
        return MultiPoly.constant(self.n, as_rational(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolynomialError("negative power")
        result = MultiPoly.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result


def var_index(n: int, name: str) -> int:
    m = re.fullmatch(r"([XY])(\d+)", name)
    if not m:
        raise PolynomialError(f"bad variable name {name!r}")
    kind, idx = m.group(1), int(m.group(2))
    if kind == "X" and 1 <= idx <= n:
        return idx - 1
    if kind == "Y" and 1 <= idx <= n - 1:
        return n + idx - 1
    raise PolynomialError(f"variable {name} out of range for n={n}")


def var_name(n: int, i: int) -> str:
    return f"X{i + 1}" if i < n else f"Y{i - n + 1}"


def evaluate(p: MultiPoly, point: Sequence) -> Fraction:
    """Exact value at a point of length 2n-1 (or n, for Y-free polynomials)."""
    pt = [as_rational(v) for v in point]
    if len(pt) == p.n and p.y_free():
        pt = pt + [Fraction(0)] * (p.n - 1)
    if len(pt) != p.nvars:
        raise PolynomialError(f"point has {len(pt)} coordinates, polynomial needs {p.nvars}")
    total = Fraction(0)
    for e, c in p.terms.items():
        v = c
        for x, a in zip(pt, e):
            if a:
                v *= x ** a
        total += v
    return total


def partial_derivative(p: MultiPoly, var) -> MultiPoly:
    i = var_index(p.n, var) if isinstance(var, str) else int(var)
    out = {}
    for e, c in p.terms.items():
        if e[i]:
            f = list(e)
            f[i] -= 1
            out[tuple(f)] = c * e[i]
    return MultiPoly(p.n, out)


def sphere_poly(s: Sphere) -> MultiPoly:
    """S(X) = r^2 - sum (Xj - cj)^2."""
    n = s.dim
    p = MultiPoly.constant(n, s.radius ** 2)
    for j, c in enumerate(s.center):
        p = p - (MultiPoly.var(n, f"X{j + 1}") - c) ** 2
    return p


def q_poly(center: Sequence, j: int) -> MultiPoly:
    """Q_j(X, Y) = (Xn - cn) Yj - (Xj - cj), for 1 <= j <= n-1."""
    center = [as_rational(c) for c in center]
    n = len(center)
    xn = MultiPoly.var(n, f"X{n}") - center[-1]
    return xn * MultiPoly.var(n, f"Y{j}") - (MultiPoly.var(n, f"X{j}") - center[j - 1])


def tilde_substitute(p: MultiPoly, s: Sphere) -> MultiPoly:
    """Substitute Yj = (Xj - cj)/(Xn - cn) and clear by (Xn - cn)^deg p."""
    n = p.n
    if s.dim != n:
        raise PolynomialError("sphere and polynomial dimensions differ")
    if p.is_zero():
        return p
    deg = p.degree
    c = s.center
    xs = [MultiPoly.var(n, f"X{j + 1}") for j in range(n)]
    lin = [xs[j] - c[j] for j in range(n)]
    pow_cache: Dict[Tuple[int, int], MultiPoly] = {}

    def lin_pow(j, k):
        if (j, k) not in pow_cache:
            pow_cache[(j, k)] = lin[j] ** k
        return pow_cache[(j, k)]

    result = MultiPoly.zero(n)
    for e, coef in p.terms.items():
        xe, ye = e[:n], e[n:]
        term = MultiPoly(n, {tuple(xe) + (0,) * (n - 1): coef})
        for j, b in enumerate(ye):
            if b:
                term = term * lin_pow(j, b)
        term = term * lin_pow(n - 1, deg - sum(ye))
        result = result + term
    return result


def reduce(dividend: MultiPoly, divisor: MultiPoly) -> Tuple[MultiPoly, MultiPoly]:
    """Leading-term division by one polynomial; returns (quotient, remainder)."""
    if divisor.is_zero():
        raise PolynomialError("division by the zero polynomial")
    lt_e, lt_c = divisor.leading()
    p = dict(dividend.terms)
    quot: Dict[Exponent, Fraction] = {}
    rem: Dict[Exponent, Fraction] = {}
    while p:
        e = max(p, key=_grlex_key)
        c = p[e]
        if all(a >= b for a, b in zip(e, lt_e)):
            qe = tuple(a - b for a, b in zip(e, lt_e))
            qc = c / lt_c
            quot[qe] = quot.get(qe, Fraction(0)) + qc
            for de, dc in divisor.terms.items():
                te = tuple(a + b for a, b in zip(qe, de))
                v = p.get(te, Fraction(0)) - qc * dc
                if v:
                    p[te] = v
                else:
                    p.pop(te, None)
        else:
            rem[e] = c
            del p[e]
    return MultiPoly(dividend.n, quot), MultiPoly(dividend.n, rem)


def divides(divisor: MultiPoly, dividend: MultiPoly) -> bool:
    # one polynomial is always a Groebner basis of its ideal, so the
    # remainder is zero exactly when the division is exact
    return reduce(dividend, divisor)[1].is_zero()


# -- text format ---------------------------------------------------------------


def _mono_text(n: int, e: Exponent) -> str:
    parts = []
    for i, a in enumerate(e):
        if a == 1:
            parts.append(var_name(n, i))
        elif a > 1:
            parts.append(f"{var_name(n, i)}^{a}")
    return " * ".join(parts)


def to_text(p: MultiPoly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for e, c in p.sorted_terms():
        mono = _mono_text(p.n, e)
        out.append(f"{c} * {mono}" if mono else str(c))
    return " + ".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([XY]\d+)|(\^)|(\*)|(\+)|(-))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastindex
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


def parse_poly(text: str, n: int) -> MultiPoly:
    """Parse the canonical text format (and looser variants using '-')."""
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialError("empty polynomial text")
    i = 0

    def peek():
        return tokens[i][0] if i < len(tokens) else None

    def factor():
        nonlocal i
        kind, val = tokens[i]
        i += 1
        if kind == 1:
            return MultiPoly.constant(n, Fraction(val))
        if kind == 2:
            v = MultiPoly.var(n, val)
            if peek() == 3:
                i += 1
                if peek() != 1 or "/" in tokens[i][1]:
                    raise PolynomialError("exponent must be a nonnegative integer")
                k = int(tokens[i][1])
                i += 1
                return v ** k
            return v
        raise PolynomialError(f"unexpected token {val!r}")

    def term():
        nonlocal i
        sign = 1
        while peek() in (5, 6):
            if tokens[i][0] == 6:
                sign = -sign
            i += 1
        if peek() is None:
            raise PolynomialError("dangling operator")
        t = factor()
        while peek() == 4:
            i += 1
            t = t * factor()
        return t if sign > 0 else -t

    result = term()
    while i < len(tokens):
        kind = peek()
        if kind not in (5, 6):
            raise PolynomialError(f"expected + or -, got {tokens[i][1]!r}")
        i += 1
        t = term()
        result = result + t if kind == 5 else result - t
    return result


def from_linear(n: int, coeffs: Sequence, const=0, offset: int = 0) -> MultiPoly:
    """sum coeffs[k] * var(offset + k) + const."""
    p = MultiPoly.constant(n, const)
    for k, a in enumerate(coeffs):
        a = as_rational(a)
        if a:
            e = [0] * (2 * n - 1)
            e[offset + k] = 1
            p = p + MultiPoly(n, {tuple(e): a})
    return p


def x_monomials(n: int, degree: int) -> Iterable[Exponent]:
    """Exponent tuples in the X variables of total degree <= ``degree``, grlex ascending."""
    out = []

    def rec(prefix, remaining, k):
        if k == n:
            out.append(tuple(prefix))
            return
        for a in range(remaining + 1):
            rec(prefix + [a], remaining - a, k + 1)

    rec([], degree, 0)
    out.sort(key=_grlex_key)
    return out
