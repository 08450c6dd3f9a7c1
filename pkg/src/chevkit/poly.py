"""Exact polynomial arithmetic over the rationals.

Polynomials are dicts from exponent tuples to Fractions; everything stays
exact, there is no floating point anywhere in this module.  Truncated series
wrap the same representation together with the degree past which terms have
been discarded, so that downstream code can refuse to read coefficients it
does not actually know.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import comb, prod

from .errors import InputError, TruncationError
from .indices import degree, index_add, indices_up_to, mono_key

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(text):
    """Parse 'p' or 'p/q' into a Fraction.  Floats are rejected on purpose."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise InputError(f"not an exact rational: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise InputError(f"zero denominator in {text!r}") from None


class Poly:
    """A polynomial in `arity` variables with Fraction coefficients."""

    __slots__ = ("arity", "terms")

    def __init__(self, arity, terms=None):
        if arity < 1:
            raise InputError(f"arity must be positive, got {arity}")
        self.arity = arity
        clean = {}
        if terms:
            for beta, c in terms.items():
                if len(beta) != arity:
                    raise InputError(
                        f"exponent {beta} has arity {len(beta)}, expected {arity}"
                    )
                if any(b < 0 for b in beta):
                    raise InputError(f"negative exponent in {beta}")
                c = Fraction(c)
                if c:
                    clean[tuple(beta)] = c
        self.terms = clean

    # construction helpers

    @classmethod
    def zero(cls, arity):
        return cls(arity)

    @classmethod
    def constant(cls, arity, c):
        return cls(arity, {(0,) * arity: Fraction(c)})

    @classmethod
    def variable(cls, arity, i):
        if not 0 <= i < arity:
            raise InputError(f"variable index {i} out of range for arity {arity}")
        beta = tuple(1 if j == i else 0 for j in range(arity))
        return cls(arity, {beta: Fraction(1)})

    @classmethod
    def monomial(cls, beta, c=1):
        return cls(len(beta), {tuple(beta): Fraction(c)})

    # predicates and views

    def is_zero(self):
        return not self.terms

    def coeff(self, beta):
        return self.terms.get(tuple(beta), Fraction(0))

    def total_degree(self):
        """Degree of the polynomial, or -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(degree(b) for b in self.terms)

    def order(self):
        """Order of vanishing at the origin; None for the zero polynomial."""
        if not self.terms:
            return None
        return min(degree(b) for b in self.terms)

    def support(self):
        return sorted(self.terms, key=mono_key)

    # arithmetic

    def _check_same_arity(self, other):
        if self.arity != other.arity:
            raise InputError(
                f"arity mismatch: {self.arity} vs {other.arity}"
            )

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.arity, other)
        self._check_same_arity(other)
        terms = dict(self.terms)
        for b, c in other.terms.items():
            s = terms.get(b, Fraction(0)) + c
            if s:
                terms[b] = s
            else:
                terms.pop(b, None)
        out = Poly.__new__(Poly)
        out.arity = self.arity
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly.__new__(Poly)
        out.arity = self.arity
        out.terms = {b: -c for b, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.arity, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            out = Poly.__new__(Poly)
            out.arity = self.arity
            out.terms = {b: c * v for b, v in self.terms.items()} if c else {}
            return out
        self._check_same_arity(other)
        terms = {}
        for b1, c1 in self.terms.items():
            for b2, c2 in other.terms.items():
                b = index_add(b1, b2)
                s = terms.get(b, Fraction(0)) + c1 * c2
                if s:
                    terms[b] = s
                else:
                    terms.pop(b, None)
        out = Poly.__new__(Poly)
        out.arity = self.arity
        out.terms = terms
        return out

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise InputError("negative powers are not defined for polynomials")
        result = Poly.constant(self.arity, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def scale(self, c):
        return self * c

    # evaluation and substitution

    def eval(self, point):
        if len(point) != self.arity:
            raise InputError(
                f"point has {len(point)} coordinates, expected {self.arity}"
            )
        point = tuple(Fraction(p) for p in point)
        total = Fraction(0)
        for b, c in self.terms.items():
            total += c * prod(p**e for p, e in zip(point, b) if e)
        return total

    def compose(self, args):
        """Substitute args[i] for variable i.  Args share one arity."""
        if len(args) != self.arity:
            raise InputError(
                f"expected {self.arity} substitution arguments, got {len(args)}"
            )
        if not args:
            raise InputError("cannot compose with an empty argument list")
        inner_arity = args[0].arity
        for a in args:
            if a.arity != inner_arity:
                raise InputError("substitution arguments have mixed arities")
        result = Poly.zero(inner_arity)
        # cache powers of each argument as they are needed
        powers = [{0: Poly.constant(inner_arity, 1)} for _ in args]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * args[i]
            return cache[e]

        for b, c in self.terms.items():
            term = Poly.constant(inner_arity, c)
            for i, e in enumerate(b):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def shift(self, point):
        """Recenter at `point`: returns q with q(x) = p(x + point)."""
        if len(point) != self.arity:
            raise InputError(
                f"point has {len(point)} coordinates, expected {self.arity}"
            )
        point = tuple(Fraction(p) for p in point)
        args = [
            Poly.variable(self.arity, i) + Poly.constant(self.arity, point[i])
            for i in range(self.arity)
        ]
        return self.compose(args)

    def scaled_derivative(self, beta):
        """Taylor-coefficient extractor: apply (1/beta!) * d^beta.

        The coefficient of x^alpha in the result is comb-weighted so that
        evaluating at a point a gives exactly the x^beta coefficient of the
        expansion of the polynomial around a.
        """
        if len(beta) != self.arity:
            raise InputError(
                f"derivative index {beta} has wrong arity for {self.arity} variables"
            )
        terms = {}
        for alpha, c in self.terms.items():
            if not all(a >= b for a, b in zip(alpha, beta)):
                continue
            w = c * prod(comb(a, b) for a, b in zip(alpha, beta))
            if w:
                terms[tuple(a - b for a, b in zip(alpha, beta))] = w
        return Poly(self.arity, terms)

    def truncate(self, d):
        """Drop all terms of degree > d, returning a TruncatedSeries."""
        kept = {b: c for b, c in self.terms.items() if degree(b) <= d}
        return TruncatedSeries(self.arity, kept, d, _exact=True)

    def taylor(self, point, d):
        """Taylor expansion around `point`, truncated past degree d."""
        return self.shift(point).truncate(d)

    def __repr__(self):
        return f"Poly({format_poly(self)})"


class TruncatedSeries:
    """A polynomial known only up to a stated degree.

    Arithmetic narrows the truncation degree the way interval arithmetic
    narrows intervals: the result is only claimed up to the degree both
    operands support.  Reading past trunc_degree raises TruncationError.
    """

    __slots__ = ("arity", "terms", "trunc_degree")

    def __init__(self, arity, terms, trunc_degree, _exact=False):
        if trunc_degree < 0:
            raise InputError(f"truncation degree must be >= 0, got {trunc_degree}")
        self.arity = arity
        self.trunc_degree = trunc_degree
        if _exact:
            self.terms = terms
        else:
            clean = {}
            for beta, c in terms.items():
                if len(beta) != arity:
                    raise InputError(
                        f"exponent {beta} has arity {len(beta)}, expected {arity}"
                    )
                if degree(beta) > trunc_degree:
                    raise InputError(
                        f"term {beta} exceeds truncation degree {trunc_degree}"
                    )
                c = Fraction(c)
                if c:
                    clean[tuple(beta)] = c
            self.terms = clean

    @classmethod
    def constant(cls, arity, c, d):
        terms = {}
        c = Fraction(c)
        if c:
            terms[(0,) * arity] = c
        return cls(arity, terms, d, _exact=True)

    def coeff(self, beta):
        if degree(beta) > self.trunc_degree:
            raise TruncationError(
                f"coefficient at {beta} lies past truncation degree {self.trunc_degree}"
            )
        return self.terms.get(tuple(beta), Fraction(0))

    def coeff_vector(self, d=None):
        """Coefficients at all indices of degree <= d, in the shared order."""
        if d is None:
            d = self.trunc_degree
        if d > self.trunc_degree:
            raise TruncationError(
                f"requested degree {d} exceeds truncation degree {self.trunc_degree}"
            )
        return [self.terms.get(b, Fraction(0)) for b in indices_up_to(self.arity, d)]

    def order(self):
        if not self.terms:
            return None
        return min(degree(b) for b in self.terms)

    def _common_degree(self, other):
        if self.arity != other.arity:
            raise InputError(
                f"arity mismatch: {self.arity} vs {other.arity}"
            )
        return min(self.trunc_degree, other.trunc_degree)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.arity == other.arity
            and self.trunc_degree == other.trunc_degree
            and self.terms == other.terms
        )

    def __add__(self, other):
        d = self._common_degree(other)
        terms = {b: c for b, c in self.terms.items() if degree(b) <= d}
        for b, c in other.terms.items():
            if degree(b) > d:
                continue
            s = terms.get(b, Fraction(0)) + c
            if s:
                terms[b] = s
            else:
                terms.pop(b, None)
        return TruncatedSeries(self.arity, terms, d, _exact=True)

    def __sub__(self, other):
        d = self._common_degree(other)
        terms = {b: c for b, c in self.terms.items() if degree(b) <= d}
        for b, c in other.terms.items():
            if degree(b) > d:
                continue
            s = terms.get(b, Fraction(0)) - c
            if s:
                terms[b] = s
            else:
                terms.pop(b, None)
        return TruncatedSeries(self.arity, terms, d, _exact=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            terms = {b: c * v for b, v in self.terms.items()} if c else {}
            return TruncatedSeries(self.arity, terms, self.trunc_degree, _exact=True)
        d = self._common_degree(other)
        terms = {}
        for b1, c1 in self.terms.items():
            d1 = degree(b1)
            if d1 > d:
                continue
            for b2, c2 in other.terms.items():
                if d1 + degree(b2) > d:
                    continue
                b = index_add(b1, b2)
                s = terms.get(b, Fraction(0)) + c1 * c2
                if s:
                    terms[b] = s
                else:
                    terms.pop(b, None)
        return TruncatedSeries(self.arity, terms, d, _exact=True)

    __rmul__ = __mul__

    def to_poly(self):
        return Poly(self.arity, self.terms)

    def __repr__(self):
        return f"TruncatedSeries({format_poly(self)}, trunc={self.trunc_degree})"


def map_power(series_list, beta, d):
    """Product series_list[0]^beta[0] * ... truncated past degree d.

    Every factor must already be truncated at >= d; the result is exact in
    degrees <= d because truncation commutes with multiplication there.
    """
    if len(series_list) != len(beta):
        raise InputError(
            f"power index {beta} does not match {len(series_list)} series"
        )
    arity = series_list[0].arity if series_list else 1
    result = TruncatedSeries.constant(arity, 1, d)
    for s, e in zip(series_list, beta):
        if s.trunc_degree < d:
            raise TruncationError(
                f"factor truncated at {s.trunc_degree}, need degree {d}"
            )
        for _ in range(e):
            result = result * s
    return result


def var_names(arity, names=None):
    if names is not None:
        if len(names) != arity:
            raise InputError(
                f"got {len(names)} variable names for arity {arity}"
            )
        return list(names)
    return [f"x{i + 1}" for i in range(arity)]


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+/\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*^()]))"
)


def _tokenize(text):
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise InputError(f"cannot tokenize polynomial near {rest[:20]!r}")
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive-descent parser for +, -, *, ^ (or **), parentheses.

    Adjacent factors multiply implicitly, so '2x y^2' works.  Exponents must
    be literal nonnegative integers.
    """

    def __init__(self, tokens, arity, names, aliases=None):
        self.tokens = tokens
        self.pos = 0
        self.arity = arity
        self.index = {n: i for i, n in enumerate(names)}
        if aliases:
            for alias, target in aliases.items():
                if target not in self.index:
                    raise InputError(
                        f"alias target {target!r} is not a variable name"
                    )
                self.index[alias] = self.index[target]

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def parse(self):
        p = self.expr()
        if self.peek() is not None:
            raise InputError(f"unexpected trailing token {self.peek()[1]!r}")
        return p

    def expr(self):
        sign = 1
        t = self.peek()
        while t and t[0] == "op" and t[1] in "+-":
            if t[1] == "-":
                sign = -sign
            self.take()
            t = self.peek()
        p = self.term() * sign
        while True:
            t = self.peek()
            if t is None or t[0] != "op" or t[1] not in "+-":
                break
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while True:
            t = self.peek()
            if t is None:
                break
            if t[0] == "op" and t[1] == "*":
                self.take()
                p = p * self.factor()
            elif t[0] in ("num", "name") or (t[0] == "op" and t[1] == "("):
                p = p * self.factor()
            else:
                break
        return p

    def factor(self):
        base = self.atom()
        t = self.peek()
        if t and t[0] == "op" and t[1] in ("^", "**"):
            self.take()
            e = self.take()
            if e is None or e[0] != "num" or "/" in e[1]:
                raise InputError("exponent must be a nonnegative integer literal")
            return base ** int(e[1])
        return base

    def atom(self):
        t = self.take()
        if t is None:
            raise InputError("unexpected end of polynomial text")
        kind, val = t
        if kind == "num":
            # allow p/q only when it forms a single rational literal
            try:
                return Poly.constant(self.arity, Fraction(val))
            except ZeroDivisionError:
                raise InputError(f"zero denominator in {val!r}") from None
        if kind == "name":
            if val not in self.index:
                raise InputError(f"unknown variable {val!r}")
            return Poly.variable(self.arity, self.index[val])
        if kind == "op" and val == "(":
            p = self.expr()
            t = self.take()
            if t is None or t[1] != ")":
                raise InputError("unbalanced parenthesis")
            return p
        if kind == "op" and val == "-":
            return -self.atom()
        raise InputError(f"unexpected token {val!r}")


def parse_poly(text, arity, names=None, aliases=None):
    """Parse polynomial text like '2x1^2 - x2*x3 + 1/2' exactly.

    aliases maps extra accepted names to canonical variable names (used to
    accept bare 'x' for 'x1' in one-variable maps).
    """
    names = var_names(arity, names)
    tokens = _tokenize(text)
    if not tokens:
        raise InputError("empty polynomial text")
    return _Parser(tokens, arity, names, aliases).parse()


def format_poly(p, names=None):
    """Render a Poly or TruncatedSeries in the shared monomial order."""
    names = var_names(p.arity, names)
    if not p.terms:
        return "0"
    parts = []
    for beta in sorted(p.terms, key=mono_key):
        c = p.terms[beta]
        mono = "*".join(
            n if e == 1 else f"{n}^{e}" for n, e in zip(names, beta) if e
        )
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)
