"""Exact multivariate polynomials over the rationals.

A :class:`PolyRing` is just an ordered tuple of variable names.  A :class:`Poly`
maps dense exponent tuples to nonzero :class:`fractions.Fraction` coefficients,
so equal polynomials always have identical term maps.  Canonical printing uses
graded-lexicographic order (in the declared variable order), highest term first.

The recursive-descent expression parser lives here as well; the enveloping
algebra parser in :mod:`algebroid_kit.uepbw` reuses it with a different
algebra of atoms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (DivisionByZero, ExpressionSyntaxError, NonConstantDivisor, NotDivisible,
                     RingMismatch, UnknownVariable)

Rational = Fraction

IDENTIFIER = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class PolyRing:
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        for name in self.variables:
            if not IDENTIFIER.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise UnknownVariable(name) from None

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {self.unit_exponent(): Fraction(1)})

    def const(self, c) -> "Poly":
        c = Fraction(c)
        return Poly(self, {self.unit_exponent(): c} if c else {})

    def var(self, name_or_index) -> "Poly":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        exp = [0] * self.nvars
        exp[i] = 1
        return Poly(self, {tuple(exp): Fraction(1)})

    def gens(self) -> tuple["Poly", ...]:
        return tuple(self.var(i) for i in range(self.nvars))

    def unit_exponent(self) -> tuple[int, ...]:
        return (0,) * self.nvars

    def parse(self, text: str) -> "Poly":
        return poly_parse(self, text)

    def __str__(self):
        return "Q[" + ", ".join(self.variables) + "]"


def grlex_key(exp: Sequence[int]):
    return (sum(exp), tuple(exp))


class Poly:
    """Immutable polynomial; arithmetic with ints and Fractions coerces to constants."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple[int, ...], object] | None = None):
        self.ring = ring
        clean = {}
        if terms:
            n = ring.nvars
            for exp, c in terms.items():
                c = c if isinstance(c, Fraction) else Fraction(c)
                if c:
                    exp = tuple(exp)
                    if len(exp) != n or any(e < 0 for e in exp):
                        raise ValueError(f"bad exponent {exp} for {ring}")
                    clean[exp] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self.ring.unit_exponent() in self._terms)

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial (raises ValueError otherwise)."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get(self.ring.unit_exponent(), Fraction(0))

    def coefficient(self, exp) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def leading_term(self):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self._terms, key=grlex_key)
        return exp, self._terms[exp]

    def weighted_degrees(self, weights: Sequence[int]) -> set[int]:
        return {sum(w * e for w, e in zip(weights, exp)) for exp in self._terms}

    def homogeneous_weight(self, weights: Sequence[int]):
        """The common weight of all terms, None for the zero polynomial; raises if mixed."""
        ws = self.weighted_degrees(weights)
        if not ws:
            return None
        if len(ws) > 1:
            raise ValueError(f"{self} is not weight-homogeneous (weights {sorted(ws)})")
        return ws.pop()

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for exp, c in self._terms.items():
            t = c
            for x, e in zip(point, exp):
                if e:
                    t *= Fraction(x) ** e
            total += t
        return total

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for exp, c in other._terms.items():
            v = out.get(exp, 0) + c
            if v:
                out[exp] = v
            else:
                out.pop(exp, None)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.ring, {e: -c for e, c in self._terms.items()})

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
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return Poly._raw(self.ring, {})
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly._raw(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return self.ring.zero()
        return Poly._raw(self.ring, {e: v * c for e, v in self._terms.items()})

    def diff(self, i: int) -> "Poly":
        """Partial derivative with respect to variable number i."""
        out = {}
        for exp, c in self._terms.items():
            k = exp[i]
            if k:
                e = list(exp)
                e[i] = k - 1
                out[tuple(e)] = c * k
        return Poly._raw(self.ring, out)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # -- printing ---------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({str(self)!r})"


def _format_monomial(ring: PolyRing, exp) -> str:
    parts = []
    for name, e in zip(ring.variables, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_term(ring: PolyRing, exp, c: Fraction, extra: str = "") -> str:
    """Unsigned rendering of |c| * monomial * extra (extra is an already-formatted factor)."""
    mono = "*".join(p for p in (_format_monomial(ring, exp), extra) if p)
    a = abs(c)
    if not mono:
        return _format_fraction(a)
    if a == 1:
        return mono
    return f"{_format_fraction(a)}*{mono}"


def join_signed(pieces: Iterable[tuple[bool, str]]) -> str:
    out = []
    for negative, text in pieces:
        if not out:
            out.append(("-" if negative else "") + text)
        else:
            out.append((" - " if negative else " + ") + text)
    return "".join(out) if out else "0"


def format_poly(p: Poly) -> str:
    return join_signed((c < 0, format_term(p.ring, exp, c)) for exp, c in p.sorted_terms())


def format_combination(pairs) -> str:
    """Expanded rendering of sum coef*label over (Poly, label) pairs; an empty label means a scalar slot."""
    return join_signed((c < 0, format_term(p.ring, exp, c, label))
                       for p, label in pairs for exp, c in p.sorted_terms())


# -- expression parsing ------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExpressionSyntaxError(text, m.start(3), "an operator, number, name or parenthesis")
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


@dataclass
class ExpressionAlgebra:
    """Callbacks that give meaning to parsed expressions."""

    const: Callable[[Fraction], object]
    atom: Callable[[str], object]
    as_constant: Callable[[object], Fraction | None]
    power: Callable[[object, int], object] = lambda a, k: a ** k


class ExpressionParser:
    """Recursive descent over the polynomial expression grammar.

        expr   := term (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*      -- divisor must be a constant
        factor := '-' factor | base ('^' uint)?
        base   := uint | name | '(' expr ')'
    """

    def __init__(self, algebra: ExpressionAlgebra):
        self.algebra = algebra

    def parse(self, text: str):
        self._text = text
        self._tokens = _tokenize(text)
        self._i = 0
        value = self._expr()
        kind, tok, pos = self._peek()
        if kind != "end":
            raise ExpressionSyntaxError(text, pos, "an operator or end of input")
        return value

    def _peek(self):
        return self._tokens[self._i]

    def _next(self):
        tok = self._tokens[self._i]
        self._i += 1
        return tok

    def _expr(self):
        value = self._term()
        while True:
            kind, tok, _ = self._peek()
            if kind == "op" and tok in "+-":
                self._next()
                rhs = self._term()
                value = value + rhs if tok == "+" else value - rhs
            else:
                return value

    def _term(self):
        value = self._factor()
        while True:
            kind, tok, pos = self._peek()
            if kind == "op" and tok == "*":
                self._next()
                value = value * self._factor()
            elif kind == "op" and tok == "/":
                self._next()
                _, _, dpos = self._peek()
                divisor = self._factor()
                c = self.algebra.as_constant(divisor)
                if c is None:
                    raise NonConstantDivisor(f"division by non-constant expression at position {dpos} in {self._text!r}")
                if c == 0:
                    raise DivisionByZero(f"division by zero at position {dpos} in {self._text!r}")
                value = value * self.algebra.const(1 / c)
            else:
                return value

    def _factor(self):
        kind, tok, _ = self._peek()
        if kind == "op" and tok == "-":
            self._next()
            return -self._factor()
        base = self._base()
        kind, tok, pos = self._peek()
        if kind == "op" and tok == "^":
            self._next()
            kind, tok, pos = self._next()
            if kind != "num":
                raise ExpressionSyntaxError(self._text, pos, "an unsigned integer exponent")
            return self.algebra.power(base, int(tok))
        return base

    def _base(self):
        kind, tok, pos = self._next()
        if kind == "num":
            return self.algebra.const(Fraction(int(tok)))
        if kind == "name":
            return self.algebra.atom(tok)
        if kind == "op" and tok == "(":
            value = self._expr()
            kind, tok, pos = self._next()
            if not (kind == "op" and tok == ")"):
                raise ExpressionSyntaxError(self._text, pos, "')'")
            return value
        raise ExpressionSyntaxError(self._text, pos, "a number, name, '-' or '('")


def _poly_algebra(ring: PolyRing) -> ExpressionAlgebra:
    return ExpressionAlgebra(
        const=ring.const,
        atom=ring.var,
        as_constant=lambda p: p.constant_value() if p.is_constant() else None,
    )


def poly_parse(ring: PolyRing, text: str) -> Poly:
    return ExpressionParser(_poly_algebra(ring)).parse(text)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def _divides(e1, e2) -> bool:
    return all(a <= b for a, b in zip(e1, e2))


def poly_divide_exact(a: Poly, b: Poly) -> Poly:
    """Return q with a == q*b, raising NotDivisible when no such q exists.

    Single-divisor division under grlex: {b} is a Groebner basis of (b), so the
    remainder vanishes exactly when b divides a.
    """
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if b.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    lead_e, lead_c = b.leading_term()
    p = a
    quotient: dict = {}
    remainder: dict = {}
    while p:
        e, c = p.leading_term()
        if _divides(lead_e, e):
            qe = tuple(x - y for x, y in zip(e, lead_e))
            qc = c / lead_c
            quotient[qe] = quotient.get(qe, 0) + qc
            p = p - Poly._raw(a.ring, {qe: qc}) * b
        else:
            remainder[e] = c
            p = p - Poly._raw(a.ring, {e: c})
    if remainder:
        raise NotDivisible(a, b, Poly(a.ring, remainder))
    return Poly(a.ring, quotient)


class Derivation:
    """A derivation sum_j components[j] * d/dx_j of a polynomial ring."""

    __slots__ = ("ring", "components")

    def __init__(self, ring: PolyRing, components: Sequence[Poly]):
        components = tuple(components)
        if len(components) != ring.nvars:
            raise ValueError(f"derivation needs {ring.nvars} components, got {len(components)}")
        for c in components:
            if c.ring != ring:
                raise RingMismatch(f"{c.ring} vs {ring}")
        self.ring = ring
        self.components = components

    @classmethod
    def zero(cls, ring: PolyRing) -> "Derivation":
        return cls(ring, [ring.zero()] * ring.nvars)

    @classmethod
    def partial(cls, ring: PolyRing, i: int) -> "Derivation":
        return cls(ring, [ring.one() if j == i else ring.zero() for j in range(ring.nvars)])

    def __call__(self, f: Poly) -> Poly:
        return derivation_apply(self, f)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.ring, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.ring, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return Derivation(self.ring, [-a for a in self.components])

    def scale(self, f) -> "Derivation":
        """Multiply by a function (Poly) or a scalar."""
        return Derivation(self.ring, [f * a for a in self.components])

    def commutator(self, other: "Derivation") -> "Derivation":
        """[self, other]_c = self∘other - other∘self, again a derivation."""
        return Derivation(self.ring, [self(b) - other(a) for a, b in zip(self.components, other.components)])

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.ring == other.ring and self.components == other.components

    def __hash__(self):
        return hash((self.ring, self.components))

    def __str__(self):
        pieces = []
        for name, c in zip(self.ring.variables, self.components):
            if c:
                pieces.append(f"({c})*d{name}")
        return " + ".join(pieces) if pieces else "0"

    __repr__ = __str__


def derivation_apply(D: Derivation, f: Poly) -> Poly:
    if D.ring != f.ring:
        raise RingMismatch(f"{D.ring} vs {f.ring}")
    out = f.ring.zero()
    for i, c in enumerate(D.components):
        if c:
            df = f.diff(i)
            if df:
                out = out + c * df
    return out


def monomials_of_weight(weights: Sequence[int], w: int):
    """All exponent tuples with sum(weights[i]*e[i]) == w; every weight must be >= 1."""
    n = len(weights)
    if w < 0:
        return []
    out = []

    def rec(i, remaining, prefix):
        if i == n:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        wi = weights[i]
        for e in range(remaining // wi + 1):
            prefix.append(e)
            rec(i + 1, remaining - e * wi, prefix)
            prefix.pop()

    rec(0, w, [])
    return out
