"""Exact arithmetic: rationals, polynomials in the contraction ratio, affine maps.

Rationals are :class:`fractions.Fraction` (canonical, arbitrary precision).
Translation coefficients are polynomials in the symbol ``l`` (the ratio)
with rational coefficients; the input grammar is::

    expr     := term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' uint)?
    atom     := 'l' | rational | '(' expr ')'
    rational := int ('/' uint)?

A leading unary minus on a term is accepted (``-l``, ``1 - -l`` is not).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction

__all__ = [
    "Rational",
    "LambdaPoly",
    "ExprSyntaxError",
    "DimensionMismatch",
    "Affine",
    "parse_expr",
    "poly_eval",
    "poly_compose_affine",
    "as_rational",
]


def as_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Coerce an int, ``"p/q"`` string or Fraction to a Fraction (no floats)."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an exact 'p/q' string")
    return Fraction(value)


class LambdaPoly:
    """Polynomial in ``l`` with Fraction coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def const(cls, c) -> "LambdaPoly":
        return cls([c])

    @classmethod
    def var(cls) -> "LambdaPoly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _coerce(self, other) -> "LambdaPoly":
        if isinstance(other, LambdaPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return LambdaPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return LambdaPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return LambdaPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return LambdaPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return LambdaPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = LambdaPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("LambdaPoly", self.coeffs))

    def __call__(self, lam) -> Fraction:
        return poly_eval(self, lam)

    def __repr__(self):
        return f"LambdaPoly({str(self)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for deg in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[deg]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if deg == 0:
                body = _fmt_rational(mag)
            else:
                mono = "l" if deg == 1 else f"l^{deg}"
                body = mono if mag == 1 else f"{_fmt_rational(mag)}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def poly_eval(p: LambdaPoly, lam) -> Fraction:
    """Horner evaluation at an exact rational ``lam``."""
    lam = Fraction(lam)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * lam + c
    return acc


class ExprSyntaxError(SyntaxError):
    """Malformed translation expression; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos
        self.offset = pos + 1


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise ExprSyntaxError(message, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def uint(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an unsigned integer")
        return int(self.text[start:self.pos])

    def parse(self) -> LambdaPoly:
        if not self.text.strip():
            self.error("empty expression")
        result = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return result

    def expr(self) -> LambdaPoly:
        negate = self.eat("-")
        acc = self.term()
        if negate:
            acc = -acc
        while True:
            if self.eat("+"):
                acc = acc + self.term()
            elif self.eat("-"):
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> LambdaPoly:
        acc = self.factor()
        while self.eat("*"):
            acc = acc * self.factor()
        return acc

    def factor(self) -> LambdaPoly:
        base = self.atom()
        if self.eat("^"):
            base = base ** self.uint()
        return base

    def atom(self) -> LambdaPoly:
        ch = self.peek()
        if ch == "l":
            self.pos += 1
            return LambdaPoly.var()
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if not self.eat(")"):
                self.error("expected ')'")
            return inner
        if ch.isdigit():
            num = self.uint()
            if self.eat("/"):
                self.skip()
                at = self.pos
                den = self.uint()
                if den == 0:
                    self.pos = at
                    self.error("zero denominator")
                return LambdaPoly.const(Fraction(num, den))
            return LambdaPoly.const(num)
        self.error("expected 'l', a number or '('" if ch else "unexpected end of input")


def parse_expr(text: str) -> LambdaPoly:
    """Parse a translation expression such as ``"l*(1-l)"``.

    Raises :class:`ExprSyntaxError` carrying the offending position.
    """
    return _Parser(text).parse()


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Affine:
    """The similitude ``x -> scale * x + shift`` on R^d."""

    scale: Fraction
    shift: tuple[Fraction, ...]

    @classmethod
    def identity(cls, dim: int) -> "Affine":
        return cls(Fraction(1), (Fraction(0),) * dim)

    @property
    def dim(self) -> int:
        return len(self.shift)

    def __call__(self, point: Sequence) -> tuple[Fraction, ...]:
        if len(point) != self.dim:
            raise DimensionMismatch(f"point has dim {len(point)}, map has dim {self.dim}")
        return tuple(self.scale * x + s for x, s in zip(point, self.shift))

    def then(self, outer: "Affine") -> "Affine":
        return poly_compose_affine(outer, self)


def poly_compose_affine(outer: Affine, inner: Affine) -> Affine:
    """Return ``outer o inner``."""
    if outer.dim != inner.dim:
        raise DimensionMismatch(f"cannot compose dim {outer.dim} with dim {inner.dim}")
    return Affine(
        outer.scale * inner.scale,
        tuple(outer.scale * t + s for t, s in zip(inner.shift, outer.shift)),
    )
