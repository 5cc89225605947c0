"""Exact arithmetic on ratios of integer polynomials in a formal infinite W.

An element num/den models a ratio of (possibly infinite) integers: W stands
for an arbitrary integer larger than every ordinary one, so classification is
decided by degree comparison, since W dominates any finite bound. Two notions of
sameness coexist: ``identical`` (exactly the same canonical ratio) and
``equal`` (difference at most infinitesimal). Canonical form divides out the
polynomial gcd and integer content and makes the denominator's leading
coefficient positive, so identity is plain tuple equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError

ZERO_CLASS = "zero"
INFINITESIMAL = "infinitesimal"
FINITE = "finite"
INFINITE = "infinite"

IntPoly = tuple[int, ...]


def _trim(c: Sequence[int]) -> IntPoly:
    out = [int(v) for v in c] or [0]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _is_zero(c: IntPoly) -> bool:
    return c == (0,)


def _add(a: IntPoly, b: IntPoly) -> IntPoly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _neg(a: IntPoly) -> IntPoly:
    return tuple(-v for v in a)


def _mul(a: IntPoly, b: IntPoly) -> IntPoly:
    if _is_zero(a) or _is_zero(b):
        return (0,)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _content(a: IntPoly) -> int:
    g = 0
    for v in a:
        g = math.gcd(g, abs(v))
    return g or 1


def _primitive(a: IntPoly) -> IntPoly:
    g = _content(a)
    return tuple(v // g for v in a)


def _pseudo_rem(a: IntPoly, b: IntPoly) -> IntPoly:
    """Fraction-free remainder of a by b (deg a >= deg b, b nonzero)."""
    a = list(a)
    lead_b = b[-1]
    while len(a) >= len(b) and not _is_zero(_trim(a)):
        shift = len(a) - len(b)
        lead_a = a[-1]
        a = [v * lead_b for v in a]
        for i, v in enumerate(b):
            a[shift + i] -= lead_a * v
        a = list(_trim(a))
        if a == [0]:
            break
    return _trim(a)


def _gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    a, b = _primitive(a), _primitive(b)
    if _is_zero(a):
        return b if not _is_zero(b) else (1,)
    if _is_zero(b):
        return a
    if len(a) == 1 or len(b) == 1:
        return (1,)
    while not _is_zero(b):
        if len(a) < len(b):
            a, b = b, a
            continue
        r = _pseudo_rem(a, b)
        a, b = b, _primitive(r) if not _is_zero(r) else (0,)
    if a[-1] < 0:
        a = _neg(a)
    return a


def _div_exact(a: IntPoly, b: IntPoly) -> IntPoly:
    """Exact polynomial division; a must be a polynomial multiple of b."""
    if _is_zero(a):
        return (0,)
    out = [0] * (len(a) - len(b) + 1)
    rem = list(a)
    for k in range(len(out) - 1, -1, -1):
        coef, extra = divmod(rem[k + len(b) - 1], b[-1])
        if extra:
            raise DomainError("inexact polynomial division")
        out[k] = coef
        for i, v in enumerate(b):
            rem[k + i] -= coef * v
    if any(rem):
        raise DomainError("inexact polynomial division")
    return _trim(out)


@dataclass(frozen=True)
class QStarElement:
    """Canonical ratio num/den of integer polynomials in W."""

    num: IntPoly
    den: IntPoly

    def __post_init__(self):
        num, den = _trim(self.num), _trim(self.den)
        if _is_zero(den):
            raise DomainError("denominator must not be the zero polynomial")
        if _is_zero(num):
            num, den = (0,), (1,)
        else:
            g = _gcd(num, den)
            if g != (1,):
                num, den = _div_exact(num, g), _div_exact(den, g)
            c = math.gcd(_content(num), _content(den))
            num = tuple(v // c for v in num)
            den = tuple(v // c for v in den)
            if den[-1] < 0:
                num, den = _neg(num), _neg(den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def is_zero(self) -> bool:
        return _is_zero(self.num)

    def _coerce(self, other):
        if isinstance(other, QStarElement):
            return other
        if isinstance(other, int):
            return QStarElement((other,), (1,))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QStarElement(
            _add(_mul(self.num, other.den), _mul(other.num, self.den)),
            _mul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return QStarElement(_neg(self.num), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QStarElement(_mul(self.num, other.num), _mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise DomainError("division by the zero element")
        return QStarElement(_mul(self.num, other.den), _mul(self.den, other.num))

    def __rtruediv__(self, other):
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return coerced.__truediv__(self)

    def reciprocal(self) -> "QStarElement":
        if self.is_zero:
            raise DomainError("the zero element has no reciprocal")
        return QStarElement(self.den, self.num)

    def sign(self) -> int:
        """Sign in the dominance order (the leading behavior as W grows)."""
        if self.is_zero:
            return 0
        return 1 if self.num[-1] > 0 else -1

    def __lt__(self, other):
        other = self._coerce(other)
        return (self - other).sign() < 0

    def __le__(self, other):
        other = self._coerce(other)
        return (self - other).sign() <= 0

    def __gt__(self, other):
        other = self._coerce(other)
        return (self - other).sign() > 0

    def __ge__(self, other):
        other = self._coerce(other)
        return (self - other).sign() >= 0

    def __str__(self):
        num = _format_poly(self.num)
        if self.den == (1,):
            return num
        num_s = num if (len(self.num) == 1 or _term_count(self.num) == 1) else f"({num})"
        den = _format_poly(self.den)
        den_s = den if (len(self.den) == 1 or _term_count(self.den) == 1) else f"({den})"
        return f"{num_s}/{den_s}"


def _term_count(c: IntPoly) -> int:
    return sum(1 for v in c if v)


def _format_poly(c: IntPoly) -> str:
    if _is_zero(c):
        return "0"
    parts = []
    for k in range(len(c) - 1, -1, -1):
        v = c[k]
        if v == 0:
            continue
        if k == 0:
            body = str(abs(v))
        else:
            w = "W" if k == 1 else f"W^{k}"
            body = w if abs(v) == 1 else f"{abs(v)}*{w}"
        if not parts:
            parts.append(body if v > 0 else f"-{body}")
        else:
            parts.append(f"+{body}" if v > 0 else f"-{body}")
    return "".join(parts)


def element(num, den=1) -> QStarElement:
    """Build from ints or ascending coefficient sequences."""
    num_t = (num,) if isinstance(num, int) else tuple(num)
    den_t = (den,) if isinstance(den, int) else tuple(den)
    return QStarElement(num_t, den_t)


ZERO = element(0)
ONE = element(1)
OMEGA = element((0, 1))


def arith(a: QStarElement, b: QStarElement, op: str) -> QStarElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise DomainError(f"unknown op {op!r}")


def classify(a: QStarElement) -> str:
    """Degree comparison realizes the bounded/unbounded quantifiers: W beats
    every finite threshold, so deg num < deg den means smaller than any 1/k."""
    if a.is_zero:
        return ZERO_CLASS
    dn, dd = len(a.num) - 1, len(a.den) - 1
    if dn < dd:
        return INFINITESIMAL
    if dn == dd:
        return FINITE
    return INFINITE


def equal(a: QStarElement, b: QStarElement) -> bool:
    """True when the difference is zero or infinitesimal.

    Works on the unreduced difference: canceling a common factor lowers the
    numerator and denominator degrees by the same amount, so the degree gap
    that decides the class needs no gcd reduction.
    """
    diff_num = _add(_mul(a.num, b.den), _neg(_mul(b.num, a.den)))
    if _is_zero(diff_num):
        return True
    diff_den_degree = (len(a.den) - 1) + (len(b.den) - 1)
    return len(diff_num) - 1 < diff_den_degree


def identical(a: QStarElement, b: QStarElement) -> bool:
    """True when the canonical ratios coincide exactly (ratio one); both-zero
    counts as identical by convention."""
    return a.num == b.num and a.den == b.den


def standard_part(a: QStarElement) -> Fraction | None:
    """The ordinary rational an element is equal to; None for infinite ones."""
    cls = classify(a)
    if cls in (ZERO_CLASS, INFINITESIMAL):
        return Fraction(0)
    if cls == FINITE:
        return Fraction(a.num[-1], a.den[-1])
    return None


def describe(a: QStarElement) -> str:
    """Classification sentence used by the command-line front end."""
    cls = classify(a)
    if cls == ZERO_CLASS:
        return "zero; identical to 0"
    if cls == INFINITE:
        return "infinite"
    s = standard_part(a)
    target = element(s.numerator, s.denominator)
    relation = "identical" if identical(a, target) else "not identical"
    return f"{cls}; equal to {s}; {relation} to {s}"


class _Parser:
    """Recursive-descent parser for integers, W, + - * / and parentheses."""

    def __init__(self, text: str):
        self.tokens = self._lex(text)
        self.pos = 0

    @staticmethod
    def _lex(text: str) -> list[str]:
        tokens = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                tokens.append(text[i:j])
                i = j
            elif ch in "Ww":
                tokens.append("W")
                i += 1
            elif ch in "+-*/()^":
                tokens.append(ch)
                i += 1
            else:
                raise DomainError(f"unexpected character {ch!r} in expression")
        return tokens

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self):
        tok = self._peek()
        if tok is None:
            raise DomainError("unexpected end of expression")
        self.pos += 1
        return tok

    def parse(self) -> QStarElement:
        value = self._expr()
        if self._peek() is not None:
            raise DomainError(f"trailing input at {self._peek()!r}")
        return value

    def _expr(self) -> QStarElement:
        value = self._term()
        while self._peek() in ("+", "-"):
            op = self._take()
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> QStarElement:
        value = self._unary()
        while self._peek() in ("*", "/"):
            op = self._take()
            rhs = self._unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def _unary(self) -> QStarElement:
        if self._peek() == "-":
            self._take()
            return -self._unary()
        return self._power()

    def _power(self) -> QStarElement:
        base = self._atom()
        if self._peek() == "^":
            self._take()
            exp_tok = self._take()
            if not exp_tok.isdigit():
                raise DomainError("exponent must be a nonnegative integer")
            result = element(1)
            for _ in range(int(exp_tok)):
                result = result * base
            return result
        return base

    def _atom(self) -> QStarElement:
        tok = self._take()
        if tok == "(":
            inner = self._expr()
            if self._take() != ")":
                raise DomainError("missing closing parenthesis")
            return inner
        if tok == "W":
            return OMEGA
        if tok.isdigit():
            return element(int(tok))
        raise DomainError(f"unexpected token {tok!r}")


def parse(text: str) -> QStarElement:
    return _Parser(text).parse()
