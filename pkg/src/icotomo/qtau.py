"""Exact arithmetic in the real quadratic field Q(tau), tau = (1 + sqrt 5)/2.

A value is stored as ``(p + q*tau) / d`` with Python integers, ``d > 0`` and
``gcd(p, q, d) == 1``.  The rational coordinates ``a`` and ``b`` of
``a + b*tau`` are exposed as reduced :class:`fractions.Fraction` values.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, "QTau"]

TAU_FLOAT = (1.0 + math.sqrt(5.0)) / 2.0


def _sign_sqrt5(u: int, v: int) -> int:
    """Sign of ``u + v*sqrt(5)`` for integers ``u``, ``v``."""
    su = (u > 0) - (u < 0)
    sv = (v > 0) - (v < 0)
    if su == sv or sv == 0:
        return su
    if su == 0:
        return sv
    # opposite signs; sqrt(5) is irrational so the squares never tie
    return su if u * u > 5 * v * v else sv


class QTau:
    __slots__ = ("_p", "_q", "_d", "_hash")

    def __init__(self, a: Union[int, Fraction, str] = 0, b: Union[int, Fraction] = 0):
        if isinstance(a, str):
            other = parse_qtau(a)
            self._p, self._q, self._d = other._p, other._q, other._d
            self._hash = None
            return
        fa = Fraction(a)
        fb = Fraction(b)
        d = fa.denominator * fb.denominator // math.gcd(fa.denominator, fb.denominator)
        self._set(fa.numerator * (d // fa.denominator), fb.numerator * (d // fb.denominator), d)

    def _set(self, p: int, q: int, d: int) -> None:
        if d < 0:
            p, q, d = -p, -q, -d
        if d != 1:
            g = math.gcd(math.gcd(p, q), d)
            if g > 1:
                p //= g
                q //= g
                d //= g
        self._p, self._q, self._d = p, q, d
        self._hash = None

    @classmethod
    def _raw(cls, p: int, q: int, d: int) -> "QTau":
        obj = cls.__new__(cls)
        obj._set(p, q, d)
        return obj

    @classmethod
    def coerce(cls, x: Number) -> "QTau":
        if isinstance(x, QTau):
            return x
        if isinstance(x, int):
            return cls._raw(x, 0, 1)
        if isinstance(x, Fraction):
            return cls._raw(x.numerator, 0, x.denominator)
        raise TypeError(f"cannot convert {type(x).__name__} to QTau")

    # -- components ------------------------------------------------------
    @property
    def a(self) -> Fraction:
        return Fraction(self._p, self._d)

    @property
    def b(self) -> Fraction:
        return Fraction(self._q, self._d)

    @property
    def is_zero(self) -> bool:
        return self._p == 0 and self._q == 0

    @property
    def is_rational(self) -> bool:
        return self._q == 0

    @property
    def is_integral(self) -> bool:
        """True iff the value lies in Z[tau]."""
        return self._d == 1

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: Number) -> "QTau":
        if not isinstance(other, QTau):
            try:
                other = QTau.coerce(other)
            except TypeError:
                return NotImplemented
        if self._d == other._d:
            return QTau._raw(self._p + other._p, self._q + other._q, self._d)
        d1, d2 = self._d, other._d
        return QTau._raw(self._p * d2 + other._p * d1, self._q * d2 + other._q * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> "QTau":
        obj = QTau.__new__(QTau)
        obj._p, obj._q, obj._d, obj._hash = -self._p, -self._q, self._d, None
        return obj

    def __pos__(self) -> "QTau":
        return self

    def __sub__(self, other: Number) -> "QTau":
        if not isinstance(other, QTau):
            try:
                other = QTau.coerce(other)
            except TypeError:
                return NotImplemented
        if self._d == other._d:
            return QTau._raw(self._p - other._p, self._q - other._q, self._d)
        d1, d2 = self._d, other._d
        return QTau._raw(self._p * d2 - other._p * d1, self._q * d2 - other._q * d1, d1 * d2)

    def __rsub__(self, other: Number) -> "QTau":
        return QTau.coerce(other) - self

    def __mul__(self, other: Number) -> "QTau":
        if not isinstance(other, QTau):
            if isinstance(other, int):
                return QTau._raw(self._p * other, self._q * other, self._d)
            try:
                other = QTau.coerce(other)
            except TypeError:
                return NotImplemented
        p1, q1, p2, q2 = self._p, self._q, other._p, other._q
        qq = q1 * q2
        # tau^2 = tau + 1
        return QTau._raw(p1 * p2 + qq, p1 * q2 + q1 * p2 + qq, self._d * other._d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``x * galois(x) = a^2 + ab - b^2``."""
        p, q = self._p, self._q
        return Fraction(p * p + p * q - q * q, self._d * self._d)

    def inverse(self) -> "QTau":
        if self.is_zero:
            raise ZeroDivisionError("QTau division by zero")
        p, q, d = self._p, self._q, self._d
        n = p * p + p * q - q * q
        # 1/x = d * galois(p + q tau) / n
        return QTau._raw(d * (p + q), -d * q, n)

    def __truediv__(self, other: Number) -> "QTau":
        if not isinstance(other, QTau):
            if isinstance(other, int):
                if other == 0:
                    raise ZeroDivisionError("QTau division by zero")
                return QTau._raw(self._p, self._q, self._d * other)
            try:
                other = QTau.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> "QTau":
        return QTau.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "QTau":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self) -> "QTau":
        """Conjugate ``a + b*tau -> a + b - b*tau`` (sqrt 5 -> -sqrt 5)."""
        return QTau._raw(self._p + self._q, -self._q, self._d)

    def sign(self) -> int:
        # (p + q tau)/d with d > 0; 2p + q + q*sqrt5 has the same sign
        return _sign_sqrt5(2 * self._p + self._q, self._q)

    # -- comparison ------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, QTau):
            return self._p == other._p and self._q == other._q and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._q == 0 and Fraction(self._p, self._d) == other
        return NotImplemented

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = self._hash = hash((self._p, self._q, self._d)) if self._q else hash(Fraction(self._p, self._d))
        return h

    def __lt__(self, other: Number) -> bool:
        return compare(self, other) < 0

    def __le__(self, other: Number) -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: Number) -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: Number) -> bool:
        return compare(self, other) >= 0

    def __bool__(self) -> bool:
        return not self.is_zero

    def __float__(self) -> float:
        return to_float(self)

    def __repr__(self) -> str:
        return f"QTau({format_qtau(self)!r})"

    def __str__(self) -> str:
        return format_qtau(self)

    def __reduce__(self):
        return (QTau._raw, (self._p, self._q, self._d))


ZERO = QTau._raw(0, 0, 1)
ONE = QTau._raw(1, 0, 1)
TAU = QTau._raw(0, 1, 1)
TAU_CONJ = QTau._raw(1, -1, 1)
HALF = QTau._raw(1, 0, 2)


def add(x: Number, y: Number) -> QTau:
    return QTau.coerce(x) + y


def mul(x: Number, y: Number) -> QTau:
    return QTau.coerce(x) * y


def galois(x: Number) -> QTau:
    return QTau.coerce(x).galois()


def sign(x: Number) -> int:
    return QTau.coerce(x).sign()


def compare(x: Number, y: Number) -> int:
    """-1, 0 or +1 according to ``sign(x - y)``."""
    return (QTau.coerce(x) - y).sign()


def to_float(x: Number) -> float:
    """Double-precision approximation. Plotting and bound estimates only."""
    x = QTau.coerce(x)
    # avoid cancellation for near-zero values a + b*tau with large a, b
    p, q, d = x._p, x._q, x._d
    if q == 0:
        return p / d
    if (p > 0) != (q > 0) and p != 0:
        # (p + q tau) = n / (p + q tau') with n the integer norm
        n = p * p + p * q - q * q
        return n / ((p + q * (1.0 - TAU_FLOAT)) * d)
    return (p + q * TAU_FLOAT) / d


class ZTau:
    """Element ``m + n*tau`` of the ring of integers Z[tau]."""

    __slots__ = ("m", "n")

    def __init__(self, m: int = 0, n: int = 0):
        self.m = int(m)
        self.n = int(n)

    @classmethod
    def from_qtau(cls, x: QTau) -> "ZTau":
        if not x.is_integral:
            raise ValueError(f"{x} is not in Z[tau]")
        return cls(x._p, x._q)

    def to_qtau(self) -> QTau:
        return QTau._raw(self.m, self.n, 1)

    def __add__(self, other: "ZTau") -> "ZTau":
        return ZTau(self.m + other.m, self.n + other.n)

    def __sub__(self, other: "ZTau") -> "ZTau":
        return ZTau(self.m - other.m, self.n - other.n)

    def __neg__(self) -> "ZTau":
        return ZTau(-self.m, -self.n)

    def __mul__(self, other: "ZTau") -> "ZTau":
        nn = self.n * other.n
        return ZTau(self.m * other.m + nn, self.m * other.n + self.n * other.m + nn)

    def galois(self) -> "ZTau":
        return ZTau(self.m + self.n, -self.n)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ZTau) and self.m == other.m and self.n == other.n

    def __hash__(self) -> int:
        return hash((self.m, self.n))

    def __iter__(self):
        yield self.m
        yield self.n

    def __repr__(self) -> str:
        return f"ZTau({self.m}, {self.n})"


# -- text literals ------------------------------------------------------------

_LITERAL = re.compile(
    r"""^\s*
    (?:(?P<ap>[+-]?\d+)(?:/(?P<aq>\d+))?)?
    (?:(?P<bs>[+-])?(?:(?P<bp>\d+)(?:/(?P<bq>\d+))?)?(?P<t>[tτ]))?
    \s*$""",
    re.VERBOSE,
)


class LiteralError(ValueError):
    pass


def parse_qtau(text: str) -> QTau:
    """Parse ``p/q`` or ``p/q+r/st`` (``t`` or ``τ`` for tau)."""
    m = _LITERAL.match(text)
    if not m or (m.group("ap") is None and m.group("t") is None):
        raise LiteralError(f"malformed QTau literal {text!r}")
    if m.group("ap") is not None and m.group("t") is not None and m.group("bs") is None:
        raise LiteralError(f"malformed QTau literal {text!r}: missing sign before tau part")
    for key in ("aq", "bq"):
        if m.group(key) is not None and int(m.group(key)) == 0:
            raise LiteralError(f"zero denominator in QTau literal {text!r}")
    a = Fraction(int(m.group("ap")), int(m.group("aq") or 1)) if m.group("ap") is not None else Fraction(0)
    b = Fraction(0)
    if m.group("t") is not None:
        b = Fraction(int(m.group("bp") or 1), int(m.group("bq") or 1))
        if m.group("bs") == "-":
            b = -b
    return QTau(a, b)


def format_qtau(x: QTau) -> str:
    a, b = x.a, x.b
    text = f"{a.numerator}/{a.denominator}"
    if b:
        sgn = "-" if b < 0 else "+"
        text += f"{sgn}{abs(b.numerator)}/{b.denominator}t"
    return text
