"""Exact arithmetic in Q and in real quadratic fields Q(sqrt d).

A :class:`Scalar` holds ``a + b*sqrt(d)`` with rational ``a`` and ``b``.
Rational values use ``d = 1`` (and always ``b = 0``).  Ordering is taken in
the real embedding where ``sqrt(d) > 0``.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational


class FieldMismatchError(ValueError):
    """Raised when elements of two different quadratic fields are combined."""


@lru_cache(maxsize=256)
def is_squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class Scalar:
    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        a = _frac(a)
        b = _frac(b)
        if d != 1:
            if not is_squarefree(d):
                raise ValueError(f"d={d} must be a squarefree integer > 1")
        elif b:
            raise ValueError("rational scalars cannot carry a sqrt part")
        self.a = a
        self.b = b
        self.d = d

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, d: int) -> Scalar:
        # trusted constructor for results of field operations
        out = object.__new__(cls)
        out.a, out.b, out.d = a, b, d
        return out

    # construction helpers -------------------------------------------------
    @classmethod
    def sqrt(cls, d: int) -> Scalar:
        return cls(0, 1, d)

    @classmethod
    def coerce(cls, x) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, str):
            return parse_scalar(x)
        return cls(_frac(x))

    # field bookkeeping ----------------------------------------------------
    def _join(self, other: Scalar) -> int:
        if self.d == other.d or other.d == 1:
            return self.d
        if self.d == 1:
            return other.d
        # a quadratic-field element with b == 0 is still just a rational
        if not self.b:
            return other.d
        if not other.b:
            return self.d
        raise FieldMismatchError(f"cannot combine Q(sqrt {self.d}) and Q(sqrt {other.d})")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                return Scalar(self.a + _frac(other), self.b, self.d)
            except TypeError:
                return NotImplemented
        if not self.b and not other.b:
            return Scalar._raw(self.a + other.a, self.b, self.d if other.d == 1 else other.d)
        d = self._join(other)
        return Scalar._raw(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                return Scalar(self.a - _frac(other), self.b, self.d)
            except TypeError:
                return NotImplemented
        if not self.b and not other.b:
            return Scalar._raw(self.a - other.a, self.b, self.d if other.d == 1 else other.d)
        d = self._join(other)
        return Scalar._raw(self.a - other.a, self.b - other.b, d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                f = _frac(other)
            except TypeError:
                return NotImplemented
            return Scalar._raw(self.a * f, self.b * f, self.d)
        if not self.b and not other.b:
            return Scalar._raw(self.a * other.a, self.b, self.d if other.d == 1 else other.d)
        d = self._join(other)
        a = self.a * other.a + self.b * other.b * d
        b = self.a * other.b + self.b * other.a
        return Scalar._raw(a, b, d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm a^2 - d b^2 (equals a^2 for rationals)."""
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self) -> Scalar:
        if not self:
            raise ZeroDivisionError("division by zero Scalar")
        if not self.b:
            return Scalar(1 / self.a, 0, self.d)
        n = self.norm()
        return Scalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                f = _frac(other)
            except TypeError:
                return NotImplemented
            if not f:
                raise ZeroDivisionError("division by zero")
            return Scalar(self.a / f, self.b / f, self.d)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Scalar(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> Scalar:
        """Galois conjugate a - b sqrt(d)."""
        return Scalar(self.a, -self.b, self.d)

    # comparisons ----------------------------------------------------------
    def sign(self) -> int:
        a, b = self.a, self.b
        if not b:
            return (a > 0) - (a < 0)
        if not a:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with d b^2
        lhs, rhs = a * a, b * b * self.d
        if lhs == rhs:
            return 0
        return (1 if a > 0 else -1) if lhs > rhs else (1 if b > 0 else -1)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if self.b or other.b:
                return self.a == other.a and self.b == other.b and self.d == other.d
            return self.a == other.a
        try:
            return not self.b and self.a == _frac(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        return (self - Scalar.coerce(other)).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def floor(self) -> int:
        """Exact floor in the embedding sqrt(d) > 0."""
        k = math.floor(float(self))
        while self < k:
            k -= 1
        while self >= k + 1:
            k += 1
        return k

    def is_rational(self) -> bool:
        return not self.b

    def is_integer(self) -> bool:
        return not self.b and self.a.denominator == 1

    def is_algebraic_integer(self) -> bool:
        """Membership in the ring of integers of Q(sqrt d)."""
        if not self.b:
            return self.a.denominator == 1
        trace = 2 * self.a
        return trace.denominator == 1 and self.norm().denominator == 1

    # conversions ----------------------------------------------------------
    def __float__(self):
        if not self.b:
            return float(self.a)
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def embeddings(self) -> tuple[float, float]:
        return float(self), float(self.conjugate())

    def __repr__(self):
        if self.d == 1:
            return f"Scalar({str(self.a)!r})"
        return f"Scalar({str(self.a)!r}, {str(self.b)!r}, d={self.d})"

    def __str__(self):
        return format_scalar(self)


ZERO = Scalar(0)
ONE = Scalar(1)

_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<num>\d+(?:/\d+)?)\s*(?P<star>\*)?\s*)?
        (?P<root>r)?\s*""",
    re.VERBOSE,
)


def parse_scalar(text: str, d: int = 1) -> Scalar:
    """Parse ``"a/b"`` or ``"a/b+c/e*r"`` where ``r`` stands for sqrt(d)."""
    s = text.strip()
    if not s:
        raise ValueError("empty scalar string")
    pos = 0
    a = Fraction(0)
    b = Fraction(0)
    seen = False
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"malformed scalar {text!r}")
        num, root = m.group("num"), m.group("root")
        if num is None and root is None:
            raise ValueError(f"malformed scalar {text!r}")
        if m.group("star") and root is None:
            raise ValueError(f"malformed scalar {text!r}")
        if seen and m.group("sign") is None:
            raise ValueError(f"malformed scalar {text!r}")
        coef = Fraction(num) if num is not None else Fraction(1)
        if m.group("sign") == "-":
            coef = -coef
        if root:
            b += coef
        else:
            a += coef
        seen = True
        pos = m.end()
    if b:
        if d == 1:
            raise ValueError(f"{text!r} uses r but the field is Q")
        return Scalar(a, b, d)
    return Scalar(a)


def _fmt_frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(x: Scalar) -> str:
    if not x.b:
        return _fmt_frac(x.a)
    head = _fmt_frac(x.a) if x.a else ""
    coef = "" if abs(x.b) == 1 else _fmt_frac(abs(x.b)) + "*"
    sign = "-" if x.b < 0 else ("+" if head else "")
    return f"{head}{sign}{coef}r"


def common_field(values) -> int:
    """Smallest field (as d) containing all given Scalars."""
    d = 1
    for v in values:
        if isinstance(v, Scalar) and v.b:
            if d == 1:
                d = v.d
            elif d != v.d:
                raise FieldMismatchError(f"mixed fields Q(sqrt {d}) and Q(sqrt {v.d})")
    return d
