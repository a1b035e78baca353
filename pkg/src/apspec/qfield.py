"""Exact arithmetic in a real quadratic field Q(theta).

Elements are stored as ``p + q*theta`` with rational ``p, q`` where theta is
a root of ``x**2 = trace*x + norm_term``.  For the golden mean use
``GOLDEN = QuadraticField(1, 1)`` so that theta**2 = theta + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math


@dataclass(frozen=True)
class QuadraticField:
    trace: int
    norm_term: int
    symbol: str = "θ"

    def __post_init__(self):
        disc = self.trace**2 + 4 * self.norm_term
        root = math.isqrt(disc) if disc >= 0 else -1
        if disc < 0 or root * root == disc:
            raise ValueError(f"x^2 - {self.trace}x - {self.norm_term} is not irreducible over Q with real roots")

    @property
    def discriminant(self) -> int:
        return self.trace**2 + 4 * self.norm_term

    @property
    def theta_float(self) -> float:
        return (self.trace + math.sqrt(self.discriminant)) / 2

    @property
    def conjugate_float(self) -> float:
        return (self.trace - math.sqrt(self.discriminant)) / 2

    def __call__(self, p=0, q=0) -> "QElement":
        return QElement(self, Fraction(p), Fraction(q))

    @property
    def one(self) -> "QElement":
        return self(1, 0)

    @property
    def theta(self) -> "QElement":
        return self(0, 1)

    def sqrt_disc(self) -> "QElement":
        # sqrt(D) = 2*theta - trace
        return self(-self.trace, 2)


class QElement:
    __slots__ = ("field", "p", "q")

    def __init__(self, field: QuadraticField, p: Fraction, q: Fraction):
        self.field = field
        self.p = Fraction(p)
        self.q = Fraction(q)

    def _coerce(self, other) -> "QElement":
        if isinstance(other, QElement):
            if other.field != self.field:
                raise ValueError("elements live in different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QElement(self.field, Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QElement(self.field, self.p + other.p, self.q + other.q)

    __radd__ = __add__

    def __neg__(self):
        return QElement(self.field, -self.p, -self.q)

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
        t, n = self.field.trace, self.field.norm_term
        # (p1 + q1 x)(p2 + q2 x) with x^2 = t x + n
        qq = self.q * other.q
        p = self.p * other.p + n * qq
        q = self.p * other.q + self.q * other.p + t * qq
        return QElement(self.field, p, q)

    __rmul__ = __mul__

    def conjugate(self) -> "QElement":
        # the other root is trace - theta
        t = self.field.trace
        return QElement(self.field, self.p + t * self.q, -self.q)

    def norm(self) -> Fraction:
        prod = self * self.conjugate()
        assert prod.q == 0
        return prod.p

    def trace_value(self) -> Fraction:
        s = self + self.conjugate()
        assert s.q == 0
        return s.p

    def inverse(self) -> "QElement":
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("zero has no inverse")
        c = self.conjugate()
        return QElement(self.field, c.p / nrm, c.q / nrm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
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
            return False
        return self.p == other.p and self.q == other.q

    def __hash__(self):
        return hash((self.field, self.p, self.q))

    def __float__(self):
        return float(self.p) + float(self.q) * self.field.theta_float

    def conjugate_float(self) -> float:
        return float(self.p) + float(self.q) * self.field.conjugate_float

    def is_rational(self) -> bool:
        return self.q == 0

    def __repr__(self):
        return f"QElement({self})"

    def __str__(self):
        sym = self.field.symbol
        if self.q == 0:
            return str(self.p)
        if self.p == 0:
            return f"{self.q}·{sym}"
        sign = "+" if self.q > 0 else "-"
        return f"{self.p} {sign} {abs(self.q)}·{sym}"


GOLDEN = QuadraticField(1, 1, "τ")


def _squarefree_split(d: int):
    """d = f^2 * d0 with d0 squarefree."""
    f, d0 = 1, d
    p = 2
    while p * p <= d0:
        while d0 % (p * p) == 0:
            d0 //= p * p
            f *= p
        p += 1
    return f, d0


def field_for_discriminant(disc: int):
    """The field Q(sqrt(disc)) with its standard integral generator, and
    sqrt(disc) as an element.  Q(sqrt 5) comes back as the golden field."""
    f, d0 = _squarefree_split(disc)
    if d0 == 1:
        raise ValueError("discriminant is a perfect square")
    if d0 == 5:
        field = GOLDEN
        root = GOLDEN(-1, 2)
    elif d0 % 4 == 1:
        field = QuadraticField(1, (d0 - 1) // 4, "ω")
        root = field(-1, 2)
    else:
        field = QuadraticField(0, d0, f"√{d0}")
        root = field(0, 1)
    return field, root * f
