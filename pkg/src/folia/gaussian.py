"""Gaussian rationals: exact scalars a + b*i with a, b in Q.

This is the coefficient field for every polynomial in the toolkit.  All
operations are exact; the only lossy method is to_complex().
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DivisionByZero

RatLike = int | Fraction


def _rational_sqrt(f: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    if f < 0:
        return None
    num, den = f.numerator, f.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


class GaussianRational:
    """An element of Q(i), stored as a pair of Fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re: RatLike | Fraction = 0, im: RatLike | Fraction = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):  # value type: keep it immutable
        raise AttributeError("GaussianRational is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_value(cls, v: "GaussianRational | RatLike") -> "GaussianRational":
        if isinstance(v, GaussianRational):
            return v
        return cls(v)

    # -- predicates ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.re and not self.im

    @property
    def is_one(self) -> bool:
        return self.re == 1 and not self.im

    @property
    def is_rational(self) -> bool:
        return not self.im

    def __bool__(self) -> bool:
        return not self.is_zero

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = GaussianRational.from_value(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = GaussianRational.from_value(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.from_value(other) - self

    def __mul__(self, other):
        other = GaussianRational.from_value(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.from_value(other)
        n = other.norm2()
        if not n:
            raise DivisionByZero("division by zero in Q(i)")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return GaussianRational.from_value(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return GaussianRational(1) / self ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|z|^2 = a^2 + b^2, exactly."""
        return self.re * self.re + self.im * self.im

    def sqrt(self) -> "GaussianRational | None":
        """An exact square root in Q(i) when one exists, else None."""
        if self.is_zero:
            return GaussianRational(0)
        if not self.im:
            r = _rational_sqrt(self.re)
            if r is not None:
                return GaussianRational(r)
            r = _rational_sqrt(-self.re)
            if r is not None:
                return GaussianRational(0, r)
            return None
        n = _rational_sqrt(self.norm2())
        if n is None:
            return None
        x = _rational_sqrt((self.re + n) / 2)
        if x is None or x == 0:
            return None
        cand = GaussianRational(x, self.im / (2 * x))
        return cand if cand * cand == self else None

    # -- conversions / display --------------------------------------------

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def canonical(self) -> str:
        """Fixed-shape serialization "a/b+c/d*i" used in reports."""
        re, im = self.re, self.im
        sign = "+" if im >= 0 else "-"
        return (
            f"{re.numerator}/{re.denominator}"
            f"{sign}{abs(im.numerator)}/{im.denominator}*i"
        )

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        istr = "i" if mag == 1 else f"{mag}*i"
        return f"{self.re}{sign}{istr}"

    def __repr__(self) -> str:
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def parse_rational(text: str) -> Fraction:
    """Parse 'p' or 'p/q' into a Fraction."""
    return Fraction(text)
