"""Exact field elements: rational numbers with an optional Gaussian (imaginary) part.

Every coefficient in the engine is a ``Scalar``.  Arithmetic never rounds;
the real and imaginary parts are ``fractions.Fraction`` values, so equality,
zero tests and ordering (of real values) are decidable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

RatLike = Union["Scalar", Fraction, int, str]


class ScalarParseError(ValueError):
    """Raised when a string does not encode an exact rational or Gaussian rational."""


class Scalar:
    """a + b*i with exact rational a, b; immutable and hashable."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[Fraction, int, str] = 0, im: Union[Fraction, int, str] = 0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- predicates -----------------------------------------------------
    @property
    def is_real(self) -> bool:
        return self.im == 0

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: RatLike) -> "Scalar":
        o = rat(other)
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: RatLike) -> "Scalar":
        o = rat(other)
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: RatLike) -> "Scalar":
        return rat(other) - self

    def __mul__(self, other: RatLike) -> "Scalar":
        o = rat(other)
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: RatLike) -> "Scalar":
        o = rat(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Scalar")
        return Scalar((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other: RatLike) -> "Scalar":
        return rat(other) / self

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __pos__(self) -> "Scalar":
        return self

    def __pow__(self, k: int) -> "Scalar":
        if not isinstance(k, int):
            raise TypeError("Scalar powers must be integers")
        if k < 0:
            return ONE / self ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    # -- comparison ------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (Scalar, Fraction, int)):
            o = rat(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def _require_real(self, op: str) -> None:
        if self.im != 0:
            raise TypeError(f"cannot order non-real Scalar with {op}")

    def __lt__(self, other: RatLike) -> bool:
        o = rat(other)
        self._require_real("<")
        o._require_real("<")
        return self.re < o.re

    def __le__(self, other: RatLike) -> bool:
        o = rat(other)
        self._require_real("<=")
        o._require_real("<=")
        return self.re <= o.re

    def __gt__(self, other: RatLike) -> bool:
        return rat(other) < self

    def __ge__(self, other: RatLike) -> bool:
        return rat(other) <= self

    # -- formatting -------------------------------------------------------
    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def sort_key(self):
        """Deterministic ordering key, usable for real and Gaussian values alike."""
        return (self.re, self.im)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarParseError(f"not an exact rational: {x!r}") from exc
    raise TypeError(f"cannot build a Fraction from {type(x).__name__}")


def rat(x: RatLike) -> Scalar:
    """Coerce an int, Fraction, Scalar, or string like '3/4' or '1/2-2*i' to Scalar."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")


def parse_scalar(text: str) -> Scalar:
    """Parse the canonical forms emitted by str(): 'p/q', 'b*i', 'a+b*i', 'a-b*i'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ScalarParseError("empty scalar string")
    if s in ("i", "+i"):
        return Scalar(0, 1)
    if s == "-i":
        return Scalar(0, -1)
    if s.endswith("*i"):
        body = s[:-2]
        # split off a trailing imaginary term: a+b*i / a-b*i / b*i
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "+-/*":
                return Scalar(_as_fraction(body[:pos]), _as_fraction(body[pos:]))
        return Scalar(0, _as_fraction(body))
    return Scalar(_as_fraction(s))


ZERO = Scalar(0)
ONE = Scalar(1)
IMAG = Scalar(0, 1)
