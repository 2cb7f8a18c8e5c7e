"""Exact p-adic arithmetic at bounded digit precision.

A nonzero value is a valuation (the p-power of the leading digit) plus a
digit vector in base p; zero is a tagged case with no digits.  All
operations truncate instead of rounding: the p-adic norm depends only on
the leading digit, so truncation keeps every norm and distance computed
downstream exact.

Norm values live in the discrete value group {p^k : k in Z} together with
the metric value 0.  ``GammaValue`` encodes these as the integer exponent
e with real value p^(-e); the metric value 0 is the distinguished
INFINITY exponent (p^(-inf)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Union

RationalLike = Union[int, str, Fraction]


class PrimeMismatchError(ValueError):
    """Mixed operands from different p-adic fields."""


class NotPrimeError(ValueError):
    """The base of a p-adic field must be prime."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise NotPrimeError(f"base must be prime, got {p}")
    return p


@total_ordering
@dataclass(frozen=True)
class GammaValue:
    """An element of the value group: p^(-exponent), or 0 for INFINITY.

    ``exponent=None`` is the INFINITY tag encoding the metric value 0.
    The total order is the real order of the encoded values, so a larger
    exponent means a smaller value and INFINITY is the minimum.  The
    order does not depend on p.
    """

    exponent: int | None

    @property
    def is_zero(self) -> bool:
        """True when this encodes the metric value 0 (p^-inf)."""
        return self.exponent is None

    def as_fraction(self, p: int) -> Fraction:
        """Exact rational value p^(-exponent); 0 for INFINITY."""
        if self.exponent is None:
            return Fraction(0)
        if self.exponent >= 0:
            return Fraction(1, p**self.exponent)
        return Fraction(p ** (-self.exponent))

    def scaled(self, k: int) -> "GammaValue":
        """Multiply the encoded value by p^k (INFINITY is absorbing)."""
        if self.exponent is None:
            return self
        return GammaValue(self.exponent - k)

    def __lt__(self, other: "GammaValue") -> bool:
        if self.exponent is None:
            return other.exponent is not None
        if other.exponent is None:
            return False
        return self.exponent > other.exponent

    def to_json(self) -> int | str:
        return "INF" if self.exponent is None else self.exponent

    @classmethod
    def from_json(cls, obj: int | str) -> "GammaValue":
        if obj == "INF":
            return cls(None)
        return cls(int(obj))

    def __repr__(self) -> str:
        if self.exponent is None:
            return "GammaValue(INF)"
        return f"GammaValue({self.exponent})"


#: The metric value 0, i.e. p^(-INFINITY).
GAMMA_ZERO = GammaValue(None)


def round_to_gamma(r: RationalLike, p: int) -> GammaValue:
    """Largest value group element p^(-e) not exceeding r; 0 maps to INFINITY.

    Accepts exact rationals (``Fraction``, int, or a string such as
    "3/4" or "0.7", parsed exactly).  Guarantees the sandwich
    result <= r <= p * result for r > 0.

    Raises:
        ValueError: if r is negative.
    """
    check_prime(p)
    r = Fraction(r)
    if r < 0:
        raise ValueError(f"cannot round negative value {r}")
    if r == 0:
        return GAMMA_ZERO
    e = 0
    cur = Fraction(1)
    if cur <= r:
        while cur * p <= r:
            cur *= p
            e -= 1
    else:
        while cur > r:
            cur = cur / p
            e += 1
    return GammaValue(e)


@dataclass(frozen=True)
class PAdic:
    """A p-adic number known exactly on a bounded digit window.

    The value is sum(digits[i] * p^(valuation + i)); digits below the
    valuation are exact zeros, digits at positions >= valuation +
    precision are unknown.  Zero is tagged by an empty digit vector and
    carries no valuation information beyond "all known digits vanish".

    Instances are immutable and safe to share across threads.
    """

    prime: int
    valuation: int
    digits: tuple[int, ...]
    precision: int

    def __post_init__(self) -> None:
        check_prime(self.prime)
        if self.precision < 1:
            raise ValueError("precision must be positive")
        if self.digits:
            if len(self.digits) != self.precision:
                raise ValueError("digit vector must have `precision` entries")
            if self.digits[0] == 0:
                raise ValueError("leading digit must be nonzero")
            if any(d < 0 or d >= self.prime for d in self.digits):
                raise ValueError("digits must lie in [0, p-1]")

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, p: int, precision: int = 32) -> "PAdic":
        return cls(p, 0, (), precision)

    @classmethod
    def from_int(cls, n: int, p: int, precision: int = 32) -> "PAdic":
        """Exact image of an integer (negatives get their tail expansion)."""
        if n == 0:
            return cls.zero(p, precision)
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return cls(p, v, _digits_of(n, p, precision), precision)

    @classmethod
    def from_fraction(cls, q: RationalLike, p: int, precision: int = 32) -> "PAdic":
        """Exact image of a rational; the denominator's p-part lowers the valuation."""
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, precision)
        num, den = q.numerator, q.denominator
        vn = 0
        while num % p == 0:
            num //= p
            vn += 1
        vd = 0
        while den % p == 0:
            den //= p
            vd += 1
        unit = num * pow(den, -1, p**precision)
        return cls(p, vn - vd, _digits_of(unit, p, precision), precision)

    @classmethod
    def from_digit_stream(cls, stream: Iterable[int], p: int) -> "PAdic":
        """Value sum(stream[i] * p^i) from digits at positions 0,1,2,...

        Leading zeros raise the valuation; the known window ends where
        the stream does, so precision is the count of remaining digits.
        """
        stream = tuple(stream)
        if not stream:
            raise ValueError("empty digit stream")
        if any(d < 0 or d >= p for d in stream):
            raise ValueError("digits must lie in [0, p-1]")
        if all(d == 0 for d in stream):
            return cls.zero(p, len(stream))
        v = next(i for i, d in enumerate(stream) if d != 0)
        tail = stream[v:]
        return cls(p, v, tail, len(tail))

    # -- structure -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.digits

    def unit_int(self) -> int:
        """The digit window as an integer in [0, p^precision)."""
        acc = 0
        for d in reversed(self.digits):
            acc = acc * self.prime + d
        return acc

    def digit_at(self, i: int) -> int:
        """Digit at p-power position i (exact zeros below the valuation)."""
        if self.is_zero:
            raise ValueError("zero has no digit window")
        if i < self.valuation:
            return 0
        if i >= self.valuation + self.precision:
            raise ValueError(f"digit at position {i} exceeds the known window")
        return self.digits[i - self.valuation]

    def known_upto(self) -> int:
        """First unknown digit position (valuation + precision; zero: precision)."""
        if self.is_zero:
            return self.precision
        return self.valuation + self.precision

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "PAdic") -> "PAdic":
        if self.prime != other.prime:
            raise PrimeMismatchError(
                f"cannot add {self.prime}-adic and {other.prime}-adic values"
            )
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.prime
        start = min(self.valuation, other.valuation)
        end = min(self.valuation + self.precision, other.valuation + other.precision)
        modulus = p ** (end - start)
        total = (
            self.unit_int() * p ** (self.valuation - start)
            + other.unit_int() * p ** (other.valuation - start)
        ) % modulus
        if total == 0:
            # all digits cancel inside the shared window: zero at this precision
            return PAdic.zero(p, end - start)
        shift = 0
        while total % p == 0:
            total //= p
            shift += 1
        return PAdic(p, start + shift, _digits_of(total, p, end - start - shift), end - start - shift)

    def __neg__(self) -> "PAdic":
        if self.is_zero:
            return self
        unit = (-self.unit_int()) % (self.prime**self.precision)
        return PAdic(self.prime, self.valuation, _digits_of(unit, self.prime, self.precision), self.precision)

    def __sub__(self, other: "PAdic") -> "PAdic":
        return self + (-other)

    def norm(self) -> GammaValue:
        """|x|_p = p^(-valuation) as a value group element; zero maps to INFINITY."""
        if self.is_zero:
            return GAMMA_ZERO
        return GammaValue(self.valuation)

    # -- text form -------------------------------------------------------

    def to_text(self) -> str:
        """Debug dump "p:<prime> v:<valuation> d:<digit,digit,...>"."""
        if self.is_zero:
            return f"p:{self.prime} v:- d:0"
        return f"p:{self.prime} v:{self.valuation} d:{','.join(map(str, self.digits))}"

    def __repr__(self) -> str:
        return f"PAdic({self.to_text()!r})"


def _digits_of(unit: int, p: int, length: int) -> tuple[int, ...]:
    unit %= p**length
    out = []
    for _ in range(length):
        unit, d = divmod(unit, p)
        out.append(d)
    return tuple(out)


def padic_add(a: PAdic, b: PAdic) -> PAdic:
    """Sum truncated to the shared exactly-known digit window."""
    return a + b


def padic_norm(a: PAdic) -> GammaValue:
    return a.norm()
