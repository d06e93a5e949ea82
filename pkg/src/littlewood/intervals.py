"""Rational intervals and certified enclosures of the few transcendental
quantities the toolkit needs (logarithms, rational powers, e(x)).

Every enclosure returned here has exact :class:`~fractions.Fraction`
endpoints.  Transcendental functions go through :mod:`mpmath`'s interval
context, which rounds outward, so the endpoints are true bounds.
"""

from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import iv


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        other = Fraction(other)
        return Interval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Interval):
            other = Fraction(other)
            if other >= 0:
                return Interval(self.lo * other, self.hi * other)
            return Interval(self.hi * other, self.lo * other)
        products = (self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __lt__(self, other):
        """Certainly less: every point of ``self`` is below every point of ``other``."""
        if isinstance(other, Interval):
            return self.hi < other.lo
        return self.hi < other

    def __gt__(self, other):
        if isinstance(other, Interval):
            return self.lo > other.hi
        return self.lo > other

    def round_out(self, bits: int) -> "Interval":
        """Widen to the dyadic grid ``2**-bits``."""
        scale = 1 << bits
        lo = Fraction(math.floor(self.lo * scale), scale)
        hi = Fraction(-math.floor(-self.hi * scale), scale)
        return Interval(lo, hi)

    def to_json(self) -> list[str]:
        return [fraction_str(self.lo), fraction_str(self.hi)]

    @classmethod
    def from_json(cls, pair) -> "Interval":
        lo, hi = pair
        return cls(parse_fraction(lo), parse_fraction(hi))

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        if self.is_point:
            return f"Interval({self.lo})"
        return f"Interval({float(self.lo):.12g}, {float(self.hi):.12g})"


def fraction_str(x: Fraction) -> str:
    """Serialize an exact rational as ``"num/den"``."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2 or k == 1:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


# above this radicand size integer roots get slow; switch to exp/log
_ROOT_BITS_LIMIT = 1 << 14


def power_enclosure(base: int, exponent: Fraction, bits: int) -> Interval:
    """Enclose ``base ** exponent`` for a positive integer base.

    Uses integer roots when the radicand stays small, so the result is a
    point interval whenever the power is rational.  Exponents with large
    numerators or denominators go through interval ``exp``/``log``.
    """
    if base < 1:
        raise ValueError("base must be a positive integer")
    exponent = Fraction(exponent)
    if exponent < 0:
        return power_enclosure(base, -exponent, bits + 2).reciprocal()
    u, w = exponent.numerator, exponent.denominator
    if base == 1 or u == 0:
        return Interval.point(1)
    if u * base.bit_length() + w * bits > _ROOT_BITS_LIMIT:
        return _power_via_log(base, exponent, bits)
    radicand = base ** u
    root = iroot(radicand, w)
    if root ** w == radicand:
        return Interval.point(root)
    scaled = iroot(radicand << (w * bits), w)
    return Interval(Fraction(scaled, 1 << bits), Fraction(scaled + 1, 1 << bits))


def _mpf_fraction(mpf_tuple) -> Fraction:
    sign, man, exp, _ = mpf_tuple
    value = Fraction(int(man)) * (Fraction(2) ** exp)
    return -value if sign else value


def _from_iv(x) -> Interval:
    lo, hi = x._mpi_
    return Interval(_mpf_fraction(lo), _mpf_fraction(hi))


# mpmath's precision is process-global; threads must not interleave changes
_IV_LOCK = threading.RLock()


@contextmanager
def _iv_precision(prec: int):
    with _IV_LOCK:
        old = iv.prec
        iv.prec = prec
        try:
            yield
        finally:
            iv.prec = old


def _iv_fraction(x: Fraction):
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


def log_power_enclosure(q: int, exponent: Fraction, bits: int = 64) -> Interval:
    """Enclose ``(log q) ** exponent`` for an integer ``q >= 2``."""
    if q < 2:
        raise ValueError("log q must be positive: need q >= 2")
    exponent = Fraction(exponent)
    if exponent == 0:
        return Interval.point(1)
    with _iv_precision(bits + 16 + q.bit_length().bit_length()):
        return _from_iv(iv.exp(_iv_fraction(exponent) * iv.log(iv.log(iv.mpf(q)))))


def _power_via_log(base: int, exponent: Fraction, bits: int) -> Interval:
    # width must be below 2^-bits in absolute terms, so pay for the magnitude
    magnitude = math.ceil(float(exponent) * base.bit_length()) + 2
    with _iv_precision(bits + magnitude + 16):
        box = _from_iv(iv.exp(_iv_fraction(exponent) * iv.log(iv.mpf(base))))
    return box.round_out(bits)


@lru_cache(maxsize=1 << 16)
def cos_sin_2pi(x: Fraction, bits: int) -> tuple[Interval, Interval]:
    """Enclosures of ``cos(2 pi x)`` and ``sin(2 pi x)`` for rational ``x``."""
    x = Fraction(x) % 1
    # exact values at multiples of 1/4 keep cancellation checks exact
    if x.denominator <= 4 and 4 % x.denominator == 0:
        c, s = {Fraction(0): (1, 0), Fraction(1, 4): (0, 1),
                Fraction(1, 2): (-1, 0), Fraction(3, 4): (0, -1)}[x]
        return Interval.point(c), Interval.point(s)
    with _iv_precision(bits + 8):
        t = 2 * iv.pi * _iv_fraction(x)
        return _from_iv(iv.cos(t)), _from_iv(iv.sin(t))


def cos_sin_2pi_interval(x: Interval, bits: int) -> tuple[Interval, Interval]:
    """Enclosures of ``cos(2 pi t)``, ``sin(2 pi t)`` over ``t`` in ``x``."""
    if x.is_point:
        return cos_sin_2pi(x.lo, bits)
    with _iv_precision(bits + 8):
        t = 2 * iv.pi * iv.mpf([_iv_fraction(x.lo).a, _iv_fraction(x.hi).b])
        return _from_iv(iv.cos(t)), _from_iv(iv.sin(t))


def square(x: Interval) -> Interval:
    if x.lo >= 0:
        return Interval(x.lo * x.lo, x.hi * x.hi)
    if x.hi <= 0:
        return Interval(x.hi * x.hi, x.lo * x.lo)
    return Interval(Fraction(0), max(x.lo * x.lo, x.hi * x.hi))


def sqrt_enclosure(x: Interval, bits: int) -> Interval:
    """Enclose the square root of a non-negative interval on the ``2**-bits`` grid."""
    if x.lo < 0:
        raise ValueError("negative interval")
    scale = 1 << (2 * bits)
    lo_n = math.floor(x.lo * scale)
    hi_n = -math.floor(-x.hi * scale)
    lo_root = iroot(lo_n, 2)
    hi_root = iroot(hi_n, 2)
    if hi_root * hi_root < hi_n:
        hi_root += 1
    lo = Fraction(lo_root, 1 << bits)
    hi = Fraction(hi_root, 1 << bits)
    # exact roots of exact squares stay exact
    if x.is_point:
        num, den = x.lo.numerator, x.lo.denominator
        rn, rd = iroot(num, 2), iroot(den, 2)
        if rn * rn == num and rd * rd == den:
            return Interval.point(Fraction(rn, rd))
    return Interval(lo, hi)
