"""Exact real numbers: rationals, quadratic surds and lazily evaluated
combinations of them, with certified nearest-integer distance.

The value types are

* :class:`fractions.Fraction` for rationals,
* :class:`QuadraticSurd` for ``(a + b*sqrt(d)) / c``,
* :class:`~littlewood.cf.DigitStream` for continued fractions given by
  their digits (defined in :mod:`littlewood.cf`),
* :class:`LinearForm` for rational combinations of the above that do not
  collapse into one of the first two.

Anything that is not a ``Fraction`` exposes ``enclose(bits)``, returning an
:class:`~littlewood.intervals.Interval` of width at most ``2**(2 - bits)``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from .intervals import Interval, iroot

DEFAULT_PRECISION_CAP = 1 << 16


class PrecisionExhausted(ArithmeticError):
    """A certified decision needed more precision than allowed."""


class Undecidable(PrecisionExhausted):
    """Two quantities could not be separated within the precision cap."""


TRIAL_DIVISION_LIMIT = 2_000_000


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s * f**2`` and ``s`` squarefree."""
    if n <= 0:
        raise ValueError("need a positive integer")
    s, f = 1, 1
    rest = n
    p = 2
    while p * p * p <= rest:
        if p > TRIAL_DIVISION_LIMIT:
            r = iroot(rest, 2)
            if r * r == rest:
                return s, f * r
            raise ValueError(f"cannot certify the squarefree part of a {n.bit_length()}-bit "
                             "radicand by trial division")
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        f *= p ** (e // 2)
        s *= p ** (e % 2)
        p += 1 if p == 2 else 2
    # no prime factor below the cube root left: rest is 1, p, p*q or p**2
    r = iroot(rest, 2)
    if rest > 1 and r * r == rest:
        f *= r
    else:
        s *= rest
    return s, f


class QuadraticSurd:
    """The real number ``(a + b*sqrt(d)) / c`` in lowest terms.

    ``d`` is squarefree and not a perfect square, ``c > 0`` and
    ``gcd(a, b, c) == 1``.  Use :func:`surd` to build one; it returns a
    ``Fraction`` when the value is rational.
    """

    __slots__ = ("a", "b", "d", "c")

    def __init__(self, a: int, b: int, d: int, c: int):
        if b == 0 or c == 0:
            raise ValueError("use surd() for values that may be rational")
        s, f = squarefree_decompose(d)
        if s == 1:
            raise ValueError(f"{d} is a perfect square")
        b *= f
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "d", s)
        object.__setattr__(self, "c", c // g)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticSurd is immutable")

    @classmethod
    def _raw(cls, a, b, d, c):
        # d already squarefree; only sign and gcd normalization needed
        if b == 0:
            return Fraction(a, c)
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a // g)
        object.__setattr__(obj, "b", b // g)
        object.__setattr__(obj, "d", d)
        object.__setattr__(obj, "c", c // g)
        return obj

    # arithmetic in Q(sqrt(d)); mixing fields is left to LinearForm

    def _coerce(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                return None
            return other.a, other.b, other.c
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return other.numerator, 0, other.denominator
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return combine(0, [(1, self), (1, other)]) if is_real(other) else NotImplemented
        a2, b2, c2 = o
        return QuadraticSurd._raw(self.a * c2 + a2 * self.c, self.b * c2 + b2 * self.c,
                                  self.d, self.c * c2)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd._raw(-self.a, -self.b, self.d, self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a2, b2, c2 = o
        return QuadraticSurd._raw(self.a * a2 + self.b * b2 * self.d,
                                  self.a * b2 + self.b * a2, self.d, self.c * c2)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadraticSurd._raw(self.a, -self.b, self.d, self.c)

    def norm(self) -> Fraction:
        """Field norm ``x * conj(x)``."""
        return Fraction(self.a * self.a - self.b * self.b * self.d, self.c * self.c)

    def reciprocal(self):
        # 1/x = c * conj / (a^2 - b^2 d)
        return QuadraticSurd._raw(self.c * self.a, -self.c * self.b, self.d,
                                  self.a * self.a - self.b * self.b * self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                return NotImplemented
            return self * other.reciprocal()
        other = Fraction(other)
        return QuadraticSurd._raw(self.a * other.denominator, self.b * other.denominator,
                                  self.d, self.c * other.numerator)

    def __rtruediv__(self, other):
        return self.reciprocal() * Fraction(other)

    def sign(self) -> int:
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with b^2 d
        lhs, rhs = a * a, b * b * self.d
        if a > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1

    def floor(self) -> int:
        s = iroot(self.b * self.b * self.d, 2)
        fb = s if self.b > 0 else -s - 1
        return (self.a + fb) // self.c

    def enclose(self, bits: int) -> Interval:
        s = iroot(self.b * self.b * self.d << (2 * bits), 2)
        base = self.a << bits
        lo_num = base + s if self.b > 0 else base - s - 1
        scale = 1 << bits
        lo = Fraction(lo_num // self.c, scale)
        hi = Fraction(-((-(lo_num + 1)) // self.c), scale)
        return Interval(lo, hi)

    def __eq__(self, other):
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b, self.d, self.c) == (other.a, other.b, other.d, other.c)
        return False

    def __hash__(self):
        return hash(("surd", self.a, self.b, self.d, self.c))

    def __float__(self):
        return float(approximate(self, 64))

    def __repr__(self):
        return f"surd({self.a},{self.b},{self.d},{self.c})"


def surd(a: int, b: int, d: int, c: int = 1):
    """Build ``(a + b*sqrt(d)) / c``, returning a ``Fraction`` when rational."""
    if c == 0:
        raise ZeroDivisionError("c must be nonzero")
    if d < 0:
        raise ValueError("d must be positive")
    if b == 0 or d == 0:
        return Fraction(a, c)
    s, f = squarefree_decompose(d)
    if s == 1:
        return Fraction(a + b * f, c)
    return QuadraticSurd(a, b * f, s, c)


class LinearForm:
    """``const + sum(coef * base)`` over irrational bases.

    Only produced by :func:`combine` when the value does not reduce to a
    rational or a single surd.  Bases are ``QuadraticSurd`` (at most one
    per field) or non-periodic digit streams.
    """

    __slots__ = ("const", "terms")

    def __init__(self, const: Fraction, terms: tuple):
        object.__setattr__(self, "const", Fraction(const))
        object.__setattr__(self, "terms", tuple(terms))

    def __setattr__(self, name, value):
        raise AttributeError("LinearForm is immutable")

    def enclose(self, bits: int) -> Interval:
        guard = 3 + len(self.terms).bit_length()
        total = Interval.point(self.const)
        for coef, base in self.terms:
            mag = abs(coef)
            extra = max(0, math.ceil(mag).bit_length())
            total = total + enclose(base, bits + guard + extra) * coef
        return total.round_out(bits)

    def __add__(self, other):
        if not is_real(other):
            return NotImplemented
        return combine(0, [(1, self), (1, other)])

    __radd__ = __add__

    def __neg__(self):
        return combine(0, [(-1, self)])

    def __sub__(self, other):
        return combine(0, [(1, self), (-1, other)])

    def __rsub__(self, other):
        return combine(0, [(1, other), (-1, self)])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return combine(0, [(other, self)])
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LinearForm) and (self.const, self.terms) == (other.const, other.terms)

    def __hash__(self):
        return hash(("lin", self.const, self.terms))

    def __float__(self):
        return float(approximate(self, 64))

    def __repr__(self):
        parts = [str(self.const)] + [f"{c}*{b!r}" for c, b in self.terms]
        return "LinearForm(" + " + ".join(parts) + ")"


Real = Union[Fraction, QuadraticSurd, LinearForm, "DigitStream"]  # noqa: F821


def is_real(x) -> bool:
    return isinstance(x, (int, Fraction, QuadraticSurd, LinearForm)) or hasattr(x, "enclose")


def _stream_reduce(x):
    """Periodic or terminating digit streams have exact closed forms."""
    exact = getattr(x, "exact_value", None)
    if exact is not None:
        value = exact()
        if value is not None:
            return value
    return x


def combine(const, pairs) -> Real:
    """Exact ``const + sum(coef * x for coef, x in pairs)``, simplified."""
    total = Fraction(const)
    by_field: dict[int, QuadraticSurd] = {}
    others: dict = {}
    order: list = []
    stack = [(Fraction(c), x) for c, x in pairs]
    while stack:
        coef, x = stack.pop(0)
        if coef == 0:
            continue
        if isinstance(x, (int, Fraction)):
            total += coef * x
        elif isinstance(x, QuadraticSurd):
            if x.d in by_field:
                by_field[x.d] = by_field[x.d] + x * coef
            else:
                by_field[x.d] = x * coef
                order.append(("surd", x.d))
        elif isinstance(x, LinearForm):
            stack[:0] = [(coef, Fraction(x.const))] + [(coef * c, b) for c, b in x.terms]
        else:
            reduced = _stream_reduce(x)
            if reduced is not x:
                stack.insert(0, (coef, reduced))
                continue
            if x in others:
                others[x] += coef
            else:
                others[x] = coef
                order.append(("stream", x))
    terms = []
    for tag, key in order:
        if tag == "surd":
            value = by_field[key]
            if isinstance(value, Fraction):
                total += value
            else:
                terms.append((Fraction(1), value))
        elif others[key] != 0:
            terms.append((others[key], key))
    if not terms:
        return total
    if len(terms) == 1 and isinstance(terms[0][1], QuadraticSurd):
        return terms[0][1] + total
    return LinearForm(total, terms)


def enclose(x: Real, bits: int) -> Interval:
    """Certified enclosure of ``x`` with width at most ``2**(2 - bits)``."""
    if isinstance(x, (int, Fraction)):
        return Interval.point(x)
    return x.enclose(bits)


def approximate(x: Real, bits: int) -> Fraction:
    """A rational within ``2**-bits`` of ``x`` (exact for rationals)."""
    if bits < 1:
        raise ValueError("precision must be at least one bit")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return enclose(x, bits + 2).mid


def floor(x: Real, start: int = 64, cap: int = DEFAULT_PRECISION_CAP) -> int:
    """Certified floor."""
    if isinstance(x, (int, Fraction)):
        return math.floor(x)
    if isinstance(x, QuadraticSurd):
        return x.floor()
    bits = start
    while bits <= cap:
        box = enclose(x, bits)
        lo, hi = math.floor(box.lo), math.floor(box.hi)
        if lo == hi:
            return lo
        bits *= 2
    raise PrecisionExhausted(f"floor undecided at {cap} bits")


def sign(x: Real, start: int = 64, cap: int = DEFAULT_PRECISION_CAP) -> int:
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if isinstance(x, QuadraticSurd):
        return x.sign()
    bits = start
    while bits <= cap:
        box = enclose(x, bits)
        if box.lo > 0:
            return 1
        if box.hi < 0:
            return -1
        bits *= 2
    raise Undecidable(f"sign undecided at {cap} bits")


def compare(x: Real, y: Real, start: int = 64, cap: int = DEFAULT_PRECISION_CAP) -> int:
    """Certified three-way comparison; exact whenever the difference is
    rational or a single surd."""
    return sign(combine(0, [(1, x), (-1, y)]), start, cap)


def norm_dist(x: Real, start: int = 64, cap: int = DEFAULT_PRECISION_CAP) -> Real:
    """Distance from ``x`` to the nearest integer, as an exact real in ``[0, 1/2]``.

    A tie (fractional part exactly 1/2) gives exactly 1/2.
    """
    n = floor(x, start, cap)
    frac = combine(-n, [(1, x)])
    if compare(combine(0, [(2, frac)]), 1, start, cap) <= 0:
        return frac
    return combine(1, [(-1, frac)])


def scaled_norm_dist(q: int, x: Real, shift: Real = Fraction(0),
                     cap: int = DEFAULT_PRECISION_CAP) -> Real:
    """``||q*x - shift||`` computed exactly (or with certified refinement).

    Non-closed-form inputs start with ``bit_length(q) + 32`` guard bits.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    value = combine(0, [(q, x), (-1, shift)])
    start = max(64, q.bit_length() + 32)
    return norm_dist(value, start, cap)


# -- literals ---------------------------------------------------------------

_SURD_RE = re.compile(r"^surd\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(\d+)\s*(?:,\s*(-?\d+)\s*)?\)$")
_CF_RE = re.compile(r"^cf\((.*)\)$")
_FM_RE = re.compile(r"^fm\(\s*(\d+)\s*,\s*(-?\d+)\s*(?:,\s*(\d+)\s*)?\)$")


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(t) for t in text.split(",")]


def parse_real(text: str) -> Real:
    """Parse the literal syntax used on the command line.

    ``"3/5"``, ``"-2"``, ``"0.3"``, ``"surd(1,1,5,2)"`` for (1+sqrt 5)/2,
    ``"cf(1;(1))"`` (periodic part in parentheses), ``"cf(3;7,16)"``
    (finite, i.e. rational) and ``"fm(M,seed)"`` for a sampled element of
    F_M.
    """
    from . import cf

    text = str(text).strip()
    m = _SURD_RE.match(text)
    if m:
        a, b, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        c = int(m.group(4)) if m.group(4) is not None else 1
        return surd(a, b, d, c)
    m = _CF_RE.match(text)
    if m:
        body = m.group(1).strip()
        if "..." in body:
            raise ValueError("write periodic expansions with parentheses, e.g. cf(1;(1))")
        head, _, tail = body.partition(";")
        a0 = int(head)
        period = None
        if "(" in tail:
            pre_text, _, per_text = tail.partition("(")
            if not per_text.endswith(")"):
                raise ValueError(f"unbalanced period in {text!r}")
            pre = _int_list(pre_text.rstrip().rstrip(","))
            period = _int_list(per_text[:-1])
            if not period:
                raise ValueError("empty period")
        else:
            pre = _int_list(tail)
        stream = cf.DigitStream(a0, pre, period=period, terminates=period is None)
        return stream.exact_value()
    m = _FM_RE.match(text)
    if m:
        depth = int(m.group(3)) if m.group(3) else 64
        return cf.sample_FM(int(m.group(1)), depth, int(m.group(2)))
    try:
        return Fraction(text)
    except ValueError:
        raise ValueError(f"cannot parse real literal {text!r}") from None


def format_real(x: Real) -> str:
    """Canonical literal for ``x``; inverse of :func:`parse_real`."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, QuadraticSurd):
        return repr(x)
    literal = getattr(x, "literal", None)
    if literal is not None:
        return literal()
    raise ValueError(f"{x!r} has no literal form")
