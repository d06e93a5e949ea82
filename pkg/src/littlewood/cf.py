"""Regular continued fractions: expansion, convergents, the sets F_M and
sampling of bounded-digit numbers."""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import PrecisionExhausted, QuadraticSurd, surd
from .intervals import Interval, iroot

SAMPLE_CHUNK = 256
DEFAULT_DIGIT_CAP = 200_000


class StreamExhausted(PrecisionExhausted):
    """The digit stream cannot supply the requested digit."""


class PeriodNotFound(RuntimeError):
    pass


class DigitStream:
    """Partial quotients ``[a0; a1, a2, ...]`` of a real number.

    Exactly one source of digits beyond ``prefix`` is allowed:

    * ``period`` -- the digits repeat forever (a quadratic irrational),
    * ``sampler=(M, seed)`` -- i.i.d. uniform digits on ``1..M`` generated
      in seeded chunks, so any digit can be regenerated independently,
    * ``terminates=True`` -- ``prefix`` is the full expansion of a rational.

    With none of these the stream is a known prefix of an unknown number
    and asking for more digits raises :class:`StreamExhausted`.
    """

    def __init__(self, a0: int = 0, prefix: Sequence[int] = (), period: Sequence[int] | None = None,
                 sampler: tuple[int, int] | None = None, terminates: bool = False,
                 bound: int | None = None, depth: int | None = None,
                 digit_cap: int = DEFAULT_DIGIT_CAP):
        prefix = tuple(int(a) for a in prefix)
        if any(a < 1 for a in prefix):
            raise ValueError("partial quotients must be positive")
        if period is not None:
            period = tuple(int(a) for a in period)
            if not period or any(a < 1 for a in period):
                raise ValueError("period digits must be positive")
        sources = (period is not None) + (sampler is not None) + bool(terminates)
        if sources > 1:
            raise ValueError("choose one of period, sampler, terminates")
        if terminates and prefix and prefix[-1] == 1 and len(prefix) > 0:
            # canonical form: last digit >= 2 ([.., a, 1] == [.., a+1])
            if len(prefix) == 1:
                a0, prefix = a0 + 1, ()
            else:
                prefix = prefix[:-2] + (prefix[-2] + 1,)
        self.a0 = int(a0)
        self.prefix = prefix
        self.period = period
        self.sampler = tuple(sampler) if sampler is not None else None
        self.terminates = bool(terminates)
        self.bound = bound
        self.depth = depth
        self.digit_cap = digit_cap
        self._chunks: dict[int, list[int]] = {}
        self._p = [1, self.a0]   # p_{-1}, p_0
        self._q = [0, 1]         # q_{-1}, q_0
        self._lock = threading.RLock()
        self._surd = None        # set by expand_surd, which knows the exact value
        if bound is not None:
            bad = [a for a in prefix + (period or ()) if a > bound]
            if bad:
                raise ValueError(f"digit {bad[0]} exceeds declared bound {bound}")

    # -- identity -------------------------------------------------------

    def _key(self):
        return (self.a0, self.prefix, self.period, self.sampler, self.terminates)

    def __eq__(self, other):
        return isinstance(other, DigitStream) and self._key() == other._key()

    def __hash__(self):
        return hash(("stream",) + self._key())

    def clone(self) -> "DigitStream":
        return DigitStream(self.a0, self.prefix, self.period, self.sampler, self.terminates,
                           self.bound, self.depth, self.digit_cap)

    @property
    def infinite(self) -> bool:
        return self.period is not None or self.sampler is not None

    def length(self) -> int | None:
        """Number of digits ``a1..`` available, or ``None`` if unbounded."""
        if self.infinite:
            return None
        return len(self.prefix)

    # -- digits ---------------------------------------------------------

    def _sampled(self, i: int) -> int:
        M, seed = self.sampler
        chunk, offset = divmod(i - 1, SAMPLE_CHUNK)
        digits = self._chunks.get(chunk)
        if digits is None:
            rng = random.Random(f"F_M:{M}:{seed}:{chunk}")
            digits = [rng.randint(1, M) for _ in range(SAMPLE_CHUNK)]
            self._chunks[chunk] = digits
        return digits[offset]

    def digit(self, i: int) -> int:
        """Partial quotient ``a_i``; ``digit(0)`` is the integer part."""
        if i == 0:
            return self.a0
        if i < 0:
            raise IndexError(i)
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        if i > self.digit_cap:
            raise StreamExhausted(f"digit {i} beyond cap {self.digit_cap}")
        j = i - len(self.prefix) - 1
        if self.period is not None:
            return self.period[j % len(self.period)]
        if self.sampler is not None:
            return self._sampled(i)
        if self.terminates:
            raise StreamExhausted(f"finite expansion has only {len(self.prefix)} digits")
        raise StreamExhausted(f"only {len(self.prefix)} digits known")

    def digits(self, n: int) -> list[int]:
        """``[a1, ..., an]``."""
        return [self.digit(i) for i in range(1, n + 1)]

    def _extend(self, k: int):
        # _p[j+1] holds p_j
        if len(self._p) >= k + 2:
            return
        with self._lock:
            while len(self._p) < k + 2:
                j = len(self._p) - 1
                a = self.digit(j)
                self._p.append(a * self._p[-1] + self._p[-2])
                self._q.append(a * self._q[-1] + self._q[-2])

    def convergent(self, k: int) -> tuple[int, int]:
        self._extend(k)
        return self._p[k + 1], self._q[k + 1]

    # -- values ---------------------------------------------------------

    def exact_value(self):
        """Closed form when one exists (rational or quadratic surd), else ``None``."""
        if self.terminates:
            n = len(self.prefix)
            p, q = self.convergent(n)
            return Fraction(p, q)
        if self.period is not None:
            return self.to_surd()
        return None

    def to_surd(self):
        """Fixed point of the period's Moebius map, pulled back through the prefix."""
        if self.period is None:
            raise ValueError("not a periodic stream")
        if self._surd is not None:
            return self._surd
        # y = [p1; p2, ..., pk, y]  =>  kk*y^2 + (kk1 - hk)*y - hk1 = 0
        h1, h0 = 1, 0
        k1, k0 = 0, 1
        for a in self.period:
            h1, h0 = a * h1 + h0, h1
            k1, k0 = a * k1 + k0, k1
        hk, hk1, kk, kk1 = h1, h0, k1, k0
        B = kk1 - hk
        disc = B * B + 4 * kk * hk1
        y = surd(-B, 1, disc, 2 * kk)
        # x = [a0; prefix..., y] = (p_n y + p_{n-1}) / (q_n y + q_{n-1})
        p1, p0 = self.a0, 1
        q1, q0 = 1, 0
        for a in self.prefix:
            p1, p0 = a * p1 + p0, p1
            q1, q0 = a * q1 + q0, q1
        num = y * p1 + p0
        den = y * q1 + q0
        if isinstance(den, Fraction):
            return num / den
        return num * den.reciprocal()

    def enclose(self, bits: int) -> Interval:
        exact = self.exact_value()
        if exact is not None:
            if isinstance(exact, Fraction):
                return Interval.point(exact)
            return exact.enclose(bits)
        target = 1 << (bits + 1)
        k = 1
        while True:
            try:
                p, q = self.convergent(k)
                p2, q2 = self.convergent(k + 1)
            except StreamExhausted as exc:
                raise StreamExhausted(f"{exc}; cannot reach 2^-{bits}") from None
            if q * q2 >= target:
                break
            k = max(k + 1, int(k * 1.5))
        lo, hi = sorted((Fraction(p, q), Fraction(p2, q2)))
        return Interval(lo, hi).round_out(bits)

    def __float__(self):
        return float(self.enclose(64).mid)

    def literal(self) -> str:
        if self.sampler is not None:
            return f"fm({self.sampler[0]},{self.sampler[1]})"
        body = ",".join(map(str, self.prefix))
        if self.period is not None:
            per = "(" + ",".join(map(str, self.period)) + ")"
            body = f"{body},{per}" if body else per
        return f"cf({self.a0};{body})" if body else f"cf({self.a0})"

    def __repr__(self):
        return f"DigitStream({self.literal()})"


@dataclass(frozen=True)
class ConvergentTable:
    """Rows ``(k, p_k, q_k)`` for ``k = 0..K``."""

    rows: tuple[tuple[int, int, int], ...]
    source: DigitStream

    def __len__(self):
        return len(self.rows)

    @property
    def K(self) -> int:
        return self.rows[-1][0]

    def p(self, k: int) -> int:
        return self.rows[k][1]

    def q(self, k: int) -> int:
        return self.rows[k][2]

    def denominators(self) -> list[int]:
        """``[q_1, ..., q_K]``."""
        return [q for k, _, q in self.rows if k >= 1]


def expand_rational(x) -> list[int]:
    """Euclid: ``[a0, a1, ..., an]`` with ``an >= 2`` unless ``x`` is an integer."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    out = []
    while True:
        a, r = divmod(num, den)
        out.append(a)
        if r == 0:
            break
        num, den = den, r
    return out


def expand_surd(x: QuadraticSurd, max_digits: int = 100_000) -> DigitStream:
    """Eventually periodic expansion of a quadratic irrational."""
    # write x = (P + sqrt(D)) / Q with Q | D - P^2
    if x.b > 0:
        P, D, Q = x.a, x.b * x.b * x.d, x.c
    else:
        P, D, Q = -x.a, x.b * x.b * x.d, -x.c
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    r = iroot(D, 2)
    seen: dict[tuple[int, int], int] = {}
    digits: list[int] = []
    while (P, Q) not in seen:
        if len(digits) > max_digits:
            raise PeriodNotFound(f"no period within {max_digits} digits")
        seen[(P, Q)] = len(digits)
        a = (P + r) // Q if Q > 0 else (P + r + 1) // Q
        digits.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    pre, per = digits[:start], digits[start:]
    if pre:
        a0, pre = pre[0], pre[1:]
    else:
        a0, per = per[0], per[1:] + per[:1]
    stream = DigitStream(a0, pre, period=per)
    stream._surd = x
    return stream


def as_stream(x) -> DigitStream:
    if isinstance(x, DigitStream):
        return x
    if isinstance(x, QuadraticSurd):
        return expand_surd(x)
    if isinstance(x, (int, Fraction)):
        digits = expand_rational(x)
        return DigitStream(digits[0], digits[1:], terminates=True)
    raise TypeError(f"no continued fraction for {x!r}")


def convergents(s, K: int) -> ConvergentTable:
    """Convergent table with rows ``k = 0..K``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    s = as_stream(s)
    if s.terminates and len(s.prefix) < K:
        raise StreamExhausted(f"expansion has only {len(s.prefix)} partial quotients after a0")
    s.convergent(K)
    rows = tuple((k, s._p[k + 1], s._q[k + 1]) for k in range(K + 1))
    return ConvergentTable(rows, s)


def in_FM(s, M: int, K: int) -> bool:
    """Whether ``a_i <= M`` for ``1 <= i <= K`` (fewer if the expansion is finite)."""
    if M < 1 or K < 1:
        raise ValueError("M and K must be positive")
    s = as_stream(s)
    n = K if s.length() is None else min(K, s.length())
    return all(s.digit(i) <= M for i in range(1, n + 1))


def sample_FM(M: int, depth: int, seed: int) -> DigitStream:
    """A number in F_M with i.i.d. uniform digits on ``1..M``.

    This is a uniform-digit proxy, not Kaufman's measure.  ``depth`` is
    informational; the stream extends on demand.
    """
    if M < 3:
        raise ValueError("F_M sampling requires M >= 3")
    if depth < 1:
        raise ValueError("depth must be positive")
    return DigitStream(0, (), sampler=(M, seed), bound=M, depth=depth)


def fibonacci_like(K: int) -> list[int]:
    """Denominators ``q_1..q_K`` of the all-ones expansion: 1, 2, 3, 5, ..."""
    out, a, b = [], 1, 1
    for _ in range(K):
        out.append(b)
        a, b = b, a + b
    return out


def growth_bounds_check(t: ConvergentTable, M: int) -> bool:
    """``Fib_k <= q_k <= (2M)**k`` on every row ``k >= 1``."""
    fib = fibonacci_like(t.K)
    return all(fib[k - 1] <= q <= (2 * M) ** k for k, _, q in t.rows if k >= 1)


def lacunarity_ratio(seq: Iterable[int]) -> Fraction:
    """Smallest consecutive ratio ``seq[n+1] / seq[n]``."""
    seq = [int(v) for v in seq]
    if len(seq) < 2:
        raise ValueError("need at least two terms")
    if seq[0] <= 0 or any(b <= a for a, b in zip(seq, seq[1:])):
        raise ValueError("sequence must be strictly increasing and positive")
    return min(Fraction(b, a) for a, b in zip(seq, seq[1:]))


def is_lacunary(seq: Iterable[int], level) -> bool:
    level = Fraction(level)
    if level <= 1:
        raise ValueError("lacunarity level must exceed 1")
    return lacunarity_ratio(seq) >= level


def _check_table(t: ConvergentTable) -> bool:
    """Recurrence and determinant identities; used by tests and verify."""
    s = t.source
    for k, p, q in t.rows:
        if k >= 1:
            pk1, qk1 = t.p(k - 1), t.q(k - 1)
            if p * qk1 - pk1 * q != (-1) ** (k - 1):
                return False
            if math.gcd(p, q) != 1:
                return False
        a = s.digit(k)
        pm2, qm2 = (t.p(k - 2), t.q(k - 2)) if k >= 2 else ((1, 0) if k == 1 else (0, 1))
        pm1, qm1 = (t.p(k - 1), t.q(k - 1)) if k >= 1 else (1, 0)
        if k >= 1 and (p != a * pm1 + pm2 or q != a * qm1 + qm2):
            return False
    return True
