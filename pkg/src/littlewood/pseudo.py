"""Pseudo-absolute values ``|q|_D`` attached to divisibility chains
``D = (n_k)`` with ``n_0 = 1`` and ``n_{k-1} | n_k``."""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from typing import Iterator, Sequence


class ChainError(ValueError):
    """The sequence is not a divisibility chain starting at 1."""


def _primes() -> Iterator[int]:
    found: list[int] = []
    for n in itertools.count(2):
        if all(n % p for p in found if p * p <= n):
            found.append(n)
            yield n


class PseudoAbsSeq:
    """A divisibility chain ``n_0 = 1, n_1, n_2, ...``.

    Build with :meth:`adic`, :meth:`factorial`, :meth:`primorial`,
    :meth:`from_list` or :meth:`parse`.  Closed forms are infinite; lists
    are finite and fully validated at construction.
    """

    def __init__(self, kind: str, base: int | None = None, values: Sequence[int] | None = None):
        self.kind = kind
        self.base = base
        self.values = tuple(values) if values is not None else None
        if kind == "adic" and (base is None or base < 2):
            raise ChainError("a-adic sequences need a >= 2")
        if kind == "list":
            _validate_chain(self.values)
        self._cache: list[int] = [1]
        self._gen = self._generate()
        self._lock = threading.Lock()

    @classmethod
    def adic(cls, a: int) -> "PseudoAbsSeq":
        return cls("adic", base=a)

    @classmethod
    def factorial(cls) -> "PseudoAbsSeq":
        return cls("factorial")

    @classmethod
    def primorial(cls) -> "PseudoAbsSeq":
        return cls("primorial")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "PseudoAbsSeq":
        return cls("list", values=[int(v) for v in values])

    @classmethod
    def parse(cls, text: str) -> "PseudoAbsSeq":
        """``2adic``, ``factorial``, ``primorial`` or ``list:1,2,4,8,40``."""
        text = text.strip()
        if text.endswith("adic") and text[:-4].isdigit():
            return cls.adic(int(text[:-4]))
        if text in ("factorial", "primorial"):
            return getattr(cls, text)()
        if text.startswith("list:"):
            try:
                values = [int(v) for v in text[5:].split(",") if v.strip()]
            except ValueError:
                raise ChainError(f"bad list syntax {text!r}") from None
            return cls.from_list(values)
        raise ChainError(f"unknown pseudo-absolute value {text!r}")

    def literal(self) -> str:
        if self.kind == "adic":
            return f"{self.base}adic"
        if self.kind == "list":
            return "list:" + ",".join(map(str, self.values))
        return self.kind

    def __repr__(self):
        return f"PseudoAbsSeq({self.literal()})"

    def __eq__(self, other):
        return isinstance(other, PseudoAbsSeq) and self.literal() == other.literal()

    def __hash__(self):
        return hash(self.literal())

    def _generate(self) -> Iterator[int]:
        if self.kind == "adic":
            n = 1
            while True:
                n *= self.base
                yield n
        elif self.kind == "factorial":
            n = 1
            for k in itertools.count(1):
                n *= k
                yield n
        elif self.kind == "primorial":
            n = 1
            for p in _primes():
                n *= p
                yield n
        elif self.kind == "list":
            yield from self.values[1:]
        else:
            raise ChainError(f"unknown kind {self.kind!r}")

    @property
    def finite(self) -> bool:
        return self.kind == "list"

    def __len__(self):
        if not self.finite:
            raise TypeError("closed-form sequences are infinite")
        return len(self.values)

    def term(self, k: int) -> int:
        """``n_k``; raises ``IndexError`` past the end of a finite list."""
        if k < len(self._cache):
            return self._cache[k]
        with self._lock:
            while len(self._cache) <= k:
                try:
                    nxt = next(self._gen)
                except StopIteration:
                    raise IndexError(f"sequence has only {len(self._cache)} terms") from None
                if nxt % self._cache[-1]:
                    raise ChainError(f"n_{len(self._cache)} = {nxt} is not divisible by "
                                     f"n_{len(self._cache) - 1} = {self._cache[-1]}")
                self._cache.append(nxt)
        return self._cache[k]

    def terms(self, K: int) -> list[int]:
        """``[n_0, ..., n_K]`` (truncated for short lists)."""
        out = []
        for k in range(K + 1):
            try:
                out.append(self.term(k))
            except IndexError:
                break
        return out

    def distinct_terms(self, K: int) -> list[int]:
        """Distinct values among ``n_1..n_K`` greater than 1, in order."""
        out: list[int] = []
        for n in self.terms(K)[1:]:
            if n > 1 and (not out or n != out[-1]):
                out.append(n)
        return out

    def iter_up_to(self, bound: int) -> Iterator[int]:
        """Distinct terms ``n_k <= bound``; finite even for closed forms."""
        last = 1
        for k in itertools.count(0):
            try:
                n = self.term(k)
            except IndexError:
                return
            if n > bound:
                return
            if n != last or k == 0:
                yield n
            last = n


def _validate_chain(values) -> None:
    if not values:
        raise ChainError("empty sequence")
    if values[0] != 1:
        raise ChainError(f"n_0 must be 1, got {values[0]}")
    for k in range(1, len(values)):
        prev, cur = values[k - 1], values[k]
        if cur <= 0 or cur % prev:
            raise ChainError(f"divisibility chain broken: n_{k - 1} = {prev} does not divide "
                             f"n_{k} = {cur}")


def largest_divisor_in_chain(q: int, D: PseudoAbsSeq) -> int:
    q = abs(q)
    best = 1
    for n in D.iter_up_to(q):
        if q % n:
            # every later term is a multiple of n
            break
        best = n
    return best


def pseudo_abs(q: int, D: PseudoAbsSeq) -> Fraction:
    """``|q|_D = 1 / max{n_k : n_k | q}``."""
    if q == 0:
        raise ValueError("|0|_D is not finite; scanners use q >= 1")
    return Fraction(1, largest_divisor_in_chain(q, D))


def unit_identity_check(D: PseudoAbsSeq, K: int) -> bool:
    """``n_k * |n_k|_D == 1`` for every available ``k <= K``."""
    if K < 0:
        raise ValueError("K must be non-negative")
    return all(n * pseudo_abs(n, D) == 1 for n in D.terms(K))


def geometric_growth_check(D: PseudoAbsSeq, C, K: int) -> bool:
    """``n_k <= C**k`` for ``1 <= k <= K`` with ``C`` an exact rational."""
    C = Fraction(C)
    if C <= 1:
        raise ValueError("C must exceed 1")
    if K < 1:
        raise ValueError("K must be at least 1")
    num, den = C.numerator, C.denominator
    terms = D.terms(K)
    return all(n * den ** k <= num ** k for k, n in enumerate(terms) if k >= 1)


def padic_abs(q: int, p: int) -> Fraction:
    """Classical ``|q|_p`` by repeated division."""
    if q == 0:
        raise ValueError("q must be nonzero")
    q = abs(q)
    v = 0
    while q % p == 0:
        q //= p
        v += 1
    return Fraction(1, p ** v)


__all__ = [
    "ChainError", "PseudoAbsSeq", "pseudo_abs", "unit_identity_check",
    "geometric_growth_check", "padic_abs", "largest_divisor_in_chain",
]
