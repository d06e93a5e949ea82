"""Discrepancy of finite point sets mod 1, exponential sums, the
Erdos-Turan bound, and scaling experiments for dilated sequences.

Discrepancy here is unnormalized:

    D_N = sup_I | #{n <= N : x_n in I} - N |I| |

over all subintervals ``I`` of ``[0, 1]`` (open, closed or half-open).
Divide by ``N`` for the normalized value.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from . import cf
from .exact import PrecisionExhausted, Real, enclose, format_real, parse_real
from .intervals import Interval, cos_sin_2pi, cos_sin_2pi_interval, iroot

Point = Union[Fraction, Interval]
SAMPLING_LAW = "uniform i.i.d. digits on {1..M} (proxy; not Kaufman's measure)"


class UnresolvedEnclosure(ValueError):
    """Exact discrepancy was asked for points known only up to enclosures."""


@dataclass(frozen=True)
class PointSet:
    """Residues mod 1, exact or enclosed."""

    points: tuple

    def __post_init__(self):
        if not self.points:
            raise ValueError("a point set needs at least one point")
        for x in self.points:
            lo, hi = (x.lo, x.hi) if isinstance(x, Interval) else (x, x)
            if lo < 0 or hi > 1 or (not isinstance(x, Interval) and x >= 1):
                raise ValueError(f"residue {x!r} outside [0, 1)")

    @classmethod
    def from_values(cls, values: Iterable) -> "PointSet":
        """Reduce rationals (or literals such as ``"3/7"``) mod 1."""
        pts = []
        for v in values:
            if isinstance(v, Interval):
                pts.append(v)
                continue
            v = Fraction(v) if not isinstance(v, str) else Fraction(v.strip())
            pts.append(v - math.floor(v))
        return cls(tuple(pts))

    @property
    def N(self) -> int:
        return len(self.points)

    @property
    def exact(self) -> bool:
        return all(not isinstance(x, Interval) or x.is_point for x in self.points)

    def rationals(self) -> list[Fraction]:
        if not self.exact:
            raise UnresolvedEnclosure("point set has non-degenerate enclosures")
        return [x.lo if isinstance(x, Interval) else x for x in self.points]


@dataclass
class DiscrepancyReport:
    N: int
    value: Fraction | Interval
    witness: tuple | None = None          # (lo, hi, lo_closed, hi_closed)
    et_bounds: list = field(default_factory=list)  # [(K, Interval)]

    @property
    def normalized(self):
        return self.value * Fraction(1, self.N)

    def best_et(self):
        if not self.et_bounds:
            return None
        return min(self.et_bounds, key=lambda kb: kb[1].hi)


# -- exact discrepancy --------------------------------------------------------

def _common_scale(xs: Sequence[Fraction]) -> tuple[list[int], int]:
    L = 1
    for x in xs:
        L = L * x.denominator // math.gcd(L, x.denominator)
    return [x.numerator * (L // x.denominator) for x in xs], L


def discrepancy_exact(ps: PointSet) -> DiscrepancyReport:
    """Exact discrepancy by the sorted two-max formula

    ``D_N = N * (max_i(i/N - x_(i)) + max_i(x_(i) - (i-1)/N))``,

    together with an interval attaining the supremum (as a limit when an
    endpoint is open).
    """
    X, L = _common_scale(ps.rationals())
    X.sort()
    N = len(X)
    # scaled by N*L
    a_best, i1 = max(((i + 1) * L - N * x, i) for i, x in enumerate(X))
    b_best, j1 = max((N * x - i * L, i) for i, x in enumerate(X))
    value = Fraction(a_best + b_best, L)
    xs = sorted(ps.rationals())
    if j1 <= i1:
        witness = (xs[j1], xs[i1], True, True)
    else:
        witness = (xs[i1], xs[j1], False, False)
    return DiscrepancyReport(N, value, witness)


def interval_deviation(ps: PointSet, lo: Fraction, hi: Fraction, lo_closed: bool,
                       hi_closed: bool) -> Fraction:
    """``|count - N*length|`` for one interval; used to check witnesses."""
    count = 0
    for x in ps.rationals():
        left = x >= lo if lo_closed else x > lo
        right = x <= hi if hi_closed else x < hi
        count += left and right
    return abs(count - ps.N * (hi - lo))


def _fixed_point_bounds(lo_ints: Sequence[int], hi_ints: Sequence[int], W: int) -> Interval:
    """Discrepancy enclosure for points with ``lo/2^W <= x <= hi/2^W``.

    Order statistics are monotone in every coordinate, so sorting the lower
    and upper ends separately brackets each ``x_(i)`` without deciding the
    true order.
    """
    N = len(lo_ints)
    one = 1 << W
    los = sorted(lo_ints)
    his = sorted(hi_ints)
    a_lo = max((i + 1) * one - N * h for i, h in enumerate(his))
    a_hi = max((i + 1) * one - N * l for i, l in enumerate(los))
    b_lo = max(N * l - i * one for i, l in enumerate(los))
    b_hi = max(N * h - i * one for i, h in enumerate(his))
    return Interval(Fraction(a_lo + b_lo, one), Fraction(a_hi + b_hi, one))


def discrepancy(ps: PointSet, bits: int = 64) -> DiscrepancyReport:
    """Exact report for exact points; an enclosure otherwise."""
    if ps.exact:
        return discrepancy_exact(ps)
    one = 1 << bits
    los = [math.floor(x.lo * one) if isinstance(x, Interval) else math.floor(x * one)
           for x in ps.points]
    his = [-math.floor(-(x.hi if isinstance(x, Interval) else x) * one) for x in ps.points]
    return DiscrepancyReport(ps.N, _fixed_point_bounds(los, his, bits))


# -- exponential sums -----------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _trig_fixed(x: Fraction, bits: int) -> tuple[int, int, int, int]:
    c, s = cos_sin_2pi(x, bits)
    one = 1 << bits
    return (math.floor(c.lo * one), -math.floor(-c.hi * one),
            math.floor(s.lo * one), -math.floor(-s.hi * one))


def _sum_bounds(ps: PointSet, k: int, bits: int) -> tuple[int, int, int, int]:
    rlo = rhi = ilo = ihi = 0
    one = 1 << bits
    for x in ps.points:
        if isinstance(x, Interval) and not x.is_point:
            t = x * k
            t = t - math.floor(t.lo)
            c, s = cos_sin_2pi_interval(t, bits)
            cl, ch = math.floor(c.lo * one), -math.floor(-c.hi * one)
            sl, sh = math.floor(s.lo * one), -math.floor(-s.hi * one)
        else:
            x = x.lo if isinstance(x, Interval) else x
            cl, ch, sl, sh = _trig_fixed((k * x) % 1, bits)
        rlo += cl
        rhi += ch
        ilo += sl
        ihi += sh
    return rlo, rhi, ilo, ihi


def _sq_range(lo: int, hi: int) -> tuple[int, int]:
    if lo >= 0:
        return lo * lo, hi * hi
    if hi <= 0:
        return hi * hi, lo * lo
    return 0, max(lo * lo, hi * hi)


def exp_sum(ps: PointSet, k: int, bits: int = 64) -> Interval:
    """Enclosure of ``|sum_n e(k x_n)|``, ``e(t) = exp(2 pi i t)``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    rlo, rhi, ilo, ihi = _sum_bounds(ps, k, bits)
    r2lo, r2hi = _sq_range(rlo, rhi)
    i2lo, i2hi = _sq_range(ilo, ihi)
    lo2, hi2 = r2lo + i2lo, r2hi + i2hi
    root_lo = iroot(lo2, 2)
    root_hi = iroot(hi2, 2)
    if root_hi * root_hi < hi2:
        root_hi += 1
    one = 1 << bits
    lo, hi = Fraction(root_lo, one), Fraction(root_hi, one)
    # |S| <= N always
    hi = min(hi, Fraction(ps.N))
    return Interval(min(lo, hi), hi)


def exp_sums(ps: PointSet, K: int, bits: int = 64) -> list[Interval]:
    """``[|S_1|, ..., |S_K|]``."""
    return [exp_sum(ps, k, bits) for k in range(1, K + 1)]


def _et_from_sums(N: int, K: int, sums: Sequence[Interval]) -> Interval:
    tail = Interval.point(0)
    for k in range(1, K + 1):
        tail = tail + sums[k - 1] * Fraction(1, k)
    return Interval.point(Fraction(N, K + 1)) + tail * 3


def erdos_turan_bound(ps: PointSet, K: int, bits: int = 64) -> Interval:
    """Enclosure of ``N/(K+1) + 3 * sum_{k<=K} |sum_n e(k x_n)| / k``."""
    if K < 1:
        raise ValueError("K must be a positive integer")
    return _et_from_sums(ps.N, K, exp_sums(ps, K, bits))


def erdos_turan_bounds(ps: PointSet, Ks: Sequence[int], bits: int = 64) -> list[tuple[int, Interval]]:
    """Bounds for several ``K`` sharing the exponential sums."""
    Ks = sorted(set(Ks))
    sums = exp_sums(ps, Ks[-1], bits)
    out = []
    tail = Interval.point(0)
    k_done = 0
    for K in Ks:
        for k in range(k_done + 1, K + 1):
            tail = tail + sums[k - 1] * Fraction(1, k)
        k_done = K
        out.append((K, Interval.point(Fraction(ps.N, K + 1)) + tail * 3))
    return out


def et_report(ps: PointSet, Ks: Sequence[int], bits: int = 64) -> DiscrepancyReport:
    report = discrepancy(ps, bits)
    report.et_bounds = erdos_turan_bounds(ps, Ks, bits)
    return report


def et_dominates(ps: PointSet, Ks: Sequence[int], bits: int = 64, cap: int = 2048) -> dict:
    """Certified ``D_N <= ET(K)`` for each ``K``.

    Returns ``{K: True | False | None}``; ``None`` means undecided at
    ``cap`` bits, ``False`` a certified violation.
    """
    D = discrepancy_exact(ps).value
    pending = sorted(set(Ks))
    verdict: dict = {}
    while pending and bits <= cap:
        left = []
        for K, bound in erdos_turan_bounds(ps, pending, bits):
            if D <= bound.lo:
                verdict[K] = True
            elif D > bound.hi:
                verdict[K] = False
            else:
                left.append(K)
        pending = left
        bits *= 2
    for K in pending:
        verdict[K] = None
    return verdict


# -- dilated sequences -------------------------------------------------------------

def fixed_residues(multipliers: Sequence[int], x: Real, W: int = 64,
                   cap: int = 1 << 15) -> tuple[list[int], list[int], int]:
    """Enclose ``{m x}`` for every ``m`` as ``[lo, hi] / 2**W``.

    Returns ``(lo_ints, hi_ints, W)``; ``W`` grows if a residue cannot be
    separated from an integer.
    """
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        one = 1 << W
        res = [(m * x) % 1 for m in multipliers]
        return ([math.floor(r * one) for r in res], [-math.floor(-r * one) for r in res], W)
    top = max(int(m).bit_length() for m in multipliers)
    while W <= cap:
        P = top + W + 8
        box = enclose(x, P)
        scale = 1 << P
        Xlo, Xhi = box.lo * scale, box.hi * scale
        if Xlo.denominator != 1 or Xhi.denominator != 1:
            box = box.round_out(P)
            Xlo, Xhi = box.lo * scale, box.hi * scale
        Xlo, Xhi = int(Xlo), int(Xhi)
        shift = P - W
        los, his = [], []
        ok = True
        for m in multipliers:
            a, b = m * Xlo, m * Xhi
            n = a >> P
            if (b - 1) >> P != n:
                ok = False
                break
            base = n << P
            los.append((a - base) >> shift)
            his.append(-((base - b) >> shift))
        if ok:
            return los, his, W
        W *= 2
    raise PrecisionExhausted("a residue stayed within 2^-cap of an integer")


def residue_points(multipliers: Sequence[int], x: Real, W: int = 64) -> PointSet:
    """``{m x mod 1}`` as a point set (exact when ``x`` is rational)."""
    if isinstance(x, (int, Fraction)):
        return PointSet.from_values(Fraction(m) * x for m in multipliers)
    los, his, W = fixed_residues(multipliers, x, W)
    one = 1 << W
    return PointSet(tuple(Interval(Fraction(lo, one), Fraction(hi, one)) for lo, hi in zip(los, his)))


def et_functional(a: Sequence[int], x: Real, u: int, v: int, bits: int = 64) -> Interval:
    """``F(u, v, x) = sum_{h=1}^{v} (1/h) |sum_{n=u}^{v} e(h a_n x)|``.

    ``a[0]`` is ``a_1``; the sequence is indexed from 1, so ``n = 0``
    contributes nothing.
    """
    if not 0 <= u < v:
        raise ValueError("need 0 <= u < v")
    if len(a) < v:
        raise ValueError(f"sequence has {len(a)} terms, need {v}")
    ms = [a[n - 1] for n in range(max(u, 1), v + 1)]
    ps = residue_points(ms, x, bits)
    total = Interval.point(0)
    for h in range(1, v + 1):
        total = total + exp_sum(ps, h, bits) * Fraction(1, h)
    return total


# -- scaling experiments ----------------------------------------------------------------

def sequence_terms(spec: str, N: int) -> list[int]:
    """First ``N`` terms ``a_1..a_N`` of a named integer sequence.

    ``pow2`` (or ``powB``), ``identity``, ``fib`` (convergent denominators of
    the golden ratio) or ``cf:<literal>`` (convergent denominators of any
    real literal).
    """
    if spec == "identity":
        return list(range(1, N + 1))
    if spec.startswith("pow") and spec[3:].isdigit():
        b = int(spec[3:])
        if b < 2:
            raise ValueError("powB needs B >= 2")
        return [b ** n for n in range(1, N + 1)]
    if spec == "fib":
        spec = "cf:cf(1;(1))"
    if spec.startswith("cf:"):
        stream = cf.as_stream(parse_real(spec[3:]))
        return cf.convergents(stream, N).denominators()
    raise ValueError(f"unknown sequence {spec!r}")


def loglog_slope(Ns: Sequence[int], Ds: Sequence[float], fit_min: int = 64) -> float:
    """Least-squares slope of ``log D`` against ``log N`` over ``N >= fit_min``."""
    pairs = [(n, d) for n, d in zip(Ns, Ds) if n >= fit_min and d > 0]
    if len(pairs) < 2:
        pairs = [(n, d) for n, d in zip(Ns, Ds) if d > 0]
    if len(pairs) < 2:
        raise ValueError("need at least two positive grid points to fit a slope")
    logn = np.log([float(n) for n, _ in pairs])
    logd = np.log([float(d) for _, d in pairs])
    return float(np.polyfit(logn, logd, 1)[0])


@dataclass
class ScalingResult:
    sequence: str
    grid: list[int]
    labels: list[str]
    rows: list[tuple]          # (sample, label, N, D_lo, D_hi)
    slopes: list[float]
    sampling_law: str = SAMPLING_LAW
    fit_min: int = 64

    @property
    def median_slope(self) -> float:
        return float(statistics.median(self.slopes))

    def final_normalized(self) -> list[Interval]:
        """``D_N / N`` at the largest grid point, one per sample."""
        N = self.grid[-1]
        return [Interval(lo, hi) * Fraction(1, N) for _, _, n, lo, hi in self.rows if n == N]


def default_grid(N_max: int, N_min: int = 16) -> list[int]:
    grid = []
    n = N_min
    while n < N_max:
        grid.append(n)
        n *= 2
    grid.append(N_max)
    return grid


def _scaling_one(x: Real, terms: Sequence[int], grid: Sequence[int], W: int):
    los, his, W = fixed_residues(terms, x, W)
    out = []
    for N in grid:
        box = _fixed_point_bounds(los[:N], his[:N], W)
        out.append((N, box.lo, box.hi))
    return out


def scaling_experiment(M: int = 3, sequence: str = "pow2", N_grid: Sequence[int] | None = None,
                       samples: int = 20, seed: int = 0, xs: Sequence[Real] | None = None,
                       depth: int = 64, fit_min: int = 64, workers: int = 1,
                       W: int = 64) -> ScalingResult:
    """Discrepancy of ``{a_n x : n <= N}`` along a grid of ``N``.

    ``x`` runs over ``samples`` draws from F_M (seeds ``seed*10000 + i``)
    unless explicit ``xs`` are given.  Each sample gets a least-squares
    log-log slope over the grid points with ``N >= fit_min``.
    """
    grid = sorted(set(N_grid)) if N_grid else default_grid(4096)
    if xs is None:
        xs = [cf.sample_FM(M, depth, seed * 10000 + i) for i in range(samples)]
    labels = [_label(x) for x in xs]
    terms = sequence_terms(sequence, grid[-1])

    def run(i):
        return _scaling_one(xs[i], terms, grid, W)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(len(xs))))
    else:
        results = [run(i) for i in range(len(xs))]
    rows, slopes = [], []
    for i, res in enumerate(results):
        for N, lo, hi in res:
            rows.append((i, labels[i], N, lo, hi))
        slopes.append(loglog_slope([N for N, _, _ in res], [(lo + hi) / 2 for _, lo, hi in res],
                                   fit_min))
    return ScalingResult(sequence, list(grid), labels, rows, slopes, fit_min=fit_min)


def _label(x) -> str:
    try:
        return format_real(x)
    except ValueError:
        return repr(x)


__all__ = [
    "PointSet", "DiscrepancyReport", "UnresolvedEnclosure", "discrepancy_exact", "discrepancy",
    "exp_sum", "exp_sums", "erdos_turan_bound", "erdos_turan_bounds", "et_dominates",
    "et_functional", "scaling_experiment", "ScalingResult", "sequence_terms", "loglog_slope",
    "residue_points", "fixed_residues", "interval_deviation", "SAMPLING_LAW",
]
