"""Approximation products and running-minimum scans.

Products (all with ``q >= 1``):

* ``dirichlet(alpha)``:          ``q ||q alpha||``
* ``littlewood(alpha, beta)``:   ``q ||q alpha|| ||q beta||``
* ``hybrid(alpha, beta, gamma)``: ``q ||q alpha|| ||q beta - gamma||``
* ``mixed(alpha, D, delta)``:    ``q |q|_D ||q alpha - delta||``

Values are certified :class:`~littlewood.intervals.Interval` enclosures;
they collapse to a point whenever the inputs make the product rational.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .cf import ConvergentTable, as_stream
from .exact import (DEFAULT_PRECISION_CAP, PrecisionExhausted, Real, approximate, enclose,
                    format_real, scaled_norm_dist)
from .intervals import Interval, log_power_enclosure
from .pseudo import PseudoAbsSeq, largest_divisor_in_chain

DEFAULT_REL_BITS = 40
KINDS = ("dirichlet", "littlewood", "hybrid", "mixed")


@dataclass(frozen=True)
class ProductSpec:
    kind: str
    alpha: Real
    beta: Real | None = None
    shift: Real = Fraction(0)
    pseudo: PseudoAbsSeq | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown product kind {self.kind!r}")
        if self.kind in ("littlewood", "hybrid") and self.beta is None:
            raise ValueError(f"{self.kind} needs beta")
        if self.kind == "mixed" and self.pseudo is None:
            raise ValueError("mixed needs a pseudo-absolute value sequence")
        if self.kind == "littlewood" and self.shift != 0:
            raise ValueError("littlewood has no shift; use hybrid")

    def describe(self) -> dict:
        out = {"kind": self.kind, "alpha": format_real(self.alpha)}
        if self.beta is not None:
            out["beta"] = format_real(self.beta)
        if self.kind in ("hybrid", "mixed"):
            out["shift"] = format_real(self.shift)
        if self.pseudo is not None:
            out["pseudo"] = self.pseudo.literal()
        return out


def dirichlet(alpha) -> ProductSpec:
    return ProductSpec("dirichlet", alpha)


def littlewood(alpha, beta) -> ProductSpec:
    return ProductSpec("littlewood", alpha, beta)


def hybrid(alpha, beta, gamma) -> ProductSpec:
    return ProductSpec("hybrid", alpha, beta, gamma)


def mixed(alpha, D: PseudoAbsSeq, delta=Fraction(0)) -> ProductSpec:
    return ProductSpec("mixed", alpha, None, delta, D)


@dataclass(frozen=True)
class MinRecord:
    q: int
    value: Interval
    bound: Interval | None = None

    @property
    def beats_bound(self) -> bool | None:
        if self.bound is None:
            return None
        return self.value.hi < self.bound.lo


def factors(spec: ProductSpec, q: int, cap: int = DEFAULT_PRECISION_CAP) -> tuple[int, list[Real]]:
    """Integer multiplier and exact distance factors of the product at ``q``."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if spec.kind == "dirichlet":
        return q, [scaled_norm_dist(q, spec.alpha, cap=cap)]
    if spec.kind == "littlewood":
        return q, [scaled_norm_dist(q, spec.alpha, cap=cap), scaled_norm_dist(q, spec.beta, cap=cap)]
    if spec.kind == "hybrid":
        return q, [scaled_norm_dist(q, spec.alpha, cap=cap),
                   scaled_norm_dist(q, spec.beta, spec.shift, cap=cap)]
    # q |q|_D is the integer q / n*
    return q // largest_divisor_in_chain(q, spec.pseudo), [
        scaled_norm_dist(q, spec.alpha, spec.shift, cap=cap)]


def factor_enclosure(x: Real, rel_bits: int, cap: int = DEFAULT_PRECISION_CAP) -> Interval:
    """Enclosure of a non-negative real with relative width ``<= 2**-rel_bits``.

    Deterministic in ``rel_bits``.  Irrational inputs are never zero, so
    refinement continues until the lower end separates from 0 (or the cap).
    """
    if isinstance(x, (int, Fraction)):
        return Interval.point(x)
    bits = rel_bits + 8
    while True:
        box = enclose(x, bits)
        lo = max(box.lo, Fraction(0))
        box = Interval(lo, max(box.hi, lo))
        if lo > 0 and box.width * (1 << rel_bits) <= lo:
            return box
        if bits >= cap:
            raise PrecisionExhausted(f"relative precision 2^-{rel_bits} not reached at {cap} bits")
        if lo > 0:
            # about -log2(lo) extra bits are needed
            magnitude = lo.denominator.bit_length() - lo.numerator.bit_length() + 1
            bits = min(cap, max(bits + 8, rel_bits + 8 + max(0, magnitude)))
        else:
            bits = min(cap, bits * 2)


def product_value(spec: ProductSpec, q: int, rel_bits: int = DEFAULT_REL_BITS,
                  cap: int = DEFAULT_PRECISION_CAP) -> Interval:
    """Certified enclosure of the product at ``q`` (a point when exact)."""
    m, fs = factors(spec, q, cap)
    value = Interval.point(m)
    for f in fs:
        value = value * factor_enclosure(f, rel_bits + 2, cap)
    return value


def bound_rhs(q: int, eps, bits: int = 64) -> Interval:
    """Enclosure of ``(log q) ** -(1/2 - eps)``."""
    eps = Fraction(eps) if not isinstance(eps, float) else Fraction(str(eps))
    if q <= 1:
        raise ValueError("bound needs q >= 2 (log q must be positive)")
    if not 0 <= eps <= Fraction(1, 2):
        raise ValueError("eps must lie in [0, 1/2]")
    return log_power_enclosure(q, eps - Fraction(1, 2), bits)


def _strictly_less(spec, q, value, best: MinRecord, rel_bits, cap):
    """Decide ``value(q) < best.value`` with refinement.

    Returns the (possibly refined) enclosure when certainly less, else None.
    Near-ties that cannot be separated are not records.
    """
    if value.hi < best.value.lo:
        return value
    if value.lo >= best.value.hi:
        return None
    bits = rel_bits
    while bits < 4 * rel_bits + 64:
        bits *= 2
        value = product_value(spec, q, bits, cap)
        if value.hi < best.value.lo:
            return value
        if value.lo >= best.value.hi:
            return None
    return None


def _float_of(x) -> float:
    return float(approximate(x, 60))


def _prefilter_args(spec: ProductSpec, q_to: int):
    if q_to >= 1 << 50:
        return None
    try:
        alpha = _float_of(spec.alpha)
        beta = _float_of(spec.beta) if spec.beta is not None else 0.0
        shift = _float_of(spec.shift)
    except ArithmeticError:
        return None
    if spec.kind == "dirichlet":
        return alpha, 0.0, 0.0, 0.0, False, np.empty(0, dtype=np.int64)
    if spec.kind == "littlewood":
        return alpha, 0.0, beta, 0.0, True, np.empty(0, dtype=np.int64)
    if spec.kind == "hybrid":
        return alpha, 0.0, beta, shift, True, np.empty(0, dtype=np.int64)
    chain = [n for n in spec.pseudo.iter_up_to(q_to) if n > 1]
    return alpha, shift, 0.0, 0.0, False, np.array(chain, dtype=np.int64)


def candidates(spec: ProductSpec, q_from: int, q_to: int, use_prefilter: bool = True):
    """Every q that may be a strict running minimum (a superset of them)."""
    args = _prefilter_args(spec, q_to) if use_prefilter else None
    if args is None:
        return range(q_from, q_to + 1)
    return [int(q) for q in kernels.prefilter(q_from, q_to, *args)]


def running_minima(spec: ProductSpec, qs: Iterable[int], rel_bits: int = DEFAULT_REL_BITS,
                   cap: int = DEFAULT_PRECISION_CAP, values: dict | None = None) -> list[MinRecord]:
    """Strict running minima of the product along ``qs`` (in the given order)."""
    records: list[MinRecord] = []
    for q in qs:
        value = values[q] if values is not None and q in values else product_value(spec, q, rel_bits, cap)
        if not records:
            records.append(MinRecord(q, value))
            continue
        better = _strictly_less(spec, q, value, records[-1], rel_bits, cap)
        if better is not None:
            records.append(MinRecord(q, better))
    return records


def _attach_bounds(records: list[MinRecord], eps) -> list[MinRecord]:
    if eps is None:
        return records
    return [MinRecord(r.q, r.value, bound_rhs(r.q, eps) if r.q >= 2 else None) for r in records]


def scan_min(spec: ProductSpec, q_from: int, q_to: int, *, eps=None, shards: int = 1,
             workers: int = 1, rel_bits: int = DEFAULT_REL_BITS,
             cap: int = DEFAULT_PRECISION_CAP, use_prefilter: bool = True) -> list[MinRecord]:
    """All strict running minima of the product over ``q_from <= q <= q_to``.

    The range is cut into ``shards`` pieces scanned independently (in
    ``workers`` threads); a sequential merge over the shards' local minima
    gives the same records for any shard count.
    """
    if not 1 <= q_from <= q_to:
        raise ValueError("need 1 <= q_from <= q_to")
    shards = max(1, min(shards, q_to - q_from + 1))
    edges = [q_from + (q_to - q_from + 1) * i // shards for i in range(shards + 1)]

    def local(i):
        lo, hi = edges[i], edges[i + 1] - 1
        return running_minima(spec, candidates(spec, lo, hi, use_prefilter), rel_bits, cap)

    if workers > 1 and shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(local, range(shards)))
    else:
        parts = [local(i) for i in range(shards)]
    merged_qs = [r.q for part in parts for r in part]
    known = {r.q: r.value for part in parts for r in part}
    return _attach_bounds(running_minima(spec, merged_qs, rel_bits, cap, values=known), eps)


def check_table_matches(spec: ProductSpec, table: ConvergentTable) -> None:
    """Reject a convergent table that was not built from ``spec.alpha``."""
    own = as_stream(spec.alpha)
    src = table.source
    ok = own == src
    if not ok and (src.exact_value() is not None) and own.exact_value() is not None:
        ok = src.exact_value() == own.exact_value()
    if not ok:
        raise ValueError("convergent table was not built from the product's alpha")


def candidate_scan(spec: ProductSpec, qs: Sequence[int], *, eps=None,
                   rel_bits: int = DEFAULT_REL_BITS, cap: int = DEFAULT_PRECISION_CAP) -> list[MinRecord]:
    """Running minima restricted to a candidate sequence (e.g. ``n_k`` of D)."""
    return _attach_bounds(running_minima(spec, qs, rel_bits, cap), eps)


def convergent_scan(spec: ProductSpec, table: ConvergentTable, *, eps=None,
                    rel_bits: int = DEFAULT_REL_BITS, cap: int = DEFAULT_PRECISION_CAP) -> list[MinRecord]:
    """Running minima over the convergent denominators ``q_1, q_2, ...`` of alpha."""
    check_table_matches(spec, table)
    return candidate_scan(spec, table.denominators(), eps=eps, rel_bits=rel_bits, cap=cap)


def values_at(spec: ProductSpec, qs: Sequence[int], rel_bits: int = DEFAULT_REL_BITS,
              cap: int = DEFAULT_PRECISION_CAP) -> list[MinRecord]:
    """Product values at every ``q`` in ``qs`` (no minimum filtering)."""
    return [MinRecord(q, product_value(spec, q, rel_bits, cap)) for q in qs]
