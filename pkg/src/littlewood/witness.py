"""Witnesses for the hybrid and mixed inequalities.

For convergent denominators ``q_k`` of ``alpha``:

    q_k ||q_k alpha|| ||q_k beta - gamma|| < (log q_k) ** -(1/2 - eps)      (hybrid)

and for the terms ``n_k`` of a divisibility chain ``D``:

    n_k |n_k|_D ||n_k beta - delta|| < (log n_k) ** -(1/2 - eps)           (mixed)

Each certified instance becomes a :class:`WitnessCertificate` that can be
serialized to JSON and re-verified from scratch.  The hit-counting
construction (``psi``, windows of radius ``psi(N)`` around the target,
``N^gamma_h``) is exposed as well, since it supplies the alternative
``proof-construction`` provenance.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import cf
from .exact import (DEFAULT_PRECISION_CAP, PrecisionExhausted, Real, format_real, parse_real,
                    scaled_norm_dist)
from .intervals import Interval, fraction_str, parse_fraction, power_enclosure
from .pseudo import PseudoAbsSeq, geometric_growth_check, largest_divisor_in_chain
from .scan import (MinRecord, ProductSpec, bound_rhs, candidate_scan, factor_enclosure,
                   hybrid, mixed, product_value)

FORMAT_VERSION = 1
EXPONENTS = ("theorem", "proof")
START_BITS = 40


class CertificateError(ValueError):
    """A certificate failed re-verification; the message names the check."""


class NotFound(LookupError):
    """No ``N <= N_cap`` reaches the requested hit count."""


def _eps(eps) -> Fraction:
    eps = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie strictly between 0 and 1/2")
    return eps


# -- psi and hit counting -------------------------------------------------------

def psi(N: int, eps, bits: int = 64) -> Interval:
    """Enclosure of ``N ** (-1/2 + eps)``; a point when the power is rational."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return power_enclosure(N, _eps(eps) - Fraction(1, 2), bits)


@dataclass(frozen=True)
class HitCount:
    N: int
    target: str
    eps: Fraction
    count: int
    hits: tuple = ()
    undecided: tuple = ()


class _Distances:
    """Lazily computed ``||c_k beta - target||`` for a candidate list (1-indexed)."""

    def __init__(self, candidates: Sequence[int], beta: Real, target: Real,
                 rel_bits: int = START_BITS, cap: int = DEFAULT_PRECISION_CAP):
        self.candidates = list(candidates)
        self.beta, self.target = beta, target
        self.rel_bits, self.cap = rel_bits, cap
        self._exact: dict[int, Real] = {}
        self._box: dict[int, Interval] = {}

    def exact(self, k: int) -> Real:
        if k not in self._exact:
            self._exact[k] = scaled_norm_dist(self.candidates[k - 1], self.beta, self.target,
                                              cap=self.cap)
        return self._exact[k]

    def box(self, k: int, rel_bits: int | None = None) -> Interval:
        if rel_bits is not None and rel_bits != self.rel_bits:
            return factor_enclosure(self.exact(k), rel_bits, self.cap)
        if k not in self._box:
            self._box[k] = factor_enclosure(self.exact(k), self.rel_bits, self.cap)
        return self._box[k]

    def floats(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([float(self.box(k).lo) for k in range(1, N + 1)])
        hi = np.array([float(self.box(k).hi) for k in range(1, N + 1)])
        # float conversion rounds to nearest; widen by a few ulps
        return lo * (1 - 2.0 ** -50), hi * (1 + 2.0 ** -50)


def _member(dist: _Distances, k: int, N: int, eps: Fraction) -> bool | None:
    """Certified ``||c_k beta - target|| <= psi(N)``; None if undecidable."""
    bits = dist.rel_bits
    while bits <= dist.cap:
        d = dist.box(k, bits)
        p = psi(N, eps, bits + 8)
        if d.hi <= p.lo:
            return True
        if d.lo > p.hi:
            return False
        bits *= 2
    return None


def _psi_floats(Ns: np.ndarray, eps: Fraction) -> tuple[np.ndarray, np.ndarray]:
    val = Ns.astype(np.float64) ** (float(eps) - 0.5)
    return val * (1 - 2.0 ** -40), val * (1 + 2.0 ** -40)


def _count_at(dist: _Distances, N: int, eps: Fraction, d_lo, d_hi, p_lo, p_hi) -> tuple:
    hits, undecided = [], []
    sure = d_hi[:N] < p_lo
    maybe = ~sure & (d_lo[:N] <= p_hi)
    for k in np.nonzero(sure)[0]:
        hits.append(int(k) + 1)
    for k in np.nonzero(maybe)[0]:
        verdict = _member(dist, int(k) + 1, N, eps)
        if verdict:
            hits.append(int(k) + 1)
        elif verdict is None:
            undecided.append(int(k) + 1)
    return tuple(sorted(hits)), tuple(undecided)


def hit_count(candidates: Sequence[int], beta: Real, target: Real, N: int, eps,
              cap: int = DEFAULT_PRECISION_CAP) -> HitCount:
    """``#{k <= N : ||c_k beta - target|| <= psi(N)}`` with certified decisions.

    Memberships that stay undecidable at ``cap`` count as misses and are
    listed in ``undecided``.
    """
    eps = _eps(eps)
    if not 1 <= N <= len(candidates):
        raise ValueError(f"need 1 <= N <= {len(candidates)} (number of candidates)")
    dist = _Distances(candidates, beta, target, cap=cap)
    d_lo, d_hi = dist.floats(N)
    p_lo, p_hi = _psi_floats(np.array([N]), eps)
    hits, undecided = _count_at(dist, N, eps, d_lo, d_hi, p_lo[0], p_hi[0])
    return HitCount(N, format_real(target), eps, len(hits), hits, undecided)


def count_profile(candidates: Sequence[int], beta: Real, target: Real, eps, N_cap: int,
                  cap: int = DEFAULT_PRECISION_CAP) -> list[HitCount]:
    """``hit_count`` for every ``N = 1..N_cap`` sharing one distance table."""
    eps = _eps(eps)
    N_cap = min(N_cap, len(candidates))
    dist = _Distances(candidates, beta, target, cap=cap)
    d_lo, d_hi = dist.floats(N_cap)
    Ns = np.arange(1, N_cap + 1)
    p_lo, p_hi = _psi_floats(Ns, eps)
    label = format_real(target)
    out = []
    for N in range(1, N_cap + 1):
        hits, undecided = _count_at(dist, N, eps, d_lo, d_hi, p_lo[N - 1], p_hi[N - 1])
        out.append(HitCount(N, label, eps, len(hits), hits, undecided))
    return out


@dataclass(frozen=True)
class NGammaH:
    h: int
    N: int
    relaxed: bool
    hits: tuple


def n_gamma_h_all(profile: Sequence[HitCount], h_max: int | None = None) -> list[NGammaH]:
    """``N^gamma_h`` for ``h = 1, 2, ...`` from a count profile.

    ``N^gamma_h`` is the least ``N`` with count exactly ``h``.  Counts are
    not monotone in ``N``, so when ``h`` is skipped the least ``N`` with
    count ``>= h`` is used and flagged ``relaxed``.
    """
    top = max((c.count for c in profile), default=0)
    if h_max is not None:
        top = min(top, h_max)
    out = []
    for h in range(1, top + 1):
        exact = next((c for c in profile if c.count == h), None)
        if exact is not None:
            out.append(NGammaH(h, exact.N, False, exact.hits))
        else:
            c = next(c for c in profile if c.count >= h)
            out.append(NGammaH(h, c.N, True, c.hits))
    return out


def n_gamma_h(candidates: Sequence[int], beta: Real, target: Real, eps, h: int, N_cap: int,
              cap: int = DEFAULT_PRECISION_CAP) -> NGammaH:
    if h < 1:
        raise ValueError("h must be at least 1")
    found = n_gamma_h_all(count_profile(candidates, beta, target, eps, N_cap, cap), h)
    if len(found) < h:
        raise NotFound(f"count never reaches {h} for N <= {min(N_cap, len(candidates))}")
    return found[h - 1]


# -- certificates ----------------------------------------------------------------------

@dataclass
class WitnessCertificate:
    kind: str                     # "eq6" (hybrid) or "eq9" (mixed)
    k: int
    q: int
    params: dict                  # literals: alpha|D, beta, gamma|delta, eps, exponent
    rel_bits: int
    bound_bits: int
    product: Interval
    bound: Interval
    provenance: dict = field(default_factory=lambda: {"path": "direct-scan"})

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "kind": self.kind,
            "k": self.k,
            "q": str(self.q),
            "params": dict(self.params),
            "precision": {"rel_bits": self.rel_bits, "bound_bits": self.bound_bits},
            "product": self.product.to_json(),
            "bound": self.bound.to_json(),
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WitnessCertificate":
        try:
            if obj.get("format") != FORMAT_VERSION:
                raise CertificateError(f"unsupported certificate format {obj.get('format')!r}")
            return cls(
                kind=obj["kind"],
                k=int(obj["k"]),
                q=int(obj["q"]),
                params=dict(obj["params"]),
                rel_bits=int(obj["precision"]["rel_bits"]),
                bound_bits=int(obj["precision"]["bound_bits"]),
                product=Interval.from_json(obj["product"]),
                bound=Interval.from_json(obj["bound"]),
                provenance=dict(obj.get("provenance", {"path": "direct-scan"})),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, CertificateError):
                raise
            raise CertificateError(f"malformed certificate: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _bound_eps(eps: Fraction, exponent: str) -> Fraction:
    if exponent not in EXPONENTS:
        raise ValueError(f"exponent must be one of {EXPONENTS}")
    # the proof's chain yields (log q)^(-1/2 + eps/2)
    return eps if exponent == "theorem" else eps / 2


def _certify(spec: ProductSpec, q: int, bound_eps: Fraction, cap: int):
    """Smallest precision (doubling from START_BITS) separating product < bound.

    Returns ``(rel_bits, bound_bits, product, bound)`` or None when the
    comparison is still open at ``cap`` or the product is certainly larger.
    """
    bits = START_BITS
    while bits <= cap:
        try:
            value = product_value(spec, q, bits, cap)
        except PrecisionExhausted:
            return None
        bound = bound_rhs(q, bound_eps, bits + 24)
        if value.hi < bound.lo:
            return bits, bits + 24, value, bound
        if value.lo >= bound.hi:
            return None
        bits *= 2
    return None


def _hybrid_params(alpha, beta, gamma, eps, exponent) -> dict:
    return {"alpha": format_real(alpha), "beta": format_real(beta), "gamma": format_real(gamma),
            "eps": fraction_str(eps), "exponent": exponent}


def _mixed_params(D, beta, delta, eps, exponent, C) -> dict:
    return {"D": D.literal(), "beta": format_real(beta), "delta": format_real(delta),
            "eps": fraction_str(eps), "exponent": exponent, "C": fraction_str(C)}


def _ordered_map(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def witnesses_eq6(alpha, beta, gamma, eps, k_max: int, *, path: str = "direct-scan",
                  exponent: str = "theorem", N_cap: int | None = None, workers: int = 1,
                  cap: int = DEFAULT_PRECISION_CAP) -> list[WitnessCertificate]:
    """Certificates for the hybrid inequality along ``q_1..q_{k_max}`` of ``alpha``.

    ``path="direct-scan"`` tests every ``k``; ``path="proof-construction"``
    tests only ``k = N^gamma_h`` for ``h = 1, 2, ...`` (with ``N <= N_cap``,
    default ``k_max``) and records ``(h, N)``.  ``q_k = 1`` has no bound and
    is skipped.
    """
    eps = _eps(eps)
    beps = _bound_eps(eps, exponent)
    stream = cf.as_stream(alpha)
    if not stream.infinite:
        raise ValueError("alpha must be irrational (an infinite expansion)")
    qs = cf.convergents(stream, k_max).denominators()
    spec = hybrid(alpha, beta, gamma)
    params = _hybrid_params(alpha, beta, gamma, eps, exponent)

    if path == "direct-scan":
        jobs = [(k, {"path": "direct-scan"}) for k in range(1, k_max + 1)]
    elif path == "proof-construction":
        profile = count_profile(qs, beta, gamma, eps, N_cap or k_max, cap)
        jobs = []
        for ng in n_gamma_h_all(profile):
            if ng.N in ng.hits:
                jobs.append((ng.N, {"path": "proof-construction", "h": ng.h, "N": ng.N,
                                    "relaxed": ng.relaxed}))
    else:
        raise ValueError("path must be 'direct-scan' or 'proof-construction'")

    def run(job):
        k, prov = job
        q = qs[k - 1]
        if q < 2:
            return None
        got = _certify(spec, q, beps, cap)
        if got is None:
            return None
        rb, bb, value, bound = got
        return WitnessCertificate("eq6", k, q, params, rb, bb, value, bound, prov)

    return [c for c in _ordered_map(run, jobs, workers) if c is not None]


def infer_growth_constant(D: PseudoAbsSeq, k_max: int) -> Fraction:
    """A constant ``C`` with ``n_k <= C**k`` for ``k <= k_max``.

    ``a`` for the a-adic chain; otherwise the least integer that works on
    the inspected range.
    """
    if D.kind == "adic":
        return Fraction(D.base)
    C = 2
    while not geometric_growth_check(D, C, k_max):
        C *= 2
    lo, hi = C // 2, C
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid > 1 and geometric_growth_check(D, mid, k_max):
            hi = mid
        else:
            lo = mid
    return Fraction(hi)


def _chain_candidates(D: PseudoAbsSeq, k_max: int) -> list[tuple[int, int]]:
    """``(k, n_k)`` with ``n_k > 1`` at the first index of each distinct value."""
    out = []
    last = 1
    for k, n in enumerate(D.terms(k_max)):
        if k >= 1 and n > 1 and n != last:
            out.append((k, n))
        last = n
    return out


def witnesses_eq9(D: PseudoAbsSeq, beta, delta, eps, k_max: int, *, C=None,
                  exponent: str = "theorem", workers: int = 1,
                  cap: int = DEFAULT_PRECISION_CAP) -> list[WitnessCertificate]:
    """Certificates for the mixed inequality at the chain terms ``n_k``.

    ``D`` must grow at most geometrically: ``n_k <= C**k`` (``C`` inferred
    when omitted).  At ``q = n_k`` the product is exactly ``||n_k beta - delta||``.
    """
    eps = _eps(eps)
    beps = _bound_eps(eps, exponent)
    if C is None:
        C = infer_growth_constant(D, k_max)
    C = Fraction(C)
    if not geometric_growth_check(D, C, k_max):
        raise ValueError(f"chain {D.literal()} exceeds C**k with C = {fraction_str(C)}; "
                         "use liminf_report_eq7 instead")
    spec = mixed(beta, D, delta)
    params = _mixed_params(D, beta, delta, eps, exponent, C)

    def run(job):
        k, n = job
        got = _certify(spec, n, beps, cap)
        if got is None:
            return None
        rb, bb, value, bound = got
        return WitnessCertificate("eq9", k, n, params, rb, bb, value, bound,
                                  {"path": "direct-scan"})

    return [c for c in _ordered_map(run, _chain_candidates(D, k_max), workers) if c is not None]


def liminf_report_eq7(D: PseudoAbsSeq, beta, delta, k_max: int,
                      rel_bits: int = START_BITS) -> list[MinRecord]:
    """Running minima of ``n_k |n_k|_D ||n_k beta - delta||`` over ``k <= k_max``."""
    qs = [n for _, n in _chain_candidates(D, k_max)]
    if not qs:
        return []
    return candidate_scan(mixed(beta, D, delta), qs, rel_bits=rel_bits)


# -- verification ---------------------------------------------------------------------

def _parse_params(cert: WitnessCertificate):
    p = cert.params
    try:
        eps = _eps(parse_fraction(p["eps"]))
        exponent = p["exponent"]
        beps = _bound_eps(eps, exponent)
        beta = parse_real(p["beta"])
        if cert.kind == "eq6":
            alpha, gamma = parse_real(p["alpha"]), parse_real(p["gamma"])
            return hybrid(alpha, beta, gamma), eps, beps
        if cert.kind == "eq9":
            D = PseudoAbsSeq.parse(p["D"])
            return mixed(beta, D, parse_real(p["delta"])), eps, beps
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise CertificateError(f"invalid parameters: {exc}") from None
    raise CertificateError(f"unknown certificate kind {cert.kind!r}")


def _fail(msg: str):
    raise CertificateError(msg)


def verify_certificate(cert: WitnessCertificate | dict, cap: int = DEFAULT_PRECISION_CAP) -> bool:
    """Re-check a certificate from its parameters alone.

    Raises :class:`CertificateError` naming the first failing check;
    returns True otherwise.
    """
    if isinstance(cert, dict):
        cert = WitnessCertificate.from_json(cert)
    spec, eps, beps = _parse_params(cert)
    q, k = cert.q, cert.k
    if q < 2 or k < 1:
        _fail("q >= 2 and k >= 1")
    if cert.rel_bits < 1 or cert.bound_bits < 1 or cert.rel_bits > cap or cert.bound_bits > cap:
        _fail("precision within [1, cap]")

    # candidate membership
    if cert.kind == "eq6":
        if cf.convergents(spec.alpha, k).q(k) != q:
            _fail(f"q == q_{k} (convergent denominator of alpha)")
        dirichlet_factor = Interval.point(q) * factor_enclosure(
            scaled_norm_dist(q, spec.alpha, cap=cap), cert.rel_bits, cap)
        if not dirichlet_factor.hi <= 1:
            _fail("q * ||q alpha|| <= 1")
    else:
        C = parse_fraction(cert.params.get("C", "0"))
        if C <= 1 or not geometric_growth_check(spec.pseudo, C, k):
            _fail(f"n_k <= C**k growth with C = {cert.params.get('C')}")
        try:
            n_k = spec.pseudo.term(k)
        except IndexError:
            n_k = None
        if n_k != q:
            _fail(f"q == n_{k} (term of D)")
        if k > 1 and spec.pseudo.term(k - 1) == q:
            _fail(f"k is the first index with n_k = {q}")
        if q // largest_divisor_in_chain(q, spec.pseudo) != 1:
            _fail("n_k * |n_k|_D == 1")

    # recomputation at the stored precision must reproduce the enclosures
    if product_value(spec, q, cert.rel_bits, cap) != cert.product:
        _fail("product enclosure == recomputed enclosure")
    if bound_rhs(q, beps, cert.bound_bits) != cert.bound:
        _fail("bound enclosure == recomputed enclosure")
    if not cert.product.hi < cert.bound.lo:
        _fail("product.hi < bound.lo")

    # independent recomputation at doubled precision
    product2 = product_value(spec, q, min(2 * cert.rel_bits, cap), cap)
    bound2 = bound_rhs(q, beps, min(2 * cert.bound_bits, cap))
    if product2.hi < cert.product.lo or product2.lo > cert.product.hi:
        _fail("doubled-precision product overlaps stored product")
    if bound2.hi < cert.bound.lo or bound2.lo > cert.bound.hi:
        _fail("doubled-precision bound overlaps stored bound")
    if not product2.hi < bound2.lo:
        _fail("product.hi < bound.lo at doubled precision")

    _verify_provenance(cert, spec, eps, cap)
    return True


def _verify_provenance(cert: WitnessCertificate, spec: ProductSpec, eps: Fraction, cap: int):
    prov = cert.provenance
    path = prov.get("path")
    if path == "direct-scan":
        if set(prov) != {"path"}:
            _fail("direct-scan provenance carries no extra fields")
        return
    if path != "proof-construction" or cert.kind != "eq6":
        _fail(f"provenance path {path!r} is valid for this kind")
    try:
        h, N, relaxed = int(prov["h"]), int(prov["N"]), bool(prov["relaxed"])
    except (KeyError, TypeError, ValueError):
        _fail("proof-construction provenance has h, N, relaxed")
    if N != cert.k:
        _fail("provenance N == k")
    qs = cf.convergents(spec.alpha, N).denominators()
    profile = count_profile(qs, spec.beta, spec.shift, eps, N, cap)
    found = n_gamma_h_all(profile, h)
    if len(found) < h or found[h - 1].N != N or found[h - 1].relaxed != relaxed:
        _fail(f"N^gamma_{h} == {N}")
    if N not in found[h - 1].hits:
        _fail(f"||q_N beta - gamma|| <= psi(N) for N = {N}")
    # chain: q||q alpha|| <= 1 and the hit give product <= psi(N)
    if not cert.product.lo <= psi(N, eps, cert.rel_bits + 8).hi:
        _fail("product <= psi(N^gamma_h)")


def load_certificates(path) -> list[dict]:
    """Certificates from a JSON file (a list, a single object, or a run
    output with a ``certificates`` field)."""
    with open(path) as fh:
        text = fh.read()
    lines = text.splitlines()
    # run outputs start with a header line
    if lines and lines[0].startswith("#"):
        text = "\n".join(lines[1:])
    obj = json.loads(text)
    if isinstance(obj, dict) and "certificates" in obj:
        obj = obj["certificates"]
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise CertificateError("expected a certificate or a list of certificates")
    return obj


__all__ = [
    "psi", "HitCount", "hit_count", "count_profile", "NGammaH", "n_gamma_h", "n_gamma_h_all",
    "WitnessCertificate", "CertificateError", "NotFound", "witnesses_eq6", "witnesses_eq9",
    "liminf_report_eq7", "verify_certificate", "infer_growth_constant", "load_certificates",
]
