"""Independent reference computations used by the tests.

Nothing here imports the package; each oracle uses a different method
than the code under test (endpoint enumeration, integer fixed point,
mpmath at high decimal precision, Euclid, classical surd iteration).
"""

from bisect import bisect_left, bisect_right
from fractions import Fraction
from math import gcd, isqrt

import mpmath


def discrepancy_endpoint_oracle(points):
    """Unnormalized discrepancy by enumerating every interval whose ends
    lie in {0} U points U {1}, with all four open/closed variants."""
    pts = [Fraction(p) for p in points]
    N = len(pts)
    L = 1
    for p in pts:
        L = L * p.denominator // gcd(L, p.denominator)
    xs = sorted(int(p * L) for p in pts)
    ends = sorted(set(xs) | {0, L})
    best = Fraction(0)
    for i, a in enumerate(ends):
        for b in ends[i:]:
            for a_closed in (True, False):
                for b_closed in (True, False):
                    if a == b and not (a_closed and b_closed):
                        continue
                    lo = bisect_left(xs, a) if a_closed else bisect_right(xs, a)
                    hi = bisect_right(xs, b) if b_closed else bisect_left(xs, b)
                    count = max(0, hi - lo)
                    dev = abs(Fraction(count * L - N * (b - a), L))
                    best = max(best, dev)
    return best


PHI_BITS = 256


def phi_fixed(bits=PHI_BITS):
    """floor(phi * 2**bits) from an integer square root."""
    return ((1 << bits) + isqrt(5 << (2 * bits))) >> 1


def dirichlet_phi_running_minima(q_from, q_to, bits=PHI_BITS):
    """Strict running minima of q * ||q phi|| by integer fixed point.

    Returns [(q, value_as_float)].  Error per value is below q**2 * 2**-bits.
    """
    one = 1 << bits
    phi = phi_fixed(bits)
    out = []
    best = None
    for q in range(q_from, q_to + 1):
        frac = (q * phi) & (one - 1)
        dist = min(frac, one - frac)
        val = q * dist
        if best is None or val < best:
            best = val
            out.append((q, val / one))
    return out


def expand_rational_euclid(x):
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    digits = []
    while d:
        a, r = divmod(n, d)
        digits.append(a)
        n, d = d, r
    return digits


def sqrt_cf_period(n):
    """Classical (m, d, a) iteration for sqrt(n): returns (a0, period)."""
    a0 = isqrt(n)
    m, d, a = 0, 1, a0
    period = []
    while a != 2 * a0:
        m = d * a - m
        d = (n - m * m) // d
        a = (a0 + m) // d
        period.append(a)
    return a0, period


def convergent_denominators(digits):
    q_prev, q = 0, 1
    out = []
    for a in digits[1:]:
        q_prev, q = q, a * q + q_prev
        out.append(q)
    return out


def padic_abs_by_division(q, p):
    q = abs(q)
    v = 1
    while q % p == 0:
        q //= p
        v *= p
    return Fraction(1, v)


def mp_norm(x):
    return abs(x - mpmath.nint(x))


def exp_sum_mp(points, k, dps=50):
    with mpmath.workdps(dps):
        s = mpmath.mpc(0)
        for p in points:
            p = Fraction(p)
            s += mpmath.expjpi(2 * k * mpmath.mpf(p.numerator) / p.denominator)
        return abs(s)


def et_bound_mp(points, K, dps=50):
    with mpmath.workdps(dps):
        return mpmath.mpf(len(points)) / (K + 1) + 3 * mpmath.fsum(
            exp_sum_mp(points, k, dps) / k for k in range(1, K + 1))


def et_functional_mp(a, x, u, v, dps=60):
    """F(u, v, x) with a[0] = a_1 and x an mpmath number."""
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for h in range(1, v + 1):
            s = mpmath.mpc(0)
            for n in range(max(u, 1), v + 1):
                s += mpmath.expjpi(2 * h * a[n - 1] * x)
            total += abs(s) / h
        return total


def hit_count_mp(qs, beta, gamma, N, eps, dps):
    """#{k <= N : ||q_k beta - gamma|| <= N**(-1/2 + eps)} at high precision."""
    eps = Fraction(eps)
    with mpmath.workdps(dps):
        psi = mpmath.mpf(N) ** (mpmath.mpf(eps.numerator) / eps.denominator - mpmath.mpf(1) / 2)
        return sum(1 for q in qs[:N] if mp_norm(q * beta - gamma) <= psi)
