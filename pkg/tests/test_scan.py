from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from littlewood import cf
from littlewood.exact import surd
from littlewood.intervals import Interval
from littlewood.pseudo import PseudoAbsSeq
from littlewood.scan import (bound_rhs, candidates, convergent_scan, dirichlet, hybrid, littlewood,
                             mixed, product_value, scan_min, values_at)

PHI = surd(1, 1, 5, 2)
SQRT2M1 = surd(-1, 1, 2)


def iv_float_contains(box: Interval, ref, tol=0):
    lo = mpmath.mpf(box.lo.numerator) / box.lo.denominator
    hi = mpmath.mpf(box.hi.numerator) / box.hi.denominator
    return lo - tol <= ref <= hi + tol


def test_dirichlet_phi_at_8():
    v = product_value(dirichlet(PHI), 8)
    with mpmath.workdps(50):
        ref = 8 * oracles.mp_norm(8 * (1 + mpmath.sqrt(5)) / 2)
        assert iv_float_contains(v, ref)
    assert abs(float(v) - 0.4458) < 1e-4


def test_rational_littlewood_hits_zero():
    spec = littlewood(Fraction(2, 3), Fraction(5, 4))
    assert product_value(spec, 12) == Interval.point(0)
    assert product_value(spec, 5).is_point


def test_mixed_at_chain_term_is_the_distance():
    alpha = Fraction(3, 7)
    v = product_value(mixed(alpha, PseudoAbsSeq.adic(2)), 4)
    assert v == Interval.point(Fraction(2, 7))  # ||12/7|| = 2/7
    box = product_value(mixed(PHI, PseudoAbsSeq.adic(2)), 4)
    with mpmath.workdps(50):
        assert iv_float_contains(box, oracles.mp_norm(4 * (1 + mpmath.sqrt(5)) / 2))


def test_littlewood_symmetric():
    a, b = product_value(littlewood(PHI, SQRT2M1), 29), product_value(littlewood(SQRT2M1, PHI), 29)
    assert a == b


@pytest.mark.parametrize("q", [1, 2, 3, 5, 8, 13, 100, 9999])
def test_hybrid_gamma_zero_equals_littlewood(q):
    assert product_value(hybrid(PHI, SQRT2M1, 0), q) == product_value(littlewood(PHI, SQRT2M1), q)


def test_trivial_chain_reduces_to_distance():
    D = PseudoAbsSeq.from_list([1])
    for q in (1, 7, 30):
        v = product_value(mixed(PHI, D, Fraction(1, 3)), q)
        with mpmath.workdps(50):
            ref = q * oracles.mp_norm(q * (1 + mpmath.sqrt(5)) / 2 - mpmath.mpf(1) / 3)
        assert iv_float_contains(v, ref)


def test_bound_rhs_examples():
    assert abs(float(bound_rhs(8, 0)) - 0.6934) < 1e-4
    assert abs(float(bound_rhs(2, Fraction(1, 4))) - 1.0960) < 1e-4
    for q in (2, 10, 10 ** 9):
        assert bound_rhs(q, Fraction(1, 2)) == Interval.point(1)
    b = bound_rhs(1000, Fraction(1, 5))
    assert b.width <= b.lo / (1 << 32)
    with pytest.raises(ValueError):
        bound_rhs(1, Fraction(1, 5))
    with pytest.raises(ValueError):
        bound_rhs(5, Fraction(3, 5))


def test_hurwitz_tail_matches_integer_oracle():
    # the global minimum sits at q = 1; past the first few convergents the
    # minima approach 1/sqrt5 from below
    recs = scan_min(dirichlet(PHI), 1, 10 ** 5)
    ref = oracles.dirichlet_phi_running_minima(1, 10 ** 5)
    assert [r.q for r in recs] == [q for q, _ in ref]
    for r, (_, v) in zip(recs, ref):
        assert abs(float(r.value) - v) < 1e-12
    tail = scan_min(dirichlet(PHI), 1000, 10 ** 5)
    assert abs(float(tail[-1].value) - 0.44721) < 1e-3


def test_littlewood_phi_phi_brute_force():
    recs = scan_min(littlewood(PHI, PHI), 1, 100)
    with mpmath.workdps(60):
        phi = (1 + mpmath.sqrt(5)) / 2
        vals = {q: q * oracles.mp_norm(q * phi) ** 2 for q in range(1, 101)}
    best, expected = None, []
    for q in range(1, 101):
        if best is None or vals[q] < best:
            best = vals[q]
            expected.append(q)
    assert [r.q for r in recs] == expected
    for r in recs:
        assert iv_float_contains(r.value, vals[r.q])


@pytest.mark.parametrize("spec", [
    dirichlet(SQRT2M1),
    hybrid(PHI, SQRT2M1, Fraction(3, 10)),
    mixed(SQRT2M1, PseudoAbsSeq.adic(2), Fraction(1, 3)),
    littlewood(Fraction(3, 17), PHI),
])
def test_shard_invariance_and_prefilter(spec):
    base = scan_min(spec, 1, 20000)
    for shards, workers in ((3, 1), (7, 4)):
        assert scan_min(spec, 1, 20000, shards=shards, workers=workers) == base
    assert scan_min(spec, 1, 3000, use_prefilter=False) == scan_min(spec, 1, 3000)


def test_candidates_superset_of_minima():
    spec = hybrid(PHI, SQRT2M1, Fraction(3, 10))
    cands = set(candidates(spec, 1, 5000))
    assert len(cands) < 5000
    assert {r.q for r in scan_min(spec, 1, 5000, use_prefilter=False)} <= cands


def test_records_strictly_decrease_and_are_tight():
    recs = scan_min(hybrid(PHI, SQRT2M1, Fraction(3, 10)), 1, 50000, eps=Fraction(1, 5))
    qs = [r.q for r in recs]
    assert qs == sorted(qs)
    for prev, cur in zip(recs, recs[1:]):
        assert cur.value.hi < prev.value.lo
    for r in recs:
        assert r.value.lo <= r.value.hi
        assert r.value.width <= Fraction(1, 1 << 32) * max(r.value.lo, Fraction(1, 1 << 64))
        if r.q >= 2:
            assert r.beats_bound == (r.value.hi < r.bound.lo)


@pytest.mark.parametrize("x", [PHI, SQRT2M1, surd(3, 2, 11, 5)])
def test_convergent_scan_values_below_one(x):
    t = cf.convergents(x, 30)
    for r in values_at(dirichlet(x), t.denominators()):
        assert r.value.hi < 1
    recs = convergent_scan(dirichlet(x), t)
    assert all(r.q in t.denominators() for r in recs)


def test_convergent_scan_hybrid_gamma_zero_is_littlewood_at_fibonacci():
    t = cf.convergents(PHI, 25)
    a = convergent_scan(hybrid(PHI, SQRT2M1, 0), t)
    b = convergent_scan(littlewood(PHI, SQRT2M1), t)
    assert a == b


def test_convergent_scan_rejects_foreign_table():
    with pytest.raises(ValueError):
        convergent_scan(dirichlet(PHI), cf.convergents(SQRT2M1, 10))


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 10 ** 6))
def test_bad_numbers_have_positive_minima(seed):
    x = cf.sample_FM(3, 40, seed)
    for r in scan_min(dirichlet(x), 1, 2000):
        assert r.value.lo > 0


def test_scan_rejects_bad_range():
    with pytest.raises(ValueError):
        scan_min(dirichlet(PHI), 0, 10)
    with pytest.raises(ValueError):
        scan_min(dirichlet(PHI), 10, 9)
