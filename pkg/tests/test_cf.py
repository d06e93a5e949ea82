from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

import oracles
from littlewood import cf
from littlewood.exact import compare, parse_real, scaled_norm_dist, surd

PHI = surd(1, 1, 5, 2)


@pytest.mark.parametrize("x,digits", [
    (Fraction(22, 7), [3, 7]),
    (Fraction(1, 2), [0, 2]),
    (Fraction(355, 113), [3, 7, 16]),
    (Fraction(5), [5]),
    (Fraction(-7, 3), [-3, 1, 2]),
])
def test_expand_rational(x, digits):
    assert cf.expand_rational(x) == digits


@given(st.fractions(min_value=-100, max_value=100, max_denominator=10 ** 6))
def test_expand_rational_matches_euclid_and_is_canonical(x):
    got = cf.expand_rational(x)
    ref = oracles.expand_rational_euclid(x)
    assert got == ref
    assert len(got) == 1 or got[-1] >= 2
    s = cf.DigitStream(got[0], got[1:], terminates=True)
    assert s.exact_value() == x


@pytest.mark.parametrize("x,a0,period", [
    (PHI, 1, (1,)),
    (surd(0, 1, 2), 1, (2,)),
    (surd(0, 1, 7), 2, (1, 1, 1, 4)),
])
def test_expand_surd_examples(x, a0, period):
    s = cf.expand_surd(x)
    assert s.a0 == a0 and s.prefix == () and s.period == period


@pytest.mark.parametrize("n", [2, 3, 7, 13, 19, 31, 46, 94, 151, 421])
def test_sqrt_periods_match_classical_iteration(n):
    a0, period = oracles.sqrt_cf_period(n)
    s = cf.expand_surd(surd(0, 1, n))
    assert (s.a0, list(s.prefix + s.period)) == (a0, period)


@settings(max_examples=60)
@given(st.integers(-20, 20), st.integers(1, 20), st.sampled_from([2, 3, 5, 6, 7, 11, 13, 19]),
       st.integers(1, 30))
def test_surd_roundtrip_through_periodic_stream(a, b, d, c):
    x = surd(a, b, d, c)
    s = cf.expand_surd(x)
    assume(len(s.prefix) + len(s.period) <= 40)
    # rebuild from the digits alone so the cached source value is not used
    fresh = cf.DigitStream(s.a0, s.prefix, period=s.period)
    assert fresh.to_surd() == x


def test_convergents_examples():
    assert cf.convergents(PHI, 6).denominators() == [1, 2, 3, 5, 8, 13]
    assert cf.convergents(parse_real("cf(0;(2))"), 4).denominators() == [2, 5, 12, 29]
    t = cf.convergents(Fraction(22, 7), 1)
    assert [(t.p(k), t.q(k)) for k in range(2)] == [(3, 1), (22, 7)]
    with pytest.raises(cf.StreamExhausted):
        cf.convergents(Fraction(22, 7), 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10 ** 6), st.integers(3, 6))
def test_convergent_invariants(seed, M):
    s = cf.sample_FM(M, 40, seed)
    t = cf.convergents(s, 40)
    for k in range(1, 41):
        p, q = t.p(k), t.q(k)
        assert p * t.q(k - 1) - t.p(k - 1) * q == (-1) ** (k - 1)
        if k >= 2:
            assert q > t.q(k - 1)
        if k >= 3:
            assert q >= 2 * t.q(k - 2)
    assert cf.growth_bounds_check(t, M)
    assert t.denominators() == oracles.convergent_denominators([0] + s.digits(40))


def test_convergent_distance_bounds_on_surds():
    for x in (PHI, surd(0, 1, 7), surd(3, 2, 11, 5)):
        t = cf.convergents(x, 25)
        # k = 0 is excluded: with a_1 = 1, q_0 = q_1 and the lower bound is an equality
        for k in range(1, 25):
            d = scaled_norm_dist(t.q(k), x)
            assert compare(d, Fraction(1, t.q(k + 1))) <= 0
            assert compare(d, Fraction(1, t.q(k + 1) + t.q(k))) > 0


def test_in_FM():
    assert cf.in_FM(PHI, 3, 50)
    assert not cf.in_FM(surd(0, 1, 7), 3, 10)
    assert not cf.in_FM(Fraction(22, 7), 5, 1)


def test_sample_FM_deterministic_and_bounded():
    a = cf.sample_FM(3, 5, 11).digits(5)
    assert a == cf.sample_FM(3, 5, 11).digits(5)
    assert cf.in_FM(cf.sample_FM(3, 5, 11), 3, 2000)
    assert cf.sample_FM(3, 5, 11).digits(300) == cf.sample_FM(3, 5, 11).clone().digits(300)
    with pytest.raises(ValueError):
        cf.sample_FM(2, 5, 0)


def test_sample_FM_digit_frequencies():
    M, n = 4, 100_000
    digits = cf.sample_FM(M, 64, 2024).digits(n)
    sigma = (n * (1 / M) * (1 - 1 / M)) ** 0.5
    for v in range(1, M + 1):
        assert abs(digits.count(v) - n / M) <= 3 * sigma


def test_growth_bounds_examples():
    assert cf.growth_bounds_check(cf.convergents(PHI, 40), 1)
    assert cf.growth_bounds_check(cf.convergents(parse_real("cf(0;(2))"), 40), 2)


def test_lacunarity_examples():
    assert cf.lacunarity_ratio([2 ** n for n in range(11)]) == 2
    # consecutive Fibonacci ratios 2, 3/2, 5/3, 8/5, 13/8: the least is 3/2
    assert cf.lacunarity_ratio([1, 2, 3, 5, 8, 13]) == Fraction(3, 2)
    assert cf.lacunarity_ratio(range(1, 11)) == Fraction(10, 9)
    assert not cf.is_lacunary(range(1, 11), Fraction(3, 2))
    assert cf.is_lacunary([1, 2, 3, 5, 8, 13], Fraction(3, 2))
    with pytest.raises(ValueError):
        cf.lacunarity_ratio([1, 3, 3])


def test_literal_of_sampled_stream():
    s = cf.sample_FM(3, 64, 5)
    assert s.literal() == "fm(3,5)"
    assert parse_real(s.literal()) == s
