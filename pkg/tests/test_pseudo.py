from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from littlewood.pseudo import (ChainError, PseudoAbsSeq, geometric_growth_check, padic_abs,
                               pseudo_abs, unit_identity_check)

TWO = PseudoAbsSeq.adic(2)
FACT = PseudoAbsSeq.factorial()


@pytest.mark.parametrize("q,D,expected", [
    (12, TWO, Fraction(1, 4)),
    (12, FACT, Fraction(1, 6)),
    (7, TWO, Fraction(1)),
    (-12, TWO, Fraction(1, 4)),
    (30, PseudoAbsSeq.primorial(), Fraction(1, 30)),
])
def test_pseudo_abs_examples(q, D, expected):
    assert pseudo_abs(q, D) == expected


def test_zero_rejected():
    with pytest.raises(ValueError):
        pseudo_abs(0, TWO)


def test_factorial_repeats_first_term():
    assert FACT.terms(5) == [1, 1, 2, 6, 24, 120]
    assert FACT.distinct_terms(5) == [2, 6, 24, 120]


@pytest.mark.parametrize("D,K", [
    (TWO, 20), (FACT, 10), (PseudoAbsSeq.from_list([1, 2, 6, 30, 210, 2310, 30030, 510510, 9699690]), 8),
    (PseudoAbsSeq.adic(3), 30), (PseudoAbsSeq.primorial(), 30),
])
def test_unit_identity(D, K):
    assert unit_identity_check(D, K)


@pytest.mark.parametrize("D,C,K,expected", [
    (TWO, 2, 50, True),
    (FACT, 3, 10, False),
    (PseudoAbsSeq.adic(3), 2, 2, False),
    (PseudoAbsSeq.adic(3), Fraction(3), 40, True),
    (TWO, Fraction(199, 100), 1, False),
    (TWO, Fraction(201, 100), 60, True),
])
def test_geometric_growth(D, C, K, expected):
    assert geometric_growth_check(D, C, K) is expected


def test_growth_argument_validation():
    with pytest.raises(ValueError):
        geometric_growth_check(TWO, 1, 5)
    with pytest.raises(ValueError):
        geometric_growth_check(TWO, 2, 0)
    with pytest.raises(ValueError):
        unit_identity_check(TWO, -1)


@pytest.mark.parametrize("text", ["list:1,2,5", "list:2,4", "list:", "list:1,x", "7", "0adic"])
def test_bad_chains_rejected(text):
    with pytest.raises(ChainError):
        PseudoAbsSeq.parse(text)


def test_parse_roundtrip():
    for text in ["2adic", "10adic", "factorial", "primorial", "list:1,2,4,8,40"]:
        D = PseudoAbsSeq.parse(text)
        assert D.literal() == text
        assert PseudoAbsSeq.parse(D.literal()) == D


def test_finite_list_past_end():
    D = PseudoAbsSeq.parse("list:1,2,4,8,40")
    assert len(D) == 5
    assert pseudo_abs(80, D) == Fraction(1, 40)
    assert pseudo_abs(160, D) == Fraction(1, 40)
    with pytest.raises(IndexError):
        D.term(5)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_padic_oracle_equivalence_up_to_a_million(p):
    D = PseudoAbsSeq.adic(p)
    # every q <= 10**6 whose valuation is positive, plus a stride of the rest
    qs = list(range(p, 10 ** 6 + 1, p)) + list(range(1, 10 ** 6 + 1, 997))
    for q in qs:
        ref = oracles.padic_abs_by_division(q, p)
        assert pseudo_abs(q, D) == ref
        assert padic_abs(q, p) == ref


@given(st.integers(1, 10 ** 12), st.sampled_from(["2adic", "3adic", "factorial", "primorial"]))
def test_bounded_by_one_and_trivial_iff_no_divisor(q, text):
    D = PseudoAbsSeq.parse(text)
    v = pseudo_abs(q, D)
    assert 0 < v <= 1
    has_divisor = any(q % n == 0 for n in D.distinct_terms(60) if n <= q)
    assert (v == 1) == (not has_divisor)
    assert (q * v).denominator == 1


@given(st.integers(1, 10 ** 9), st.integers(1, 12))
def test_truncation_is_monotone(q, cut):
    full = [1] + [2 ** k * 3 ** (k // 2) for k in range(1, 14)]
    short = PseudoAbsSeq.from_list(full[:cut + 1])
    assert pseudo_abs(q, short) >= pseudo_abs(q, PseudoAbsSeq.from_list(full))
