import copy
import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

import oracles
from littlewood import cf
from littlewood.exact import approximate, surd
from littlewood.intervals import Interval
from littlewood.pseudo import PseudoAbsSeq
from littlewood.scan import factors, mixed
from littlewood.witness import (CertificateError, NotFound, WitnessCertificate, count_profile,
                                hit_count, liminf_report_eq7, load_certificates, n_gamma_h,
                                psi, verify_certificate, witnesses_eq6, witnesses_eq9)

PHI = surd(1, 1, 5, 2)
BETA = surd(-1, 1, 2)          # cf(0;(2))
FIB = cf.convergents(PHI, 1200).denominators()


def mp_beta():
    return mpmath.sqrt(2) - 1


def test_psi_examples():
    assert psi(1, Fraction(1, 5)) == Interval.point(1)
    assert psi(16, Fraction(1, 4)) == Interval.point(Fraction(1, 2))
    box = psi(100, Fraction(1, 10))
    with mpmath.workdps(40):
        ref = mpmath.mpf(100) ** mpmath.mpf("-0.4")
        assert mpmath.mpf(box.lo.numerator) / box.lo.denominator <= ref
        assert ref <= mpmath.mpf(box.hi.numerator) / box.hi.denominator
    assert abs(float(box) - 0.1585) < 1e-4
    for bad in (0, Fraction(1, 2), -1):
        with pytest.raises(ValueError):
            psi(10, bad)


@given(st.integers(1, 10 ** 6), st.fractions(min_value=Fraction(1, 100), max_value=Fraction(49, 100)))
def test_psi_decreasing(N, eps):
    assert psi(N + 1, eps).hi < psi(N, eps).lo


def test_own_target_always_hits():
    target = (FIB[0] * approximate(BETA, 200)) % 1
    for N in (1, 5, 50):
        assert hit_count(FIB, BETA, target, N, Fraction(1, 5)).count >= 1


def test_first_window_always_hits():
    for target in (Fraction(3, 10), Fraction(0), PHI):
        assert hit_count(FIB, BETA, target, 1, Fraction(1, 5)).count == 1


def test_hit_count_matches_mpmath_and_expectation():
    N = 1000
    hc = hit_count(FIB, BETA, Fraction(3, 10), N, Fraction(1, 5))
    with mpmath.workdps(700):
        ref = oracles.hit_count_mp(FIB, mp_beta(), mpmath.mpf(3) / 10, N, Fraction(1, 5), 700)
    assert hc.count == ref
    assert hc.undecided == ()
    expected = 2 * N ** 0.7
    assert abs(hc.count - expected) <= 0.1 * expected


@pytest.mark.parametrize("N", [10, 200, 700])
def test_hit_count_integer_shift_invariant(N):
    a = hit_count(FIB, BETA, Fraction(3, 10), N, Fraction(1, 5))
    b = hit_count(FIB, BETA, Fraction(13, 10), N, Fraction(1, 5))
    c = hit_count(FIB, BETA, Fraction(-7, 10), N, Fraction(1, 5))
    assert a.count == b.count == c.count and a.hits == b.hits


def test_profile_agrees_with_single_counts():
    prof = count_profile(FIB, BETA, Fraction(3, 10), Fraction(1, 5), 120)
    for N in (1, 17, 64, 120):
        assert prof[N - 1] == hit_count(FIB, BETA, Fraction(3, 10), N, Fraction(1, 5))
    with pytest.raises(ValueError):
        hit_count(FIB[:10], BETA, 0, 11, Fraction(1, 5))


def test_n_gamma_h_examples():
    target = (FIB[0] * approximate(BETA, 200)) % 1
    assert n_gamma_h(FIB, BETA, target, Fraction(1, 5), 1, 50).N == 1
    # literal scan oracle for h = 1 and gamma = 0.3
    got = n_gamma_h(FIB, BETA, Fraction(3, 10), Fraction(1, 5), 1, 200)
    with mpmath.workdps(120):
        first = next(N for N in range(1, 201)
                     if oracles.hit_count_mp(FIB, mp_beta(), mpmath.mpf(3) / 10, N, Fraction(1, 5), 120) == 1)
    assert got.N == first and not got.relaxed
    with pytest.raises(NotFound):
        n_gamma_h(FIB, BETA, Fraction(3, 10), Fraction(1, 5), 500, 100)


def test_eq6_golden_pair():
    certs = witnesses_eq6(PHI, PHI, 0, Fraction(2, 5), 50)
    assert certs
    for c in certs:
        assert verify_certificate(c)
        assert verify_certificate(json.loads(c.dumps()))


@pytest.fixture(scope="module")
def eq6_certs():
    return witnesses_eq6(PHI, BETA, Fraction(3, 10), Fraction(1, 5), 300)


def test_eq6_certificates_verify_and_obey_chain(eq6_certs):
    assert len(eq6_certs) >= 10
    with mpmath.workdps(300):
        beta = mp_beta()
        for c in eq6_certs:
            assert verify_certificate(c)
            assert c.q == FIB[c.k - 1]
            assert c.product.hi < c.bound.lo
            # q ||q alpha|| <= 1 makes the product at most ||q beta - gamma||
            dist = oracles.mp_norm(c.q * beta - mpmath.mpf(3) / 10)
            assert mpmath.mpf(c.product.lo.numerator) / c.product.lo.denominator <= dist


def test_eps_monotonicity():
    small = {c.k for c in witnesses_eq6(PHI, BETA, Fraction(3, 10), Fraction(1, 10), 150)}
    large = {c.k for c in witnesses_eq6(PHI, BETA, Fraction(3, 10), Fraction(3, 10), 150)}
    assert small <= large


TAMPERS = [
    ("k", lambda o: o.__setitem__("k", o["k"] + 1)),
    ("q", lambda o: o.__setitem__("q", str(int(o["q"]) + 1))),
    ("format", lambda o: o.__setitem__("format", 2)),
    ("kind", lambda o: o.__setitem__("kind", "eq9")),
    ("alpha", lambda o: o["params"].__setitem__("alpha", "surd(0,1,3)")),
    ("beta", lambda o: o["params"].__setitem__("beta", "cf(0;(3))")),
    ("gamma", lambda o: o["params"].__setitem__("gamma", "1/5")),
    ("eps", lambda o: o["params"].__setitem__("eps", "1/20")),
    ("exponent", lambda o: o["params"].__setitem__("exponent", "other")),
    ("rel_bits", lambda o: o["precision"].__setitem__("rel_bits", o["precision"]["rel_bits"] + 1)),
    ("bound_bits", lambda o: o["precision"].__setitem__("bound_bits", 7)),
    ("product", lambda o: o.__setitem__("product", ["0", o["product"][1]])),
    ("bound", lambda o: o.__setitem__("bound", [o["bound"][0], "100"])),
    ("provenance", lambda o: o.__setitem__("provenance", {"path": "direct-scan", "h": 1})),
    ("garbage", lambda o: o.__setitem__("product", "nonsense")),
]


@pytest.mark.parametrize("name,tamper", TAMPERS, ids=[t[0] for t in TAMPERS])
def test_tampering_is_detected(eq6_certs, name, tamper):
    for c in eq6_certs[:3] + eq6_certs[-2:]:
        obj = copy.deepcopy(c.to_json())
        tamper(obj)
        with pytest.raises(CertificateError):
            verify_certificate(obj)


def test_proof_construction_path():
    certs = witnesses_eq6(PHI, BETA, Fraction(3, 10), Fraction(1, 5), 200, path="proof-construction")
    assert certs
    for c in certs:
        assert c.provenance["path"] == "proof-construction"
        assert c.provenance["N"] == c.k
        assert verify_certificate(c)
        assert c.product.lo <= psi(c.k, Fraction(1, 5), 64).hi
    obj = certs[0].to_json()
    obj["provenance"]["h"] += 1
    with pytest.raises(CertificateError):
        verify_certificate(obj)


def test_proof_exponent_is_stricter():
    theorem = {c.k for c in witnesses_eq6(PHI, BETA, Fraction(3, 10), Fraction(1, 5), 120)}
    proof = witnesses_eq6(PHI, BETA, Fraction(3, 10), Fraction(1, 5), 120, exponent="proof")
    assert {c.k for c in proof} <= theorem
    assert all(verify_certificate(c) for c in proof)


def test_eq9_two_adic_golden():
    D = PseudoAbsSeq.adic(2)
    certs = witnesses_eq9(D, PHI, 0, Fraction(2, 5), 200)
    assert certs
    with mpmath.workdps(200):
        phi = (1 + mpmath.sqrt(5)) / 2
        for c in certs:
            assert verify_certificate(c)
            assert c.q == 2 ** c.k
            assert factors(mixed(PHI, D), c.q)[0] == 1
            d = oracles.mp_norm(c.q * phi)
            lo = mpmath.mpf(c.product.lo.numerator) / c.product.lo.denominator
            hi = mpmath.mpf(c.product.hi.numerator) / c.product.hi.denominator
            assert lo <= d <= hi


def test_eq9_own_shift_gives_zero_product():
    delta = surd(-2, 1, 5)   # {2 phi}
    certs = witnesses_eq9(PseudoAbsSeq.adic(2), PHI, delta, Fraction(1, 5), 3)
    first = certs[0]
    assert first.k == 1 and first.product == Interval.point(0)


def test_eq9_rejects_fast_chains_and_tampering():
    with pytest.raises(ValueError):
        witnesses_eq9(PseudoAbsSeq.factorial(), PHI, 0, Fraction(1, 5), 10, C=3)
    cert = witnesses_eq9(PseudoAbsSeq.adic(2), BETA, 0, Fraction(3, 10), 100)[0]
    for key, value in (("C", "3/2"), ("D", "3adic"), ("delta", "1/7")):
        obj = cert.to_json()
        obj["params"][key] = value
        with pytest.raises(CertificateError):
            verify_certificate(obj)


def test_eq7_reports():
    zero = liminf_report_eq7(PseudoAbsSeq.adic(2), Fraction(3, 8), 0, 10)
    assert zero[-1].value == Interval.point(0)
    recs = liminf_report_eq7(PseudoAbsSeq.adic(2), PHI, Fraction(1, 3), 1000)
    assert all(r.value.lo > 0 for r in recs)
    assert all(b.value.hi < a.value.lo for a, b in zip(recs, recs[1:]))
    shorter = liminf_report_eq7(PseudoAbsSeq.adic(2), PHI, Fraction(1, 3), 300)
    assert recs[-1].value.hi <= shorter[-1].value.hi
    assert recs[:len(shorter)] == shorter


def test_load_certificates_formats(tmp_path, eq6_certs):
    objs = [c.to_json() for c in eq6_certs[:2]]
    plain = tmp_path / "a.json"
    plain.write_text(json.dumps(objs))
    headed = tmp_path / "b.json"
    headed.write_text("# {}\n" + json.dumps({"certificates": objs}))
    single = tmp_path / "c.json"
    single.write_text(json.dumps(objs[0]))
    assert load_certificates(plain) == objs
    assert load_certificates(headed) == objs
    assert load_certificates(single) == objs[:1]
    bad = tmp_path / "d.json"
    bad.write_text("3")
    with pytest.raises(CertificateError):
        load_certificates(bad)
