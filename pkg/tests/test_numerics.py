from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaexp.errors import DomainError
from betaexp.numerics import poly as P
from betaexp.numerics.beta import BetaValue, golden_ratio
from betaexp.numerics.exact import QPoint
from betaexp.numerics.interval import RInterval, geometric_tail

from oracles import interval_endpoint

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=10_000)
precs = st.integers(min_value=8, max_value=200)


def encl(q, prec):
    return RInterval.exact(q, prec)


def inside(iv, q):
    return interval_endpoint(iv.lo) <= q <= interval_endpoint(iv.hi)


@given(fractions, fractions, precs)
def test_arithmetic_contains_exact(a, b, prec):
    A, B = encl(a, prec), encl(b, prec)
    assert inside(A + B, a + b)
    assert inside(A - B, a - b)
    assert inside(A * B, a * b)
    if b != 0:
        assert inside(A / B, a / b)


@given(fractions, st.integers(min_value=0, max_value=9), precs)
def test_powers_contain_exact(a, n, prec):
    assert inside(encl(a, prec) ** n, a ** n)


@given(st.fractions(min_value=0, max_value=1000, max_denominator=1000), precs)
def test_sqrt_brackets_root(a, prec):
    r = encl(a, prec).sqrt()
    lo, hi = interval_endpoint(r.lo), interval_endpoint(r.hi)
    assert lo * lo <= a <= hi * hi
    assert lo >= 0


@given(fractions, precs)
def test_exact_is_tight(a, prec):
    e = encl(a, prec)
    assert inside(e, a)
    if a != 0:
        assert (interval_endpoint(e.hi) - interval_endpoint(e.lo)) <= abs(a) * Fraction(2, 2 ** (prec - 1))


def test_division_by_zero_interval():
    z = RInterval(-1, 1)
    w = RInterval(1) / z
    assert not w.is_finite()


def test_empty_interval_rejected():
    with pytest.raises(DomainError):
        RInterval(2, 1)


def test_geometric_tail_matches_formula():
    t = geometric_tail(RInterval.exact(Fraction(3, 2), 128), 10)
    exact = Fraction(2, 3) ** 10 / Fraction(1, 2)
    assert inside(t, exact)


def test_poly_parse_roundtrip():
    p = P.parse("x^3 - x^2 - 1")
    assert P.to_string(p) == "x^3-x^2-1"
    assert P.sign_changes(p) == 1


def test_sturm_counts_roots():
    p = P.parse("x^3 - 3x + 1")  # three real roots, all in (-2, 2)
    assert P.sturm_count(p, Fraction(-2), Fraction(2)) == 3
    assert P.sturm_count(p, Fraction(0), Fraction(1)) == 1


def test_beta_parse_forms():
    assert BetaValue.parse("dec:1.5").rational == Fraction(3, 2)
    assert BetaValue.parse("1.25").rational == Fraction(5, 4)
    star = BetaValue.parse("poly:x^3-x^2-1:[1.4,1.5]")
    e = star.enclose(200)
    with mpmath.workdps(80):
        r = mpmath.findroot(lambda t: t ** 3 - t ** 2 - 1, mpmath.mpf("1.4656"))
        assert mpmath.mpf(e.lo) <= r <= mpmath.mpf(e.hi)
    with pytest.raises(DomainError):
        BetaValue.parse("poly:x^3-x^2-1")
    with pytest.raises(DomainError):
        BetaValue.parse("poly:x^2-2:[0,1]")


def test_golden_enclosure_against_mpmath():
    with mpmath.workdps(80):
        phi = (1 + mpmath.sqrt(5)) / 2
        e = golden_ratio().enclose(240)
        assert mpmath.mpf(e.lo) <= phi <= mpmath.mpf(e.hi)
        assert float(e.hi - e.lo) < 1e-70


def test_compare_is_exact_for_equal_roots():
    a = BetaValue.parse("poly:x^2-x-1:[1,2]")
    b = BetaValue.parse("poly:x^4-x^3-x^2:[1,2]")  # same root times x^2
    assert a.compare(b) == 0
    assert a.compare_fraction(Fraction(8, 5)) == 1


@settings(max_examples=50)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=50),
       st.fractions(min_value=-3, max_value=3, max_denominator=50))
def test_qpoint_ordering_matches_floats(a, b):
    phi = golden_ratio()
    pa = QPoint.rational(phi, a) * QPoint.beta_power(phi, 1)
    pb = QPoint.rational(phi, b)
    fa = float(a) * 1.618033988749895
    if abs(fa - float(b)) > 1e-9:
        assert (pa < pb) == (fa < float(b))


def test_qpoint_exact_identity():
    phi = golden_ratio()
    # phi^2 = phi + 1
    lhs = QPoint.beta_power(phi, 2)
    rhs = QPoint.beta_power(phi, 1) + 1
    assert lhs == rhs
