from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaexp.errors import DomainError
from betaexp.expansion import (Alphabet, MapWord, apply_word, canonical_intervals, conjugate,
                               imbalance, map_into_O, project, project_affine, project_exact)
from betaexp.numerics.beta import BetaValue
from betaexp.numerics.exact import QPoint

from oracles import affine_value, enclosed, word_value

words01 = st.lists(st.sampled_from((0, 1)), max_size=30)


def test_trap_interval_formula(beta_star):
    ci = canonical_intervals(beta_star)
    with mpmath.workdps(80):
        b = mpmath.findroot(lambda t: t ** 3 - t ** 2 - 1, mpmath.mpf("1.4656"))
        lo, hi = 1 / (b * b - 1), b / (b * b - 1)
    assert enclosed(ci.O.lo.enclose(300), lo)
    assert enclosed(ci.O.hi.enclose(300), hi)
    # both maps are defined on S, and O sits inside S
    assert ci.S.lo <= ci.O.lo and ci.O.hi <= ci.S.hi


@pytest.mark.parametrize("spec", ["1.3", "1.5", "poly:x^3-x^2-1:[1.4,1.5]", "1.6"])
def test_interval_nesting(spec):
    b = BetaValue.parse(spec)
    for alpha in Alphabet:
        ci = canonical_intervals(b, alpha)
        assert ci.I.lo < ci.S.lo < ci.O.lo < ci.O.hi < ci.S.hi < ci.I.hi
        assert ci.calI.lo < ci.O.lo and ci.O.hi < ci.calI.hi


def test_conjugacy_sends_pictures_onto_each_other(beta_star):
    a = canonical_intervals(beta_star, Alphabet.ZERO_ONE)
    b = canonical_intervals(beta_star, Alphabet.PLUS_MINUS)
    for name in ("I", "S", "O"):
        s01, spm = getattr(a, name), getattr(b, name)
        assert conjugate(s01.lo, beta_star) == spm.lo
        assert conjugate(s01.hi, beta_star) == spm.hi


@given(words01, st.fractions(min_value=0, max_value=2, max_denominator=100))
def test_orbit_identity(word, x):
    # x = sum w_i b^-i + b^-n T_w(x) exactly
    b = BetaValue.parse("1.5")
    p = QPoint.rational(b, x)
    img = apply_word(word, p, b)
    lhs = project_exact(word, b) + img * QPoint.rational(b, Fraction(2, 3) ** len(word))
    assert lhs == p


@given(st.lists(st.sampled_from((-1, 1)), max_size=25))
def test_projection_against_mpmath(word):
    b = Fraction(3, 2)
    got = project(word, BetaValue.from_fraction(b), 300)
    with mpmath.workdps(80):
        ref = word_value(word, mpmath.mpf(3) / 2, dps=80)
    assert enclosed(got, ref)


@given(st.lists(st.sampled_from((-1, 1)), max_size=25))
def test_affine_projection_against_mpmath(word):
    b2, b3 = Fraction(103, 100), Fraction(104, 100)
    got = project_affine(word, BetaValue.from_fraction(b2), BetaValue.from_fraction(b3), 300)
    ref = affine_value(word, b2, b3, dps=80)
    assert enclosed(got, ref)


def test_affine_projection_rejects_zero_digit():
    with pytest.raises(DomainError):
        project_affine((0, 1), BetaValue.parse("1.1"), BetaValue.parse("1.2"))


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1999, 1000), max_denominator=1000))
def test_map_into_O_lands_in_O(x):
    b = BetaValue.parse("1.5")
    word = map_into_O(x, b)
    ci = canonical_intervals(b)
    y = apply_word(word, QPoint.rational(b, x), b)
    assert ci.O.lo <= y <= ci.O.hi


def test_map_into_O_rejects_endpoints():
    b = BetaValue.parse("1.5")
    with pytest.raises(DomainError):
        map_into_O(0, b)
    with pytest.raises(DomainError):
        map_into_O(2, b)


def test_mapword_counts():
    w = MapWord(Alphabet.PLUS_MINUS, (1, -1, -1))
    assert w.imbalance() == 1
    assert w.digits() == (1, -1, -1)
    assert imbalance((0, 0, 1)) == 1
    with pytest.raises(DomainError):
        w.append(0)
    assert repr(w) == "MapWord('+--')"


def test_alphabet_parse():
    assert Alphabet.parse("01") is Alphabet.ZERO_ONE
    assert Alphabet.parse("pm") is Alphabet.PLUS_MINUS
    with pytest.raises(DomainError):
        Alphabet.parse("012")
