from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betaexp.errors import DomainError, LadderExhausted
from betaexp.numerics.beta import BetaValue, golden_ratio
from betaexp.thuemorse import (base_ladder, count_heavy_words, dim_lower_bound, heavy_words,
                               is_unique_periodic, kappa, kappa_bar, kappa_identities_check,
                               komornik_loreti, ladder_rung, lex_admissible_prefix, locate_rung,
                               multinacci, quasi_greedy, run_bound, switch_report, tau, thue_morse,
                               tm_residual, upsilon)

from oracles import enclosed, heavy_word_count, komornik_loreti_mp, multinacci_mp, quasi_greedy_ok, thue_morse_bits


@given(st.integers(min_value=0, max_value=10))
def test_thue_morse_blocks(n):
    w = thue_morse(n)
    assert len(w) == 2 ** n
    assert list(w) == thue_morse_bits(2 ** n)
    if n:
        assert w == thue_morse(n - 1) + thue_morse(n - 1).complement()


@given(st.integers(min_value=0, max_value=10 ** 6))
def test_tau_is_popcount_parity(i):
    assert tau(i) == bin(i).count("1") % 2
    assert tau(2 * i) == tau(i) and tau(2 * i + 1) == 1 - tau(i)


def test_kappa_blocks():
    assert kappa(1) == (0, 1)
    assert kappa_bar(2) == (1, 0, 0, 1)
    assert upsilon(2) == (1, 1, 0, 0)


def test_komornik_loreti_enclosure():
    b = komornik_loreti()
    e = b.enclose(64)
    assert Fraction(1787, 1000) < e.lo and e.hi < Fraction(1788, 1000)
    assert float(e.hi - e.lo) <= 1e-12
    with mpmath.workdps(40):
        ref = komornik_loreti_mp(30)
    assert enclosed(b.enclose(100), ref, dps=30)
    res, tail = tm_residual(b.enclose(128))
    assert res.lo <= tail.hi and -tail.hi <= res.hi


@pytest.mark.parametrize("n", range(1, 9))
def test_multinacci_quasi_greedy(n):
    b = multinacci(n)
    ref = multinacci_mp(n)
    assert enclosed(b.enclose(200), ref, dps=50)
    period = (1,) * n + (0,)
    alpha = quasi_greedy(b, 20 * (n + 1))
    assert alpha == period * 20
    assert quasi_greedy_ok(period, ref)


def test_quasi_greedy_of_rational_base():
    # for 3/2 the quasi-greedy expansion of 1 is not periodic; compare with greedy digits in mpmath
    b = BetaValue.parse("1.5")
    got = quasi_greedy(b, 40)
    with mpmath.workdps(60):
        r, out = mpmath.mpf(1), []
        for _ in range(40):
            r *= mpmath.mpf(3) / 2
            d = 1 if r > 1 else 0
            out.append(d)
            r -= d
    assert got == tuple(out)


def test_ladder_rungs_increase_toward_kl():
    lad = base_ladder(5)
    kl = komornik_loreti()
    prev = golden_ratio()
    assert lad[1].compare(prev) == 0
    for m in range(2, 6):
        assert lad[m].compare(prev) > 0
        assert lad[m].compare(kl) < 0
        prev = lad[m]


@pytest.mark.parametrize("spec,m,l", [("phi", 1, 3), ("1.7", 1, 5), ("1.75", 1, 9), ("1.78", 2, 8)])
def test_rungs_and_run_bounds(spec, m, l):
    b = BetaValue.parse(spec)
    r = locate_rung(b)
    assert r.m == m
    assert all(switch_report(b, m).values())
    assert run_bound(b, m) == l


def test_locate_rung_domain():
    with pytest.raises(DomainError):
        locate_rung(BetaValue.parse("1.6"))
    with pytest.raises(DomainError):
        locate_rung(BetaValue.parse("1.79"))
    with pytest.raises(LadderExhausted):
        locate_rung(BetaValue.parse("1.78723"), max_rungs=3)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("spec", ["1.2", "phi", "1.7", "1.85", "1.95"])
def test_kappa_identities(n, spec):
    checks = kappa_identities_check(n, BetaValue.parse(spec))
    assert [c.name for c in checks] == ["fix", "fix_bar", "flip", "flip_bar"]
    for c in checks:
        assert c.contained
        assert c.exact in (True, None)


@pytest.mark.parametrize("k", range(0, 7))
def test_heavy_word_count(k):
    n = 2 * k + 1
    assert count_heavy_words(n) == heavy_word_count(n) == 2 ** (2 * k) - 1
    assert sum(1 for _ in heavy_words(n)) == count_heavy_words(n)


def test_dimension_bound_values():
    d = dim_lower_bound(1, BetaValue.parse("2"))
    with mpmath.workdps(40):
        ref = mpmath.log(3) / (3 * mpmath.log(2))
    assert enclosed(d.bound, ref, dps=30)
    with pytest.raises(DomainError):
        dim_lower_bound(2, BetaValue.parse("1.99"))


def test_lex_helpers():
    alpha = (1, 1, 0) * 4
    assert lex_admissible_prefix((1, 0, 1, 1, 0), alpha)
    assert not lex_admissible_prefix((1, 1, 1), alpha)
    assert is_unique_periodic((1, 0), (1, 1, 0, 1, 0, 0))
