import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaexp.errors import DomainError, GrowthViolation, ScheduleError
from betaexp.expansion import Alphabet
from betaexp.frequency import (AccumulationStream, FrequencyStream, GrowthFunction, HybridStream,
                               SimplyNormalStream, SlowGrowthStream, frequency_window)
from betaexp.numerics.beta import BetaValue

from oracles import partial_sums_ok_beta_star, partial_sums_ok_rational

B15 = BetaValue.parse("1.5")
xs = st.fractions(min_value=Fraction(1, 100), max_value=Fraction(199, 100), max_denominator=997)


def _recount(stream, low):
    """Digits after the initial word and the running count of the low digit."""
    body = np.frombuffer(bytes(stream.digits), dtype=np.int8)[len(stream.prefix):]
    lows = np.cumsum(body == low)
    return body, lows


@settings(max_examples=15, deadline=None)
@given(xs, st.sampled_from([Fraction(4, 9), Fraction(1, 2), Fraction(5, 9), Fraction(23, 45)]))
def test_frequency_checkpoints(x, p):
    s = FrequencyStream(B15, x, p)
    s.extend_to(3000)
    body, lows = _recount(s, 0)
    for rec in s.checkpoints:
        n = rec["index"] - len(s.prefix)
        assert rec["count0"] == lows[n - 1]
        assert abs(lows[n - 1] - p * n) <= s.n_beta
    assert partial_sums_ok_rational(s.take(3000), Fraction(3, 2), x)


def test_frequency_converges():
    p = Fraction(5, 11)
    s = FrequencyStream(B15, Fraction(7, 10), p)
    s.extend_to(20_000)
    body = s.take(20_000)[len(s.prefix):]
    assert abs(body.count(0) / len(body) - float(p)) < 1e-3


def test_frequency_window_reported():
    assert frequency_window(BetaValue.parse("poly:x^3-x^2-1:[1.4,1.5]")) == (Fraction(7, 16), Fraction(9, 16))


def test_frequency_outside_window():
    with pytest.raises(DomainError):
        FrequencyStream(B15, Fraction(1, 2), Fraction(3, 4))


def test_frequency_deterministic():
    a = FrequencyStream(B15, Fraction(7, 10), Fraction(1, 2)).take(2000)
    b = FrequencyStream(B15, Fraction(7, 10), Fraction(1, 2)).take(2000)
    assert a == b


def test_beta_star_partial_sums(beta_star):
    s = FrequencyStream(beta_star, Fraction(3, 7), Fraction(7, 16))
    assert partial_sums_ok_beta_star(s.take(5000), Fraction(3, 7))


def test_accumulation_visits_targets():
    targets = [Fraction(9, 20), Fraction(11, 20)] * 6
    s = AccumulationStream(B15, Fraction(7, 10), iter(targets))
    while len(s.hits) < len(targets) - 1:
        s._advance()
    for y, n in s.hits[1:]:
        body = s.digits[len(s.prefix):len(s.prefix) + n]
        assert abs(list(body).count(0) - y * n) <= s.n_beta


def test_accumulation_exhausted_schedule():
    s = AccumulationStream(B15, Fraction(7, 10), iter([Fraction(1, 2)]))
    with pytest.raises(ScheduleError):
        s.extend_to(10_000)


def test_accumulation_default_schedule_is_dense():
    s = AccumulationStream(B15, Fraction(7, 10))
    s.extend_to(5000)
    lo, hi = s.window
    assert all(lo < y < hi for y, _ in s.hits)
    assert len({y for y, _ in s.hits}) >= 3


@settings(max_examples=10, deadline=None)
@given(st.fractions(min_value=Fraction(-1, 10), max_value=Fraction(1, 10), max_denominator=500))
def test_hybrid_average(x):
    s = HybridStream(B15, x)
    s.extend_to(4000)
    d = np.array(s.take(4000), dtype=np.int64)
    sums = np.cumsum(d)
    for rec in s.checkpoints:
        n = rec["index"]
        if n > len(d):
            break
        assert sums[n - 1] == rec["signed_sum"]
        assert abs(Fraction(int(sums[n - 1])) - n * x) <= 2 * s.n_beta + 1
    assert partial_sums_ok_rational(s.take(4000), Fraction(3, 2), x)


def test_hybrid_range():
    with pytest.raises(DomainError):
        HybridStream(B15, Fraction(1, 2))


@pytest.mark.parametrize("x", [Fraction(7, 10), Fraction(-13, 10), Fraction(1, 20)])
def test_slow_growth_sqrt(x):
    s = SlowGrowthStream(B15, x, GrowthFunction.sqrt())
    s.extend_to(20_000)
    d = np.array(s.take(20_000), dtype=np.int64)
    sums = np.cumsum(d)
    n = np.arange(1, len(d) + 1)
    dev = np.abs(sums - np.sqrt(n) * float(x))
    start = s.first_block_end
    assert start is not None
    assert dev[start - 1:].max() <= s.C + 1e-9
    assert s.C <= s.theory_bound
    assert partial_sums_ok_rational(s.take(20_000), Fraction(3, 2), x)


def test_growth_parse_and_violation():
    assert GrowthFunction.parse("pow:1/3").name
    with pytest.raises(DomainError):
        GrowthFunction.parse("cube")
    with pytest.raises(GrowthViolation):
        SlowGrowthStream(B15, Fraction(1, 2), GrowthFunction.parse("linear"), scan_limit=1 << 10)


@pytest.mark.parametrize("spec,m", [("phi", 1), ("1.7", 1), ("1.76", 2), ("1.786", 3)])
def test_simply_normal_balance(spec, m):
    b = BetaValue.parse(spec)
    s = SimplyNormalStream(b, Fraction(1, 3))
    assert s.m == m
    s.extend_to(5000)
    body = np.array(s.take(5000)[len(s.prefix):], dtype=np.int64)
    bal = np.cumsum(np.where(body == 0, 1, -1))
    assert np.abs(bal).max() <= s.bound + 1
    assert abs(int(bal[-1])) <= s.bound + 1


def test_simply_normal_domain():
    with pytest.raises(DomainError):
        SimplyNormalStream(BetaValue.parse("1.5"), Fraction(1, 3))
    with pytest.raises(DomainError):
        SimplyNormalStream(BetaValue.parse("1.8"), Fraction(1, 3))


def test_checkpoint_log_lines(tmp_path):
    s = FrequencyStream(B15, Fraction(7, 10), Fraction(1, 2))
    s.extend_to(500)
    path = tmp_path / "log.jsonl"
    s.write_log(path)
    lines = path.read_text().splitlines()
    assert len(lines) == len(s.checkpoints)
    assert '"count0"' in lines[0]


def test_plus_minus_frequency():
    s = FrequencyStream(B15, Fraction(-1, 3), Fraction(1, 2), alphabet=Alphabet.PLUS_MINUS)
    d = s.take(3000)
    assert set(d) <= {-1, 1}
    body = d[len(s.prefix):]
    assert abs(body.count(-1) - len(body) / 2) <= s.n_beta + 2
    assert math.isfinite(float(s.max_deviation))
