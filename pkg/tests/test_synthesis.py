from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaexp.errors import DomainError
from betaexp.expansion import Alphabet, Direction, canonical_intervals, imbalance
from betaexp.numerics.beta import BetaValue
from betaexp.numerics.exact import QPoint
from betaexp.synthesis import (build_partition_table, compute_constants, require_below_golden,
                               synthesize_omega)

LOW, ONE = Direction.LOW_HEAVY, Direction.ONE_HEAVY

# Words of the published tables for the root of x^3 - x^2 - 1, in cell order
TABLE_LOW = ["1000", "100", "101000", "10100", "11000000", "1100000", "110000"]
TABLE_ONE = ["001111", "0011111", "00111111", "01011", "010111", "011", "0111"]


def _s(word):
    return "".join("1" if d == 1 else "0" for d in word)


def test_table_words_for_beta_star(beta_star):
    t = build_partition_table(beta_star)
    assert [_s(c.word) for c in t.cells[LOW]] == TABLE_LOW
    assert [_s(c.word) for c in t.cells[ONE]] == TABLE_ONE
    assert t.n_beta == 8


def test_plus_minus_table_is_relabelled(beta_star):
    a = build_partition_table(beta_star, Alphabet.ZERO_ONE)
    b = build_partition_table(beta_star, Alphabet.PLUS_MINUS)
    for d in (LOW, ONE):
        assert [tuple(-1 if e == 0 else 1 for e in c.word) for c in a.cells[d]] == \
            [c.word for c in b.cells[d]]


@pytest.mark.parametrize("spec", ["1.2", "1.3", "poly:x^3-x^2-1:[1.4,1.5]", "1.55", "1.6"])
def test_cells_cover_O_and_words_return(spec):
    b = BetaValue.parse(spec)
    t = build_partition_table(b)
    O = canonical_intervals(b).O
    for d in (LOW, ONE):
        cells = t.cells[d]
        assert cells[0].lo == O.lo and cells[-1].hi == O.hi
        for c, nxt in zip(cells, cells[1:]):
            assert c.hi == nxt.lo
        for c in cells:
            # each map is affine, so checking both ends covers the cell
            for end in (c.lo, c.hi):
                y = end.apply_word(c.word)
                assert O.lo <= y <= O.hi
            k = imbalance(c.word)
            assert (k > 0) if d is LOW else (k < 0)
            assert len(c.word) <= t.n_beta


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=10_000), st.sampled_from([LOW, ONE]))
def test_synthesized_word_returns_to_O(t, direction):
    b = BetaValue.parse("1.5")
    O = canonical_intervals(b).O
    x = O.lo + (O.hi - O.lo) * t
    w = synthesize_omega(x, b, direction)
    y = x.apply_word(w)
    assert O.lo <= y <= O.hi
    assert imbalance(w) != 0 and (imbalance(w) > 0) == (direction is LOW)


def test_lookup_agrees_with_synthesis(beta_star):
    t = build_partition_table(beta_star)
    O = canonical_intervals(beta_star).O
    for k in range(1, 20):
        x = O.lo + (O.hi - O.lo) * Fraction(k, 20)
        for d in (LOW, ONE):
            w = t.lookup_point(d, x)
            y = x.apply_word(w)
            assert O.lo <= y <= O.hi


def test_constants_for_beta_star(beta_star):
    k = compute_constants(beta_star)
    assert k.n_beta == 8
    assert k.window == (Fraction(7, 16), Fraction(9, 16))
    assert k.proof_bound >= k.n_beta
    assert k.delta > 0


def test_proof_policy_is_also_valid(beta_star):
    t = build_partition_table(beta_star, policy="proof")
    O = canonical_intervals(beta_star).O
    for d in (LOW, ONE):
        for c in t.cells[d]:
            assert O.lo <= c.lo.apply_word(c.word) <= O.hi


def test_golden_or_above_rejected():
    with pytest.raises(DomainError):
        require_below_golden(BetaValue.parse("phi"))
    with pytest.raises(DomainError):
        build_partition_table(BetaValue.parse("1.7"))


def test_synthesis_rejects_points_outside_O(beta_star):
    with pytest.raises(DomainError):
        synthesize_omega(QPoint.rational(beta_star, Fraction(1, 10)), beta_star)


def test_json_shape(beta_star):
    j = build_partition_table(beta_star).to_json()
    assert j["schema_version"] == 1
    assert j["n_beta"] == 8
    assert len(j["directions"]["omega0"]) == 7
    assert len(j["directions"]["omega1"]) == 7
