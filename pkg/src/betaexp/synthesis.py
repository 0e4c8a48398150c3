"""Synthesis of digit-heavy words and the partition of O they induce.

For a point x of O the synthesis algorithm builds a finite word w of digit
maps with w(x) back in O and strictly more low digits than ones (or the
mirror).  Two constructions are available:

* the T1-then-run loop: apply T1, then the low map until the point is back
  in O; stop once a run is longer than one step, otherwise repeat;
* the double-T1 start: apply T1 twice, run the low map back into O, stop if
  the run is longer than two steps, otherwise continue with the loop.

The ``proof`` policy picks between them with the calI threshold: the
double-T1 start is used when T1(x) >= inf calI.  The default ``shortest``
policy computes the word given by that threshold, and also tries the other
construction with the same length budget.  It keeps the shorter word, and
on a tie the one with the larger imbalance.  Both constructions stop
exactly where the algorithm says; only the case choice differs.

Words are constant on finitely many cells of O.  ``build_partition_table``
finds the cells by running the algorithm symbolically on whole intervals
with exact endpoints, splitting a cell whenever a comparison depends on
the point.  Each cell is then certified independently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BoundaryUndecidable, DomainError, SubdivisionOverflow
from .expansion import (Alphabet, CanonicalIntervals, Direction, canonical_intervals,
                        imbalance, word_string)
from .numerics.beta import BetaValue, golden_ratio
from .numerics.exact import QPoint
from .numerics.interval import RInterval
from .orbit import Locator, Orbit, locate

POLICIES = ("shortest", "proof")
SCHEMA_VERSION = 1

_O_LO, _CALI_LO = "O.lo", "calI.lo"


class _Split(Exception):
    def __init__(self, t: QPoint):
        self.t = t


def require_below_golden(beta: BetaValue):
    c = beta.compare(golden_ratio())
    if c >= 0:
        raise DomainError(f"base {beta.label} must lie strictly between 1 and the golden ratio")


# --- the algorithm, written once against a comparison oracle --------------

def _loop(word, ge, L, budget):
    """Repeat: T1, then the low map until back in O; stop after a run of two or more."""
    w = list(word)
    while True:
        w.append(1)
        run = 0
        while not ge(w, _O_LO):
            w.append(L)
            run += 1
            if len(w) > budget:
                return None
        if run == 0:
            return None
        if run > 1:
            return tuple(w)
        if len(w) + 2 > budget:
            return None


def _double_start(ge, L, budget):
    w = [1, 1]
    run = 0
    while not ge(w, _O_LO):
        w.append(L)
        run += 1
        if len(w) > budget:
            return None
    if run > 2:
        return tuple(w)
    if run == 2:
        return _loop(w, ge, L, budget)
    return None


def _low_heavy(ge, L, policy: str, budget: int = 10_000):
    """Low-heavy word for the point (or cell) behind ``ge``; returns (word, construction)."""
    if ge([1], _CALI_LO):
        lit, kind = _double_start(ge, L, budget), "double-start"
    else:
        lit, kind = _loop([], ge, L, budget), "loop"
    if lit is None:
        raise BoundaryUndecidable("synthesis did not terminate within its budget")
    if policy == "proof":
        return lit, kind
    if kind == "loop":
        alt, alt_kind = _double_start(ge, L, len(lit)), "double-start"
    else:
        alt, alt_kind = _loop([], ge, L, len(lit)), "loop"
    if alt is not None:
        ia, il = _imb(alt, L), _imb(lit, L)
        if len(alt) < len(lit) or (len(alt) == len(lit) and ia > il):
            return alt, alt_kind
    return lit, kind


def _imb(word, L):
    low = sum(1 for d in word if d == L)
    return 2 * low - len(word)


def _thresholds(ci: CanonicalIntervals):
    return {_O_LO: ci.O.lo, _CALI_LO: ci.calI.lo}


def _mirror_word(word, L):
    return tuple(1 if d == L else L for d in word)


def synthesize_omega(x, beta: BetaValue, direction: Direction = Direction.LOW_HEAVY,
                     alphabet: Alphabet = Alphabet.ZERO_ONE, policy: str = "shortest"):
    """Digit-heavy word w for a point x of O, with w(x) in O.

    ``x`` may be a number, a QPoint or an RInterval; comparisons on exact
    points are exact.  Returns the word as a tuple of digits.
    """
    if policy not in POLICIES:
        raise DomainError(f"unknown policy {policy!r}")
    require_below_golden(beta)
    ci = canonical_intervals(beta, alphabet)
    L = alphabet.low
    if not isinstance(x, (QPoint, RInterval)):
        x = QPoint.rational(beta, Fraction(x))
    _require_in(x, ci.O, "O")
    if direction is Direction.ONE_HEAVY:
        x = ci.fixed_point_sum - x if isinstance(x, QPoint) else ci.fixed_point_sum.enclose(x.prec) - x
    th = _thresholds(ci)

    def ge(w, key):
        c = th[key]
        if isinstance(x, QPoint):
            return x.apply_word(w) >= c
        y = x
        b = beta.enclose(x.prec)
        for d in w:
            y = b * y - d
        ce = c.enclose(x.prec)
        if y.lo >= ce.hi:
            return True
        if y.hi < ce.lo:
            return False
        raise BoundaryUndecidable("point enclosure straddles a synthesis threshold")

    word, _ = _low_heavy(ge, L, policy)
    if direction is Direction.ONE_HEAVY:
        word = _mirror_word(word, L)
    return word


def _require_in(x, span, name):
    if isinstance(x, QPoint):
        if not (span.lo <= x <= span.hi):
            raise DomainError(f"point is not in {name}")
    else:
        e = span.enclose(x.prec)
        if x.lo < e.lo or x.hi > e.hi:
            raise DomainError(f"point enclosure is not certified inside {name}")


# --- tables ----------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    lo: QPoint
    hi: QPoint
    word: tuple
    construction: str = ""


@dataclass
class SynthesisConstants:
    beta: BetaValue
    alphabet: Alphabet
    delta: QPoint
    delta_prime: QPoint
    n1: int
    n2: int
    n_beta: int

    @property
    def proof_bound(self) -> int:
        return self.n1 + 2 * self.n2 - 1

    @property
    def c(self) -> Fraction:
        """Half-width of the admissible frequency window, 1/(2 n(beta))."""
        return Fraction(1, 2 * self.n_beta)

    @property
    def window(self) -> tuple[Fraction, Fraction]:
        return Fraction(1, 2) - self.c, Fraction(1, 2) + self.c

    def to_json(self) -> dict:
        lo, hi = self.window
        return {
            "delta": list(self.delta.enclose(96).to_strings(17)),
            "delta_prime": list(self.delta_prime.enclose(96).to_strings(17)),
            "n1": self.n1,
            "n2": self.n2,
            "n_beta": self.n_beta,
            "proof_bound": self.proof_bound,
            "window": {"c": str(self.c), "p_min": str(lo), "p_max": str(hi)},
        }


class PartitionTable:
    """Cells of O with their low-heavy and one-heavy words."""

    def __init__(self, beta, alphabet, policy, cells: dict):
        self.beta = beta
        self.alphabet = alphabet
        self.policy = policy
        self.cells = cells
        self.intervals = canonical_intervals(beta, alphabet)
        self.n_beta = max(len(c.word) for cs in cells.values() for c in cs)
        self._loc: dict[Direction, Locator] = {}
        self._words: dict[Direction, list] = {d: [c.word for c in cs] for d, cs in cells.items()}

    def words(self, direction: Direction) -> list[tuple]:
        return list(dict.fromkeys(self._words[direction]))

    def locator(self, direction: Direction) -> Locator:
        loc = self._loc.get(direction)
        if loc is None:
            cs = self.cells[direction]
            loc = Locator([cs[0].lo] + [c.hi for c in cs])
            self._loc[direction] = loc
        return loc

    def lookup(self, direction: Direction, orbit: Orbit) -> tuple:
        """Word for the current point of a certified orbit (which must lie in O)."""
        idx = locate(orbit, self.locator(direction))
        words = self._words[direction]
        if idx < 0 or idx >= len(words):
            raise DomainError("orbit point is not in O")
        return words[idx]

    def lookup_point(self, direction: Direction, x: QPoint) -> tuple:
        for c in self.cells[direction]:
            if c.lo <= x <= c.hi:
                return c.word
        raise DomainError("point is not in O")

    def common_refinement(self) -> list[tuple]:
        """Cells of the joint partition: (lo, hi, low-heavy word, one-heavy word)."""
        pts = [c.lo for c in self.cells[Direction.LOW_HEAVY]] + [c.lo for c in self.cells[Direction.ONE_HEAVY]]
        pts += [self.intervals.O.hi]
        uniq: list[QPoint] = []
        for p in sorted(pts, key=_SortKey):
            if not uniq or uniq[-1] != p:
                uniq.append(p)
        out = []
        for a, b in zip(uniq, uniq[1:]):
            mid = (a + b) * Fraction(1, 2)
            out.append((a, b, self.lookup_point(Direction.LOW_HEAVY, mid),
                        self.lookup_point(Direction.ONE_HEAVY, mid)))
        return out

    def to_json(self) -> dict:
        def span(a, b):
            return {"lo": a.enclose(96).to_strings(17)[0], "hi": b.enclose(96).to_strings(17)[1]}

        def wl(w):
            return ",".join(str(d) for d in w)

        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "partition_table",
            "beta": self.beta.describe(),
            "alphabet": self.alphabet.value,
            "policy": self.policy,
            "n_beta": self.n_beta,
            "O": span(self.intervals.O.lo, self.intervals.O.hi),
            "cells": [dict(span(a, b), omega0=wl(w0), omega1=wl(w1))
                      for a, b, w0, w1 in self.common_refinement()],
            "directions": {
                d.value: [dict(span(c.lo, c.hi), word=wl(c.word), construction=c.construction)
                          for c in self.cells[d]]
                for d in (Direction.LOW_HEAVY, Direction.ONE_HEAVY)
            },
        }

    def to_text(self) -> str:
        lines = []
        for d in (Direction.LOW_HEAVY, Direction.ONE_HEAVY):
            lines.append(f"{d.value}:")
            for c in self.cells[d]:
                lo = float(c.lo.enclose(64).mid)
                hi = float(c.hi.enclose(64).mid)
                lines.append(f"  [{lo:.6f}, {hi:.6f}]  {word_string(c.word, self.alphabet)}")
        return "\n".join(lines)


class _SortKey:
    __slots__ = ("p",)

    def __init__(self, p):
        self.p = p

    def __lt__(self, other):
        return self.p < other.p


_TABLES: dict = {}


def build_partition_table(beta: BetaValue, alphabet: Alphabet = Alphabet.ZERO_ONE,
                          policy: str = "shortest", max_cells: int = 10_000) -> PartitionTable:
    """Exact partition of O into cells with constant synthesized words."""
    key = (id(beta), alphabet, policy)
    hit = _TABLES.get(key)
    if hit is not None and hit.beta is beta:
        return hit
    if policy not in POLICIES:
        raise DomainError(f"unknown policy {policy!r}")
    require_below_golden(beta)
    ci = canonical_intervals(beta, alphabet)
    L = alphabet.low
    th = _thresholds(ci)
    done: list[Cell] = []
    work = [(ci.O.lo, ci.O.hi)]
    while work:
        a, b = work.pop()

        def ge(w, key, a=a, b=b):
            t = th[key].inverse_word(w)
            if t <= a:
                return True
            if t >= b:
                return False
            raise _Split(t)

        try:
            word, kind = _low_heavy(ge, L, policy)
        except _Split as s:
            work.append((s.t, b))
            work.append((a, s.t))
            if len(done) + len(work) > max_cells:
                raise SubdivisionOverflow(f"more than {max_cells} cells needed")
            continue
        done.append(Cell(a, b, word, kind))
    done.sort(key=lambda c: _SortKey(c.lo))
    merged: list[Cell] = []
    for c in done:
        if merged and merged[-1].word == c.word:
            prev = merged[-1]
            kind = prev.construction if prev.construction == c.construction else "mixed"
            merged[-1] = Cell(prev.lo, c.hi, c.word, kind)
        else:
            merged.append(c)
    center = ci.fixed_point_sum
    mirrored = [Cell(center - c.hi, center - c.lo, _mirror_word(c.word, L), c.construction)
                for c in reversed(merged)]
    table = PartitionTable(beta, alphabet, policy,
                           {Direction.LOW_HEAVY: merged, Direction.ONE_HEAVY: mirrored})
    certify_table(table)
    _TABLES[key] = table
    return table


def certify_table(table: PartitionTable):
    """Check every cell exactly: images in O, prefixes in I, heaviness, coverage."""
    ci = table.intervals
    L = table.alphabet.low
    for direction, cells in table.cells.items():
        if not (cells[0].lo == ci.O.lo and cells[-1].hi == ci.O.hi):
            raise AssertionError("cells do not cover O")
        for c, nxt in zip(cells, cells[1:] + [None]):
            if nxt is not None and not (c.hi == nxt.lo):
                raise AssertionError("cells are not contiguous")
            if not c.lo < c.hi:
                raise AssertionError("degenerate cell")
            w = c.word
            a, b = c.lo, c.hi
            for k, d in enumerate(w, 1):
                a, b = a.apply_map(d), b.apply_map(d)
                if k < len(w) and not (a >= ci.I.lo and b <= ci.I.hi):
                    raise AssertionError(f"prefix of {w} leaves I")
            if not (a >= ci.O.lo and b <= ci.O.hi):
                raise AssertionError(f"cell image of {w} leaves O")
            imb = _imb(w, L)
            if direction is Direction.LOW_HEAVY and imb < 1:
                raise AssertionError(f"{w} is not low-heavy")
            if direction is Direction.ONE_HEAVY and imb > -1:
                raise AssertionError(f"{w} is not one-heavy")
    return True


def _power_run(beta: BetaValue, base: QPoint, target: QPoint, step: int) -> int:
    """Smallest n >= 1 with beta^(step*n) * base > target."""
    n = 1
    v = base.mul_beta(step)
    while not v > target:
        n += 1
        v = v.mul_beta(step)
        if n > 100_000:
            raise BoundaryUndecidable("constant search did not terminate")
    return n


def compute_constants(beta: BetaValue, alphabet: Alphabet = Alphabet.ZERO_ONE,
                      policy: str = "shortest") -> SynthesisConstants:
    require_below_golden(beta)
    ci01 = canonical_intervals(beta, Alphabet.ZERO_ONE)
    O = ci01.O
    # delta: distance from sup O to the T1-preimage of inf calI
    delta = O.hi - ci01.calI.lo.inverse_map(1)
    delta_prime = O.hi - QPoint(beta, (0, 0, 1, 1, -1), (-1, 0, 1))
    jlo = ci01.calJ.lo
    if not jlo > 0:
        raise DomainError("inf calJ is not positive for this base")
    # beta^(n1-1) J <= O.lo < beta^n1 J
    n1 = _power_run(beta, jlo, O.lo, 1)
    width = O.hi - O.lo
    if not delta > 0:
        raise DomainError("delta(beta) is not positive for this base")
    # beta^(2(n2-1)) delta <= |O| < beta^(2 n2) delta
    n2 = _power_run(beta, delta, width, 2)
    table = build_partition_table(beta, alphabet, policy)
    scale = 2 if alphabet is Alphabet.PLUS_MINUS else 1
    return SynthesisConstants(beta, alphabet, delta * scale, delta_prime * scale, n1, n2, table.n_beta)


def table_json(beta, alphabet=Alphabet.ZERO_ONE, policy="shortest") -> str:
    return json.dumps(build_partition_table(beta, alphabet, policy).to_json(), indent=2)
