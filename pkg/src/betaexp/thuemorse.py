"""Thue-Morse words, the base ladder below the Komornik-Loreti constant,
quasi-greedy expansions of 1 and multinacci bases.

Indexing: the Thue-Morse sequence tau starts at tau_0 = 0.  The map block
kappa^n uses tau_0 .. tau_{2^n - 1}; the ladder word upsilon^n and the
Komornik-Loreti series start at tau_1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import BoundaryUndecidable, DomainError, LadderExhausted
from .numerics import poly as P
from .numerics.beta import BetaValue, golden_ratio
from .numerics.exact import QPoint, periodic_point
from .numerics.interval import RInterval, geometric_tail


# --- Thue-Morse words ---------------------------------------------------------------

class ThueMorseWord(tuple):
    """tau^n as a tuple of 2^n bits, with its level attached."""

    level: int

    def __new__(cls, bits, level: int):
        self = super().__new__(cls, bits)
        self.level = level
        return self

    def complement(self) -> tuple:
        return tuple(1 - b for b in self)

    def __str__(self):
        return "".join(map(str, self))


@lru_cache(maxsize=None)
def thue_morse(n: int) -> ThueMorseWord:
    """tau^n, built by doubling: tau^{k+1} = tau^k followed by its complement."""
    if n < 0:
        raise DomainError("Thue-Morse level must be nonnegative")
    if n == 0:
        return ThueMorseWord((0,), 0)
    prev = thue_morse(n - 1)
    return ThueMorseWord(tuple(prev) + prev.complement(), n)


def tau(i: int) -> int:
    """i-th Thue-Morse digit (tau_0 = 0): parity of the binary digit sum."""
    return bin(i).count("1") & 1


def tau_prefix(length: int, start: int = 0) -> tuple:
    return tuple(tau(i) for i in range(start, start + length))


def kappa(n: int) -> tuple:
    """Digits of the map block kappa^n = (T_{tau_0}, ..., T_{tau_{2^n - 1}})."""
    if n < 1:
        raise DomainError("kappa^n needs n >= 1")
    return tuple(thue_morse(n))


def kappa_bar(n: int) -> tuple:
    return thue_morse(n).complement()


def upsilon(n: int) -> tuple:
    """Period of upsilon^n: (tau_1, ..., tau_{2^n - 1}, 0)."""
    if n < 1:
        raise DomainError("upsilon^n needs n >= 1")
    return tuple(thue_morse(n)[1:]) + (0,)


# --- quasi-greedy expansions and lexicographic tests --------------------------------

def lex_compare(a, b) -> int:
    """Lexicographic comparison on the common prefix of a and b."""
    for x, y in zip(a, b):
        if x != y:
            return -1 if x < y else 1
    return 0


def satisfies_lexbound(seq) -> bool:
    """(a_{n+i}) <= (a_i) whenever a_n = 0, checked on every shift inside the prefix."""
    seq = tuple(seq)
    for n, d in enumerate(seq, 1):
        if d == 0 and lex_compare(seq[n:], seq) > 0:
            return False
    return True


def lex_admissible_prefix(word, alpha) -> bool:
    """Necessary condition for word to begin an element of the unique-expansion attractor.

    Every tail must be weakly between bar(alpha) and alpha on the overlap;
    alpha has to be at least as long as word.
    """
    word, alpha = tuple(word), tuple(alpha)
    if len(alpha) < len(word):
        raise DomainError("alpha prefix shorter than the word")
    bar = tuple(1 - d for d in alpha)
    for n in range(len(word)):
        t = word[n:]
        if lex_compare(t, alpha) > 0 or lex_compare(t, bar) < 0:
            return False
    return True


def is_unique_periodic(period, alpha) -> bool:
    """Lexicographic criterion bar(alpha) < sigma^n(u^inf) < alpha for every shift.

    Strict inequalities are decided on len(alpha) digits; agreement along the
    whole prefix counts as failure.
    """
    u = tuple(period)
    alpha = tuple(alpha)
    bar = tuple(1 - d for d in alpha)
    N = len(alpha)
    reps = N // len(u) + 2
    long = u * reps
    for n in range(len(u)):
        s = long[n:n + N]
        if lex_compare(s, alpha) >= 0 or lex_compare(s, bar) <= 0:
            return False
    return True


class QuasiGreedyExpansion:
    """Lazily produced quasi-greedy expansion alpha(beta) of 1.

    Emits 1 exactly when beta*r - 1 > 0 for the current remainder r, so an
    exact hit of 0 is replaced by a 0 digit and the expansion restarts from 1:
    the expansion never ends in zeros.
    """

    def __init__(self, beta: BetaValue):
        self.beta = beta
        self.digits: list[int] = []
        if beta.is_exact:
            from .orbit import Locator, Orbit

            self._orbit = Orbit(beta, QPoint.rational(beta, 1), horizon=256)
            self._loc = Locator([QPoint(beta, (1,), (0, 1))])
        else:
            self._prec = 256
            self._restart()

    def _restart(self):
        self._r = RInterval.exact(1, self._prec)
        self._b = self.beta.enclose(self._prec)
        self._done = 0

    def _next_exact(self) -> int:
        from .orbit import locate

        o = self._orbit
        if o.length % 256 == 0:
            o.reserve(max(512, o.length))
        idx = locate(o, self._loc)
        d = 1 if (idx == 0 and self._loc.tie is None) else 0
        o.apply((d,))
        return d

    def _next_enclosed(self) -> int:
        # series-defined base: iterate remainders with intervals, replaying on overlap
        while True:
            while self._done < len(self.digits):
                self._r = self._b * self._r - self.digits[self._done]
                self._done += 1
            s = self._b * self._r - 1
            if s.lo > 0:
                return 1
            if s.hi < 0:
                return 0
            if self._prec > self.beta.cap:
                raise BoundaryUndecidable("quasi-greedy digit cannot be decided")
            self._prec *= 2
            self._restart()

    def take(self, n: int) -> tuple:
        while len(self.digits) < n:
            d = self._next_exact() if self.beta.is_exact else self._next_enclosed()
            self.digits.append(d)
        return tuple(self.digits[:n])


_QG: dict[int, tuple] = {}


def quasi_greedy(beta: BetaValue, length: int) -> tuple:
    """Prefix of length ``length`` of the quasi-greedy expansion of 1 in base beta."""
    if length < 0:
        raise DomainError("length must be nonnegative")
    hit = _QG.get(id(beta))
    if hit is None or hit[0] is not beta:
        hit = (beta, QuasiGreedyExpansion(beta))
        _QG[id(beta)] = hit
    return hit[1].take(length)


# --- special bases ------------------------------------------------------------------

def _tm_series(b: Fraction, prec: int) -> RInterval:
    """Enclosure of sum_{i>=1} tau_i b^-i - 1 (decreasing in b)."""
    x = RInterval.exact(b, prec + 16)
    r = x.reciprocal()
    # terms needed so that the tail b^-N / (b - 1) is below 2^-prec
    N = int((prec + 8) / math.log2(float(b))) + 8
    acc = RInterval(0, prec=prec + 16)
    p = RInterval(1, prec=prec + 16)
    for i in range(1, N + 1):
        p = p * r
        if tau(i):
            acc = acc + p
    t = geometric_tail(x, N)
    return RInterval((acc - 1).lo, (acc - 1 + t).hi, prec + 16)


@lru_cache(maxsize=None)
def komornik_loreti() -> BetaValue:
    """The root of 1 = sum_{i>=1} tau_i beta^-i, approximately 1.787."""
    return BetaValue.from_series(_tm_series, Fraction(1787, 1000), Fraction(1788, 1000), label="kl")


def tm_residual(beta_enc: RInterval, terms: int = 200) -> tuple[RInterval, RInterval]:
    """(1 - sum_{i<=terms} tau_i beta^-i, tail bound) evaluated on an enclosure."""
    r = beta_enc.reciprocal()
    acc = RInterval(0, prec=beta_enc.prec)
    p = RInterval(1, prec=beta_enc.prec)
    for i in range(1, terms + 1):
        p = p * r
        if tau(i):
            acc = acc + p
    return 1 - acc, geometric_tail(beta_enc, terms)


def rung_polynomial(m: int) -> tuple:
    """x^L - sum_i upsilon_i x^{L-i} - 1 with L = 2^m: its root in (1, 2) is the rung."""
    u = upsilon(m)
    L = len(u)
    coeffs = [0] * (L + 1)
    coeffs[L] = 1
    coeffs[0] = -1
    for i, d in enumerate(u, 1):
        if d:
            coeffs[L - i] -= 1
    return tuple(coeffs)


@lru_cache(maxsize=None)
def ladder_rung(m: int) -> BetaValue:
    """The base beta_m with alpha(beta_m) = upsilon^m; beta_1 is the golden ratio."""
    if m < 1:
        raise DomainError("ladder rungs start at m = 1")
    return BetaValue.from_polynomial(rung_polynomial(m), 1, 2, label=f"ladder:{m}")


@dataclass
class BaseLadder:
    rungs: list

    def __len__(self):
        return len(self.rungs)

    def __getitem__(self, m: int) -> BetaValue:
        # rungs are numbered from 1
        return self.rungs[m - 1]

    def to_json(self, digits: int = 15) -> list:
        out = []
        for m, b in enumerate(self.rungs, 1):
            lo, hi = b.enclose(64).to_strings(digits)
            out.append({"m": m, "polynomial": P.to_string(rung_polynomial(m)), "lo": lo, "hi": hi})
        return out


def base_ladder(M: int) -> BaseLadder:
    if M < 1:
        raise DomainError("ladder needs at least one rung")
    rungs = [ladder_rung(m) for m in range(1, M + 1)]
    for a, b in zip(rungs, rungs[1:]):
        if a.compare(b) >= 0:
            raise DomainError("ladder rungs are not increasing")
    return BaseLadder(rungs)


@lru_cache(maxsize=None)
def multinacci_polynomial(n: int) -> tuple:
    return tuple([-1] * (n + 1) + [1])


@lru_cache(maxsize=None)
def multinacci(n: int) -> BetaValue:
    """Root in (1, 2) of x^{n+1} = x^n + ... + x + 1; alpha = (1^n 0)^inf."""
    if n < 1:
        raise DomainError("multinacci index must be at least 1")
    return BetaValue.from_polynomial(multinacci_polynomial(n), 1, 2, label=f"multinacci:{n}")


# --- marked points and the rung of a base ---------------------------------------------

def marked_points(beta: BetaValue, k: int) -> tuple[list, list]:
    """([pi((tau^i)^inf)], [pi((bar tau^i)^inf)]) for i = 1..k."""
    lows = [periodic_point(beta, thue_morse(i)) for i in range(1, k + 1)]
    highs = [periodic_point(beta, thue_morse(i).complement()) for i in range(1, k + 1)]
    return lows, highs


@dataclass
class Rung:
    m: int
    lower: BetaValue
    upper: BetaValue
    switches: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"m": self.m, "lower": self.lower.describe(), "upper": self.upper.describe(),
                "switches": dict(self.switches)}


def switch_report(beta: BetaValue, m: int) -> dict:
    """Check the ordering of marked points against 1/beta and 1/(beta(beta-1))."""
    a, b = marked_points(beta, m + 1)
    inv = QPoint(beta, (1,), (0, 1))
    inv2 = QPoint(beta, (1,), (0, -1, 1))
    chain_a = all(a[i] < a[i + 1] for i in range(m - 1))
    chain_b = all(b[i + 1] < b[i] for i in range(m - 1))
    return {
        "switch1": bool(chain_a and a[m - 1] <= inv and inv < a[m]),
        "switch2": bool(chain_b and b[m] < inv2 and inv2 <= b[m - 1]),
        "switch3": bool(a[m] < b[m]),
    }


def locate_rung(beta: BetaValue, max_rungs: int = 10) -> Rung:
    """The m with beta_m <= beta < beta_{m+1}, with the switch inequalities certified."""
    if beta.compare(golden_ratio()) < 0:
        raise DomainError("base is below the golden ratio")
    for m in range(1, max_rungs + 1):
        upper = ladder_rung(m + 1)
        if beta.compare(upper) < 0:
            rep = switch_report(beta, m)
            if not all(rep.values()):
                raise DomainError(f"switch inequalities fail at rung {m}: {rep}")
            return Rung(m, ladder_rung(m), upper, rep)
    try:
        above = beta.compare(komornik_loreti()) >= 0
    except BoundaryUndecidable:
        above = False
    if above:
        raise DomainError("base is not below the Komornik-Loreti constant")
    raise LadderExhausted(f"{max_rungs} rungs do not reach the base")


def run_bound(beta: BetaValue, m: int) -> int:
    """Least k with beta^k (beta * pi((tau^{m+1})^inf) - 1) >= lower end of O."""
    from .expansion import canonical_intervals

    a, _ = marked_points(beta, m + 1)
    y = a[m].apply_map(1)
    if y.sign() <= 0:
        raise DomainError("marked point is not above 1/beta")
    lo = canonical_intervals(beta).O.lo
    k = 0
    while y < lo:
        y = y.mul_beta()
        k += 1
    return k


@dataclass
class IdentityCheck:
    name: str
    image: RInterval
    target: RInterval
    contained: bool
    exact: bool | None

    def to_json(self) -> dict:
        return {"name": self.name, "image": list(self.image.to_strings(20)),
                "target": list(self.target.to_strings(20)), "contained": self.contained,
                "exact": self.exact}


def kappa_identities_check(n: int, beta: BetaValue, prec: int | None = None) -> list:
    """Fix and flip identities of kappa^n and its complement, in interval arithmetic.

    kappa^n fixes pi((tau^n)^inf) and sends pi((tau^{n+1})^inf) to
    pi((bar tau^{n+1})^inf); the complement block does the mirrored thing.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if prec is None:
        prec = 128 + (1 << n)
    a, b = marked_points(beta, n + 1)
    k, kb = kappa(n), kappa_bar(n)
    cases = [
        ("fix", k, a[n - 1], a[n - 1]),
        ("fix_bar", kb, b[n - 1], b[n - 1]),
        ("flip", k, a[n], b[n]),
        ("flip_bar", kb, b[n], a[n]),
    ]
    be = beta.enclose(prec)
    out = []
    for name, word, src, dst in cases:
        y = src.enclose(prec)
        for d in word:
            y = be * y - d
        t = dst.enclose(prec + 64)
        exact = (src.apply_word(word) == dst) if beta.is_exact else None
        out.append(IdentityCheck(name, y, t, bool(y.lo <= t.lo and t.hi <= y.hi), exact))
    return out


# --- the exceptional-set dimension bound -------------------------------------------------

def heavy_words(n: int):
    """Words of length n with more ones than zeros, other than 1^n."""
    for w in itertools.product((0, 1), repeat=n):
        ones = sum(w)
        if ones > n - ones and ones < n:
            yield w


def count_heavy_words(n: int) -> int:
    """#W_n from binomial sums; 2^{2k} - 1 when n = 2k + 1."""
    if n < 1:
        raise DomainError("word length must be positive")
    return sum(math.comb(n, j) for j in range(n // 2 + 1, n + 1)) - 1


@dataclass
class DimensionBound:
    k: int
    count: int
    bound: RInterval
    threshold: BetaValue

    def to_json(self, digits: int = 17) -> dict:
        lo, hi = self.bound.to_strings(digits)
        return {"k": self.k, "count": self.count, "bound": [lo, hi],
                "threshold": self.threshold.describe()}


def dim_lower_bound(k: int, beta: BetaValue, prec: int = 128) -> DimensionBound:
    """Enclosure of log(2^{2k} - 1) / ((2k + 1) log beta).

    Valid above the multinacci base of index 2(2k + 1); beta = 2 is accepted
    as the limiting case.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    thr = multinacci(2 * (2 * k + 1))
    if beta.compare(thr) <= 0:
        raise DomainError(f"base must exceed the multinacci base of index {2 * (2 * k + 1)}")
    count = (1 << (2 * k)) - 1
    num = RInterval.exact(count, prec).log()
    den = beta.enclose(prec).log() * (2 * k + 1)
    return DimensionBound(k, count, num / den, thr)
