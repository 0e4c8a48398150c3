"""Digit alphabets, the canonical intervals of a base, and word projections.

For a base beta and the alphabet {L, 1} (L = 0 or -1) the maps are
T_d(x) = beta*x - d.  The attractor is I = [L/(beta-1), 1/(beta-1)]; the
switch region S is where both maps keep a point in I; O is the interval
spanned by the two period-2 points.  calI and calJ are auxiliary intervals
used to bound the words built by the synthesis algorithm.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .numerics.beta import BetaValue
from .numerics.exact import QPoint, finite_value
from .numerics.interval import RInterval


class Alphabet(enum.Enum):
    ZERO_ONE = "01"
    PLUS_MINUS = "pm"

    @property
    def low(self) -> int:
        return 0 if self is Alphabet.ZERO_ONE else -1

    @property
    def digits(self) -> tuple[int, int]:
        return (self.low, 1)

    def char(self, d: int) -> str:
        if self is Alphabet.ZERO_ONE:
            return "1" if d == 1 else "0"
        return "+" if d == 1 else "-"

    def parse_digit(self, c: str) -> int:
        table = {"0": 0, "1": 1} if self is Alphabet.ZERO_ONE else {"+": 1, "-": -1, "1": 1, "-1": -1}
        try:
            return table[c]
        except KeyError:
            raise DomainError(f"digit {c!r} is not in alphabet {self.value}") from None

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        t = text.strip().lower()
        if t in ("01", "zero_one", "zeroone", "0,1"):
            return cls.ZERO_ONE
        if t in ("pm", "plus_minus", "plusminus", "-1,1", "+-", "+/-"):
            return cls.PLUS_MINUS
        raise DomainError(f"unknown alphabet {text!r}")


class Direction(enum.Enum):
    """Which digit a synthesized word is heavy in."""

    LOW_HEAVY = "omega0"  # more copies of the low digit (0 or -1)
    ONE_HEAVY = "omega1"

    @property
    def other(self) -> "Direction":
        return Direction.ONE_HEAVY if self is Direction.LOW_HEAVY else Direction.LOW_HEAVY


@dataclass(frozen=True)
class Span:
    lo: QPoint
    hi: QPoint

    def enclose(self, prec: int = 128) -> RInterval:
        return RInterval(self.lo.enclose(prec).lo, self.hi.enclose(prec).hi, prec)

    def contains(self, x: QPoint) -> bool:
        return self.lo <= x <= self.hi

    def __iter__(self):
        return iter((self.lo, self.hi))


@dataclass(frozen=True)
class CanonicalIntervals:
    beta: BetaValue
    alphabet: Alphabet
    I: Span
    S: Span
    O: Span
    calI: Span
    calJ: Span

    @property
    def fixed_point_sum(self) -> QPoint:
        """(1 + L)/(beta - 1): the sum of the two endpoints of I."""
        return self.I.lo + self.I.hi


def canonical_intervals(beta: BetaValue, alphabet: Alphabet = Alphabet.ZERO_ONE) -> CanonicalIntervals:
    L = alphabet.low
    bm1 = (-1, 1)  # beta - 1
    b2m1 = (-1, 0, 1)  # beta^2 - 1
    bb1 = (0, -1, 1)  # beta(beta - 1)
    I = Span(QPoint(beta, (L,), bm1), QPoint(beta, (1,), bm1))
    S = Span(QPoint(beta, (L - 1, 1), bb1), QPoint(beta, (1 - L, L), bb1))
    O = Span(QPoint(beta, (1, L), b2m1), QPoint(beta, (L, 1), b2m1))
    calI = Span((S.lo + O.lo) * Fraction(1, 2), (O.hi + S.hi) * Fraction(1, 2))
    calJ = Span(calI.lo.apply_map(1), calI.hi.apply_map(L))
    return CanonicalIntervals(beta, alphabet, I, S, O, calI, calJ)


def conjugate(x, beta: BetaValue):
    """The affine map h(x) = 2x - 1/(beta-1) taking the {0,1} picture to the {-1,1} one."""
    if isinstance(x, QPoint):
        return x * 2 - QPoint(beta, (1,), (-1, 1))
    return x * 2 - 1 / (beta.enclose(x.prec) - 1)


def apply_map(d: int, x, beta: BetaValue):
    """T_d(x) = beta*x - d for a QPoint or an RInterval."""
    if isinstance(x, QPoint):
        return x.apply_map(d)
    return beta.enclose(x.prec) * x - d


def apply_word(word, x, beta: BetaValue):
    for d in word:
        x = apply_map(d, x, beta)
    return x


def project(word, beta: BetaValue, prec: int = 128) -> RInterval:
    """Enclosure of sum_i w_i beta^-i for a finite word."""
    if not word:
        return RInterval(0, prec=prec)
    return finite_value(beta, tuple(word)).enclose(prec)


def project_exact(word, beta: BetaValue) -> QPoint:
    return finite_value(beta, tuple(word))


def project_affine(word, beta2, beta3, prec: int = 128) -> RInterval:
    """Enclosure of sum_i w_i / (beta2^{#-1 in w_1..w_i} * beta3^{#1 in w_1..w_i})."""
    r2 = _recip(beta2, prec)
    r3 = _recip(beta3, prec)
    total = RInterval(0, prec=prec)
    scale = RInterval(1, prec=prec)
    for d in word:
        if d == -1:
            scale = scale * r2
            total = total - scale
        elif d == 1:
            scale = scale * r3
            total = total + scale
        else:
            raise DomainError("affine projection is defined for the {-1, 1} alphabet")
    return total


def _recip(b, prec):
    if isinstance(b, BetaValue):
        return b.enclose(prec + 8).reciprocal()
    if isinstance(b, RInterval):
        return b.reciprocal()
    return RInterval.exact(b, prec + 8).reciprocal()


def imbalance(word, alphabet: Alphabet = Alphabet.ZERO_ONE) -> int:
    """Number of low digits minus number of ones."""
    low = sum(1 for d in word if d == alphabet.low)
    return low - (len(word) - low)


def word_string(word, alphabet: Alphabet) -> str:
    return "".join(alphabet.char(d) for d in word)


def check_word(word, alphabet: Alphabet):
    allowed = set(alphabet.digits)
    for d in word:
        if d not in allowed:
            raise DomainError(f"digit {d} is not in alphabet {alphabet.value}")
    return tuple(word)


class MapWord:
    """A finite word of digit maps T_d with running digit counts."""

    __slots__ = ("alphabet", "maps", "_counts")

    def __init__(self, alphabet: Alphabet, maps=()):
        self.alphabet = alphabet
        self.maps: list[int] = []
        self._counts = {d: 0 for d in alphabet.digits}
        self.extend(maps)

    def append(self, d: int):
        if d not in self._counts:
            raise DomainError(f"map T_{d} is not in alphabet {self.alphabet.value}")
        self.maps.append(d)
        self._counts[d] += 1

    def extend(self, word):
        for d in word:
            self.append(d)

    def count(self, d: int) -> int:
        return self._counts.get(d, 0)

    def imbalance(self) -> int:
        return self._counts[self.alphabet.low] - self._counts[1]

    def digits(self) -> tuple:
        """The digit sequence of the word (the bijection from maps to digits)."""
        return tuple(self.maps)

    @classmethod
    def from_digits(cls, alphabet: Alphabet, digits) -> "MapWord":
        return cls(alphabet, digits)

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __eq__(self, other):
        if isinstance(other, MapWord):
            return self.alphabet is other.alphabet and self.maps == other.maps
        return NotImplemented

    def __repr__(self):
        return f"MapWord({word_string(self.maps, self.alphabet)!r})"


def orbit_images(x, word, beta: BetaValue) -> list:
    """x followed by its images under the successive prefixes of word."""
    out = [x]
    for d in word:
        x = apply_map(d, x, beta)
        out.append(x)
    return out


def project_completions(prefix, beta: BetaValue, alphabet: Alphabet = Alphabet.ZERO_ONE,
                        prec: int = 128) -> RInterval:
    """Enclosure of every value sum eps_i beta^-i whose digits start with prefix."""
    from .numerics.interval import geometric_tail

    part = project(prefix, beta, prec)
    tail = geometric_tail(beta.enclose(prec), len(prefix))
    return RInterval(part.lo + alphabet.low * tail.hi, part.hi + tail.hi, prec).with_prec(prec)


def project_affine_completions(prefix, beta2, beta3, prec: int = 128) -> RInterval:
    """project_affine of the prefix widened by the tail bound at min(beta2, beta3)."""
    from .numerics.interval import geometric_tail

    part = project_affine(prefix, beta2, beta3, prec)
    b2, b3 = _enc(beta2, prec), _enc(beta3, prec)
    if b2.lo <= 1 or b3.lo <= 1:
        raise DomainError("affine projection needs bases above 1")
    r = RInterval(min(b2.lo, b3.lo), min(b2.hi, b3.hi), prec)
    t = geometric_tail(r, len(prefix)).hi
    return RInterval(part.lo - t, part.hi + t, prec)


def _enc(b, prec):
    if isinstance(b, BetaValue):
        return b.enclose(prec)
    if isinstance(b, RInterval):
        return b
    return RInterval.exact(b, prec)


def require_open_domain(x, beta: BetaValue, alphabet: Alphabet):
    """DomainError unless x lies strictly inside the expansion domain."""
    ci = canonical_intervals(beta, alphabet)
    if isinstance(x, QPoint):
        if not (ci.I.lo < x < ci.I.hi):
            raise DomainError("x must lie strictly inside the expansion domain")
        return
    e = x.enclosure(128) if hasattr(x, "enclosure") else x
    lo, hi = ci.I.enclose(128)
    if not (e.lo > lo.hi and e.hi < hi.lo):
        raise DomainError("x is not certified strictly inside the expansion domain")


def drive_into_O(orbit, ci: CanonicalIntervals) -> tuple:
    """Apply T_L while below O and T_1 while above, until the orbit point is in O.

    The orbit is advanced in place; returns the applied word.
    """
    from .orbit import Locator, locate

    L = ci.alphabet.low
    loc = Locator([ci.O.lo, ci.O.hi])
    word = []
    while True:
        idx = locate(orbit, loc)
        if idx == 0:
            return tuple(word)
        d = L if idx < 0 else 1
        orbit.apply((d,))
        word.append(d)
        if len(word) > 1_000_000:
            raise DomainError("point does not reach O")


def map_into_O(x, beta: BetaValue, alphabet: Alphabet = Alphabet.ZERO_ONE) -> tuple:
    """Deterministic word of maps taking x (strictly inside the domain) into O."""
    from .orbit import Orbit, as_point

    x = as_point(x, beta)
    require_open_domain(x, beta, alphabet)
    return drive_into_O(Orbit(beta, x), canonical_intervals(beta, alphabet))
