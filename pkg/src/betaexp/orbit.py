"""Certified orbits of a point under the digit maps, in fixed point.

The state is the vector v_i = y * beta^i (0 <= i < deg), stored as midpoint
and radius integers scaled by 2^-P.  Multiplication by beta acts on this
vector through the companion matrix of the defining polynomial, which has
small integer entries, so applying a word costs a handful of linear-time
big-integer operations.  As the radius grows the low bits carry no
information and are dropped; when the precision runs out the orbit is
recomputed from the starting point at a higher precision and the applied
digits are replayed.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction

from .errors import BoundaryUndecidable, DomainError
from .numerics import poly as P
from .numerics.beta import BetaValue
from .numerics.exact import QPoint
from .numerics.interval import RInterval

STREAM_CAP_BITS = 1 << 23
_TRIM_AT = 80  # radius bits that trigger dropping low bits
_KEEP = 24  # radius bits kept after a trim
_GUARD = 32


class FixedInput:
    """Adapter giving an arbitrary starting value a ``fixed(bits)`` method."""

    def __init__(self, value):
        self.value = value

    def fixed(self, bits):
        v = self.value
        if isinstance(v, RInterval):
            return v.fixed(bits)
        return v.fixed(bits)


def as_point(x, beta: BetaValue):
    """Exact QPoint for exact inputs, RInterval passed through."""
    if isinstance(x, QPoint):
        return x
    if isinstance(x, RInterval):
        return x
    if isinstance(x, str):
        try:
            x = Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a number: {x!r}") from exc
    if isinstance(x, float):
        x = Fraction(x)
    if isinstance(x, (int, Fraction)):
        return QPoint.rational(beta, x)
    if hasattr(x, "fixed"):
        return x
    raise DomainError(f"cannot use {x!r} as a point")


class _Engine:
    """Per-base constants shared by every orbit with that base."""

    _cache: dict[int, "_Engine"] = {}

    @classmethod
    def for_beta(cls, beta: BetaValue) -> "_Engine":
        eng = cls._cache.get(id(beta))
        if eng is None or eng.beta is not beta:
            eng = cls(beta)
            cls._cache[id(beta)] = eng
        return eng

    def __init__(self, beta: BetaValue):
        if beta.poly is None or not beta.is_exact:
            raise DomainError(f"orbits need an algebraic base, got {beta.label}")
        self.beta = beta
        p = [int(c) for c in P.primitive(beta.poly)]
        self.poly = p
        self.deg = len(p) - 1
        self.lead = p[-1]
        self.rational = beta.rational
        d = self.deg
        # integer companion numerator: C = N1 / lead
        n1 = [[0] * d for _ in range(d)]
        for i in range(d - 1):
            n1[i][i + 1] = self.lead
        for j in range(d):
            n1[d - 1][j] = -p[j]
        self._pow = {0: ([[int(i == j) * 1 for j in range(d)] for i in range(d)], 1)}
        self._pow[1] = (n1, self.lead)
        self.growth_bits = self._growth_bits(n1)
        self._reduced: dict[int, tuple] = {}
        self._words: dict[tuple, list] = {}

    def _growth_bits(self, n1) -> float:
        """log2 of the spectral radius of |C|, a bound on radius growth per digit."""
        d = self.deg
        a = [[abs(x) / self.lead for x in row] for row in n1]
        v = [1.0] * d
        rho = 1.0
        for _ in range(200):
            w = [sum(a[i][j] * v[j] for j in range(d)) for i in range(d)]
            m = max(w)
            rho, v = m, [x / m for x in w]
        return math.log2(max(rho, 1.0)) * 1.01 + 1e-3

    def power(self, k: int):
        hit = self._pow.get(k)
        if hit is None:
            a, da = self.power(k // 2)
            b, db = self.power(k - k // 2)
            d = self.deg
            m = [[sum(a[i][t] * b[t][j] for t in range(d)) for j in range(d)] for i in range(d)]
            hit = (m, da * db)
            self._pow[k] = hit
        return hit

    def abs_power(self, k: int):
        m, D = self.power(k)
        return [[abs(x) for x in row] for row in m], D

    def word_coefficients(self, word) -> list:
        """For each i < deg: integer numerators and a denominator of c_w * beta^i in the power basis."""
        hit = self._words.get(word)
        if hit is None:
            d, k = self.deg, len(word)
            hit = []
            for i in range(d):
                coeffs = [Fraction(0)] * d
                for j, e in enumerate(word, 1):
                    if e:
                        red = self.reduced_power(k - j + i)
                        for t in range(d):
                            coeffs[t] += e * red[t]
                den = math.lcm(*(c.denominator for c in coeffs))
                hit.append((tuple(int(c * den) for c in coeffs), den))
            if len(self._words) < 4096:
                self._words[word] = hit
        return hit

    def reduced_power(self, m: int):
        """beta^m as rational coefficients in the basis 1, beta, ..., beta^(d-1)."""
        hit = self._reduced.get(m)
        if hit is None:
            r = P.rem(P.shift((1,), m), tuple(self.poly)) if m >= self.deg else P.shift((1,), m)
            hit = tuple(Fraction(r[i]) if i < len(r) else Fraction(0) for i in range(self.deg))
            self._reduced[m] = hit
        return hit


class Orbit:
    """Forward orbit of x under words of digit maps, with certified enclosures."""

    def __init__(self, beta: BetaValue, x, horizon: int = 64, cap_bits: int = STREAM_CAP_BITS):
        self.beta = beta
        self.x = as_point(x, beta)
        self.eng = _Engine.for_beta(beta)
        self.cap_bits = cap_bits
        self.history: list[tuple] = []
        self.length = 0
        self.restarts = 0
        self._setup(self._bits_for(horizon))

    # setup and replay ---------------------------------------------------
    def _bits_for(self, digits: int) -> int:
        return 96 + _GUARD + int(digits * self.eng.growth_bits) + 8 * self.eng.deg

    def _setup(self, bits: int):
        if bits > self.cap_bits:
            raise BoundaryUndecidable(
                f"orbit needs {bits} bits, above the cap of {self.cap_bits}")
        # the orbit's own cap governs how far beta may be refined here
        old = self.beta.cap
        self.beta.cap = max(old, 2 * bits + 256)
        try:
            self._setup_at(bits)
        finally:
            self.beta.cap = old

    def _setup_at(self, bits: int):
        eng = self.eng
        self.P0 = bits
        self.P = bits
        self._kcache: dict[tuple, tuple] = {}
        xl, xh = self.x.fixed(bits + _GUARD)
        d = eng.deg
        if eng.rational is not None:
            a, b = eng.rational.numerator, eng.rational.denominator
            mids, rads = [], []
            lo, hi = xl, xh
            for i in range(d):
                mids.append((lo + hi) // 2)
                rads.append((hi - lo) // 2 + 1)
            self.M = [m >> _GUARD for m in mids]
            self.R = [(r >> _GUARD) + 2 for r in rads]
            self.Bfix = None
        else:
            # constants beta^i at the working precision
            self.Bfix = []
            for i in range(d):
                if i == 0:
                    self.Bfix.append((1 << (bits + _GUARD), 1 << (bits + _GUARD)))
                else:
                    enc = self.beta.enclose(bits + _GUARD + 16) ** i
                    self.Bfix.append(enc.fixed(bits + _GUARD))
            self.M, self.R = [], []
            g = bits + _GUARD
            for i in range(d):
                bl, bh = self.Bfix[i]
                cands = (xl * bl, xl * bh, xh * bl, xh * bh)
                lo, hi = min(cands) >> g, -((-max(cands)) >> g)
                self.M.append(((lo + hi) // 2) >> _GUARD)
                self.R.append((((hi - lo) // 2 + 1) >> _GUARD) + 2)
            self.Bfix = [(bl >> _GUARD, -((-bh) >> _GUARD)) for bl, bh in self.Bfix]
        self._bfix_p = bits

    def refine(self):
        """Recompute from the starting point with more precision, then replay."""
        self.restarts += 1
        hist = self.history
        new_bits = max(2 * self.P0, self.P0 + 256)
        self.history = []
        self.length = 0
        self._setup(new_bits)
        for w in hist:
            self._apply(w)
            self.history.append(w)
            self.length += len(w)

    def reserve(self, more_digits: int):
        """Make sure roughly ``more_digits`` further digits can be followed."""
        need = int(more_digits * self.eng.growth_bits) + 96
        if self.P - self.R_bits() < need:
            target = self._bits_for(self.length + more_digits)
            if target > self.P0:
                hist = self.history
                self.history, self.length = [], 0
                self._setup(target)
                for w in hist:
                    self._apply(w)
                    self.history.append(w)
                    self.length += len(w)

    def R_bits(self) -> int:
        return max(r.bit_length() for r in self.R)

    # dynamics -----------------------------------------------------------
    def apply(self, word):
        word = tuple(word)
        if not word:
            return
        self._apply(word)
        self.history.append(word)
        self.length += len(word)

    def _apply(self, word):
        eng = self.eng
        k = len(word)
        if eng.rational is not None:
            a, b = eng.rational.numerator, eng.rational.denominator
            ak, bk = a ** k, b ** k
            c = 0
            for j, e in enumerate(word, 1):
                if e:
                    c += e * a ** (k - j) * b ** j
            m = self.M[0] * ak - (c << self.P)
            self.M[0] = m // bk
            self.R[0] = -((-self.R[0] * ak) // bk) + 1
        else:
            n, D = eng.power(k)
            na, _ = self._abs(k)
            K, Kr = self._const(word)
            d = eng.deg
            M, R = self.M, self.R
            newM, newR = [], []
            for i in range(d):
                row, arow = n[i], na[i]
                s = 0
                r = 0
                for j in range(d):
                    c = row[j]
                    if c:
                        s += c * M[j]
                        r += arow[j] * R[j]
                if D != 1:
                    s //= D
                    r = -((-r) // D) + 1
                newM.append(s - K[i])
                newR.append(r + Kr[i])
            self.M, self.R = newM, newR
        if self.R_bits() > _TRIM_AT:
            self._trim()

    def _abs(self, k):
        key = ("abs", k)
        hit = self._kcache.get(key)
        if hit is None:
            hit = self.eng.abs_power(k)
            self._kcache[key] = hit
        return hit

    def _trim(self):
        s = self.R_bits() - _KEEP
        if s <= 0 or self.P - s < 0:
            return
        self.M = [m >> s for m in self.M]
        self.R = [(r >> s) + 2 for r in self.R]
        self.P -= s
        self._kcache = {}

    def _basis(self):
        """Fixed-point enclosures of beta^i at the current precision."""
        sh = self._bfix_p - self.P
        if sh == 0:
            return self.Bfix
        return [(bl >> sh, -((-bh) >> sh)) for bl, bh in self.Bfix]

    def _const(self, word):
        """Midpoints and radii of c_w * beta^i * 2^P with c_w = sum_j e_j beta^(k-j)."""
        hit = self._kcache.get(word)
        if hit is not None:
            return hit
        basis = self._basis()
        K, Kr = [], []
        for nums, den in self.eng.word_coefficients(word):
            lo = hi = 0
            for t, num in enumerate(nums):
                if num:
                    bl, bh = basis[t]
                    if num > 0:
                        lo += num * bl
                        hi += num * bh
                    else:
                        lo += num * bh
                        hi += num * bl
            lo, hi = lo // den, -((-hi) // den)
            K.append((lo + hi) // 2)
            Kr.append((hi - lo) // 2 + 1)
        self._kcache[word] = (K, Kr)
        return K, Kr

    # queries ------------------------------------------------------------
    def fixed(self, bits: int) -> tuple[int, int]:
        """(lo, hi) with lo / 2^bits <= y <= hi / 2^bits."""
        m, r, p = self.M[0], self.R[0], self.P
        lo, hi = m - r, m + r
        if p >= bits:
            s = p - bits
            return lo >> s, -((-hi) >> s)
        s = bits - p
        return lo << s, hi << s

    def enclosure(self, prec: int = 128) -> RInterval:
        m, r = self.M[0], self.R[0]
        return RInterval.from_fixed(m - r, m + r, self.P, prec)

    def width_bits(self) -> int:
        """Number of fractional bits of the current enclosure that are reliable."""
        return self.P - self.R[0].bit_length() - 1

    def fork(self) -> "Orbit":
        other = object.__new__(Orbit)
        other.__dict__.update(self.__dict__)
        other.M = list(self.M)
        other.R = list(self.R)
        other.history = list(self.history)
        other._kcache = dict(self._kcache)
        return other

    def digits(self) -> list[int]:
        return [d for w in self.history for d in w]


class Locator:
    """Sorted exact boundaries, compared against orbit enclosures in fixed point.

    ``find`` returns i when the orbit point certainly lies in
    [b_i, b_{i+1}] (i = -1 below the first boundary, len-1 above the last),
    or None when the enclosure straddles a boundary.
    """

    def __init__(self, points, bits: int = 192):
        self.points = list(points)
        self.tie = None
        self.bits = 0
        self._set_bits(bits)

    def _set_bits(self, bits: int):
        self.bits = bits
        fx = [p.fixed(bits) for p in self.points]
        self.lo = [a for a, _ in fx]
        self.hi = [b for _, b in fx]

    def refine(self):
        self._set_bits(self.bits * 2)

    def find_fixed(self, yl: int, yh: int):
        i = bisect_right(self.hi, yl) - 1  # last boundary certainly below yl
        # cell i spans [b_i, b_{i+1}]; need yh <= lo of the next boundary
        nxt = i + 1
        if nxt < len(self.lo) and yh > self.lo[nxt]:
            return None
        if i >= 0 and self.hi[i] > yl:
            return None
        return i

    def find(self, orbit: Orbit):
        yl, yh = orbit.fixed(self.bits)
        return self.find_fixed(yl, yh)

    def find_exact(self, y: QPoint) -> int:
        lo, hi = 0, len(self.points)
        while lo < hi:
            mid = (lo + hi) // 2
            c = y.cmp(self.points[mid])
            if c == 0:
                self.tie = mid
                return max(mid - 1, 0)
            if c < 0:
                hi = mid
            else:
                lo = mid + 1
        return lo - 1


def locate(orbit: Orbit, locator: Locator, max_rounds: int = 40) -> int:
    """Cell index of the orbit point, refining the orbit or the boundaries as needed.

    A point exactly on boundary j (only possible for exact starting points)
    is assigned to the cell on its left, j - 1, or to cell 0 when j = 0;
    ``locator.tie`` records j, and is None otherwise.
    """
    locator.tie = None
    for r in range(max_rounds):
        idx = locator.find(orbit)
        if idx is not None:
            return idx
        if r >= 1 and isinstance(orbit.x, QPoint):
            return locator.find_exact(orbit.x.apply_word(orbit.digits()))
        if orbit.width_bits() < locator.bits - 16:
            orbit.refine()
        elif isinstance(orbit.x, QPoint):
            # likely an exact tie; sharper boundaries would not separate it
            return locator.find_exact(orbit.x.apply_word(orbit.digits()))
        else:
            if locator.bits > orbit.cap_bits:
                break
            locator.refine()
    raise BoundaryUndecidable("orbit point cannot be separated from a boundary")


def compare_point(orbit: Orbit, c: QPoint, locator: Locator | None = None) -> int:
    """Certified sign of y - c; 0 only for an exact point sitting on c."""
    loc = locator or Locator([c])
    idx = locate(orbit, loc)
    if loc.tie is not None:
        return 0
    return -1 if idx < 0 else 1
