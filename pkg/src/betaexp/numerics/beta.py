"""Bases given by an exact definition and refined on demand.

A base is either a decimal (or fraction) given exactly, a root of an integer
polynomial singled out by a rational isolating interval, or the root of a
decreasing series (used for the Komornik-Loreti constant).  Enclosures are
refined lazily: bisection with exact signs to get started, then fixed-point
Newton steps whose result is re-certified by an exact sign change.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import BoundaryUndecidable, DomainError, RefinementStall
from . import poly as P
from .interval import RInterval

DEFAULT_CAP = 4096


def _int_sign_at(p, m: int, k: int) -> int:
    """Sign of p(m / 2**k), computed exactly with integers."""
    d = len(p) - 1
    acc = int(p[-1])
    for i in range(d - 1, -1, -1):
        acc = acc * m + (int(p[i]) << (k * (d - i)))
    return (acc > 0) - (acc < 0)


def _newton_fixed(p, dp, m: int, k: int, iters: int = 80) -> int:
    """Newton iteration for a root of p near m / 2**k, in k-bit fixed point."""
    one = 1 << k
    for _ in range(iters):
        v = 0
        for a in reversed(p):
            v = ((v * m) >> k) + a * one
        dv = 0
        for a in reversed(dp):
            dv = ((dv * m) >> k) + a * one
        if dv == 0:
            break
        step = (v << k) // dv
        m -= step
        if -2 <= step <= 2:
            break
    return m


class BetaValue:
    """A real base ``1 < beta <= 2`` with an exact definition."""

    def __init__(self, *, rational: Fraction | None = None, poly=None, bracket=None,
                 series=None, label: str = "", cap: int = DEFAULT_CAP):
        self.rational = rational
        self.poly = poly
        self.series = series
        self.label = label
        self.cap = cap
        self._cache: dict[int, RInterval] = {}
        if rational is not None:
            self.poly = P.primitive((-rational, Fraction(1)))
            self._bracket = None
        elif poly is not None:
            lo, hi = bracket
            self._init_poly_bracket(Fraction(lo), Fraction(hi))
        elif series is not None:
            lo, hi = bracket
            self._series_lo, self._series_hi = Fraction(lo), Fraction(hi)
        else:
            raise DomainError("a base needs a definition")
        enc = self.enclose(64)
        if not (enc.lo > 1):
            raise DomainError(f"base {label} is not certified to exceed 1")
        if not (enc.hi <= 2 or self.compare_fraction(Fraction(2)) <= 0):
            raise DomainError(f"base {label} exceeds 2")

    # construction -------------------------------------------------------
    @classmethod
    def from_fraction(cls, q, label: str | None = None) -> "BetaValue":
        q = Fraction(q)
        return cls(rational=q, label=label or f"dec:{q}")

    @classmethod
    def from_decimal(cls, text: str) -> "BetaValue":
        try:
            q = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a decimal: {text!r}") from exc
        return cls(rational=q, label=f"dec:{text.strip()}")

    @classmethod
    def from_polynomial(cls, coeffs, lo, hi, label: str | None = None) -> "BetaValue":
        p = P.norm(coeffs)
        if len(p) < 2:
            raise DomainError("defining polynomial must have positive degree")
        lo, hi = Fraction(lo), Fraction(hi)
        if lo >= hi:
            raise DomainError("isolating interval is empty")
        if lo > 0 and P.sign_changes(p) == 1:
            # one sign change: a single simple positive root already
            p = P.primitive(p)
        else:
            p = P.squarefree(p)
        if len(p) == 2:
            # a linear polynomial is just a rational
            root = Fraction(-p[0], p[1])
            if not lo <= root <= hi:
                raise DomainError("polynomial has no root in the isolating interval")
            return cls(rational=root, label=label or f"poly:{P.to_string(p)}:[{lo},{hi}]")
        label = label or f"poly:{P.to_string(p)}:[{_fr(lo)},{_fr(hi)}]"
        return cls(poly=p, bracket=(lo, hi), label=label)

    @classmethod
    def from_series(cls, series, lo, hi, label: str) -> "BetaValue":
        """Root of a decreasing function given by ``series(b, prec) -> RInterval``."""
        return cls(series=series, bracket=(lo, hi), label=label)

    @classmethod
    def parse(cls, spec: str) -> "BetaValue":
        """Parse ``dec:<decimal>``, ``poly:<poly>:[a,b]``, a bare decimal or ``phi``."""
        s = spec.strip()
        if s.lower() in ("phi", "golden"):
            return golden_ratio()
        if s.startswith("dec:"):
            return cls.from_decimal(s[4:])
        if s.startswith("poly:"):
            m = re.fullmatch(r"poly:(.+):\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\]", s)
            if not m:
                raise DomainError(f"malformed polynomial base {spec!r}")
            coeffs = P.parse(m.group(1))
            return cls.from_polynomial(coeffs, Fraction(m.group(2)), Fraction(m.group(3)))
        return cls.from_decimal(s)

    def _init_poly_bracket(self, lo: Fraction, hi: Fraction):
        p = self.poly
        slo, shi = P.sign_exact(p, lo), P.sign_exact(p, hi)
        if slo == 0 or shi == 0:
            raise DomainError("isolating interval endpoint is a root; give an open bracket")
        descartes = lo > 0 and P.sign_changes(p) == 1
        if not descartes and P.sturm_count(p, lo, hi) != 1:
            raise DomainError("isolating interval must contain exactly one root")
        if slo == shi:
            raise DomainError("isolating interval has no sign change")
        self._exact_lo, self._exact_hi = lo, hi
        self._sign_lo = slo
        a, b = lo, hi
        while True:
            k = max(8, (4 * (b - a).denominator // max((b - a).numerator, 1)).bit_length())
            L = -((-a.numerator << k) // a.denominator)
            H = (b.numerator << k) // b.denominator
            sL, sH = _int_sign_at(p, L, k), _int_sign_at(p, H, k)
            if sL == 0 or sH == 0:
                self._become_rational(Fraction(L if sL == 0 else H, 1 << k))
                return
            if L < H and sL == slo and sH == -slo:
                self._bracket = [L, H, k]
                return
            mid = (a + b) / 2
            sm = P.sign_exact(p, mid)
            if sm == 0:
                self._become_rational(mid)
                return
            if sm == slo:
                a = mid
            else:
                b = mid

    def _become_rational(self, q: Fraction):
        self.rational = q
        self.poly = P.primitive((-q, Fraction(1)))
        self._bracket = None

    # refinement ---------------------------------------------------------
    def _bisect(self, steps: int):
        L, H, k = self._bracket
        p, s = self.poly, self._sign_lo
        for _ in range(steps):
            L, H, k = 2 * L, 2 * H, k + 1
            m = (L + H) // 2
            sm = _int_sign_at(p, m, k)
            if sm == 0:
                self._become_rational(Fraction(m, 1 << k))
                return
            if sm == s:
                L = m
            else:
                H = m
        self._bracket = [L, H, k]

    def _refine_poly(self, bits: int):
        if bits > self.cap:
            raise RefinementStall(f"base {self.label}: {bits} bits exceeds cap {self.cap}")
        p = self.poly
        dp = P.derivative(p)
        while True:
            L, H, k = self._bracket
            width_bits = k - (H - L).bit_length()
            if width_bits >= bits:
                return
            if width_bits < 48:
                self._bisect(16)
                if self.rational is not None:
                    return
                continue
            target = min(2 * width_bits - 8, bits + 16)
            shift = target - k
            m = ((L + H) << shift) // 2 if shift >= 0 else (L + H) >> (1 - shift)
            m = _newton_fixed(p, dp, m, target)
            lo_c, hi_c = m - 8, m + 8
            ok = (
                _int_sign_at(p, lo_c, target) == self._sign_lo
                and _int_sign_at(p, hi_c, target) == -self._sign_lo
            )
            if ok:
                self._bracket = [lo_c, hi_c, target]
            else:
                self._bisect(32)
                if self.rational is not None:
                    return

    def _refine_series(self, bits: int):
        if bits > self.cap:
            raise RefinementStall(f"base {self.label}: {bits} bits exceeds cap {self.cap}")
        lo, hi = self._series_lo, self._series_hi
        target = Fraction(1, 1 << bits)
        while hi - lo > target:
            mid = (lo + hi) / 2
            prec = max(64, bits + 32)
            val = self.series(mid, prec)
            if val.lo > 0:
                lo = mid
            elif val.hi < 0:
                hi = mid
            else:
                val = self.series(mid, prec * 4)
                if val.lo > 0:
                    lo = mid
                elif val.hi < 0:
                    hi = mid
                else:
                    raise BoundaryUndecidable(f"cannot locate root of {self.label} near {float(mid)}")
        self._series_lo, self._series_hi = lo, hi

    def fixed(self, bits: int, cap: int | None = None) -> tuple[int, int]:
        """Integers (a, b) with a / 2**bits <= beta <= b / 2**bits and b - a small."""
        if self.rational is not None:
            q = self.rational
            a = (q.numerator << bits) // q.denominator
            b = -((-q.numerator << bits) // q.denominator)
            return a, b
        old = self.cap
        if cap is not None:
            self.cap = max(cap, old)
        try:
            if self.series is not None:
                self._refine_series(bits + 2)
                lo, hi = self._series_lo, self._series_hi
                return (lo.numerator << bits) // lo.denominator, -((-hi.numerator << bits) // hi.denominator)
            self._refine_poly(bits + 2)
        finally:
            self.cap = old
        if self.rational is not None:
            return self.fixed(bits)
        L, H, k = self._bracket
        if k >= bits:
            return L >> (k - bits), -((-H) >> (k - bits))
        return L << (bits - k), H << (bits - k)

    def enclose(self, prec: int = 128) -> RInterval:
        """Enclosure of beta of width about 2**-prec."""
        hit = self._cache.get(prec)
        if hit is not None:
            return hit
        if self.rational is not None:
            enc = RInterval.exact(self.rational, prec)
        else:
            a, b = self.fixed(prec + 4)
            enc = RInterval.from_fixed(a, b, prec + 4, prec + 8)
        self._cache[prec] = enc
        return enc

    # exact questions ----------------------------------------------------
    @property
    def is_exact(self) -> bool:
        """True when equality with elements of Q(beta) can be decided."""
        return self.series is None

    def sign_of(self, q, max_prec: int | None = None) -> int:
        """Exact sign of the polynomial q evaluated at beta."""
        q = P.norm(q)
        if not q:
            return 0
        if self.rational is not None:
            return P.sign_exact(q, self.rational)
        if self.poly is not None:
            r = P.rem(q, self.poly)
            if not r:
                return 0
            if len(r) > 1:
                g = P.gcd(r, self.poly)
                if len(g) > 1:
                    s1 = P.sign_exact(g, self._exact_lo)
                    s2 = P.sign_exact(g, self._exact_hi)
                    if s1 * s2 < 0:
                        return 0
            q = r
        prec = 64
        limit = max_prec or max(self.cap, 1 << 16)
        while prec <= limit:
            v = P.eval_interval(q, self.enclose(prec))
            if v.lo > 0:
                return 1
            if v.hi < 0:
                return -1
            prec *= 2
        raise BoundaryUndecidable(f"sign of a polynomial at {self.label} is undecided")

    def compare_fraction(self, q: Fraction) -> int:
        """Sign of beta - q."""
        return self.sign_of((-Fraction(q), Fraction(1)))

    def compare(self, other: "BetaValue") -> int:
        """Sign of self - other, exact whenever both bases are algebraic."""
        if other.rational is not None:
            return self.compare_fraction(other.rational)
        if self.rational is not None:
            return -other.compare_fraction(self.rational)
        if self.poly is not None and other.poly is not None:
            g = P.gcd(self.poly, other.poly)
            if len(g) > 1:
                lo = max(self._exact_lo, other._exact_lo)
                hi = min(self._exact_hi, other._exact_hi)
                if lo < hi and P.sign_exact(g, lo) * P.sign_exact(g, hi) < 0:
                    # a common root inside both brackets is the root of both
                    return 0
        prec = 64
        while prec <= max(self.cap, other.cap):
            a, b = self.enclose(prec), other.enclose(prec)
            if a.hi < b.lo:
                return -1
            if a.lo > b.hi:
                return 1
            prec *= 2
        raise BoundaryUndecidable(f"cannot separate {self.label} from {other.label}")

    def __float__(self):
        if self.rational is not None:
            return float(self.rational)
        return float(self.enclose(64).mid)

    def describe(self) -> dict:
        lo, hi = self.enclose(96).to_strings(20)
        return {"definition": self.label, "enclosure": [lo, hi]}

    def __repr__(self):
        return f"BetaValue({self.label})"


def _fr(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    s = float(q)
    if Fraction(repr(s)) == q:
        return repr(s)
    return str(q)


def golden_ratio() -> BetaValue:
    return BetaValue.from_polynomial((-1, -1, 1), 1, 2, label="poly:x^2-x-1:[1,2]")


def tribonacci_like() -> BetaValue:
    """The root of x^3 - x^2 - 1 near 1.4656, the base used in the worked tables."""
    return BetaValue.from_polynomial((-1, 0, -1, 1), Fraction(14, 10), Fraction(15, 10),
                                     label="poly:x^3-x^2-1:[1.4,1.5]")


def as_beta(value) -> BetaValue:
    if isinstance(value, BetaValue):
        return value
    if isinstance(value, str):
        return BetaValue.parse(value)
    if isinstance(value, (int, Fraction)):
        return BetaValue.from_fraction(value)
    if isinstance(value, float):
        return BetaValue.from_decimal(repr(value))
    raise DomainError(f"cannot interpret {value!r} as a base")
