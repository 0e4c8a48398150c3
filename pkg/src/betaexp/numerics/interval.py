"""Closed real intervals with outward-rounded endpoints.

Endpoints are gmpy2 ``mpfr`` values.  Every operation computes the lower
endpoint in a round-down context and the upper one in a round-up context, so
the result always contains the exact image of every point of the operands.
Endpoints may be infinite; the convention ``0 * inf = 0`` is used for products.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from ..errors import BoundaryUndecidable, DomainError

DEFAULT_PREC = 128
_INF = mpfr("inf")
_NINF = mpfr("-inf")
_MPFR = type(_INF)


def _round(ctx, v):
    """Round an exact value into ``ctx`` (precision and direction)."""
    if type(v) is _MPFR:
        return ctx.mul_2exp(v, 0)
    if isinstance(v, (int, type(mpz(0)))):
        return ctx.mul_2exp(mpz(v), 0)
    if isinstance(v, float):
        return ctx.mul_2exp(mpfr(v), 0)
    q = Fraction(v) if not isinstance(v, Fraction) else v
    if q.denominator == 1:
        return ctx.mul_2exp(mpz(q.numerator), 0)
    return ctx.div(mpz(q.numerator), mpz(q.denominator))


@lru_cache(maxsize=None)
def _ctx(prec: int, up: bool):
    return gmpy2.context(
        precision=max(int(prec), 2),
        round=gmpy2.RoundUp if up else gmpy2.RoundDown,
    )


def down(prec):
    return _ctx(prec, False)


def up(prec):
    return _ctx(prec, True)


class Ordering(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    OVERLAPPING = "overlapping"


def _neg(x):
    # unary minus on an mpfr rounds to the global precision; this does not
    return _ctx(x.precision, False).minus(x)


def _mul(ctx, a, b):
    if a == 0 or b == 0:
        return mpfr(0)
    return ctx.mul(a, b)


class RInterval:
    """Closed interval ``[lo, hi]`` of extended reals."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi=None, prec: int | None = None):
        if hi is None:
            hi = lo
        if prec is None:
            prec = DEFAULT_PREC
        self.prec = prec
        self.lo = lo if type(lo) is _MPFR else _round(down(prec), lo)
        self.hi = hi if type(hi) is _MPFR else _round(up(prec), hi)
        if gmpy2.is_nan(self.lo) or gmpy2.is_nan(self.hi):
            raise DomainError("interval endpoint is NaN")
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    # construction -------------------------------------------------------
    @classmethod
    def exact(cls, value, prec: int | None = None) -> "RInterval":
        """Tightest enclosure of an int, Fraction, decimal string or float."""
        prec = prec or DEFAULT_PREC
        if isinstance(value, RInterval):
            return value
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, float):
            value = Fraction(value)
        q = Fraction(value)
        return cls(_round(down(prec), q), _round(up(prec), q), prec)

    @classmethod
    def from_fixed(cls, lo: int, hi: int, bits: int, prec: int | None = None):
        """Interval ``[lo / 2**bits, hi / 2**bits]``."""
        prec = prec or DEFAULT_PREC
        # scaling by a power of two is exact; only the conversion rounds
        lo_f = down(prec).mul_2exp(mpz(lo), -bits)
        hi_f = up(prec).mul_2exp(mpz(hi), -bits)
        return cls(lo_f, hi_f, prec)

    @classmethod
    def whole(cls, prec: int | None = None) -> "RInterval":
        return cls(_NINF, _INF, prec)

    # basic queries ------------------------------------------------------
    @property
    def width(self):
        return up(self.prec).sub(self.hi, self.lo)

    @property
    def mid(self):
        return down(self.prec + 2).div(down(self.prec + 2).add(self.lo, self.hi), 2)

    def is_finite(self) -> bool:
        return gmpy2.is_finite(self.lo) and gmpy2.is_finite(self.hi)

    def contains(self, value) -> bool:
        if isinstance(value, RInterval):
            return self.lo <= value.lo and value.hi <= self.hi
        q = Fraction(value) if not isinstance(value, type(_INF)) else value
        if isinstance(q, Fraction):
            return _cmp_frac(self.lo, q) <= 0 and _cmp_frac(self.hi, q) >= 0
        return self.lo <= q <= self.hi

    def overlaps(self, other: "RInterval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def hull(self, other: "RInterval") -> "RInterval":
        return RInterval(min(self.lo, other.lo), max(self.hi, other.hi), max(self.prec, other.prec))

    def intersect(self, other: "RInterval") -> "RInterval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise DomainError("intervals are disjoint")
        return RInterval(lo, hi, max(self.prec, other.prec))

    def with_prec(self, prec: int) -> "RInterval":
        return RInterval(_round(down(prec), self.lo), _round(up(prec), self.hi), prec)

    def fixed(self, bits: int) -> tuple[int, int]:
        """Integers ``(a, b)`` with ``a / 2**bits <= lo`` and ``hi <= b / 2**bits``."""
        if not self.is_finite():
            raise DomainError("cannot convert an unbounded interval to fixed point")
        lo, hi = mpq(self.lo), mpq(self.hi)
        a = (int(lo.numerator) << bits) // int(lo.denominator)
        b = -((-int(hi.numerator) << bits) // int(hi.denominator))
        return a, b

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "RInterval":
        if isinstance(other, RInterval):
            return other
        if hasattr(other, "enclose"):
            return other.enclose(self.prec)
        return RInterval.exact(other, self.prec)

    def __neg__(self):
        return RInterval(_neg(self.hi), _neg(self.lo), self.prec)

    def __add__(self, other):
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        return RInterval(down(p).add(self.lo, o.lo), up(p).add(self.hi, o.hi), p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        return RInterval(down(p).sub(self.lo, o.hi), up(p).sub(self.hi, o.lo), p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        d, u = down(p), up(p)
        if self.lo >= 0 and o.lo >= 0:
            return RInterval(_mul(d, self.lo, o.lo), _mul(u, self.hi, o.hi), p)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)]
        lo = min(_mul(d, a, b) for a, b in pairs)
        hi = max(_mul(u, a, b) for a, b in pairs)
        return RInterval(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        if o.lo > 0 or o.hi < 0:
            return self * o.reciprocal()
        # denominator touches zero: extended division
        if o.lo == 0 and o.hi == 0:
            raise DomainError("division by the zero interval")
        if self.lo <= 0 <= self.hi or (o.lo < 0 < o.hi):
            return RInterval.whole(p)
        d, u = down(p), up(p)
        if o.lo == 0:  # o = [0, h]
            if self.lo > 0:
                return RInterval(d.div(self.lo, o.hi), _INF, p)
            return RInterval(_NINF, u.div(self.hi, o.hi), p)
        # o = [l, 0]
        if self.lo > 0:
            return RInterval(_NINF, u.div(self.lo, o.lo), p)
        return RInterval(d.div(self.hi, o.lo), _INF, p)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def reciprocal(self) -> "RInterval":
        if self.lo <= 0 <= self.hi:
            return RInterval(1, prec=self.prec) / self
        d, u = down(self.prec), up(self.prec)
        return RInterval(d.div(1, self.hi), u.div(1, self.lo), self.prec)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise DomainError("only non-negative integer powers are supported")
        if n == 0:
            return RInterval(1, prec=self.prec)
        d, u = down(self.prec), up(self.prec)
        if self.lo >= 0:
            return RInterval(d.pow(self.lo, n), u.pow(self.hi, n), self.prec)
        if self.hi <= 0:
            lo, hi = d.pow(_neg(self.hi), n), u.pow(_neg(self.lo), n)
            return RInterval(lo, hi, self.prec) if n % 2 == 0 else RInterval(_neg(hi), _neg(lo), self.prec)
        if n % 2:
            return RInterval(_neg(u.pow(_neg(self.lo), n)), u.pow(self.hi, n), self.prec)
        return RInterval(0, u.pow(max(_neg(self.lo), self.hi), n), self.prec)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RInterval(0, max(_neg(self.lo), self.hi), self.prec)

    def sqrt(self) -> "RInterval":
        if self.lo < 0:
            raise DomainError("square root of an interval with negative part")
        return RInterval(down(self.prec).sqrt(self.lo), up(self.prec).sqrt(self.hi), self.prec)

    def log(self) -> "RInterval":
        if self.lo <= 0:
            raise DomainError("logarithm of an interval reaching zero")
        return RInterval(down(self.prec).log(self.lo), up(self.prec).log(self.hi), self.prec)

    def exp(self) -> "RInterval":
        return RInterval(down(self.prec).exp(self.lo), up(self.prec).exp(self.hi), self.prec)

    # comparisons --------------------------------------------------------
    def compare(self, other) -> Ordering:
        o = self._coerce(other)
        if self.hi < o.lo:
            return Ordering.LESS
        if self.lo > o.hi:
            return Ordering.GREATER
        return Ordering.OVERLAPPING

    def certainly_lt(self, other) -> bool:
        return self.hi < self._coerce(other).lo

    def certainly_le(self, other) -> bool:
        return self.hi <= self._coerce(other).lo

    def certainly_gt(self, other) -> bool:
        return self.lo > self._coerce(other).hi

    def certainly_ge(self, other) -> bool:
        return self.lo >= self._coerce(other).hi

    # display ------------------------------------------------------------
    def to_strings(self, digits: int = 17) -> tuple[str, str]:
        """Decimal endpoints rounded outward."""
        return _fmt(self.lo, digits, "D"), _fmt(self.hi, digits, "U")

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        lo, hi = self.to_strings(12)
        return f"RInterval[{lo}, {hi}]"


def _fmt(x, digits, mode):
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    return format(x, f".{digits}{mode}g")


def _cmp_frac(x, q: Fraction) -> int:
    if gmpy2.is_infinite(x):
        return 1 if x > 0 else -1
    diff = gmpy2.mpq(x) - gmpy2.mpq(q.numerator, q.denominator)
    return (diff > 0) - (diff < 0)


def compare(a: RInterval, b: RInterval, refine=None, max_rounds: int = 12) -> Ordering:
    """Compare two enclosures, optionally refining until they separate.

    ``refine`` is called as ``refine(round)`` and must return a fresh pair of
    enclosures.  Raises BoundaryUndecidable if the pair still overlaps after
    ``max_rounds`` refinements.
    """
    order = a.compare(b)
    if refine is None or order is not Ordering.OVERLAPPING:
        return order
    for r in range(1, max_rounds + 1):
        a, b = refine(r)
        order = a.compare(b)
        if order is not Ordering.OVERLAPPING:
            return order
    raise BoundaryUndecidable(f"enclosures still overlap after {max_rounds} refinements")


def geometric_tail(beta, n: int, max_digit: int = 1) -> RInterval:
    """Enclosure of ``max_digit * beta**-n / (beta - 1)``, the largest possible digit tail after n terms.

    ``beta`` may be an RInterval, a Fraction or anything with ``enclose``.
    """
    b = beta if isinstance(beta, RInterval) else (beta.enclose(DEFAULT_PREC) if hasattr(beta, "enclose") else RInterval.exact(beta))
    if b.lo <= 1:
        raise DomainError("tail bound needs beta > 1")
    if n < 0:
        raise DomainError("tail index must be nonnegative")
    dn, u = down(b.prec), up(b.prec)
    # decreasing in beta: the upper end uses beta.lo rounded down, and vice versa
    hi = u.div(max_digit, dn.mul(dn.pow(b.lo, n), dn.sub(b.lo, 1)))
    if gmpy2.is_infinite(b.hi):
        lo = gmpy2.mpfr(0)
    else:
        lo = dn.div(max_digit, u.mul(u.pow(b.hi, n), u.sub(b.hi, 1)))
    return RInterval(lo, hi, b.prec)
