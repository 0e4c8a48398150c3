"""Exact points of the field Q(beta).

A ``QPoint`` is a quotient N(beta) / D(beta) of polynomials with rational
coefficients, kept reduced modulo the defining polynomial of beta and with
D(beta) > 0.  Comparisons between QPoints are exact: equality is decided
algebraically and strict inequalities by refining enclosures.  Table
boundaries, marked periodic points and exact inputs are all QPoints.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2

from ..errors import BoundaryUndecidable, DomainError
from . import poly as P
from .beta import BetaValue
from .interval import RInterval


class QPoint:
    __slots__ = ("beta", "num", "den", "_enc")

    def __init__(self, beta: BetaValue, num, den=(1,), *, checked: bool = True):
        self.beta = beta
        num, den = P.norm(num), P.norm(den)
        q = beta.rational
        if q is not None:
            # rational base: the point is just a rational number
            d = P.eval_exact(den, q) if den else Fraction(0)
            if not d:
                raise DomainError("denominator vanishes at beta")
            v = (P.eval_exact(num, q) if num else Fraction(0)) / d
            self.beta, self.num, self.den, self._enc = beta, ((v,) if v else ()), (1,), None
            return
        if beta.poly is not None and beta.is_exact:
            num = P.rem(num, beta.poly) if len(num) >= len(beta.poly) else num
            den = P.rem(den, beta.poly) if len(den) >= len(beta.poly) else den
        if not den:
            raise DomainError("zero denominator")
        if checked:
            s = beta.sign_of(den)
            if s == 0:
                raise DomainError("denominator vanishes at beta")
            if s < 0:
                num, den = P.scale(num, -1), P.scale(den, -1)
        if len(den) == 1 and den[0] != 1:
            c = Fraction(den[0])
            num, den = tuple(Fraction(a) / c for a in num), (1,)
        self.num, self.den = num, den
        self._enc = None

    # construction -------------------------------------------------------
    @classmethod
    def rational(cls, beta: BetaValue, q) -> "QPoint":
        q = Fraction(q)
        return cls(beta, (q,) if q else (), (1,), checked=False)

    @classmethod
    def beta_power(cls, beta: BetaValue, k: int) -> "QPoint":
        if k >= 0:
            return cls(beta, P.shift((1,), k), (1,), checked=False)
        return cls(beta, (1,), P.shift((1,), -k), checked=False)

    def _new(self, num, den) -> "QPoint":
        return QPoint(self.beta, num, den, checked=False)

    # arithmetic ---------------------------------------------------------
    def _lift(self, other) -> "QPoint":
        if isinstance(other, QPoint):
            return other
        return QPoint.rational(self.beta, other)

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return self._new(P.add(self.num, o.num), self.den)
        return self._new(P.add(P.mul(self.num, o.den), P.mul(o.num, self.den)), P.mul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return self._new(P.scale(self.num, -1), self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return self._new(P.mul(self.num, o.num), P.mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        s = o.sign()
        if s == 0:
            raise ZeroDivisionError("division by a point equal to zero")
        num, den = P.mul(self.num, o.den), P.mul(self.den, o.num)
        if s < 0:
            num, den = P.scale(num, -1), P.scale(den, -1)
        return self._new(num, den)

    def mul_beta(self, k: int = 1) -> "QPoint":
        if k >= 0:
            return self._new(P.shift(self.num, k), self.den)
        return self._new(self.num, P.shift(self.den, -k))

    def apply_map(self, d: int) -> "QPoint":
        """T_d(x) = beta * x - d."""
        return self._new(P.sub(P.shift(self.num, 1), P.scale(self.den, d)), self.den)

    def inverse_map(self, d: int) -> "QPoint":
        """T_d^{-1}(x) = (x + d) / beta."""
        return self._new(P.add(self.num, P.scale(self.den, d)), P.shift(self.den, 1))

    def apply_word(self, word) -> "QPoint":
        # beta^k x - sum_j d_j beta^(k-j), done in one pass
        k = len(word)
        tail = ()
        for j, d in enumerate(word, 1):
            if d:
                tail = P.add(tail, P.shift((d,), k - j))
        return self._new(P.sub(P.shift(self.num, k), P.mul(tail, self.den)), self.den)

    def inverse_word(self, word) -> "QPoint":
        """The point t with word(t) = self."""
        k = len(word)
        tail = ()
        for j, d in enumerate(word, 1):
            if d:
                tail = P.add(tail, P.shift((d,), k - j))
        return self._new(P.add(self.num, P.mul(tail, self.den)), P.shift(self.den, k))

    # comparison ---------------------------------------------------------
    def sign(self) -> int:
        return self.beta.sign_of(self.num)

    def cmp(self, other) -> int:
        o = self._lift(other)
        if self.den == o.den:
            return self.beta.sign_of(P.sub(self.num, o.num))
        return self.beta.sign_of(P.sub(P.mul(self.num, o.den), P.mul(o.num, self.den)))

    def __eq__(self, other):
        if not isinstance(other, (QPoint, int, Fraction)):
            return NotImplemented
        return self.cmp(other) == 0

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    __hash__ = None

    # enclosures ---------------------------------------------------------
    def enclose(self, prec: int = 128) -> RInterval:
        if self._enc is not None and self._enc[0] >= prec:
            return self._enc[1]
        if self.beta.rational is not None:
            q = P.eval_exact(self.num, self.beta.rational) / P.eval_exact(self.den, self.beta.rational)
            enc = RInterval.exact(q, prec)
        else:
            work = prec + 16
            limit = max(self.beta.cap, 1 << 20)
            while True:
                b = self.beta.enclose(work)
                n = P.eval_interval(self.num, b) if self.num else RInterval(0, prec=work)
                d = P.eval_interval(self.den, b)
                enc = (n / d).with_prec(prec + 8)
                w = enc.width
                mag = max(abs(enc.lo), abs(enc.hi), 1)
                if w == 0 or w <= gmpy2.mul_2exp(mag, -prec):
                    break
                work *= 2
                if work > limit:
                    raise BoundaryUndecidable("cannot enclose an exact point tightly")
        self._enc = (prec, enc)
        return enc

    def fixed(self, bits: int) -> tuple[int, int]:
        if self.beta.rational is not None:
            q = P.eval_exact(self.num, self.beta.rational) / P.eval_exact(self.den, self.beta.rational)
            return (q.numerator << bits) // q.denominator, -((-q.numerator << bits) // q.denominator)
        return self.enclose(bits + 8).fixed(bits)

    def to_fraction(self) -> Fraction | None:
        if self.beta.rational is not None:
            return P.eval_exact(self.num, self.beta.rational) / P.eval_exact(self.den, self.beta.rational)
        if len(self.num) <= 1 and len(self.den) == 1:
            return Fraction(self.num[0] if self.num else 0) / Fraction(self.den[0])
        return None

    def __float__(self):
        return float(self.enclose(64).mid)

    def __repr__(self):
        return f"QPoint({float(self):.12g})"


def periodic_point(beta: BetaValue, word) -> QPoint:
    """The value sum_i w_i beta^-i of the periodic sequence word^infinity."""
    L = len(word)
    num = ()
    for j, d in enumerate(word, 1):
        if d:
            num = P.add(num, P.shift((d,), L - j))
    den = P.sub(P.shift((1,), L), (1,))
    return QPoint(beta, num, den, checked=False)


def finite_value(beta: BetaValue, word) -> QPoint:
    """The value sum_i w_i beta^-i of a finite word."""
    L = len(word)
    num = ()
    for j, d in enumerate(word, 1):
        if d:
            num = P.add(num, P.shift((d,), L - j))
    return QPoint(beta, num, P.shift((1,), L), checked=False)
