"""Expansions with controlled digit statistics.

Every generator follows the same pattern.  It drives x into O with a
deterministic initial word, then repeatedly appends whole return words
(taken from the partition table, or built from Thue-Morse blocks) while
tracking a running count.  After each appended word it records a
checkpoint.  The orbit is carried as a certified enclosure, so every digit
emitted is part of a genuine expansion of x.

Counts that the bounds refer to start after the initial word, as in the
constructions: the initial word only shifts the statistics by a finite
amount.
"""

from __future__ import annotations

import json
import math
from array import array
from fractions import Fraction
from itertools import count

import gmpy2

from .errors import (BoundaryUndecidable, DomainError, GrowthViolation,
                     PreimageOfMarkedPoint, ScheduleError)
from .expansion import (Alphabet, Direction, canonical_intervals, drive_into_O,
                        require_open_domain)
from .numerics.beta import BetaValue
from .numerics.exact import QPoint
from .numerics.interval import RInterval
from .orbit import Locator, Orbit, as_point, locate
from .synthesis import build_partition_table, require_below_golden

SCHEMA_VERSION = 1


class ExpansionStream:
    """A lazily extended expansion of x with a checkpoint log."""

    kind = "expansion"

    def __init__(self, beta: BetaValue, x, alphabet: Alphabet, horizon: int = 1024):
        self.beta = beta
        self.alphabet = alphabet
        self.x = as_point(x, beta)
        require_open_domain(self.x, beta, alphabet)
        self.intervals = canonical_intervals(beta, alphabet)
        self.orbit = Orbit(beta, self.x, horizon=horizon)
        self.digits = array("b")
        self.n_low = 0  # low digits after the initial word
        self.n_one = 0
        self.checkpoints: list[dict] = []
        self.prefix = drive_into_O(self.orbit, self.intervals)
        self.digits.extend(self.prefix)
        self.periodic: tuple | None = None

    # bookkeeping --------------------------------------------------------
    def _append(self, word):
        self.orbit.apply(word)
        self.digits.extend(word)
        low = self.alphabet.low
        k = sum(1 for d in word if d == low)
        self.n_low += k
        self.n_one += len(word) - k

    @property
    def body_length(self) -> int:
        """Number of digits emitted after the initial word."""
        return len(self.digits) - len(self.prefix)

    def _checkpoint(self, **extra):
        rec = {"checkpoint": len(self.checkpoints) + 1, "index": len(self.digits),
               "count0": self.n_low, "count1": self.n_one}
        rec.update(extra)
        self.checkpoints.append(rec)

    def _advance(self):
        raise NotImplementedError

    def extend_to(self, n: int) -> "ExpansionStream":
        """Generate until at least n digits are available."""
        if len(self.digits) >= n:
            return self
        if self.periodic is None:
            self.orbit.reserve(n - len(self.digits) + 64)
        while len(self.digits) < n:
            if self.periodic is not None:
                self.digits.extend(self.periodic)
                continue
            self._advance()
        return self

    def take(self, n: int) -> tuple:
        self.extend_to(n)
        return tuple(self.digits[:n])

    # output -------------------------------------------------------------
    def digit_text(self, n: int | None = None) -> str:
        ds = self.digits if n is None else self.take(n)
        chars = "".join(self.alphabet.char(d) for d in ds)
        return "".join(chars[i:i + 80] + "\n" for i in range(0, len(chars), 80))

    def write_digits(self, path, n: int | None = None):
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.digit_text(n))

    def log_lines(self) -> list[str]:
        return [json.dumps(_jsonable(r), sort_keys=True) for r in self.checkpoints]

    def write_log(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.log_lines():
                fh.write(line + "\n")

    def summary(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": self.kind,
                "beta": self.beta.describe(), "alphabet": self.alphabet.value,
                "digits": len(self.digits), "prefix_length": len(self.prefix),
                "checkpoints": len(self.checkpoints)}


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _approx(x) -> float:
    if isinstance(x, QPoint):
        return float(x)
    e = x.enclosure(64) if hasattr(x, "enclosure") else x
    return float(e.mid)


class _TableStream(ExpansionStream):
    """Streams that append low-heavy or one-heavy words from the partition table."""

    def __init__(self, beta, x, alphabet, policy="shortest", horizon=1024):
        require_below_golden(beta)
        super().__init__(beta, x, alphabet, horizon)
        self.table = build_partition_table(beta, alphabet, policy)
        self.n_beta = self.table.n_beta
        self.c = Fraction(1, 2 * self.n_beta)

    def _word(self, direction: Direction) -> tuple:
        return self.table.lookup(direction, self.orbit)


# --- prescribed frequency -----------------------------------------------------

def frequency_window(beta: BetaValue, alphabet: Alphabet = Alphabet.ZERO_ONE,
                     policy: str = "shortest") -> tuple[Fraction, Fraction]:
    n = build_partition_table(beta, alphabet, policy).n_beta
    c = Fraction(1, 2 * n)
    return Fraction(1, 2) - c, Fraction(1, 2) + c


class FrequencyStream(_TableStream):
    """Low digits appear with frequency p; |count_low - p * length| <= n(beta) at checkpoints."""

    kind = "frequency"

    def __init__(self, beta, x, p, alphabet=Alphabet.ZERO_ONE, policy="shortest", horizon=1024):
        super().__init__(beta, x, alphabet, policy, horizon)
        p = Fraction(p)
        lo, hi = Fraction(1, 2) - self.c, Fraction(1, 2) + self.c
        if not lo <= p <= hi:
            raise DomainError(f"frequency {p} is outside the window [{lo}, {hi}]")
        self.p = p
        self.max_deviation = Fraction(0)

    def _advance(self):
        a, b = self.p.numerator, self.p.denominator
        if not self.checkpoints:
            d = Direction.ONE_HEAVY if 2 * a < b else Direction.LOW_HEAVY
        else:
            # sign of n_low - p * length, in integers
            d = Direction.ONE_HEAVY if b * self.n_low >= a * self.body_length else Direction.LOW_HEAVY
        self._append(self._word(d))
        dev = Fraction(b * self.n_low - a * self.body_length, b)
        if abs(dev) > self.max_deviation:
            self.max_deviation = abs(dev)
        self._checkpoint(bound=self.n_beta, deviation=dev)


def frequency_expansion(x, beta: BetaValue, p, alphabet: Alphabet = Alphabet.ZERO_ONE,
                        policy: str = "shortest") -> FrequencyStream:
    return FrequencyStream(beta, x, p, alphabet, policy)


# --- prescribed accumulation points ---------------------------------------------

def dyadic_schedule(lo: Fraction, hi: Fraction):
    """Every dyadic point of the open interval (lo, hi), each visited infinitely often."""
    for stage in count(1):
        for level in range(1, stage + 1):
            m = 1 << level
            for i in range(1, m):
                yield lo + (hi - lo) * Fraction(i, m)


class AccumulationStream(_TableStream):
    """Running low-digit frequency passes close to each scheduled target in turn."""

    kind = "accumulation"

    def __init__(self, beta, x, schedule=None, alphabet=Alphabet.ZERO_ONE, policy="shortest",
                 horizon=1024):
        super().__init__(beta, x, alphabet, policy, horizon)
        lo, hi = Fraction(1, 2) - self.c, Fraction(1, 2) + self.c
        self.window = (lo, hi)
        if schedule is None:
            schedule = dyadic_schedule(lo, hi)
        self._targets = iter(schedule)
        self.hits: list[tuple[Fraction, int]] = []  # (target, n_k)

    def _next_target(self) -> Fraction:
        try:
            y = Fraction(next(self._targets))
        except StopIteration:
            raise ScheduleError("target schedule is exhausted") from None
        lo, hi = self.window
        if not lo < y < hi:
            raise ScheduleError(f"target {y} is not inside the open window ({lo}, {hi})")
        return y

    def _advance(self):
        y = self._next_target()
        if not self.checkpoints:
            d = Direction.LOW_HEAVY if y >= Fraction(1, 2) else Direction.ONE_HEAVY
            self._append(self._word(d))
        else:
            dev = self.n_low - y * self.body_length
            if dev >= 0:
                d, stop = Direction.ONE_HEAVY, lambda v: v <= 0
            else:
                d, stop = Direction.LOW_HEAVY, lambda v: v >= 0
            while True:
                self._append(self._word(d))
                if stop(self.n_low - y * self.body_length):
                    break
        dev = self.n_low - y * self.body_length
        self.hits.append((y, self.body_length))
        self._checkpoint(bound=self.n_beta, target=y, deviation=dev)


def accumulation_expansion(x, beta: BetaValue, targets=None, alphabet: Alphabet = Alphabet.ZERO_ONE,
                           policy: str = "shortest") -> AccumulationStream:
    return AccumulationStream(beta, x, targets, alphabet, policy)


# --- hybrid expansions ------------------------------------------------------------

def _sign_of(point, n: int, s: int, prec: int = 128) -> int:
    """Certified sign of point*n - s for an exact or enclosed point."""
    if isinstance(point, QPoint):
        q = point.to_fraction()
        if q is not None:
            v = q * n - s
            return (v > 0) - (v < 0)
        return (point * n - s).sign()
    while prec <= 1 << 16:
        e = point.enclosure(prec) if hasattr(point, "enclosure") else point
        v = e * n - s
        if v.lo > 0:
            return 1
        if v.hi < 0:
            return -1
        if v.lo == 0 and v.hi == 0:
            return 0
        if e is point:
            break
        prec *= 2
    raise BoundaryUndecidable("cannot decide the sign of the running signed sum")


class HybridStream(_TableStream):
    """A {-1,1} expansion of x whose running digit average also tends to x."""

    kind = "hybrid"

    def __init__(self, beta, x, policy="shortest", horizon=1024):
        super().__init__(beta, x, Alphabet.PLUS_MINUS, policy, horizon)
        bound = QPoint.rational(beta, 2 * self.c)
        if isinstance(self.x, QPoint):
            if not (-bound <= self.x <= bound):
                raise DomainError(f"x must lie in [-{2 * self.c}, {2 * self.c}]")
        else:
            e = self.x.enclosure(128) if hasattr(self.x, "enclosure") else self.x
            if e.lo < -2 * self.c or e.hi > 2 * self.c:
                raise DomainError(f"x must lie in [-{2 * self.c}, {2 * self.c}]")
        self.max_deviation = 0.0
        self._xf = _approx(self.x)

    def _advance(self):
        if not self.checkpoints:
            positive = _sign_of(self.x, 1, 0) > 0
            d = Direction.ONE_HEAVY if positive else Direction.LOW_HEAVY
        else:
            sgn = _sign_of(self.x, self.body_length, self.n_one - self.n_low)
            d = Direction.ONE_HEAVY if sgn >= 0 else Direction.LOW_HEAVY
        self._append(self._word(d))
        s = self.n_one - self.n_low
        dev = abs(s - self._xf * self.body_length)
        self.max_deviation = max(self.max_deviation, dev)
        self._checkpoint(bound=2 * self.n_beta, signed_sum=s)


def hybrid_expansion(x, beta: BetaValue, policy: str = "shortest") -> HybridStream:
    return HybridStream(beta, x, policy)


# --- slow growth ------------------------------------------------------------------

class GrowthFunction:
    """f(n) with certified evaluation and an optional start index for the increment bound."""

    def __init__(self, name: str, evaluate, approx, start: int | None = None, exact=None):
        self.name = name
        self._evaluate = evaluate  # (n, prec) -> RInterval
        self.approx = approx  # n -> float, for reporting
        self.start = start
        self._exact = exact  # n -> Fraction when f(n) is rational, else None

    def exact(self, n: int) -> Fraction | None:
        return self._exact(n) if self._exact else None

    def __call__(self, n: int, prec: int = 128) -> RInterval:
        return self._evaluate(n, prec)

    def increment(self, n: int, prec: int = 128) -> RInterval:
        return self(n + 1, prec) - self(n, prec)

    @classmethod
    def power(cls, a, start=None) -> "GrowthFunction":
        a = Fraction(a)
        if not 0 < a:
            raise DomainError("growth exponent must be positive")

        def ev(n, prec):
            if a == 1:
                return RInterval.exact(n, prec)
            if a == Fraction(1, 2):
                return RInterval.exact(n, prec).sqrt()
            return (RInterval.exact(n, prec).log() * RInterval.exact(a, prec)).exp()

        def ex(n):
            # n^(p/q) is rational exactly when n is a perfect q-th power
            r, whole = gmpy2.iroot(gmpy2.mpz(n), a.denominator)
            return Fraction(int(r)) ** a.numerator if whole else None

        name = "sqrt" if a == Fraction(1, 2) else ("linear" if a == 1 else f"pow:{a}")
        fa = float(a)
        return cls(name, ev, lambda n: n ** fa, start, ex)

    @classmethod
    def sqrt(cls, start=None) -> "GrowthFunction":
        return cls.power(Fraction(1, 2), start)

    @classmethod
    def log(cls, start=None) -> "GrowthFunction":
        return cls("log", lambda n, prec: RInterval.exact(n + 1, prec).log(),
                   lambda n: math.log(n + 1), start)

    @classmethod
    def parse(cls, spec: str) -> "GrowthFunction":
        s = spec.strip().lower()
        if s == "sqrt":
            return cls.sqrt()
        if s == "log":
            return cls.log()
        if s == "linear":
            return cls.power(1)
        if s.startswith("pow:"):
            return cls.power(Fraction(s[4:]))
        raise DomainError(f"unknown growth function {spec!r}")


class SlowGrowthStream(_TableStream):
    """|sum of the first n digits - f(n) x| stays bounded, so the sum grows like f(n) x.

    The initial word is padded with table words up to the index N from
    which the increments of f are below (beta - 1)/n(beta).  After that each
    step appends a low-heavy word when sum - f(n) x > 0 and a one-heavy word
    otherwise.  ``first_block_end`` is the first index where that quantity
    changes sign; ``C`` is the largest deviation seen at any index from there on.
    """

    kind = "slow_growth"

    def __init__(self, beta, x, f: GrowthFunction, policy="shortest", horizon=1024,
                 scan_limit: int = 1 << 20):
        super().__init__(beta, x, Alphabet.PLUS_MINUS, policy, horizon)
        self.f = f
        self.rate = (beta.enclose(128) - 1) / self.n_beta
        self.theory_bound = 2 * self.n_beta + 2
        self.N = f.start if f.start is not None else self._find_start(scan_limit)
        self._checked_to = self.N
        while len(self.digits) < self.N:
            d = Direction.ONE_HEAVY if self.n_one <= self.n_low else Direction.LOW_HEAVY
            self._append(self._word(d))
        self.prefix = tuple(self.digits)
        self.n_low = self.n_one = 0
        self.sum = sum(self.digits)
        self._xf = _approx(self.x)
        self._start_sign = self._signed(len(self.digits))
        self.first_block_end: int | None = None
        self.C = 0.0

    def _find_start(self, limit: int) -> int:
        n = 1
        while n <= limit:
            if self.f.increment(n).hi < self.rate.lo:
                return n
            n *= 2
        raise GrowthViolation(f"increments of {self.f.name} never drop below (beta - 1)/n(beta)")

    def _check_increments(self, upto: int):
        r = self.rate.lo
        for n in range(self._checked_to, upto):
            if not self.f.increment(n).hi < r:
                raise GrowthViolation(f"f({n + 1}) - f({n}) is not below (beta - 1)/n(beta)")
        self._checked_to = max(self._checked_to, upto)

    def _signed(self, n: int) -> int:
        """Certified sign of sum - f(n) x."""
        fx = self.f.exact(n)
        xq = self.x.to_fraction() if isinstance(self.x, QPoint) else None
        if fx is not None and xq is not None:
            v = self.sum - fx * xq
            return (v > 0) - (v < 0)
        prec = 128
        while prec <= 1 << 14:
            xe = self.x.enclose(prec) if isinstance(self.x, QPoint) else (
                self.x.enclosure(prec) if hasattr(self.x, "enclosure") else self.x)
            v = RInterval.exact(self.sum, prec) - self.f(n, prec) * xe
            if v.lo > 0:
                return 1
            if v.hi < 0:
                return -1
            if v.lo == 0 and v.hi == 0:
                return 0
            prec *= 2
        raise BoundaryUndecidable("cannot decide the sign of sum - f(n) x")

    def _advance(self):
        n = len(self.digits)
        self._check_increments(n + self.n_beta + 1)
        sgn = self._signed(n)
        word = self._word(Direction.LOW_HEAVY if sgn > 0 else Direction.ONE_HEAVY)
        self._append(word)
        s, xf, fa = self.sum, self._xf, self.f.approx
        track = self.first_block_end is not None
        for i, d in enumerate(word, n + 1):
            s += d
            if track:
                dev = abs(s - fa(i) * xf)
                if dev > self.C:
                    self.C = dev
        self.sum = s
        n = len(self.digits)
        if not track:
            after = self._signed(n)
            changed = after <= 0 if self._start_sign > 0 else after >= 0
            if changed:
                self.first_block_end = n
                self.C = abs(s - fa(n) * xf)
        self._checkpoint(bound=self.theory_bound, signed_sum=s, n=n)


def slow_growth_expansion(x, beta: BetaValue, f: GrowthFunction | None = None,
                          policy: str = "shortest") -> SlowGrowthStream:
    return SlowGrowthStream(beta, x, f or GrowthFunction.sqrt(), policy)


# --- simply normal expansions for bases in [phi, beta_KL) -----------------------------

class SimplyNormalStream(ExpansionStream):
    """Balanced digits via Thue-Morse blocks, for bases on the ladder below beta_KL."""

    kind = "simply_normal"

    def __init__(self, beta, x, horizon=1024, max_rungs: int = 10):
        from .thuemorse import kappa, locate_rung, marked_points, run_bound

        self.rung = locate_rung(beta, max_rungs)
        m = self.rung.m
        super().__init__(beta, x, Alphabet.ZERO_ONE, horizon)
        self.m = m
        self.l = run_bound(beta, m)
        self.bound = (1 << m) + self.l
        lows, highs = marked_points(beta, m + 1)  # pi((tau^i)^inf), pi((bar tau^i)^inf)
        self.marks = lows + highs[::-1]
        self.locator = Locator(self.marks)
        self.kappas = [None] + [kappa(i) for i in range(1, m + 1)]
        self.kappas_bar = [None] + [tuple(1 - d for d in kappa(i)) for i in range(1, m + 1)]
        self.O_loc = Locator([self.intervals.O.lo, self.intervals.O.hi])
        self.balance = 0  # zeros minus ones after the initial word
        self.max_balance = 0
        self.kappa_blocks = 0

    def _append_counted(self, word):
        self._append(word)
        b = self.balance
        top = self.max_balance
        for d in word:
            b += 1 if d == 0 else -1
            if abs(b) > top:
                top = abs(b)
        self.balance, self.max_balance = b, top

    def _tie_tail(self):
        """The orbit sits exactly on a marked point: continue with its periodic word."""
        from .thuemorse import thue_morse

        j = self.locator.tie
        m1 = self.m + 1
        if j < m1:
            word = thue_morse(j + 1)
        else:
            word = tuple(1 - d for d in thue_morse(2 * m1 - j))
        self.periodic = word
        self._checkpoint(bound=self.bound, balance=self.balance, periodic_tail=list(word))

    def _advance(self):
        m = self.m
        while True:
            try:
                idx = locate(self.orbit, self.locator)
            except BoundaryUndecidable as exc:
                raise PreimageOfMarkedPoint("orbit cannot be separated from a marked Thue-Morse point") from exc
            if self.locator.tie is not None:
                if isinstance(self.x, QPoint):
                    return self._tie_tail()
                raise PreimageOfMarkedPoint("orbit collapses onto a marked Thue-Morse point")
            if idx == m:
                break
            if idx < 0 or idx > 2 * m:
                raise DomainError("orbit left O")
            if idx < m:
                self._append_counted(self.kappas[idx + 1])
            else:
                self._append_counted(self.kappas_bar[2 * m + 1 - idx])
            self.kappa_blocks += 1
        first, rest = (0, 1) if self.balance >= 0 else (1, 0)
        self._append_counted((first,))
        j = 0
        while True:
            k = locate(self.orbit, self.O_loc)
            if k == 0:
                break
            self._append_counted((rest,))
            j += 1
            if j > self.l + 1:
                raise DomainError("return run exceeded its bound")
        self._checkpoint(bound=self.bound, balance=self.balance, run=j)


def simply_normal_expansion(x, beta: BetaValue, max_rungs: int = 10) -> SimplyNormalStream:
    return SimplyNormalStream(beta, x, max_rungs=max_rungs)
