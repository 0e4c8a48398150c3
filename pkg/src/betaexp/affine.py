"""Fibres of the self-affine sets Lambda_{b1,b2,b3} and the delta certificate.

The two maps are S_d(x, y) = ((x + d)/b1, (y + d)/b_d) for d in {-1, 1},
with b_{-1} = b2 and b_1 = b3.  A digit sequence e projects to
pi_{b1}(e) horizontally and to

    pi_{b2,b3}(e) = sum_i e_i / (b2^{#-1 in e_1..e_i} * b3^{#1 in e_1..e_i})

vertically.  A finite word w acts on the vertical coordinate by
y -> head(w) + scale(w) * y, which is all the code below needs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (BoundaryUndecidable, BoxSubdivisionOverflow, DomainError, EqualBases,
                     NoDeltaCertificate, NoPositiveDelta)
from .expansion import (Alphabet, Direction, MapWord, canonical_intervals, drive_into_O,
                        project_affine_completions, require_open_domain, word_string)
from .numerics.beta import BetaValue
from .numerics.exact import QPoint
from .numerics.interval import RInterval, geometric_tail
from .orbit import Orbit, as_point
from .synthesis import build_partition_table, require_below_golden

PM = Alphabet.PLUS_MINUS
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AffineParams:
    beta1: BetaValue
    beta2: BetaValue
    beta3: BetaValue

    def enclosures(self, prec: int = 128):
        return self.beta1.enclose(prec), self.beta2.enclose(prec), self.beta3.enclose(prec)

    def describe(self) -> dict:
        return {"beta1": self.beta1.describe(), "beta2": self.beta2.describe(),
                "beta3": self.beta3.describe()}


def head_scale(word, b2: RInterval, b3: RInterval):
    """(head, scale) of a finite word: its action y -> head + scale * y."""
    r2, r3 = b2.reciprocal(), b3.reciprocal()
    head = RInterval(0, prec=b2.prec)
    s = RInterval(1, prec=b2.prec)
    for d in word:
        if d == -1:
            s = s * r2
            head = head - s
        else:
            s = s * r3
            head = head + s
    return head, s


def periodic_value(word, b2: RInterval, b3: RInterval) -> RInterval:
    """pi_{b2,b3}(word^inf) = head / (1 - scale), for bases above 1."""
    h, s = head_scale(word, b2, b3)
    den = 1 - s
    if not den.lo > 0:
        raise DomainError("periodic value needs bases above 1")
    return h / den


def sandwich(words, b2: RInterval, b3: RInterval) -> RInterval:
    """Hull of the periodic values: it contains pi of every concatenation of the words."""
    vals = [periodic_value(w, b2, b3) for w in words]
    out = vals[0]
    for v in vals[1:]:
        out = out.hull(v)
    return out


# --- delta certification -----------------------------------------------------------

class Verdict(enum.Enum):
    CERTIFIED = "certified"
    VIOLATED = "violated"


def _box(lo: Fraction, hi: Fraction, prec: int) -> RInterval:
    return RInterval(RInterval.exact(1 + lo, prec).lo, RInterval.exact(1 + hi, prec).hi, prec)


def _upper(a, b, B2: RInterval, B3: RInterval) -> float | RInterval:
    """Upper bound of pi(a, b^inf) over the box B2 x B3 (bases in [1, 1 + delta]).

    When the head of b is negative, pi(b^inf) = head/(1 - scale) is at most
    head.hi / (1 - scale).hi, which stays finite at the corner b2 = b3 = 1.
    """
    ha, sa = head_scale(a, B2, B3)
    hb, sb = head_scale(b, B2, B3)
    den = 1 - sb
    if hb.hi < 0 and den.hi > 0:
        p = hb.hi / den.hi
        s = sa.lo if p < 0 else sa.hi
        return ha.hi + s * p
    if den.lo > 0:
        return (ha + sa * (hb / den)).hi
    return None


def _signed(a, b, box, side, prec):
    lo2, hi2, lo3, hi3 = box
    B2, B3 = _box(lo2, hi2, prec), _box(lo3, hi3, prec)
    if side < 0:
        return _upper(a, b, B2, B3)
    # mirror: pi_{b2,b3}(-w) = -pi_{b3,b2}(w)
    neg = _upper(tuple(-d for d in a), tuple(-d for d in b), B3, B2)
    return None if neg is None else -neg


def _point_value(a, b, t2: Fraction, t3: Fraction, prec):
    b2, b3 = RInterval.exact(1 + t2, prec), RInterval.exact(1 + t3, prec)
    ha, sa = head_scale(a, b2, b3)
    return ha + sa * periodic_value(b, b2, b3)


def monotone_extreme_check(a, b, delta, side: int = -1, budget: int = 20_000,
                           prec: int = 96) -> dict:
    """Certify pi_{b2,b3}(a b^inf) < 0 (side=-1) or > 0 (side=+1) on (1, 1+delta]^2.

    The whole box is evaluated with interval bases and split into quarters
    where the bound is inconclusive.  For delta = 0 the limit at b2 = b3 = 1
    is decided by the signed digit sum of b.
    """
    a, b = tuple(a), tuple(b)
    delta = Fraction(delta)
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    if delta == 0:
        ok = (sum(b) < 0) if side < 0 else (sum(b) > 0)
        return {"verdict": Verdict.CERTIFIED if ok else Verdict.VIOLATED, "bound": None, "boxes": 0}
    stack = [(Fraction(0), delta, Fraction(0), delta)]
    worst = None
    boxes = 0
    while stack:
        box = stack.pop()
        boxes += 1
        if boxes > budget:
            raise BoxSubdivisionOverflow(f"box budget {budget} exhausted for {a}, {b}")
        v = _signed(a, b, box, side, prec)
        if v is not None and (v < 0 if side < 0 else v > 0):
            worst = v if worst is None else (max(worst, v) if side < 0 else min(worst, v))
            continue
        # is the inequality false at a corner of this box?
        lo2, hi2, lo3, hi3 = box
        for t2, t3 in ((hi2, hi3), (lo2, hi3), (hi2, lo3)):
            if t2 == 0 and t3 == 0:
                continue
            try:
                pv = _point_value(a, b, t2, t3, prec)
            except DomainError:
                continue
            if (pv.lo >= 0) if side < 0 else (pv.hi <= 0):
                return {"verdict": Verdict.VIOLATED, "bound": pv, "boxes": boxes, "at": (t2, t3)}
        m2, m3 = (lo2 + hi2) / 2, (lo3 + hi3) / 2
        stack.extend([(lo2, m2, lo3, m3), (m2, hi2, lo3, m3), (lo2, m2, m3, hi3), (m2, hi2, m3, hi3)])
    return {"verdict": Verdict.CERTIFIED, "bound": worst, "boxes": boxes}


def _head_check(w, delta: Fraction, c: Fraction, side: int, budget: int, prec: int) -> dict:
    """head(w) >= c (side=+1) or <= -c (side=-1) on the box [1, 1+delta]^2."""
    stack = [(Fraction(0), delta, Fraction(0), delta)]
    boxes = 0
    worst = None
    while stack:
        lo2, hi2, lo3, hi3 = stack.pop()
        boxes += 1
        if boxes > budget:
            raise BoxSubdivisionOverflow("box budget exhausted for a head bound")
        h, _ = head_scale(w, _box(lo2, hi2, prec), _box(lo3, hi3, prec))
        v = h.lo if side > 0 else h.hi
        if (v >= c) if side > 0 else (v <= -c):
            worst = v if worst is None else (min(worst, v) if side > 0 else max(worst, v))
            continue
        for t2, t3 in ((hi2, hi3), (lo2, hi3), (hi2, lo3)):
            h, _ = head_scale(w, RInterval.exact(1 + t2, prec), RInterval.exact(1 + t3, prec))
            if (h.hi < c) if side > 0 else (h.lo > -c):
                return {"verdict": Verdict.VIOLATED, "bound": h, "boxes": boxes}
        m2, m3 = (lo2 + hi2) / 2, (lo3 + hi3) / 2
        stack.extend([(lo2, m2, lo3, m3), (m2, hi2, lo3, m3), (lo2, m2, m3, hi3), (m2, hi2, m3, hi3)])
    return {"verdict": Verdict.CERTIFIED, "bound": worst, "boxes": boxes}


@dataclass
class DeltaCertificate:
    beta1: BetaValue
    delta: Fraction
    words_low: list  # A_{-1}
    words_one: list  # A_1
    c_threshold: Fraction
    transcript: list
    probes: list = field(default_factory=list)

    def covers(self, b: BetaValue) -> bool:
        """True when b <= 1 + delta (b > 1 holds for every base)."""
        return b.compare_fraction(1 + self.delta) <= 0

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "beta1": self.beta1.describe(),
            "delta": str(self.delta),
            "delta_float": float(self.delta),
            "c_threshold": str(self.c_threshold),
            "A_minus1": [word_string(w, PM) for w in self.words_low],
            "A_1": [word_string(w, PM) for w in self.words_one],
            "probes": [{"delta": str(d), "certified": ok, "note": note} for d, ok, note in self.probes],
            "transcript": self.transcript,
        }


def _fmt(v):
    if v is None:
        return None
    if isinstance(v, RInterval):
        return list(v.to_strings(12))
    return format(float(v), ".12g")


def delta_system(beta1: BetaValue, delta, c_threshold=Fraction(1, 2), budget: int = 20_000,
                 policy: str = "shortest") -> tuple[bool, list]:
    """Evaluate every inequality of the finite system at one radius.

    Returns (all certified, transcript).  The system: pi(a b^inf) < 0 for
    a in A_1, b in A_{-1}; pi(c d^inf) > 0 for c in A_{-1}, d in A_1; and the
    head bounds head(w) >= c_threshold on A_1, <= -c_threshold on A_{-1}.
    """
    table = build_partition_table(beta1, PM, policy)
    A1, Am1 = table.words(Direction.ONE_HEAVY), table.words(Direction.LOW_HEAVY)
    if not A1 or not Am1:
        raise DomainError("the partition table has no words")
    delta = Fraction(delta)
    c = Fraction(c_threshold)
    rows = []
    ok = True
    for a in A1:
        for b in Am1:
            r = monotone_extreme_check(a, b, delta, -1, budget)
            ok &= r["verdict"] is Verdict.CERTIFIED
            rows.append({"kind": "a.b^inf<0", "a": word_string(a, PM), "b": word_string(b, PM),
                         "bound": _fmt(r["bound"]), "boxes": r["boxes"], "verdict": r["verdict"].value})
    for cw in Am1:
        for d in A1:
            r = monotone_extreme_check(cw, d, delta, 1, budget)
            ok &= r["verdict"] is Verdict.CERTIFIED
            rows.append({"kind": "c.d^inf>0", "a": word_string(cw, PM), "b": word_string(d, PM),
                         "bound": _fmt(r["bound"]), "boxes": r["boxes"], "verdict": r["verdict"].value})
    for w, side in [(w, 1) for w in A1] + [(w, -1) for w in Am1]:
        r = _head_check(w, delta, c, side, budget, 96)
        ok &= r["verdict"] is Verdict.CERTIFIED
        rows.append({"kind": "head>=c" if side > 0 else "head<=-c", "a": word_string(w, PM), "b": None,
                     "bound": _fmt(r["bound"]), "boxes": r["boxes"], "verdict": r["verdict"].value})
    return ok, rows


_CERTS: dict = {}


def certify_delta(beta1: BetaValue, search: str = "bisection", c_threshold=Fraction(1, 2),
                  iterations: int = 20, grid_step=Fraction(1, 1000), budget: int = 20_000,
                  policy: str = "shortest") -> DeltaCertificate:
    """Largest radius delta found by the search for which the finite system is certified."""
    require_below_golden(beta1)
    c = Fraction(c_threshold)
    if not 0 < c < 1:
        raise DomainError("c_threshold must lie in (0, 1)")
    key = (id(beta1), search, c, iterations, Fraction(grid_step), budget, policy)
    hit = _CERTS.get(key)
    if hit is not None and hit.beta1 is beta1:
        return hit
    table = build_partition_table(beta1, PM, policy)
    probes = []

    def probe(d):
        try:
            ok, rows = delta_system(beta1, d, c, budget, policy)
            probes.append((d, ok, ""))
            return ok, rows
        except BoxSubdivisionOverflow as exc:
            probes.append((d, False, str(exc)))
            return False, None

    best, best_rows = None, None
    if search == "bisection":
        lo, hi = Fraction(0), Fraction(1)
        tiny = Fraction(1, 1 << 20)
        ok, rows = probe(tiny)
        if not ok:
            raise NoPositiveDelta(f"no radius certified even at {tiny}")
        best, best_rows, lo = tiny, rows, tiny
        for _ in range(iterations):
            mid = (lo + hi) / 2
            ok, rows = probe(mid)
            if ok:
                best, best_rows, lo = mid, rows, mid
            else:
                hi = mid
    elif search == "grid":
        step = Fraction(grid_step)
        if step <= 0:
            raise DomainError("grid step must be positive")
        k = 1
        while k * step <= 1:
            ok, rows = probe(k * step)
            if not ok:
                break
            best, best_rows = k * step, rows
            k += 1
        if best is None:
            raise NoPositiveDelta(f"no radius certified on the grid with step {step}")
    else:
        raise DomainError(f"unknown search {search!r}")
    cert = DeltaCertificate(beta1, best, table.words(Direction.LOW_HEAVY),
                            table.words(Direction.ONE_HEAVY), c, best_rows, probes)
    _CERTS[key] = cert
    return cert


# --- fibres ----------------------------------------------------------------------

@dataclass
class FibreCertificate:
    params: AffineParams
    x: object
    lambda0: MapWord
    interval: tuple  # (lower, upper) enclosures
    delta_used: Fraction
    digits: int
    _orbit: Orbit = field(repr=False, default=None)
    _prec: int = 320

    @property
    def lower(self) -> RInterval:
        return self.interval[0]

    @property
    def upper(self) -> RInterval:
        return self.interval[1]

    def to_json(self) -> dict:
        lo, hi = self.interval
        return {
            "schema_version": SCHEMA_VERSION,
            "params": self.params.describe(),
            "x": _xjson(self.x),
            "lambda0": word_string(self.lambda0.digits(), PM),
            "interval": {"lower": list(lo.to_strings(17)), "upper": list(hi.to_strings(17))},
            "delta_used": str(self.delta_used),
            "tail_digits": self.digits,
        }


def _xjson(x):
    if isinstance(x, QPoint) and x.to_fraction() is not None:
        return str(x.to_fraction())
    e = x.enclose(128) if isinstance(x, QPoint) else x
    return list(e.to_strings(17))


def _require_covered(params: AffineParams, cert: DeltaCertificate | None) -> DeltaCertificate:
    require_below_golden(params.beta1)
    if cert is None:
        cert = certify_delta(params.beta1)
    elif cert.beta1.compare(params.beta1) != 0:
        raise NoDeltaCertificate("certificate is for a different base")
    for b in (params.beta2, params.beta3):
        if not cert.covers(b):
            raise NoDeltaCertificate(
                f"base {b.label} is outside (1, 1 + {float(cert.delta):.6g}] covered by the certificate")
    return cert


def _branch(table: PartitionTable, orbit: Orbit, direction: Direction, digits: int) -> list:
    """Digits of (omega_i) in one direction from the orbit point, at least ``digits`` long."""
    out: list[int] = []
    orbit.reserve(digits + 64)
    while len(out) < digits:
        w = table.lookup(direction, orbit)
        orbit.apply(w)
        out.extend(w)
    return out


def fibre_interval(params: AffineParams, x, cert: DeltaCertificate | None = None,
                   digits: int = 2000, prec: int = 320) -> FibreCertificate:
    """Certified interval inside the vertical fibre over x."""
    cert = _require_covered(params, cert)
    b1 = params.beta1
    x = as_point(x, b1)
    require_open_domain(x, b1, PM)
    table = build_partition_table(b1, PM)
    orbit = Orbit(b1, x)
    lam0 = drive_into_O(orbit, canonical_intervals(b1, PM))
    lo_word = list(lam0) + _branch(table, orbit.fork(), Direction.LOW_HEAVY, digits)
    hi_word = list(lam0) + _branch(table, orbit.fork(), Direction.ONE_HEAVY, digits)
    lo = project_affine_completions(lo_word, params.beta2, params.beta3, prec)
    hi = project_affine_completions(hi_word, params.beta2, params.beta3, prec)
    if not lo.hi < hi.lo:
        raise BoundaryUndecidable("fibre interval endpoints are not separated")
    return FibreCertificate(params, x, MapWord(PM, lam0), (lo, hi), cert.delta, digits, orbit, prec)


@dataclass
class FibrePoint:
    word: MapWord
    value: RInterval  # pi_{b2,b3} of the prefix
    tail: RInterval  # bound on the remaining sum
    seams: int = 0
    choices: list = field(default_factory=list)

    def residual_bound(self) -> float:
        return float(self.tail.hi)


def _lookahead(table, orbit: Orbit, first: tuple, direction: Direction, depth: int):
    """first followed by ``depth`` words of the given direction, starting at the orbit point."""
    o = orbit.fork()
    o.apply(first)
    seq = list(first)
    for _ in range(depth):
        w = table.lookup(direction, o)
        o.apply(w)
        seq.extend(w)
    return seq


def point_in_fibre(cert: FibreCertificate, y, digits: int = 2000, max_depth: int = 256) -> FibrePoint:
    """A prefix of an expansion of x whose vertical projection converges to y.

    The prefix has at most ``digits`` symbols; it stops before the first
    table word that would not fit.

    Keeps y between pi(lambda, omega^-1, omega^-1, ...) and
    pi(lambda, omega^1, omega^1, ...) and appends omega^-1 when y lies below
    pi(lambda, omega^-1, omega^1, omega^1, ...), omega^1 otherwise.  Unexplored
    tails are bounded by the hull of single-word periodic values.
    """
    prec = cert._prec
    p = cert.params
    b2, b3 = p.beta2.enclose(prec), p.beta3.enclose(prec)
    if isinstance(y, RInterval):
        yi = y.with_prec(prec)
    else:
        yi = RInterval.exact(Fraction(y) if not isinstance(y, float) else y, prec)
    lo, hi = cert.interval
    if yi.hi < lo.lo or yi.lo > hi.hi:
        raise DomainError("y is outside the certified fibre interval")
    table = build_partition_table(p.beta1, PM)
    J1 = sandwich(table.words(Direction.ONE_HEAVY), b2, b3)
    Jm1 = sandwich(table.words(Direction.LOW_HEAVY), b2, b3)
    memo: dict = {}

    def hs(w):
        w = tuple(w)
        r = memo.get(w)
        if r is None:
            r = head_scale(w, b2, b3)
            if len(w) <= 16:
                memo[w] = r
        return r

    orbit = cert._orbit.fork()
    word = list(cert.lambda0)
    H, S = head_scale(word, b2, b3)
    seams = 0
    choices = []
    orbit.reserve(digits + 64)
    while len(word) < digits:
        w_lo = table.lookup(Direction.LOW_HEAVY, orbit)
        w_hi = table.lookup(Direction.ONE_HEAVY, orbit)
        choice = None
        for depth in _depths(max_depth):
            # m: omega^-1 then omega^1 forever; mp: omega^1 then omega^-1 forever
            s1 = _lookahead(table, orbit, w_lo, Direction.ONE_HEAVY, depth) if depth else w_lo
            s2 = _lookahead(table, orbit, w_hi, Direction.LOW_HEAVY, depth) if depth else w_hi
            h1, c1 = hs(s1)
            h2, c2 = hs(s2)
            m = H + S * (h1 + c1 * J1)
            mp = H + S * (h2 + c2 * Jm1)
            if yi.hi <= m.lo:
                choice = -1
                break
            if yi.lo >= mp.hi:
                choice = 1
                break
        if choice is None:
            # seam: the lower branch keeps the bracket whenever y <= m
            seams += 1
            choice = -1
        w = w_lo if choice < 0 else w_hi
        if len(word) + len(w) > digits:
            break
        h, c = hs(w)
        H, S = H + S * h, S * c
        orbit.apply(w)
        word.extend(w)
        choices.append(choice)
    rmin = b2 if b2.lo < b3.lo else b3
    tail = geometric_tail(rmin, len(word))
    return FibrePoint(MapWord(PM, word), H, tail, seams, choices)


def _depths(max_depth: int):
    yield 0
    d = 1
    while d <= max_depth:
        yield d
        d *= 2


# --- the Hare-Sidorov condition -------------------------------------------------------

class HSVerdict(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"


def hs_quantity(b1: RInterval, b2: RInterval) -> RInterval:
    """|(b2^8 - b1^8)/(b2^7 - b1^7)| + |b2^7 b1^7 (b2 - b1)/(b2^7 - b1^7)|."""
    d7 = b2 ** 7 - b1 ** 7
    t1 = abs((b2 ** 8 - b1 ** 8) / d7)
    t2 = abs(b2 ** 7 * b1 ** 7 * (b2 - b1) / d7)
    return t1 + t2


def hare_sidorov(beta1: BetaValue, beta2: BetaValue, max_prec: int = 4096) -> tuple[HSVerdict, RInterval]:
    if beta1.compare(beta2) == 0:
        raise EqualBases("the condition needs two different bases")
    prec = 64
    while prec <= max_prec:
        q = hs_quantity(beta1.enclose(prec), beta2.enclose(prec))
        if q.hi <= 2:
            return HSVerdict.SATISFIED, q
        if q.lo > 2:
            return HSVerdict.VIOLATED, q
        prec *= 2
    raise BoundaryUndecidable("the condition sits on its boundary at the precision cap")
