"""Dense univariate polynomials with rational coefficients.

A polynomial is a tuple of coefficients, lowest degree first, with no
trailing zeros (the zero polynomial is the empty tuple).
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from ..errors import DomainError

Poly = tuple


def norm(p) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def deg(p: Poly) -> int:
    return len(p) - 1


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return norm((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def sub(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return norm((p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n))


def scale(p: Poly, c) -> Poly:
    return norm(c * a for a in p)


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return norm(out)


def shift(p: Poly, k: int) -> Poly:
    """Multiply by x**k."""
    return norm((0,) * k + tuple(p)) if p else ()


def divmod_poly(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(a) for a in p]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    if len(r) <= dq:
        return (), norm(r)
    quot = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1, dq - 1, -1):
        c = r[k] / lead
        if c:
            quot[k - dq] = c
            for j in range(dq + 1):
                r[k - dq + j] -= c * q[j]
    return norm(quot), norm(r[:dq])


def rem(p: Poly, q: Poly) -> Poly:
    if len(p) < len(q):
        return norm(p)
    if q[-1] in (1, -1) and all(isinstance(a, int) for a in p) and all(isinstance(a, int) for a in q):
        # monic integer divisor: stay in the integers
        r = list(p)
        s = q[-1]
        dq = len(q) - 1
        for k in range(len(r) - 1, dq - 1, -1):
            c = r[k] * s
            if c:
                for j in range(dq + 1):
                    r[k - dq + j] -= c * q[j]
        return norm(r[:dq])
    return divmod_poly(p, q)[1]


def monic(p: Poly) -> Poly:
    lead = Fraction(p[-1])
    return tuple(Fraction(a) / lead for a in p)


def gcd(p: Poly, q: Poly) -> Poly:
    p, q = norm(p), norm(q)
    while q:
        p, q = q, rem(p, q)
    return monic(p) if p else ()


def derivative(p: Poly) -> Poly:
    return norm(i * a for i, a in enumerate(p) if i > 0)


def primitive(p: Poly) -> Poly:
    """Scale to coprime integer coefficients with positive leading term."""
    if not p:
        return ()
    fr = [Fraction(a) for a in p]
    den = math.lcm(*(f.denominator for f in fr))
    ints = [int(f * den) for f in fr]
    g = math.gcd(*ints)
    ints = [a // g for a in ints]
    if ints[-1] < 0:
        ints = [-a for a in ints]
    return tuple(ints)


def squarefree(p: Poly) -> Poly:
    g = gcd(p, derivative(p))
    if len(g) <= 1:
        return primitive(p)
    return primitive(divmod_poly(p, g)[0])


def eval_exact(p: Poly, x) -> Fraction:
    acc = Fraction(0)
    for a in reversed(p):
        acc = acc * x + a
    return acc


def sign_exact(p: Poly, x) -> int:
    v = eval_exact(p, x)
    return (v > 0) - (v < 0)


def eval_interval(p: Poly, x):
    """Horner evaluation on an RInterval (or anything with the same arithmetic)."""
    if not p:
        return x * 0
    acc = x * 0 + p[-1]
    for a in reversed(p[:-1]):
        acc = acc * x + a
    return acc


def sign_changes(p: Poly) -> int:
    """Sign changes in the coefficient sequence (Descartes' bound on positive roots)."""
    signs = [1 if c > 0 else -1 for c in p if c]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(p: Poly, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of p in the half-open interval (a, b]."""
    p = norm(p)
    seq = [p, derivative(p)]
    while seq[-1] and len(seq[-1]) > 1:
        r = rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append(scale(r, -1))

    def changes(x):
        signs = [s for s in (sign_exact(q, x) for q in seq) if s]
        return sum(1 for u, v in zip(signs, signs[1:]) if u != v)

    return changes(a) - changes(b)


_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*(x(?:\s*\^\s*(\d+))?)?")


def parse(text: str, var: str = "x") -> Poly:
    """Parse an integer polynomial such as ``x^3 - x^2 - 1``."""
    s = text.replace(" ", "").replace("**", "^").replace(var, "x")
    if not s:
        raise DomainError("empty polynomial")
    coeffs: dict[int, Fraction] = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse polynomial {text!r} near {s[pos:]!r}")
        sign, num, xpart, power = m.groups()
        if num is None and xpart is None:
            raise DomainError(f"cannot parse polynomial {text!r} near {s[pos:]!r}")
        c = Fraction(num) if num else Fraction(1)
        if sign == "-":
            c = -c
        k = 0 if xpart is None else (int(power) if power else 1)
        coeffs[k] = coeffs.get(k, 0) + c
        pos = m.end()
    top = max(coeffs)
    return norm(coeffs.get(i, 0) for i in range(top + 1))


def to_string(p: Poly, var: str = "x") -> str:
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        mag = abs(c)
        body = "" if (mag == 1 and k) else str(mag)
        if k:
            body += var if k == 1 else f"{var}^{k}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sgn, body in terms[1:]:
        out += f"{sgn}{body}"
    return out
