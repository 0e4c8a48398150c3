"""Reference computations that do not use the package.

Exact big-integer arithmetic or mpmath at generous precision; slow but
simple enough to trust.
"""

from fractions import Fraction
from itertools import product

import gmpy2
import mpmath
from gmpy2 import mpz


# --- orbit residual ------------------------------------------------------------
#
# For digits e_1..e_N the quantity y_n = beta^n (x - sum_{i<=n} e_i beta^-i)
# satisfies y_{n-1} = (y_n + e_n)/beta.  Both inverse maps send
# [-1/(beta-1), 1/(beta-1)] into itself, so |y_N| <= 1/(beta-1) gives the same
# bound at every n <= N.  The oracles therefore evaluate y_N exactly.

def _split_rational(digits, p, q, lo, hi):
    """(sum_{i=lo+1..hi} e_i p^(hi-i) q^(i-lo), p^(hi-lo), q^(hi-lo))."""
    if hi - lo == 1:
        return mpz(digits[lo]) * q, mpz(p), mpz(q)
    mid = (lo + hi) // 2
    wl, pl, ql = _split_rational(digits, p, q, lo, mid)
    wr, pr, qr = _split_rational(digits, p, q, mid, hi)
    return wl * pr + ql * wr, pl * pr, ql * qr


def residual_rational(digits, beta: Fraction, x: Fraction) -> Fraction:
    """Exact y_N for a rational base."""
    p, q = beta.numerator, beta.denominator
    if not digits:
        return x
    w, pn, qn = _split_rational(list(digits), p, q, 0, len(digits))
    # q^N y_N = p^N x - w
    num = x.numerator * pn - x.denominator * w
    return Fraction(int(num), int(x.denominator * qn))


def partial_sums_ok_rational(digits, beta: Fraction, x: Fraction) -> bool:
    y = residual_rational(digits, beta, x)
    return abs(y) * (beta - 1) <= 1


# Z[b] with b^3 = b^2 + 1, elements as (c0, c1, c2)
def _zmul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    c = [a0 * b0, a0 * b1 + a1 * b0, a0 * b2 + a1 * b1 + a2 * b0, a1 * b2 + a2 * b1, a2 * b2]
    # b^4 = b^3 + b = b^2 + b + 1, b^3 = b^2 + 1
    c0, c1, c2 = c[0], c[1], c[2]
    c0 += c[4] + c[3]
    c1 += c[4]
    c2 += c[4] + c[3]
    return (c0, c1, c2)


def _zadd(a, b):
    return tuple(u + v for u, v in zip(a, b))


_B = (mpz(0), mpz(1), mpz(0))


def _split_star(digits, lo, hi):
    """(sum_{i=lo+1..hi} e_i b^(hi-i), b^(hi-lo))."""
    if hi - lo == 1:
        return (mpz(digits[lo]), mpz(0), mpz(0)), _B
    mid = (lo + hi) // 2
    vl, pl = _split_star(digits, lo, mid)
    vr, pr = _split_star(digits, mid, hi)
    return _zadd(_zmul(vl, pr), vr), _zmul(pl, pr)


def beta_star_mp(prec_bits: int):
    with mpmath.workprec(prec_bits):
        return mpmath.findroot(lambda t: t ** 3 - t ** 2 - 1, mpmath.mpf("1.4655712318767680267"))


def residual_beta_star(digits, x: Fraction) -> float:
    """y_N for the root of x^3 - x^2 - 1, via exact Z[b] coordinates."""
    v, pw = _split_star(list(digits), 0, len(digits))
    a, d = x.numerator, x.denominator
    # d y_N = a b^N - d v
    e = tuple(a * s - d * t for s, t in zip(pw, v))
    bits = max(int(abs(c)).bit_length() for c in e) + 96
    with mpmath.workprec(bits):
        b = beta_star_mp(bits)
        val = (mpmath.mpf(int(e[0])) + mpmath.mpf(int(e[1])) * b + mpmath.mpf(int(e[2])) * b * b) / d
        return float(val)


def partial_sums_ok_beta_star(digits, x: Fraction) -> bool:
    y = residual_beta_star(digits, x)
    b = 1.4655712318767680267
    return abs(y) <= 1 / (b - 1) + 1e-12


# --- values of words -----------------------------------------------------------

def affine_value(word, beta2, beta3, dps: int = 60):
    """sum_i w_i / prod_{j<=i} b_{w_j}, with b_{-1} = beta2 and b_1 = beta3."""
    with mpmath.workdps(dps):
        b2 = mpmath.mpf(beta2.numerator) / beta2.denominator
        b3 = mpmath.mpf(beta3.numerator) / beta3.denominator
        s, scale = mpmath.mpf(0), mpmath.mpf(1)
        for d in word:
            scale /= b2 if d < 0 else b3
            s += d * scale
        return s


def word_value(word, beta, dps: int = 60):
    with mpmath.workdps(dps):
        b = mpmath.mpf(beta)
        return mpmath.fsum(d * b ** -(i + 1) for i, d in enumerate(word))


# --- Thue-Morse and friends ------------------------------------------------------

def thue_morse_bits(n: int):
    return [bin(i).count("1") % 2 for i in range(n)]


def komornik_loreti_mp(dps: int = 40):
    """Root of sum_{i>=1} t_i b^-i = 1 with t the shifted Thue-Morse sequence."""
    with mpmath.workdps(dps + 10):
        t = thue_morse_bits(4 * dps + 400)[1:]

        def f(b):
            return mpmath.fsum(ti * b ** -(i + 1) for i, ti in enumerate(t)) - 1

        return mpmath.findroot(f, mpmath.mpf("1.787"))


def multinacci_mp(n: int, dps: int = 50):
    with mpmath.workdps(dps):
        return mpmath.findroot(lambda t: t ** (n + 1) - sum(t ** j for j in range(n + 1)), mpmath.mpf(2) - mpmath.mpf(2) ** -n)


def quasi_greedy_ok(seq, beta, dps: int = 50) -> bool:
    """Characterisation of the quasi-greedy expansion of 1, checked on a periodic word.

    A periodic 0-1 sequence with infinitely many ones is the quasi-greedy
    expansion of 1 iff its value is 1 and no shift of it exceeds it.
    """
    seq = tuple(seq)
    for k in range(1, len(seq)):
        rot = seq[k:] + seq[:k]
        if rot > seq:
            return False
    with mpmath.workdps(dps):
        b = mpmath.mpf(beta)
        n = len(seq)
        block = mpmath.fsum(d * b ** -(i + 1) for i, d in enumerate(seq))
        val = block / (1 - b ** -n)
        return abs(val - 1) < mpmath.mpf(10) ** (-dps + 10)


def heavy_word_count(n: int) -> int:
    return sum(1 for w in product((0, 1), repeat=n) if 2 * sum(w) > n and sum(w) < n)


def interval_endpoint(v) -> Fraction:
    """Exact rational value of an mpfr endpoint."""
    return Fraction(*gmpy2.mpq(v).as_integer_ratio())


def enclosed(iv, ref, dps: int = 80) -> bool:
    """ref (an mpf computed at dps digits) lies in iv up to 10^-(dps - 10)."""
    with mpmath.workdps(dps):
        lo, hi = interval_endpoint(iv.lo), interval_endpoint(iv.hi)
        slack = mpmath.mpf(10) ** (-(dps - 10))
        lo = mpmath.mpf(lo.numerator) / lo.denominator
        hi = mpmath.mpf(hi.numerator) / hi.denominator
        return lo - slack <= ref <= hi + slack
