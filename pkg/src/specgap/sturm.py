"""Exact real-root counting and sign certification for univariate rational polynomials.

Work is done on primitive integer polynomials (ascending coefficient lists),
using pseudo-remainders with sign-corrected positive scaling so the chain is
a valid Sturm sequence.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .diffpoly import Poly1, to_fraction

__all__ = [
    "SignVerdict",
    "sturm_sequence",
    "count_real_roots",
    "count_roots_in",
    "sturm_sign",
    "is_nonnegative",
    "square_free_decomposition",
]


class SignVerdict(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    NEGATIVE_DEFINITE = "NegativeDefinite"
    INDEFINITE = "Indefinite"
    IDENTICALLY_ZERO = "IdenticallyZero"

    @property
    def definite(self) -> bool:
        return self in (SignVerdict.POSITIVE_DEFINITE, SignVerdict.NEGATIVE_DEFINITE)


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def to_int_poly(coeffs: Sequence) -> list[int]:
    """Clear denominators and remove the (positive) content."""
    fr = [to_fraction(c) for c in coeffs]
    fr = _trim(list(fr))
    if not fr:
        return []
    den = 1
    for c in fr:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in fr]
    return _primitive(ints)


def _primitive(p: list[int]) -> list[int]:
    p = _trim(p)
    if not p:
        return p
    g = 0
    for c in p:
        g = gcd(g, c)
    return [c // g for c in p] if g > 1 else p


def _deriv(p: list[int]) -> list[int]:
    return _trim([i * c for i, c in enumerate(p)][1:])


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of a by b: ``lc(b)^(deg a - deg b + 1) a mod b``."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    delta = len(a) - len(b) + 1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        _trim(r)
        delta -= 1
    if delta > 0:
        r = [c * lb**delta for c in r]
    return r


def sturm_sequence(p: Poly1 | Sequence) -> list[list[int]]:
    coeffs = p.coeffs if isinstance(p, Poly1) else p
    p0 = to_int_poly(coeffs)
    if not p0:
        return []
    seq = [p0]
    p1 = _primitive(_deriv(p0))
    if not p1:
        return seq
    seq.append(p1)
    while True:
        a, b = seq[-2], seq[-1]
        if len(b) == 1:
            break
        r = _prem(a, b)
        if not r:
            break
        # prem scales a by lc(b)^(da-db+1); undo any negative factor to keep a Sturm chain
        k = len(a) - len(b) + 1
        if b[-1] < 0 and k % 2 == 1:
            r = [-c for c in r]
        seq.append(_primitive([-c for c in r]))
    return seq


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _variations(signs: list[int]) -> int:
    s = [x for x in signs if x]
    return sum(1 for u, w in zip(s, s[1:]) if u != w)


def _eval(p: list[int], x: Fraction):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def count_real_roots(p: Poly1 | Sequence) -> int:
    """Number of distinct real roots (exact)."""
    seq = sturm_sequence(p)
    if not seq:
        raise ValueError("the zero polynomial has infinitely many roots")
    at_pos = [_sign(q[-1]) for q in seq]
    at_neg = [_sign(q[-1]) * (-1) ** (len(q) - 1) for q in seq]
    return _variations(at_neg) - _variations(at_pos)


def count_roots_in(p: Poly1 | Sequence, lo, hi) -> int:
    """Distinct real roots in the half-open interval (lo, hi]."""
    seq = sturm_sequence(p)
    lo, hi = to_fraction(lo), to_fraction(hi)
    return _variations([_sign(_eval(q, lo)) for q in seq]) - _variations([_sign(_eval(q, hi)) for q in seq])


def sturm_sign(p: Poly1 | Sequence) -> SignVerdict:
    """Strict sign verdict on the whole real line.

    Any real root (even a touching double root) makes the verdict Indefinite.
    Float coefficients are converted exactly to rationals first.
    """
    coeffs = p.coeffs if isinstance(p, Poly1) else p
    ip = to_int_poly(coeffs)
    if not ip:
        return SignVerdict.IDENTICALLY_ZERO
    if len(ip) == 1:
        return SignVerdict.POSITIVE_DEFINITE if ip[0] > 0 else SignVerdict.NEGATIVE_DEFINITE
    if (len(ip) - 1) % 2 == 1:
        return SignVerdict.INDEFINITE
    if count_real_roots(ip) > 0:
        return SignVerdict.INDEFINITE
    return SignVerdict.POSITIVE_DEFINITE if ip[-1] > 0 else SignVerdict.NEGATIVE_DEFINITE


def _fdivmod(a: list[Fraction], b: list[Fraction]):
    r = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    for i in range(len(q) - 1, -1, -1):
        c = r[i + len(b) - 1] / b[-1]
        q[i] = c
        for j, bc in enumerate(b):
            r[i + j] -= c * bc
    return _trim(q), _trim(r[: len(b) - 1])


def _fmonic(a: list[Fraction]) -> list[Fraction]:
    return [c / a[-1] for c in a] if a else a


def _fgcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _fdivmod(a, b)[1]
    return _fmonic(a)


def _fderiv(a: list[Fraction]) -> list[Fraction]:
    return _trim([i * c for i, c in enumerate(a)][1:])


def _fsub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def square_free_decomposition(p: Poly1 | Sequence) -> list[list[int]]:
    """Yun's algorithm: ``[f1, f2, ...]`` with ``p = c * f1 f2^2 f3^3 ...`` (primitive parts)."""
    coeffs = p.coeffs if isinstance(p, Poly1) else p
    f = _fmonic(_trim([to_fraction(c) for c in coeffs]))
    if len(f) <= 1:
        return []
    df = _fderiv(f)
    g = _fgcd(f, df)
    b = _fdivmod(f, g)[0]
    c = _fdivmod(df, g)[0]
    d = _fsub(c, _fderiv(b))
    out = []
    while len(b) > 1:
        a_ = _fgcd(b, d)
        out.append(to_int_poly(a_))
        b = _fdivmod(b, a_)[0]
        c = _fdivmod(d, a_)[0]
        d = _fsub(c, _fderiv(b))
    return out


def is_nonnegative(p: Poly1 | Sequence) -> bool:
    """``p(x) >= 0`` for every real x (touching zeros allowed)."""
    coeffs = p.coeffs if isinstance(p, Poly1) else p
    ip = to_int_poly(coeffs)
    if not ip:
        return True
    if ip[-1] < 0 or (len(ip) - 1) % 2:
        return False
    if len(ip) == 1:
        return True
    for mult, factor in enumerate(square_free_decomposition(ip), start=1):
        if mult % 2 == 1 and len(factor) > 1 and count_real_roots(factor) > 0:
            return False
    return True
