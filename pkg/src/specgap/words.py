"""Word combinatorics for ``R^N D Pi_n``.

``R = Pi_N + A + B`` with ``A = -S^- L_a d/dx`` and ``B = -(S^-)^2 L_b v``.
Expanding ``R^N`` gives a sum over words in the letters A, B; each word
equals ``L_w (S^-)^(|l| + 2|m|)`` for a diagonal ``L_w`` whose last entry is
``alpha_{w,N} d^l1 v^m1 d^l2 v^m2 ...``.  The coefficient is computed two ways
(rotated diagonal products, and the double-factorial closed form) and the
two are compared.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial

from .diffpoly import DiffPoly, a as asym, v as vsym
from .ladder import (
    OpVector,
    apply_D,
    apply_R_power,
    diag_a,
    diag_b,
    rotate_diag,
    s_minus,
)

__all__ = [
    "Word",
    "double_factorial",
    "enumerate_words",
    "lambda_direct",
    "alpha_closed_form",
    "apply_word_operator",
    "apply_word_matrix",
    "word_expansion",
    "WordExpansion",
    "direct_kernel",
    "alpha_table",
]


def double_factorial(n: int) -> int:
    """``n!!`` via ``2^p p!`` (n = 2p) or ``(2p+1)! / (2^p p!)`` (n = 2p+1); ``(-1)!! = 1``."""
    if n == -1:
        return 1
    if n < 0:
        raise ValueError("double factorial undefined below -1")
    p, odd = divmod(n, 2)
    if not odd:
        return 2**p * factorial(p)
    return factorial(2 * p + 1) // (2**p * factorial(p))


@dataclass(frozen=True)
class Word:
    """A word ``A^l1 B^m1 A^l2 B^m2 ...`` stored as its letter string."""

    letters: str

    def __post_init__(self):
        if set(self.letters) - {"A", "B"}:
            raise ValueError("letters must be A or B")

    @property
    def blocks(self) -> tuple:
        """``((l1, m1), (l2, m2), ...)``; l1 may be 0, the last m may be 0."""
        out = []
        i, s = 0, self.letters
        while i < len(s):
            l = 0
            while i < len(s) and s[i] == "A":
                l += 1
                i += 1
            m = 0
            while i < len(s) and s[i] == "B":
                m += 1
                i += 1
            out.append((l, m))
        return tuple(out)

    @property
    def l(self) -> tuple:
        return tuple(b[0] for b in self.blocks)

    @property
    def m(self) -> tuple:
        ms = [b[1] for b in self.blocks]
        while ms and ms[-1] == 0:
            ms.pop()
        return tuple(ms)

    def __len__(self):
        return len(self.letters)

    @property
    def shift(self) -> int:
        """Total lowering ``|l| + 2|m|``."""
        return self.letters.count("A") + 2 * self.letters.count("B")

    def __str__(self):
        return self.letters or "1"


def enumerate_words(max_len: int) -> list[Word]:
    """All words of length 0..max_len, ordered by (length, l, m)."""
    words = [Word("".join(t)) for k in range(max_len + 1) for t in product("AB", repeat=k)]
    return sorted(words, key=lambda w: (len(w), w.l, w.m))


def lambda_direct(w: Word, N: int) -> Fraction:
    """Numeric part of ``(L_w)_{N,N}`` from products of rotated diagonals."""
    la, lb = diag_a(N), diag_b(N)
    coeff = Fraction(1)
    s = 0
    for letter in w.letters:
        if letter == "A":
            s += 1
            entry = rotate_diag(la, -s).entries[N]
        else:
            s += 2
            entry = rotate_diag(lb, -s).entries[N]
        coeff *= -_numeric(entry)
    return coeff


def _numeric(p: DiffPoly) -> Fraction:
    terms = p.terms
    if set(terms) - {()}:
        raise ValueError("diagonal entry is not numeric")
    return terms.get((), Fraction(0))


def alpha_closed_form(w: Word, N: int) -> Fraction | None:
    """Double-factorial closed form of the word coefficient.

    Only defined when the word's total lowering does not exceed N; returns
    None otherwise (such words annihilate every vector anyway).
    """
    if w.shift > N:
        return None
    alpha = Fraction((-1) ** len(w))
    t = 0
    for l, m in w.blocks:
        alpha *= Fraction(factorial(N - t - l), factorial(N - t))
        t += l
        alpha *= Fraction(double_factorial(t + 2 * m - 1), double_factorial(t - 1))
        alpha *= Fraction(double_factorial(N - t - 2 * m - 1), double_factorial(N - t - 1))
        t += 2 * m
    return alpha


def apply_word_operator(w: Word, f: DiffPoly) -> DiffPoly:
    """``d^l1 v^m1 d^l2 v^m2 ... f`` (composition, innermost block last)."""
    vv = vsym()
    for l, m in reversed(w.blocks):
        if m:
            f = (vv**m) * f
        for _ in range(l):
            f = f.derive()
    return f


def apply_word_matrix(w: Word, a: OpVector) -> OpVector:
    """Apply the letters as explicit operators on a vector (rightmost letter first)."""
    N = a.N
    la, lb = diag_a(N), diag_b(N)
    vv = vsym()
    for letter in reversed(w.letters):
        if letter == "A":
            a = s_minus(la(OpVector(tuple(c.derive() for c in a)))).scale(-1)
        else:
            a = s_minus(s_minus(lb(OpVector(tuple(vv * c for c in a))))).scale(-1)
    return a


@dataclass
class WordExpansion:
    N: int
    n: int
    value: DiffPoly
    value_alpha: DiffPoly
    contributing: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.mismatches and self.value == self.value_alpha


def word_expansion(N: int, n: int) -> WordExpansion:
    """Evaluate ``(R^N D Pi_n a)_N`` as the word sum with ``a_n`` a formal symbol.

    Only words whose lowering matches one of the three Kronecker terms contribute.
    Mismatches between the two coefficient routes are collected, not raised.
    """
    if not 1 <= n <= N:
        raise ValueError("need 1 <= n <= N")
    an = asym(n)
    vv = vsym()
    value = DiffPoly()
    value_alpha = DiffPoly()
    contributing, mismatches = [], []
    for w in enumerate_words(N):
        s = w.shift
        seed = DiffPoly()
        if N - s + 1 == n:
            seed = seed + an * n
        if N - s == n:
            seed = seed + an.derive()
        if N - s - 1 == n:
            seed = seed + vv * an * (N - n)
        if seed.is_zero():
            continue
        direct = lambda_direct(w, N)
        alpha = alpha_closed_form(w, N)
        if alpha != direct:
            mismatches.append({"word": str(w), "l": w.l, "m": w.m, "direct": direct, "alpha": alpha})
        body = apply_word_operator(w, seed)
        contributing.append(str(w))
        value = value + body * direct
        if alpha is not None:
            value_alpha = value_alpha + body * alpha
    return WordExpansion(N, n, value, value_alpha, contributing, mismatches)


def direct_kernel(N: int, n: int) -> DiffPoly:
    """Oracle for :func:`word_expansion`: apply R and D as matrices."""
    return apply_R_power(apply_D(OpVector.unit(N, n, asym(n))), N)[N]


def alpha_table(max_len: int, N: int) -> list[dict]:
    """Compare both coefficient routes on every word up to ``max_len`` letters."""
    rows = []
    for w in enumerate_words(max_len):
        alpha = alpha_closed_form(w, N)
        direct = lambda_direct(w, N)
        rows.append(
            {
                "word": str(w),
                "l": w.l,
                "m": w.m,
                "shift": w.shift,
                "direct": direct,
                "alpha": alpha,
                "relevant": w.shift <= N,
                "agree": alpha is None or alpha == direct,
            }
        )
    return rows
