"""Hand-transcribed reference expressions for F_1..F_4 (V-form) and A_1..A_4 (v-form).

Written out term by term, independent of the printer and of the ladder code.
"""
from fractions import Fraction as Fr

from specgap.diffpoly import a, sym, v

W = sym("W")  # V - E


def dV(k):
    return sym("V", 0, k)


def _F():
    a0 = lambda k=0: a(0, k)  # noqa: E731
    return {
        1: -a0(2) + 2 * W * a0(),
        2: Fr(1, 2) * a0(3) - 4 * W * a0(1) - 2 * dV(1) * a0(),
        3: (Fr(-1, 6) * a0(4) + Fr(10, 3) * W * a0(2) + Fr(10, 3) * dV(1) * a0(1)
            + (dV(2) - 6 * W**2) * a0()),
        4: (Fr(1, 24) * a0(5) - Fr(5, 3) * W * a0(3) - Fr(5, 2) * dV(1) * a0(2)
            + (Fr(-3, 2) * dV(2) + Fr(32, 3) * W**2) * a0(1)
            + (Fr(-1, 3) * dV(3) + Fr(32, 3) * dV(1) * W) * a0()),
    }


def _A():
    return {
        1: -a(0, 1) + a(1),
        2: Fr(1, 2) * a(0, 2) - v() * a(0) - Fr(1, 2) * a(1, 1) + a(2),
        3: (Fr(-1, 6) * a(0, 3) + Fr(7, 6) * v() * a(0, 1) + Fr(2, 3) * v(1) * a(0) + Fr(1, 6) * a(1, 2)
            - Fr(1, 2) * v() * a(1) - Fr(1, 3) * a(2, 1) + a(3)),
        4: (Fr(1, 24) * a(0, 4) - Fr(2, 3) * v() * a(0, 2) - Fr(3, 4) * v(1) * a(0, 1)
            - (Fr(1, 4) * v(2) - v() ** 2) * a(0) - Fr(1, 24) * a(1, 3) + Fr(5, 12) * v() * a(1, 1)
            + Fr(1, 4) * v(1) * a(1) + Fr(1, 12) * a(2, 2) - Fr(1, 3) * v() * a(2) - Fr(1, 4) * a(3, 1) + a(4)),
    }


F_REFERENCE = _F()
A_REFERENCE = _A()
