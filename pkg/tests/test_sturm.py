from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from specgap.diffpoly import ParamPoly, Poly1
from specgap.gapcert import margin, sturmSign
from specgap.sturm import SignVerdict, count_real_roots, count_roots_in, is_nonnegative, square_free_decomposition

X = Poly1.x()


def test_examples():
    assert sturmSign(X**2 + 1) is SignVerdict.POSITIVE_DEFINITE
    assert sturmSign(X**2) is SignVerdict.INDEFINITE
    F = ParamPoly({(2, 0): 4, (0, 1): -4})
    assert sturmSign(F.at(-1)) is SignVerdict.POSITIVE_DEFINITE
    assert sturmSign(Poly1()) is SignVerdict.IDENTICALLY_ZERO
    assert sturmSign(-(X**4) - X - 3) is SignVerdict.NEGATIVE_DEFINITE
    assert sturmSign(X**3 + 1) is SignVerdict.INDEFINITE


def test_float_input_is_exact():
    # 0.1 is not 1/10 in binary; the verdict must follow the float's exact value
    p = [0.1 * 0.1, -0.2, 1.0]  # (x - 0.1)^2 up to rounding
    exact = [Fraction(c) for c in p]
    disc = exact[1] ** 2 - 4 * exact[0] * exact[2]
    expect = SignVerdict.POSITIVE_DEFINITE if disc < 0 else SignVerdict.INDEFINITE
    assert sturmSign(p) is expect


def test_margin_examples():
    assert margin(X**4 + 1) == pytest.approx(1.0)
    F = ParamPoly({(2, 0): 4, (0, 1): -4})
    assert margin(F, -1.0) == pytest.approx(4.0)
    assert margin(X**2 - 1) == pytest.approx(-1.0)
    assert margin(Poly1([Fraction(5, 2)])) == pytest.approx(2.5)
    assert margin(-(X**2) + 1) == -np.inf


def _random_even(rng):
    deg = 2 * int(rng.integers(1, 5))
    c = rng.integers(-9, 10, size=deg + 1).astype(float)
    c[-1] = float(rng.integers(1, 4)) * (1 if rng.random() < 0.8 else -1)
    if rng.random() < 0.5:
        c[0] += float(rng.integers(0, 40))
    return c


RANDOM_SET = [_random_even(np.random.default_rng(s)) for s in range(200)]
XS = np.linspace(-50, 50, 10001)


@pytest.mark.parametrize("idx", range(200))
def test_sign_matches_dense_sampling(idx):
    c = RANDOM_SET[idx]
    verdict = sturmSign(c)
    vals = np.polynomial.polynomial.polyval(XS, c)
    if verdict is SignVerdict.POSITIVE_DEFINITE:
        assert np.all(vals > 0) and c[-1] > 0
    elif verdict is SignVerdict.NEGATIVE_DEFINITE:
        assert np.all(vals < 0) and c[-1] < 0
    else:
        # roots lie inside the Cauchy bound (< 50 here), so a sign change or a zero shows up
        assert np.any(vals <= 0) and np.any(vals >= 0) or np.min(np.abs(vals)) < 1e-6


@pytest.mark.parametrize("idx", range(200))
def test_margin_agrees_with_sturm(idx):
    c = RANDOM_SET[idx]
    assert (margin(Poly1([Fraction(t) for t in c])) > 0) == (sturmSign(c) is SignVerdict.POSITIVE_DEFINITE)


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5, unique=True))
def test_root_count_of_products(roots):
    p = Poly1([1])
    for r in roots:
        p = p * (X - r)
    assert count_real_roots(p) == len(roots)
    assert count_roots_in(p, -7, 7) == len(roots)
    assert count_roots_in(p, Fraction(1, 2), 7) == sum(1 for r in roots if r > Fraction(1, 2))


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=3), st.integers(0, 5))
def test_nonnegative_squares(roots, shift):
    p = Poly1([1])
    for r in roots:
        p = p * (X - r)
    sq = p * p + shift
    assert is_nonnegative(sq)
    assert sturmSign(sq) is (SignVerdict.POSITIVE_DEFINITE if shift else SignVerdict.INDEFINITE)
    assert not is_nonnegative(sq * (X - 7) * (X - 8))


def test_square_free_decomposition():
    p = (X - 1) * (X + 2) ** 2 * (X**2 + 1) ** 3
    parts = square_free_decomposition(p)
    assert parts[0] == [-1, 1]
    assert parts[1] == [2, 1]
    assert parts[2] == [1, 0, 1]
