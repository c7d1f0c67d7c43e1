import pytest

from specgap.words import (
    Word,
    alpha_closed_form,
    alpha_table,
    direct_kernel,
    double_factorial,
    enumerate_words,
    lambda_direct,
    word_expansion,
)


@pytest.mark.parametrize("n,expected", [(0, 1), (1, 1), (5, 15), (6, 48), (7, 105), (-1, 1)])
def test_double_factorial(n, expected):
    assert double_factorial(n) == expected


def test_double_factorial_rejects_below_minus_one():
    with pytest.raises(ValueError):
        double_factorial(-2)


def test_empty_word_is_identity():
    w = Word("")
    assert w.shift == 0
    for N in range(1, 6):
        assert alpha_closed_form(w, N) == 1
        assert lambda_direct(w, N) == 1


def test_blocks():
    w = Word("AABAB")
    assert w.blocks == ((2, 1), (1, 1))
    assert w.l == (2, 1) and w.m == (1, 1)
    assert Word("BBA").blocks == ((0, 2), (1, 0))


def test_enumeration_order():
    ws = enumerate_words(2)
    assert [str(w) for w in ws][:3] == ["1", "B", "A"]
    assert len(ws) == 1 + 2 + 4


@pytest.mark.parametrize("N", range(1, 7))
def test_alpha_agrees_with_diagonal_products(N):
    rows = alpha_table(4, N)
    assert all(r["agree"] for r in rows), [r for r in rows if not r["agree"]]


@pytest.mark.parametrize("N,n", [(N, n) for N in range(1, 5) for n in range(1, N + 1)])
def test_word_expansion_matches_direct(N, n):
    we = word_expansion(N, n)
    assert we.consistent
    assert we.value == direct_kernel(N, n)
