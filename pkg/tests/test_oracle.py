import math

import numpy as np
import pytest

from specgap.oracle import _fd_levels, divergenceCheck, eigensolveFD, eigensolveShoot, odeSolve
from specgap.parse import parse_poly1

HARM = parse_poly1("1/2*x^2")
QUART = parse_poly1("x^4")
DWELL = parse_poly1("x^4-2*x^2")


def test_fd_harmonic():
    sp = eigensolveFD(HARM, 12, 4000, 6)
    assert sp.method == "FiniteDifference"
    assert np.allclose(sp.values, [n + 0.5 for n in range(6)], atol=1e-6)
    assert sp.values == sorted(sp.values)
    assert all(c >= 0 for c in sp.conv)


def test_fd_particle_in_box():
    L = 1.0
    sp = eigensolveFD(parse_poly1("0"), L, 4000, 3)
    for n, e in enumerate(sp.values, start=1):
        assert e == pytest.approx(n * n * math.pi**2 / (8 * L * L), abs=1e-6)


def test_fd_rejects_bad_grid():
    with pytest.raises(ValueError):
        eigensolveFD(HARM, 8, 50, 2)


def test_fd_second_order_convergence():
    L = 8.0
    e1, e2, e3 = (_fd_levels(QUART, L, M, 3) for M in (500, 1000, 2000))
    ratios = (e1 - e2) / (e2 - e3)
    assert np.all(np.abs(ratios - 4.0) < 0.1)


def test_shoot_harmonic():
    sp = eigensolveShoot(HARM, None, 6)
    assert np.allclose(sp.values, [n + 0.5 for n in range(6)], atol=1e-8)
    assert [e.nodeCount for e in sp.eigenvalues] == list(range(6))


def test_shoot_empty():
    assert len(eigensolveShoot(HARM, None, 0)) == 0


@pytest.mark.parametrize("V", [HARM, QUART, DWELL], ids=["harmonic", "quartic", "double-well"])
def test_methods_agree(V):
    fd = eigensolveFD(V, None, 4000, 4).values
    sh = eigensolveShoot(V, None, 4).values
    assert np.allclose(fd, sh, atol=1e-5)


def test_quartic_cross_method_L8():
    fd = eigensolveFD(QUART, 8, 4000, 4).values
    sh = eigensolveShoot(QUART, 8, 4).values
    assert np.allclose(fd, sh, atol=1e-6)


def test_double_well_pair():
    sh = eigensolveShoot(DWELL, None, 2).values
    assert 0 < sh[1] - sh[0] < 1


@pytest.mark.parametrize("V", [HARM, QUART, DWELL], ids=["harmonic", "quartic", "double-well"])
def test_domain_robustness(V):
    base = eigensolveShoot(V, None, 4)
    wider = eigensolveShoot(V, base.L + 2, 4)
    assert np.allclose(base.values, wider.values, atol=1e-8)


def test_rk4_sine():
    tr = odeSolve(parse_poly1("0"), 0.5, 0.0, 0.0, 1.0, math.pi, 1e-3)
    assert np.max(np.abs(tr.phi - np.sin(tr.x))) <= 1e-8
    assert not tr.truncated
    assert np.allclose(np.diff(tr.x), tr.h)


def test_rk4_gaussian():
    tr = odeSolve(HARM, 0.5, 0.0, 1.0, 0.0, 3.0, 1e-3)
    assert np.max(np.abs(tr.phi - np.exp(-tr.x**2 / 2))) <= 1e-6


def test_rk4_zero_data():
    tr = odeSolve(QUART, 1.0, -1.0, 0.0, 0.0, 1.0, 1e-2)
    assert np.all(tr.phi == 0) and np.all(tr.dphi == 0)


def test_rk4_backwards():
    tr = odeSolve(parse_poly1("0"), 0.5, 0.0, 0.0, 1.0, -1.0, 1e-3)
    assert tr.x[-1] == pytest.approx(-1.0)
    assert np.max(np.abs(tr.phi - np.sin(tr.x))) <= 1e-8


def test_rk4_overflow_truncates():
    tr = odeSolve(QUART, 0.0, 0.0, 1.0, 1.0, 40.0, 1e-2, limit=1e100)
    assert tr.truncated
    assert np.all(np.isfinite(tr.phi))


@pytest.mark.parametrize(
    "N,a0,V,E,rng",
    [(2, "1", "1/2*x^2", 1.3, (-3, 3)), (4, "x^3-x", "x^4", 0.7, (-1.5, 1.5))],
)
def test_divergence_second_order(N, a0, V, E, rng):
    r1 = divergenceCheck(N, parse_poly1(a0), parse_poly1(V), E, rng, 1e-3)
    r2 = divergenceCheck(N, parse_poly1(a0), parse_poly1(V), E, rng, 5e-4)
    assert r1.relative <= 1e-5
    assert 3.5 <= r1.relative / r2.relative <= 4.5


def test_divergence_zero_a0():
    r = divergenceCheck(2, parse_poly1("0"), HARM, 1.3, (-3, 3), 1e-3)
    assert r.residual == 0.0
