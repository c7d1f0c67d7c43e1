import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from specgap import kernels
from specgap.kernels import _pykernels as py

cy = pytest.importorskip("specgap.kernels._ckernels")


def test_backend_switch():
    env = dict(os.environ, SPECGAP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import specgap.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("cython", "python")


def _tridiag(M=300):
    h = 16.0 / M
    x = np.linspace(-8, 8, M + 1)[1:-1]
    d = np.ascontiguousarray(1.0 / h**2 + 0.5 * x**2)
    e2 = np.full(M - 2, 1.0 / (4.0 * h**4))
    return d, e2


def test_tridiag_agree():
    d, e2 = _tridiag()
    for x in (0.3, 2.0, 7.7):
        assert py.tridiag_count(d, e2, x) == cy.tridiag_count(d, e2, x)
    assert py.tridiag_bisect(d, e2, 2, 0.0, 10.0, 1e-12) == pytest.approx(cy.tridiag_bisect(d, e2, 2, 0.0, 10.0, 1e-12), abs=1e-11)


def test_numerov_agree():
    M = 2000
    x = np.linspace(-6, 6, M + 1)
    f = np.ascontiguousarray(2 * (0.5 * x**2 - 1.7))
    h = 12.0 / M
    assert py.numerov_nodes(f, h) == cy.numerov_nodes(f, h)
    assert np.allclose(py.numerov_match(f, h, M // 2), cy.numerov_match(f, h, M // 2), rtol=1e-10)


def test_rk4_agree():
    vc = np.array([0.0, 0.0, 0.5])
    a = py.rk4(vc, 0.5, 0.0, 1.0, 0.0, 1e-2, 300, 1e200)
    b = cy.rk4(vc, 0.5, 0.0, 1.0, 0.0, 1e-2, 300, 1e200)
    assert a[2] == b[2]
    assert np.allclose(a[0], b[0], rtol=1e-12) and np.allclose(a[1], b[1], rtol=1e-12)


finite = st.floats(-20, 20, allow_nan=False)


@given(arrays(np.float64, st.integers(3, 9), elements=finite), st.floats(0.5, 5))
def test_crit_extrema_agree(c, lead):
    c = np.ascontiguousarray(np.append(c[:-1], lead))
    a, b = py.crit_extrema(c), cy.crit_extrema(c)
    assert np.allclose(a, b, rtol=1e-8, atol=1e-8)


def test_crit_extrema_needs_degree_two():
    for k in (py, cy):
        with pytest.raises(ValueError):
            k.crit_extrema(np.array([1.0, 2.0]))


@given(arrays(np.float64, 5, elements=st.floats(-5, 5)), st.floats(0.1, 3))
def test_crit_extrema_against_dense_grid(c, lead):
    # positive leading quartic: global minimum is a critical value
    c = np.ascontiguousarray(np.append(c[:4], lead))
    lo, _ = cy.crit_extrema(c)
    xs = np.linspace(-20, 20, 200001)
    assert lo <= np.polynomial.polynomial.polyval(xs, c).min() + 1e-9
