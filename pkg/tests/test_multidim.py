import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from specgap.multidim import (
    H0Family,
    PolyD,
    UnboundedRegionError,
    buildF2d,
    buildH0,
    checkConstraints,
    constraintNullspace,
    criticalReduction,
    nullResult2d,
)
from specgap.parse import parse_polyd


def X(mu, d):
    return PolyD.var(mu, d)


def iso(d):
    return sum((X(m, d) ** 2 for m in range(d)), PolyD({}, d)) * Fraction(1, 2)


def product_quartic(d):
    return sum(((X(m, d) ** 2 - 1) ** 2 for m in range(d)), PolyD({}, d))


def test_polyd_algebra():
    p = parse_polyd("x1^2*x2 - 3*x3 + 1/2", 3)
    assert p.diff(0) == parse_polyd("2*x1*x2", 3)
    assert p.laplacian() == parse_polyd("2*x2", 3)
    assert p.degree == 3
    assert (p - p).is_zero()
    assert p(1, 2, 3) == Fraction(1 * 2 - 9) + Fraction(1, 2)
    assert p.evalf(1.0, 2.0, 3.0) == pytest.approx(-6.5)


def test_buildH0_examples():
    h = buildH0(H0Family.zero(3, k=1))
    assert h == [X(0, 3), X(1, 3), X(2, 3)]
    h = buildH0(H0Family.zero(2, A=((0, 1), (-1, 0))))
    assert h == [X(1, 2), -X(0, 2)]
    h = buildH0(H0Family.zero(3, l=(1, 0, 0)))
    r2 = iso(3) * 2
    assert h[0] == r2 * Fraction(-1, 2) + X(0, 3) ** 2
    assert h[1] == X(0, 3) * X(1, 3)
    assert h[2] == X(0, 3) * X(2, 3)
    assert checkConstraints(h)


def test_buildH0_rejects_non_antisymmetric():
    with pytest.raises(ValueError):
        buildH0(H0Family.zero(2, A=((0, 1), (1, 0))))


def test_check_constraints_examples():
    assert checkConstraints([X(0, 2), X(1, 2)])
    assert not checkConstraints([X(0, 3) ** 3, PolyD({}, 3), PolyD({}, 3)])


@pytest.mark.parametrize("d", [3, 4, 5])
def test_random_families_satisfy_constraints(d):
    rng = random.Random(d)
    P = H0Family.parameter_count(d)
    for _ in range(100):
        fam = H0Family.from_vector(d, [Fraction(rng.randint(-20, 20), rng.randint(1, 7)) for _ in range(P)])
        assert checkConstraints(buildH0(fam))


def test_parameter_count():
    assert [H0Family.parameter_count(d) for d in (3, 4, 5, 6)] == [10, 15, 21, 28]


@pytest.mark.parametrize("d,max_deg", [(d, m) for d in (3, 4, 5, 6) for m in (2, 3, 4) if not (d == 6 and m == 4)])
def test_nullspace_saturates(d, max_deg):
    res = constraintNullspace(d, max_deg)
    assert res.dimension == (d * d + 3 * d + 2) // 2
    assert res.max_basis_degree <= 2
    assert res.all_satisfy


def test_nullspace_spanned_by_family():
    # every basis field is a member of the quadratic family: compare spans numerically
    d = 3
    res = constraintNullspace(d, 3)
    mons = sorted({k for f in res.basis for c in f for k in c.terms} |
                  {k for j in range(10) for c in buildH0(H0Family.from_vector(d, [int(i == j) for i in range(10)])) for k in c.terms})

    def vec(field):
        return [float(c.terms.get(m, 0)) for c in field for m in mons]

    fam = np.array([vec(buildH0(H0Family.from_vector(d, [int(i == j) for i in range(10)]))) for j in range(10)])
    basis = np.array([vec(f) for f in res.basis])
    assert np.linalg.matrix_rank(np.vstack([fam, basis])) == 10


def test_F2_examples():
    d = 3
    F = buildF2d(iso(d), H0Family.zero(d, k=1))
    E = PolyD.var(d, d + 1)
    r2 = sum((PolyD.var(m, d + 1) ** 2 for m in range(d)), PolyD({}, d + 1))
    assert F == E * 4 - r2 * 4
    assert F(0, 0, 0, Fraction(3, 7)) == Fraction(12, 7)
    assert buildF2d(product_quartic(d), H0Family.zero(d)).is_zero()


def test_F2_paths_agree_random():
    rng = random.Random(11)
    d = 3
    for _ in range(20):
        V = PolyD({k: Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                   for k in itertools.product(range(5), repeat=d) if sum(k) <= 4 and rng.random() < 0.3}, d)
        fam = H0Family.from_vector(d, [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(10)])
        assert buildF2d(V, fam, "family") == buildF2d(V, fam, "general")


def test_critical_reduction_isotropic():
    out = criticalReduction(iso(3), [(0.3, -0.2, 0.1, 0.5), (1.0, 1.0, 1.0, 2.0)])
    for c in out:
        assert c.verified
        assert np.allclose(c.x, 0, atol=1e-8) and abs(c.E) <= 1e-8


def test_critical_reduction_product_quartic():
    V = product_quartic(3)
    guesses = [tuple(0.8 * s for s in sg) + (0.3,) for sg in itertools.product([-1, 1], repeat=3)]
    guesses.append((0.1, -0.1, 0.05, 2.5))
    out = criticalReduction(V, guesses)
    assert all(c.verified for c in out)
    minima = {tuple(round(t) for t in c.x) for c in out if abs(c.E) < 1e-8}
    assert minima == set(itertools.product([-1, 1], repeat=3))
    assert any(np.allclose(c.x, 0, atol=1e-8) and abs(c.E - 3) < 1e-8 for c in out)


def test_critical_reduction_no_guesses():
    assert criticalReduction(iso(3), []) == []


def test_critical_reduction_needs_d3():
    with pytest.raises(ValueError):
        criticalReduction(iso(2), [(0, 0, 0)])


D2 = [
    ("1/2*x^2 + 1/2*y^2", ("x", "y"), 1.0),
    ("1/2*x^2 + 1/2*y^2", ("1", "0"), 0.7),
    ("1/2*x^2 + 1/2*y^2", ("y", "-x"), 2.0),
    ("x^4 + y^4 - 2*x^2 + x*y", ("x^2 - y^2 + 3*x", "2*x*y + 3*y"), 0.3),
    ("x^4 + y^4 - 2*x^2 + x*y", ("x^2 - y^2 + 3*x", "2*x*y + 3*y"), 2.0),
]


@pytest.mark.parametrize("V,h,E", D2)
def test_null_result_2d(V, h, E):
    val, err = nullResult2d(parse_polyd(V, 2), [parse_polyd(t, 2) for t in h], E)
    assert abs(val) <= 1e-6


def test_null_result_decreases_under_refinement():
    V = parse_polyd("x^4 + y^4 - 2*x^2 + x*y", 2)
    h = [parse_polyd("x^2 - y^2 + 3*x", 2), parse_polyd("2*x*y + 3*y", 2)]
    vals = [abs(nullResult2d(V, h, 0.3, epsabs=tol)[0]) for tol in (1e-2, 1e-5, 1e-10)]
    assert vals[-1] <= 1e-6
    assert vals[-1] <= vals[0] + 1e-12


def test_null_result_empty_region():
    V = parse_polyd("1/2*x^2 + 1/2*y^2", 2)
    assert nullResult2d(V, [parse_polyd("x", 2), parse_polyd("y", 2)], -1.0) == (0.0, 0.0)


def test_null_result_unbounded():
    V = parse_polyd("x^2", 2)
    with pytest.raises(UnboundedRegionError):
        nullResult2d(V, [parse_polyd("1", 2), parse_polyd("0", 2)], 1.0)


def test_null_result_rejects_inadmissible_h():
    V = parse_polyd("x^2 + y^2", 2)
    with pytest.raises(ValueError):
        nullResult2d(V, [parse_polyd("x^2", 2), parse_polyd("0", 2)], 1.0)
