from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from specgap.diffpoly import ParamPoly
from specgap.gapcert import (
    GapInterval,
    SignVerdict,
    bifurcationSolve,
    build_F,
    certify_half_line,
    certify_point,
    certify_segment,
    disjoint_from,
    exact_energy,
    findLambda,
    scanGaps,
)
from specgap.oracle import eigensolveFD
from specgap.parse import parse_param_poly, parse_poly1

HARM = parse_poly1("1/2*x^2")
QUART = parse_poly1("x^4")
DWELL = parse_poly1("x^4-2*x^2")
CUBIC = parse_param_poly("l1*x + l2*x^3")


def test_build_F_harmonic():
    F = build_F(2, HARM, parse_param_poly("-x"))
    assert F == ParamPoly({(2, 0): 4, (0, 1): -4})
    F = build_F(2, HARM, CUBIC)
    assert str(F) == "-8*x^4*l2 + 12*x^2*E*l2 - 4*x^2*l1 + 4*E*l1 + 3*l2"


def test_findLambda_examples():
    F = build_F(2, HARM, parse_param_poly("l1*x"))
    w = findLambda(F, -1, [(-2, 2)])
    assert w is not None and w.lam[0] < 0 and w.verdict.definite
    assert findLambda(F, 1, [(-2, 2)]) is None
    assert findLambda(F, -1, [(1, 0)]) is None


def test_findLambda_deterministic():
    F = build_F(4, QUART, CUBIC)
    a = findLambda(F, -0.3, [(-2, 2)] * 2, seed=3)
    b = findLambda(F, -0.3, [(-2, 2)] * 2, seed=3)
    assert a == b


@given(st.fractions(min_value=Fraction(1, 100), max_value=100), st.fractions(-3, 3), st.fractions(-3, 3))
def test_lambda_scaling_invariance(c, E, lam):
    F = build_F(2, QUART, parse_param_poly("l1*(x^3 - x)"))
    w1 = certify_point(F, E, [lam])
    w2 = certify_point(F, E, [c * lam])
    assert (w1 is None) == (w2 is None)
    if w1:
        assert w1.verdict is w2.verdict


def test_segment_and_half_line():
    F = build_F(2, HARM, parse_param_poly("-x"))
    assert certify_half_line(F, Fraction(-1, 100), ()) is SignVerdict.POSITIVE_DEFINITE
    assert certify_half_line(F, Fraction(1, 100), ()) is None
    assert certify_segment(F, -2, Fraction(-1, 10), ()) is SignVerdict.POSITIVE_DEFINITE
    assert certify_segment(F, -2, Fraction(1, 10), ()) is None


def test_exact_energy():
    assert exact_energy(0.1) == Fraction(1, 10)
    assert exact_energy("1/3") == Fraction(1, 3)
    assert exact_energy(Fraction(2, 7)) == Fraction(2, 7)


def test_scan_empty_range():
    F = build_F(2, HARM, CUBIC)
    assert scanGaps(F, (1, 0), Fraction(1, 10), [(-2, 2)] * 2) == []


def _check_structure(F, gaps):
    for g in gaps:
        assert g.eLow < g.eHigh
        assert len(g.witnesses) >= 3
        for w in g.witnesses:
            assert g.eLow <= float(w.E) <= g.eHigh
            assert certify_point(F, w.E, w.lam) is not None


def test_scan_harmonic_cubic_family():
    F = build_F(2, HARM, CUBIC)
    gaps = scanGaps(F, (-2, 3), Fraction(1, 20), [(-2, 2)] * 2)
    _check_structure(F, gaps)
    assert any(g.eHigh <= 0.5 and g.eHigh > -0.01 for g in gaps)
    spec = eigensolveFD(HARM, None, 2000, 4)
    assert disjoint_from(gaps, spec.values, spec.conv)


def test_scan_quartic_sound():
    F = build_F(2, QUART, CUBIC)
    gaps = scanGaps(F, (-1, 5), Fraction(1, 20), [(-2, 2)] * 2)
    _check_structure(F, gaps)
    spec = eigensolveFD(QUART, None, 2000, 6)
    assert disjoint_from(gaps, spec.values, spec.conv)


def test_scan_independent_of_workers():
    F = build_F(4, DWELL, CUBIC)
    a = scanGaps(F, (-2, 1), Fraction(1, 10), [(-2, 2)] * 2, workers=1)
    b = scanGaps(F, (-2, 1), Fraction(1, 10), [(-2, 2)] * 2, workers=2)
    assert [g.to_json() for g in a] == [g.to_json() for g in b]


def test_extend_below():
    F = build_F(2, HARM, parse_param_poly("-x"))
    gaps = scanGaps(F, (-1, Fraction(-1, 100)), Fraction(1, 100), (), extend_below=True)
    assert len(gaps) == 1
    assert gaps[0].eLow == float("-inf") and gaps[0].eHigh == pytest.approx(-0.01)
    assert gaps[0].to_json()["eLow"] is None


def test_disjoint_from_padding():
    g = GapInterval(-1.0, 0.0, 2, "", [], 1e-6)
    assert disjoint_from([g], [0.5], [0.1])
    assert not disjoint_from([g], [0.05], [0.1])


def test_bifurcation_linear_family_is_degenerate():
    F = build_F(2, HARM, parse_param_poly("l1*x"))
    b = bifurcationSolve(F, (0.1, 0.2, -1.0))
    assert b.converged and b.residual_norm <= 1e-10
    assert abs(b.xStar) < 1e-8 and abs(b.eStar) < 1e-8
    assert b.degenerate_directions >= 1


def test_bifurcation_toy():
    b = bifurcationSolve(parse_param_poly("x^2 - E"), (0.3, 0.2))
    assert b.converged and abs(b.xStar) < 1e-8 and abs(b.eStar) < 1e-8
    assert b.nondegenerate


def test_bifurcation_failure_is_reported():
    # x^2 + 1 never has a double root: no solution of F = F_x = 0
    b = bifurcationSolve(parse_param_poly("x^2 + 1 + 0*E"), (0.3, 0.0), max_iter=20)
    assert not b.converged


def test_bifurcation_matches_scan_on_quartic_family():
    F = build_F(2, QUART, CUBIC)
    gaps = scanGaps(F, (-1, 1), Fraction(1, 20), [(-2, 2)] * 2)
    top = max(g.eHigh for g in gaps)
    w = max((w for g in gaps for w in g.witnesses), key=lambda w: w.E)
    b = bifurcationSolve(F, (0.0, top, w.lam_float[0], w.lam_float[1]), free=(True, False))
    assert b.converged
    assert abs(b.eStar - top) <= 1e-5
