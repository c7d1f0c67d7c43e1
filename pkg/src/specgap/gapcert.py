"""Gap certification for a parametrized F_N(x, E, lambda).

Floating point is used to search; every claim is re-checked exactly.  A point
E is certified by a witness lambda when F(., E, lambda) has no real root.  An
energy segment [E1, E2] is certified by one witness when all Bernstein
coefficients of ``t -> F(x, E1 + t (E2 - E1), lambda)`` are definite polynomials
in x of a common sign.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .diffpoly import ParamPoly, Poly1, to_fraction
from .sturm import SignVerdict, is_nonnegative, sturm_sign

__all__ = [
    "SignVerdict",
    "sturmSign",
    "margin",
    "Witness",
    "findLambda",
    "certify_point",
    "certify_segment",
    "certify_half_line",
    "GapInterval",
    "scanGaps",
    "BifurcationPoint",
    "bifurcationSolve",
    "disjoint_from",
    "exact_energy",
    "build_F",
]


def sturmSign(p) -> SignVerdict:
    """Exact strict sign verdict of a univariate polynomial (floats are rationalized exactly)."""
    if isinstance(p, np.ndarray):
        p = [float(c) for c in p]
    return sturm_sign(p)


def _trim_float(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if len(nz) else c[:0]


def _margin_coeffs(c: np.ndarray) -> float:
    c = _trim_float(c)
    if len(c) == 0:
        return 0.0
    if len(c) == 1:
        return float(c[0])
    if c[-1] <= 0 or (len(c) - 1) % 2:
        return -math.inf
    return float(kernels.crit_extrema(np.ascontiguousarray(c))[0])


def margin(F, E: float = 0.0, lam: Sequence[float] = ()) -> float:
    """Minimum of F(., E, lambda) over its real critical points.

    Returns ``-inf`` when the leading coefficient is not positive or the degree
    is odd; a polynomial constant in x returns the constant.
    """
    if isinstance(F, ParamPoly):
        c = F.coeffs_float(E, lam)
    elif isinstance(F, Poly1):
        c = F.as_float()
    else:
        c = np.asarray(F, dtype=float)
    return _margin_coeffs(c)


def _score(c: np.ndarray) -> float:
    """Scale-free search objective; positive iff one of +-F has positive margin."""
    c = _trim_float(c)
    if len(c) == 0:
        return -2e3
    c = c / float(np.abs(c).max())
    if len(c) == 1:
        return abs(float(c[0]))
    if (len(c) - 1) % 2:
        # odd degree: never definite
        return -1e3 - 1.0
    lo, hi = kernels.crit_extrema(np.ascontiguousarray(c))
    return float(lo) if c[-1] > 0 else float(-hi)


@dataclass(frozen=True)
class Witness:
    """Exact witness: F(., E, lam) has no real root."""

    E: Fraction
    lam: tuple
    verdict: SignVerdict

    @property
    def lam_float(self) -> tuple:
        return tuple(float(t) for t in self.lam)

    def to_json(self) -> dict:
        return {"E": float(self.E), "lambda": list(self.lam_float), "exact": [str(t) for t in self.lam],
                "verdict": self.verdict.value}


def certify_point(F: ParamPoly, E, lam: Sequence) -> Witness | None:
    E = to_fraction(E)
    lam = tuple(to_fraction(t) for t in lam)
    verdict = sturm_sign(F.at(E, lam))
    return Witness(E, lam, verdict) if verdict.definite else None


def _rationalizations(lam: Sequence[float]):
    seen = set()
    for den in (10**3, 10**6, 10**9, None):
        cand = tuple(Fraction(t) if den is None else Fraction(t).limit_denominator(den) for t in lam)
        if cand not in seen:
            seen.add(cand)
            yield cand


def _verify_float(F: ParamPoly, E, lam: Sequence[float]) -> Witness | None:
    for cand in _rationalizations(lam):
        w = certify_point(F, E, cand)
        if w is not None:
            return w
    return None


def findLambda(F: ParamPoly, E, box: Sequence[tuple], budget: int = 400, seed: int = 0,
               grid: int = 7, starts: Sequence[Sequence[float]] = (), refine: bool = True) -> Witness | None:
    """Search a witness lambda in ``box`` for the energy E.

    A coarse grid (or seeded random samples when the grid exceeds ``budget``)
    ranks candidates on a scale-free margin; the best ones are refined by
    bounded Nelder-Mead and verified exactly on rationalizations of lambda.
    ``starts`` are tried first.  Returns None when nothing is certified.
    """
    E = to_fraction(E)
    p = F.nparams
    box = [tuple(map(float, b)) for b in box]
    if len(box) != p:
        raise ValueError(f"box has {len(box)} bounds, F has {p} parameters")
    if any(lo > hi for lo, hi in box):
        return None
    if p == 0:
        return certify_point(F, E, ())
    coeffs = F.float_evaluator(float(E))

    def score(lam):
        return _score(coeffs(lam))

    cands = []
    for s in starts:
        s = tuple(float(t) for t in s)
        sc = score(s)
        if sc > 0:
            w = _verify_float(F, E, s)
            if w is not None:
                return w
        cands.append((sc, s))
    axes = [np.linspace(lo, hi, grid) if hi > lo else np.array([lo]) for lo, hi in box]
    total = int(np.prod([len(a) for a in axes]))
    if total <= budget:
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p)
    else:
        rng = np.random.default_rng(seed)
        lows = np.array([b[0] for b in box])
        highs = np.array([b[1] for b in box])
        mesh = lows + rng.random((budget, p)) * (highs - lows)
    for pt in mesh:
        cands.append((score(pt), tuple(float(t) for t in pt)))
    cands.sort(key=lambda t: -t[0])
    top = cands[:3]
    for sc, lam in top:
        if sc > 0:
            w = _verify_float(F, E, lam)
            if w is not None:
                return w
    if not refine:
        return None
    bounds = [(lo, hi) for lo, hi in box]
    for _, lam in top[:1]:
        found = []

        def objective(z):
            sc = score(z)
            if sc > 0:
                w = _verify_float(F, E, z)
                if w is not None:
                    found.append(w)
                    raise _Found
            return -sc

        try:
            minimize(objective, np.array(lam), method="Nelder-Mead", bounds=bounds,
                     options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 200 * p, "maxfev": 300 * p})
        except _Found:
            return found[0]
    return None


class _Found(Exception):
    pass


# ---------------------------------------------------------------------------
# segments


def _bernstein_polys(F: ParamPoly, E1: Fraction, E2: Fraction, lam: tuple) -> list[Poly1]:
    """Bernstein coefficients (polynomials in x) of ``t -> F(x, E1 + t (E2 - E1))`` on [0, 1]."""
    G = F.substitute_energy(E1, E2 - E1)
    n = max(G.degree_in(1), 0)
    # power-basis coefficient of t^j as a polynomial in x
    power = []
    for j in range(n + 1):
        sub = ParamPoly({(k[0], 0) + k[2:]: c for k, c in G.terms.items() if k[1] == j}, G.nparams)
        power.append(sub.at(0, lam))
    out = []
    for i in range(n + 1):
        acc = Poly1()
        for j in range(i + 1):
            acc = acc + power[j] * Fraction(comb(i, j), comb(n, j))
        out.append(acc)
    return out


def certify_segment(F: ParamPoly, E1, E2, lam: Sequence) -> SignVerdict | None:
    """Verdict valid for every E in [E1, E2] with a single witness, or None."""
    E1, E2 = to_fraction(E1), to_fraction(E2)
    lam = tuple(to_fraction(t) for t in lam)
    verdict = None
    for b in _bernstein_polys(F, E1, E2, lam):
        v = sturm_sign(b)
        if not v.definite or (verdict is not None and v != verdict):
            return None
        verdict = v
    return verdict


def certify_half_line(F: ParamPoly, E0, lam: Sequence) -> SignVerdict | None:
    """Verdict valid for every E <= E0, or None.

    Writes ``F(x, E0 - t) = sum_j c_j(x) t^j``; it suffices that ``c_0`` is
    definite and every other ``c_j`` has the same sign in the weak sense.
    """
    E0 = to_fraction(E0)
    lam = tuple(to_fraction(t) for t in lam)
    G = F.substitute_energy(E0, -1)
    n = max(G.degree_in(1), 0)
    cs = [ParamPoly({(k[0], 0) + k[2:]: c for k, c in G.terms.items() if k[1] == j}, G.nparams).at(0, lam)
          for j in range(n + 1)]
    verdict = sturm_sign(cs[0])
    if not verdict.definite:
        return None
    sign = 1 if verdict == SignVerdict.POSITIVE_DEFINITE else -1
    for c in cs[1:]:
        if not is_nonnegative(c * sign):
            return None
    return verdict


# ---------------------------------------------------------------------------
# scanning


@dataclass
class GapInterval:
    eLow: float
    eHigh: float
    N: int | None
    family: str
    witnesses: list
    tol: float
    exact_low: Fraction | None = None
    exact_high: Fraction | None = None

    def contains(self, E: float, pad: float = 0.0) -> bool:
        return self.eLow - pad <= E <= self.eHigh + pad

    def to_json(self) -> dict:
        return {
            "eLow": None if self.eLow == -math.inf else self.eLow,
            "eHigh": self.eHigh,
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def exact_energy(value) -> Fraction:
    """Decimal reading of a float (``0.1 -> 1/10``); exact for ints, strings and Fractions."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return to_fraction(value)


@dataclass
class _ScanSpec:
    F: ParamPoly
    box: list
    budget: int
    seed: int
    grid: int


CHUNK = 16


def _scan_chunk(spec: _ScanSpec, energies: list) -> list:
    """Witness (or None) per energy; each chunk warm-starts from its own previous witness."""
    out = []
    prev = None
    for k, E in enumerate(energies):
        starts = [prev.lam_float] if prev is not None else []
        w = findLambda(spec.F, E, spec.box, spec.budget, spec.seed + k, spec.grid, starts)
        out.append(w)
        if w is not None:
            prev = w
    return out


def _connect(spec: _ScanSpec, lo: Fraction, hi: Fraction, wl: Witness | None, wh: Witness | None):
    """A witness certifying the whole segment [lo, hi], trying the endpoint witnesses."""
    for w in (wl, wh):
        if w is not None and certify_segment(spec.F, lo, hi, w.lam) is not None:
            return w
    return None


def _refine(spec: _ScanSpec, a: Fraction, wa: Witness, b: Fraction, tol: Fraction):
    """Push a certified end ``a`` towards the failing point ``b``; returns the new end and its witness."""
    while abs(b - a) > tol:
        mid = (a + b) / 2
        seg_lo, seg_hi = (a, mid) if a < mid else (mid, a)
        if certify_segment(spec.F, seg_lo, seg_hi, wa.lam) is not None:
            w = certify_point(spec.F, mid, wa.lam)
            if w is not None:
                a, wa = mid, w
                continue
        w = findLambda(spec.F, mid, spec.box, spec.budget, spec.seed, spec.grid, [wa.lam_float])
        if w is not None and certify_segment(spec.F, seg_lo, seg_hi, w.lam) is not None:
            a, wa = mid, w
        else:
            b = mid
    return a, wa


def scanGaps(F: ParamPoly, e_range: Sequence, e_step=Fraction(1, 100), box: Sequence[tuple] = (),
             tol=Fraction(1, 10**6), budget: int = 400, seed: int = 0, grid: int = 7, workers: int = 1,
             extend_below: bool = False, N: int | None = None, family: str = "") -> list[GapInterval]:
    """Certified eigenvalue-free intervals inside ``e_range``.

    Grid points are certified independently (in fixed chunks, so the result does
    not depend on ``workers``); neighbouring points are joined when one witness
    certifies the whole segment; interval ends are bisected to width ``tol``.
    With ``extend_below`` an interval starting at the lowest grid point is
    extended to ``-inf`` when its witness allows.
    """
    lo, hi = exact_energy(e_range[0]), exact_energy(e_range[1])
    step, tol = exact_energy(e_step), exact_energy(tol)
    if step <= 0 or tol <= 0:
        raise ValueError("e_step and tol must be positive")
    if hi < lo:
        return []
    n = int((hi - lo) / step)
    energies = [lo + k * step for k in range(n + 1)]
    if energies[-1] != hi:
        energies.append(hi)
    spec = _ScanSpec(F, [tuple(b) for b in box], budget, seed, grid)
    chunks = [energies[i : i + CHUNK] for i in range(0, len(energies), CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_chunk, [spec] * len(chunks), chunks))
    else:
        parts = [_scan_chunk(spec, c) for c in chunks]
    wit = [w for part in parts for w in part]

    # runs of certified points joined by certified segments
    runs: list[list] = []
    cur: list = []
    for k, (E, w) in enumerate(zip(energies, wit)):
        if w is None:
            if cur:
                runs.append(cur)
            cur = []
            continue
        if cur:
            Ep, wp, _ = cur[-1]
            link = _connect(spec, Ep, E, wp, w)
            if link is None:
                runs.append(cur)
                cur = []
            else:
                cur[-1] = (Ep, wp, link)
        cur.append((E, w, None))
        if k == len(energies) - 1:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)

    gaps = []
    for run in runs:
        (E_first, w_first, _), (E_last, w_last, _) = run[0], run[-1]
        i_first, i_last = energies.index(E_first), energies.index(E_last)
        low, w_low = E_first, w_first
        high, w_high = E_last, w_last
        e_low = None
        if i_first > 0:
            low, w_low = _refine(spec, E_first, w_first, energies[i_first - 1], tol)
        elif extend_below and certify_half_line(F, E_first, w_first.lam) is not None:
            e_low = -math.inf
        if i_last < len(energies) - 1:
            high, w_high = _refine(spec, E_last, w_last, energies[i_last + 1], tol)
        if high <= low and e_low is None:
            continue
        witnesses = _interior_witnesses(spec, run, low, high, w_low, w_high)
        gaps.append(
            GapInterval(
                eLow=e_low if e_low is not None else float(low),
                eHigh=float(high),
                N=N,
                family=family,
                witnesses=witnesses,
                tol=float(tol),
                exact_low=None if e_low is not None else low,
                exact_high=high,
            )
        )
    return gaps


def _interior_witnesses(spec: _ScanSpec, run, low, high, w_low, w_high, want: int = 3) -> list:
    pts = [(E, w) for E, w, _ in run if low < E < high]
    if len(pts) > want:
        idx = np.linspace(0, len(pts) - 1, want).round().astype(int)
        pts = [pts[i] for i in sorted(set(idx.tolist()))]
    extra = 1
    while len(pts) < want and extra < 64:
        # fill with interior points certified by the boundary witnesses
        for frac in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            if len(pts) >= want:
                break
            E = low + (high - low) * frac / extra
            if any(E == q for q, _ in pts) or not low < E < high:
                continue
            for w in (w_low, w_high):
                c = certify_point(spec.F, E, w.lam)
                if c is not None:
                    pts.append((E, c))
                    break
        extra *= 2
    pts.sort(key=lambda t: t[0])
    return [w for _, w in pts]


def disjoint_from(gaps: Sequence[GapInterval], values: Sequence[float], conv: Sequence[float] | None = None) -> bool:
    """True when no value (padded by its convergence estimate) meets a gap."""
    conv = conv if conv is not None else [0.0] * len(values)
    return not any(g.contains(e, c) for g in gaps for e, c in zip(values, conv))


# ---------------------------------------------------------------------------
# gap boundaries


@dataclass
class BifurcationPoint:
    xStar: float
    eStar: float
    lambdaStar: tuple
    residuals: dict
    converged: bool
    nondegeneracy: float
    nondegenerate: bool
    jacobian_rank: int
    unknowns: int
    iterations: int
    free: tuple = field(default_factory=tuple)

    @property
    def residual_norm(self) -> float:
        return float(np.sqrt(sum(v * v for v in self.residuals.values())))

    @property
    def degenerate_directions(self) -> int:
        return self.unknowns - self.jacobian_rank

    def to_json(self) -> dict:
        return {
            "xStar": self.xStar,
            "eStar": self.eStar,
            "lambdaStar": list(self.lambdaStar),
            "residuals": self.residuals,
            "converged": self.converged,
            "nondegeneracy": self.nondegeneracy,
            "nondegenerate": self.nondegenerate,
        }


def bifurcationSolve(F: ParamPoly, guess: Sequence[float], free: Sequence[bool] | None = None,
                     tol: float = 1e-10, max_iter: int = 100, nondeg_threshold: float = 1e-3) -> BifurcationPoint:
    """Solve ``F = dF/dx = dF/dlambda_j = 0`` by damped Gauss-Newton.

    ``guess`` is ``(x, E, lambda_1, ..., lambda_p)``.  Parameters with
    ``free[j]`` False stay at their guessed value and their equation is dropped.
    Steps are least-squares solutions, so rank-deficient systems (a scaling
    direction of a linear family, for instance) are handled; the rank of the
    final Jacobian is reported.
    """
    p = F.nparams
    guess = [float(g) for g in guess]
    if len(guess) != p + 2:
        raise ValueError(f"guess needs {p + 2} entries")
    free = tuple(bool(f) for f in (free if free is not None else [True] * p))
    if len(free) != p:
        raise ValueError("mask length must match the number of parameters")
    slots = [0, 1] + [2 + j for j in range(p) if free[j]]
    eqs = [("F", F), ("dF/dx", F.dx())] + [(f"dF/dl{j + 1}", F.dlam(j)) for j in range(p) if free[j]]
    jac = [[g.diff(s) for s in slots] for _, g in eqs]

    z = np.array(guess)

    def unpack(zz):
        return zz[0], zz[1], zz[2:]

    def resid(zz):
        x, E, lam = unpack(zz)
        return np.array([g.evalf(x, E, lam) for _, g in eqs])

    def jmat(zz):
        x, E, lam = unpack(zz)
        return np.array([[d.evalf(x, E, lam) for d in row] for row in jac])

    r = resid(z)
    it = 0
    for it in range(1, max_iter + 1):
        if np.linalg.norm(r) <= tol:
            break
        J = jmat(z)
        step = np.zeros_like(z)
        delta = np.linalg.lstsq(J, -r, rcond=None)[0]
        for i, s in enumerate(slots):
            step[s] = delta[i]
        t = 1.0
        nr = np.linalg.norm(r)
        while t > 1e-6:
            cand = z + t * step
            rc = resid(cand)
            if np.linalg.norm(rc) < nr:
                z, r = cand, rc
                break
            t *= 0.5
        else:
            break
    x, E, lam = unpack(z)
    J = jmat(z)
    rank = int(np.linalg.matrix_rank(J, tol=1e-8 * max(1.0, np.abs(J).max())))
    dE = abs(F.dE().evalf(x, E, lam))
    dxx = abs(F.dx(2).evalf(x, E, lam))
    nondeg = dE * dxx
    residuals = {name: float(v) for (name, _), v in zip(eqs, r)}
    return BifurcationPoint(
        xStar=float(x),
        eStar=float(E),
        lambdaStar=tuple(float(t) for t in lam),
        residuals=residuals,
        converged=bool(np.linalg.norm(r) <= tol),
        nondegeneracy=float(nondeg),
        nondegenerate=bool(nondeg > nondeg_threshold),
        jacobian_rank=rank,
        unknowns=len(slots),
        iterations=it,
        free=free,
    )


def build_F(N: int, V: Poly1, a0: ParamPoly) -> ParamPoly:
    """F_N(x, E, lambda) for a concrete potential and a0 family."""
    from .diffpoly import substitute
    from .ladder import compute_F

    return substitute(compute_F(N), V, {0: a0}, a0.nparams)
