"""Numerical ground truth for -1/2 phi'' + V phi = E phi.

Two independent eigensolvers (finite differences with Sturm-count bisection,
Numerov shooting with a Casoratian match), an RK4 integrator, and the check
that the current's x-derivative equals ``phi^N F_N`` along a trajectory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from . import kernels
from .diffpoly import ParamPoly, Poly1, substitute
from .ladder import compute_F, compute_J

__all__ = [
    "Spectrum",
    "Eigenvalue",
    "Trajectory",
    "BracketError",
    "default_L",
    "eigensolveFD",
    "eigensolveShoot",
    "odeSolve",
    "divergenceCheck",
    "DivergenceResult",
]

# 2 (V(+-L) - E) must reach this for the Dirichlet truncation to be trusted
FORBIDDEN_DEPTH = 50.0
# and the WKB exponent int sqrt(2 (V - E)) dx across the forbidden zone must reach this
DECAY_EXPONENT = 20.0


class BracketError(RuntimeError):
    pass


@dataclass
class Eigenvalue:
    value: float
    convEst: float
    nodeCount: int
    flagged: bool = False
    error: str | None = None

    def to_json(self) -> dict:
        out = {"value": self.value, "convEst": self.convEst, "nodeCount": self.nodeCount}
        if self.flagged:
            out["flagged"] = True
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class Spectrum:
    eigenvalues: list
    method: str
    L: float
    M: int
    potential: str = ""

    @property
    def values(self) -> list[float]:
        return [e.value for e in self.eigenvalues if e.error is None]

    @property
    def conv(self) -> list[float]:
        return [e.convEst for e in self.eigenvalues if e.error is None]

    def __len__(self):
        return len(self.eigenvalues)

    def to_json(self) -> dict:
        return {
            "potential": self.potential,
            "method": self.method,
            "L": self.L,
            "M": self.M,
            "eigenvalues": [e.to_json() for e in self.eigenvalues],
        }


def _vfloat(V: Poly1) -> np.ndarray:
    return V.as_float() if not V.is_zero() else np.zeros(1)


def _edge_depth(V: Poly1, L: float, E: float) -> float:
    c = _vfloat(V)
    return 2.0 * (min(np.polynomial.polynomial.polyval(L, c), np.polynomial.polynomial.polyval(-L, c)) - E)


def _decay_exponent(V: Poly1, L: float, E: float) -> float:
    """Smaller of the two one-sided WKB exponents of the forbidden zone inside [-L, L]."""
    c = _vfloat(V)
    out = math.inf
    for sign in (1.0, -1.0):
        x = sign * np.linspace(0.0, L, 4001)
        k = np.sqrt(np.maximum(2.0 * (np.polynomial.polynomial.polyval(x, c) - E), 0.0))
        # only the outermost forbidden stretch counts
        allowed = np.nonzero(k == 0.0)[0]
        start = allowed[-1] if len(allowed) else 0
        out = min(out, float(trapezoid(k[start:], dx=L / 4000)))
    return out


def default_L(V: Poly1, e_max: float, start: float = 1.0) -> float:
    """Smallest L (on a 0.5 grid) with ``2 (V(+-L) - e_max) >= 50`` and WKB exponent >= 20."""
    if V.degree < 2 or V.degree % 2 or V.leading <= 0:
        raise ValueError("default L needs a confining potential")
    L = start
    while _edge_depth(V, L, e_max) < FORBIDDEN_DEPTH or _decay_exponent(V, L, e_max) < DECAY_EXPONENT:
        L += 0.5
    return L


# ---------------------------------------------------------------------------
# finite differences


def _fd_matrix(V: Poly1, L: float, M: int):
    h = 2.0 * L / M
    x = -L + h * np.arange(1, M)
    d = np.ascontiguousarray(1.0 / h**2 + V.evalf(x), dtype=float)
    e2 = np.full(M - 2, 1.0 / (4.0 * h**4))
    return d, e2


def _fd_levels(V: Poly1, L: float, M: int, k: int) -> np.ndarray:
    d, e2 = _fd_matrix(V, L, M)
    off = math.sqrt(e2[0]) if len(e2) else 0.0
    lo = float(d.min() - 2 * off) - 1.0
    hi = float(d.max() + 2 * off) + 1.0
    out = np.empty(k)
    for j in range(k):
        tol = 1e-14 * max(1.0, abs(lo), abs(hi))
        out[j] = kernels.tridiag_bisect(d, e2, j, lo, hi, tol)
        # level j+1 lies above level j
        lo = out[j] - 1e-9
    return out


def eigensolveFD(V: Poly1, L: float | None = None, M: int = 4000, k: int = 6) -> Spectrum:
    """Lowest k Dirichlet eigenvalues of the second-order finite-difference operator.

    Values are Richardson-extrapolated from grids M and M/2; ``convEst`` is
    ``|E(M) - E(M/2)|``.  Values whose energy is not deep enough below the walls
    are flagged.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if M < 100 or M % 2:
        raise ValueError("M must be an even integer >= 100")
    if k == 0:
        return Spectrum([], "FiniteDifference", float(L or 0.0), M, str(V))
    if L is None:
        L = _auto_L(V, k)
    if L <= 0:
        raise ValueError("L must be positive")
    fine = _fd_levels(V, L, M, k)
    coarse = _fd_levels(V, L, M // 2, k)
    rich = (4.0 * fine - coarse) / 3.0
    eig = []
    for j in range(k):
        eig.append(
            Eigenvalue(
                value=float(rich[j]),
                convEst=float(abs(fine[j] - coarse[j])),
                nodeCount=j,
                flagged=bool(_edge_depth(V, L, rich[j]) < FORBIDDEN_DEPTH),
            )
        )
    return Spectrum(eig, "FiniteDifference", float(L), M, str(V))


def _auto_L(V: Poly1, k: int) -> float:
    # rough level estimate on a generous box, then the wall-depth rule
    L = default_L(V, float(V(0)) + 1.0, start=2.0)
    for _ in range(20):
        est = _fd_levels(V, L, 800, k)[-1]
        L_new = default_L(V, est, start=1.0)
        if L_new <= L:
            return L
        L = L_new
    return L


# ---------------------------------------------------------------------------
# Numerov shooting


def _casoratian(f: np.ndarray, h: float, m: int) -> float:
    l0, l1, r0, r1 = kernels.numerov_match(f, h, m)
    return l0 * r1 - l1 * r0


def _shoot_levels(V: Poly1, L: float, M: int, k: int, tol: float = 1e-13):
    h = 2.0 * L / M
    x = -L + h * np.arange(M + 1)
    Vx = V.evalf(x)
    m = int(np.argmin(Vx))
    m = min(max(m, 2), M - 3)

    def f_of(E):
        return np.ascontiguousarray(2.0 * (Vx - E))

    def nodes(E):
        return kernels.numerov_nodes(f_of(E), h)

    lo0 = float(Vx.min())
    hi = lo0 + 1.0
    while nodes(hi) < k:
        hi = lo0 + 2.0 * (hi - lo0)
        if hi - lo0 > 1e12:
            raise BracketError("could not bracket the requested states")
    values: list = []
    lo = lo0
    for j in range(k):
        # node-count bisection: nodes(a) <= j < nodes(b)
        a, b = lo, hi
        while nodes(b) > j + 1 or b - a > 1e-3 * max(1.0, abs(b)):
            mid = 0.5 * (a + b)
            if nodes(mid) > j:
                b = mid
            else:
                a = mid
            if b - a < 1e-12:
                break
        if not (nodes(a) <= j < nodes(b)):
            values.append(BracketError(f"state {j}: node bracket failed"))
            lo = b
            continue
        wa, wb = _casoratian(f_of(a), h, m), _casoratian(f_of(b), h, m)
        if wa == 0:
            values.append(a)
            lo = a
            continue
        if wb == 0 or (wa > 0) == (wb > 0):
            if wb == 0:
                values.append(b)
                lo = b
            else:
                values.append(BracketError(f"state {j}: no Casoratian sign change"))
                lo = b
            continue
        while b - a > tol * max(1.0, abs(a)):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            wm = _casoratian(f_of(mid), h, m)
            if wm == 0:
                a = b = mid
                break
            if (wm > 0) == (wa > 0):
                a, wa = mid, wm
            else:
                b = mid
        values.append(0.5 * (a + b))
        lo = 0.5 * (a + b)
    return values


def eigensolveShoot(V: Poly1, L: float | None = None, k: int = 6, M: int = 8000) -> Spectrum:
    """Lowest k eigenvalues by Numerov shooting from both walls.

    Node counts index the states; each level is then located by bisection on the
    sign of the discrete Casoratian of the left and right solutions at the
    potential minimum.  ``convEst`` compares grids M and M/2.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return Spectrum([], "NumerovShooting", float(L or 0.0), M, str(V))
    if L is None:
        L = _auto_L(V, k)
    fine = _shoot_levels(V, L, M, k)
    coarse = _shoot_levels(V, L, M // 2, k)
    eig = []
    for j, (a, b) in enumerate(zip(fine, coarse)):
        if isinstance(a, Exception):
            eig.append(Eigenvalue(math.nan, math.inf, j, True, str(a)))
            continue
        conv = abs(a - b) if not isinstance(b, Exception) else math.inf
        eig.append(Eigenvalue(float(a), float(conv), j, bool(_edge_depth(V, L, a) < FORBIDDEN_DEPTH)))
    return Spectrum(eig, "NumerovShooting", float(L), M, str(V))


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    x: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    E: float
    h: float
    truncated: bool = False


def odeSolve(V: Poly1, E: float, x0: float, phi0: float, dphi0: float, xEnd: float, h: float,
             limit: float = 1e200) -> Trajectory:
    """RK4 for ``phi'' = 2 (V - E) phi`` from x0 to xEnd with step ``h`` (direction inferred).

    The run stops early, with ``truncated`` set, once |phi| or |phi'| passes ``limit``.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    span = xEnd - x0
    n = int(round(abs(span) / h))
    step = math.copysign(h, span) if span else h
    vc = np.ascontiguousarray(_vfloat(V))
    ys, dys, done = kernels.rk4(vc, float(E), float(x0), float(phi0), float(dphi0), step, n, limit)
    ys, dys = np.asarray(ys), np.asarray(dys)
    truncated = done < n
    if truncated:
        ok = np.isfinite(ys) & np.isfinite(dys) & (np.abs(ys) <= limit) & (np.abs(dys) <= limit)
        keep = int(np.argmin(ok)) if not ok.all() else len(ys)
        ys, dys = ys[:keep], dys[:keep]
    x = x0 + step * np.arange(len(ys))
    return Trajectory(x, ys, dys, float(E), float(h), truncated)


@dataclass
class DivergenceResult:
    residual: float
    relative: float
    scale: float
    h: float
    points: int
    truncated: bool = False


def _current_polys(N: int, a0: Poly1, V: Poly1, E: float):
    assign = {0: ParamPoly.from_poly1(a0)}
    J = compute_J(N)
    comps = [substitute(c, V, assign).coeffs_float(E) for c in J.components]
    F = substitute(compute_F(N), V, assign).coeffs_float(E)
    return comps, F


def _pval(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(x, c) if len(c) else np.zeros_like(x)


def divergenceCheck(N: int, a0: Poly1, V: Poly1, E: float, x_range: Sequence[float], h: float,
                    phi0: float = 1.0, dphi0: float = 0.0, x0: float | None = None) -> DivergenceResult:
    """Compare the centered difference of the current with ``phi^N F_N`` along a trajectory.

    ``P = sum_n J_n phi'^(N-n) phi^n``.  The RK4 trajectory starts at ``x0``
    (default: the midpoint of the range) with ``(phi0, dphi0)`` and is integrated
    to both ends.  ``residual`` is ``max |(P(x+h) - P(x-h)) / 2h - phi^N F_N|``
    over interior grid points and ``relative`` divides it by ``max |phi^N F_N|``.
    Both sides are homogeneous of degree N in phi and linear in a0, so only the
    relative figure is free of normalization choices.
    """
    lo, hi = map(float, x_range)
    if not lo < hi:
        raise ValueError("empty range")
    if x0 is None:
        x0 = 0.5 * (lo + hi)
    left = odeSolve(V, E, x0, phi0, dphi0, lo, h)
    right = odeSolve(V, E, x0, phi0, dphi0, hi, h)
    x = np.concatenate([left.x[::-1], right.x[1:]])
    phi = np.concatenate([left.phi[::-1], right.phi[1:]])
    dphi = np.concatenate([left.dphi[::-1], right.dphi[1:]])
    truncated = left.truncated or right.truncated
    if a0.is_zero():
        return DivergenceResult(0.0, 0.0, 0.0, h, len(x), truncated)
    comps, F = _current_polys(N, a0, V, E)
    P = np.zeros_like(x)
    for n, c in enumerate(comps):
        if len(c):
            P += _pval(c, x) * dphi ** (N - n) * phi**n
    rhs = phi**N * _pval(F, x)
    res = np.abs((P[2:] - P[:-2]) / (2.0 * h) - rhs[1:-1])
    residual = float(res.max()) if len(res) else 0.0
    scale = float(np.abs(rhs).max())
    return DivergenceResult(residual, residual / scale if scale else 0.0, scale, h, len(x), truncated)
