"""The d-dimensional N = 2 construction.

Vector fields h0 obeying the equal-divergence and antisymmetry constraints,
the quadratic family they reduce to for d >= 3, F_2 built two ways, the
reduction of the gap-boundary system to critical points of V, and the d = 2
level-set integral that vanishes for every admissible h0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import quad

from .diffpoly import all_monomials, to_fraction

__all__ = [
    "PolyD",
    "H0Family",
    "buildH0",
    "checkConstraints",
    "constraintNullspace",
    "NullspaceResult",
    "buildF2d",
    "F2d_general",
    "family_symbolic_F2",
    "criticalReduction",
    "CriticalPoint",
    "nullResult2d",
    "UnboundedRegionError",
]


class PolyD:
    """Sparse polynomial in x1..xd with rational coefficients: ``{exponent tuple: Fraction}``."""

    __slots__ = ("d", "terms")

    def __init__(self, terms: Mapping[tuple, object] | None = None, d: int = 1):
        self.d = d
        clean: dict = {}
        for k, c in (terms or {}).items():
            if len(k) != d:
                raise ValueError(f"exponent {k} does not have {d} entries")
            c = to_fraction(c)
            if c:
                clean[tuple(k)] = clean.get(tuple(k), 0) + c
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def const(cls, c, d: int) -> "PolyD":
        return cls({(0,) * d: c}, d)

    @classmethod
    def var(cls, mu: int, d: int) -> "PolyD":
        """The coordinate x^(mu+1) (zero-based ``mu``)."""
        k = [0] * d
        k[mu] = 1
        return cls({tuple(k): 1}, d)

    def _lift(self, other) -> "PolyD":
        if isinstance(other, PolyD):
            if other.d != self.d:
                raise ValueError("dimension mismatch")
            return other
        return PolyD.const(other, self.d)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return PolyD(out, self.d)

    __radd__ = __add__

    def __neg__(self):
        return PolyD({k: -c for k, c in self.terms.items()}, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return PolyD(out, self.d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = PolyD.const(1, self.d)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, PolyD):
            return self.d == other.d and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == PolyD.const(other, self.d)
        return NotImplemented

    def __hash__(self):
        return hash((self.d, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def diff(self, mu: int) -> "PolyD":
        out = {}
        for k, c in self.terms.items():
            if k[mu]:
                nk = list(k)
                nk[mu] -= 1
                out[tuple(nk)] = out.get(tuple(nk), 0) + c * k[mu]
        return PolyD(out, self.d)

    def grad(self) -> list:
        return [self.diff(mu) for mu in range(self.d)]

    def laplacian(self) -> "PolyD":
        out = PolyD({}, self.d)
        for mu in range(self.d):
            out = out + self.diff(mu).diff(mu)
        return out

    def embed(self, d_new: int, offset: int = 0) -> "PolyD":
        """Same polynomial viewed in ``d_new`` variables, its own placed from ``offset``."""
        out = {}
        for k, c in self.terms.items():
            nk = [0] * d_new
            nk[offset : offset + self.d] = k
            out[tuple(nk)] = c
        return PolyD(out, d_new)

    def restrict(self, d_new: int) -> "PolyD":
        """Drop trailing variables that do not occur."""
        if any(any(k[d_new:]) for k in self.terms):
            raise ValueError("dropped variables are in use")
        return PolyD({k[:d_new]: c for k, c in self.terms.items()}, d_new)

    def evalf(self, *xs):
        """Float evaluation; arguments may be numpy arrays (broadcast)."""
        total = 0.0
        for k, c in self.terms.items():
            t = float(c)
            for x, e in zip(xs, k):
                if e:
                    t = t * np.asarray(x, dtype=float) ** e
            total = total + t
        return total

    def __call__(self, *xs):
        """Exact evaluation at rational points."""
        xs = [to_fraction(x) for x in xs]
        total = Fraction(0)
        for k, c in self.terms.items():
            t = c
            for x, e in zip(xs, k):
                if e:
                    t *= x**e
            total += t
        return total

    def univariate(self, mu: int, fixed: Sequence[float]) -> np.ndarray:
        """Float coefficients (ascending) in x^mu with the other coordinates fixed."""
        deg = max((k[mu] for k in self.terms), default=0)
        out = np.zeros(deg + 1)
        for k, c in self.terms.items():
            t = float(c)
            for nu, e in enumerate(k):
                if nu != mu and e:
                    t *= fixed[nu] ** e
            out[k[mu]] += t
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        names = [f"x{j + 1}" for j in range(self.d)]
        parts = []
        for k in sorted(self.terms, key=lambda k: (-sum(k), tuple(-e for e in k))):
            c = self.terms[k]
            mon = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, k) if e)
            mag = abs(c)
            cs = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            body = (cs + "*" + mon if mag != 1 else mon) if mon else cs
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for s, b in parts[1:]:
            out += f" {s} {b}"
        return out

    def __repr__(self):
        return f"PolyD({str(self)!r}, d={self.d})"


def _sq_norm(d: int) -> PolyD:
    out = PolyD({}, d)
    for mu in range(d):
        out = out + PolyD.var(mu, d) ** 2
    return out


@dataclass
class H0Family:
    d: int
    h0AtZero: tuple
    k: object
    A: tuple
    l: tuple

    def __post_init__(self):
        d = self.d
        self.h0AtZero = tuple(to_fraction(t) for t in self.h0AtZero)
        self.k = to_fraction(self.k)
        self.A = tuple(tuple(to_fraction(t) for t in row) for row in self.A)
        self.l = tuple(to_fraction(t) for t in self.l)
        if len(self.h0AtZero) != d or len(self.l) != d or len(self.A) != d or any(len(r) != d for r in self.A):
            raise ValueError("family shapes do not match d")

    @classmethod
    def zero(cls, d: int, **kw) -> "H0Family":
        base = dict(h0AtZero=(0,) * d, k=0, A=tuple((0,) * d for _ in range(d)), l=(0,) * d)
        base.update(kw)
        return cls(d=d, **base)

    @staticmethod
    def parameter_count(d: int) -> int:
        return (d * d + 3 * d + 2) // 2

    def is_antisymmetric(self) -> bool:
        return all(self.A[m][n] == -self.A[n][m] for m in range(self.d) for n in range(self.d))

    def as_vector(self) -> list:
        """Independent parameters: h0(0), k, A above the diagonal, l."""
        upper = [self.A[m][n] for m, n in combinations(range(self.d), 2)]
        return list(self.h0AtZero) + [self.k] + upper + list(self.l)

    @classmethod
    def from_vector(cls, d: int, vec: Sequence) -> "H0Family":
        vec = list(vec)
        if len(vec) != cls.parameter_count(d):
            raise ValueError("wrong parameter count")
        h = vec[:d]
        k = vec[d]
        pairs = list(combinations(range(d), 2))
        up = vec[d + 1 : d + 1 + len(pairs)]
        l = vec[d + 1 + len(pairs) :]
        A = [[Fraction(0)] * d for _ in range(d)]
        for (m, n), a in zip(pairs, up):
            A[m][n] = to_fraction(a)
            A[n][m] = -to_fraction(a)
        return cls(d=d, h0AtZero=tuple(h), k=k, A=tuple(tuple(r) for r in A), l=tuple(l))


def buildH0(fam: H0Family) -> list:
    """``h^mu = h0(0)^mu + k x^mu + A^mu_nu x^nu - l^mu |x|^2 / 2 + x^mu (l . x)``."""
    if not fam.is_antisymmetric():
        raise ValueError("A must be antisymmetric")
    d = fam.d
    X = [PolyD.var(mu, d) for mu in range(d)]
    r2 = _sq_norm(d)
    lx = PolyD({}, d)
    for mu in range(d):
        lx = lx + X[mu] * fam.l[mu]
    out = []
    for mu in range(d):
        h = PolyD.const(fam.h0AtZero[mu], d) + X[mu] * fam.k
        for nu in range(d):
            h = h + X[nu] * fam.A[mu][nu]
        h = h - r2 * (fam.l[mu] / 2) + X[mu] * lx
        out.append(h)
    return out


def checkConstraints(h: Sequence[PolyD]) -> bool:
    """Equal diagonal derivatives and antisymmetric off-diagonal ones, as polynomial identities."""
    d = len(h)
    diag = [h[mu].diff(mu) for mu in range(d)]
    if any(diag[mu] != diag[0] for mu in range(1, d)):
        return False
    return all((h[nu].diff(mu) + h[mu].diff(nu)).is_zero() for mu, nu in combinations(range(d), 2))


# ---------------------------------------------------------------------------
# exact nullspace of the constraint system


@dataclass
class NullspaceResult:
    d: int
    maxDeg: int
    dimension: int
    basis: list
    max_basis_degree: int
    all_satisfy: bool


def _rref_nullspace(rows: list[dict], ncols: int) -> list[dict]:
    """Nullspace basis of a sparse rational system (rows are ``{col: Fraction}``)."""
    pivots: dict[int, dict] = {}
    for row in rows:
        r = {c: v for c, v in row.items() if v}
        # reduce by existing pivots
        changed = True
        while r and changed:
            changed = False
            for c in sorted(r):
                if c in pivots:
                    f = r[c]
                    for cc, vv in pivots[c].items():
                        nv = r.get(cc, 0) - f * vv
                        if nv:
                            r[cc] = nv
                        else:
                            r.pop(cc, None)
                    changed = True
                    break
        if not r:
            continue
        p = min(r)
        inv = 1 / r[p]
        r = {c: v * inv for c, v in r.items()}
        # keep the pivot rows fully reduced
        for q, prow in pivots.items():
            if p in prow:
                f = prow[p]
                for cc, vv in r.items():
                    nv = prow.get(cc, 0) - f * vv
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        pivots[p] = r
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for p, prow in pivots.items():
            if f in prow:
                vec[p] = -prow[f]
        basis.append(vec)
    return basis


def constraintNullspace(d: int, maxDeg: int) -> NullspaceResult:
    """Solve the constraints exactly on a generic vector field of degree <= maxDeg."""
    if d < 3 or maxDeg < 2:
        raise ValueError("need d >= 3 and maxDeg >= 2")
    mons = list(all_monomials(d, maxDeg))
    idx = {(mu, m): i for i, (mu, m) in enumerate((mu, m) for mu in range(d) for m in mons)}
    ncols = len(idx)

    def dcoef(mu_comp: int, var: int) -> dict:
        # derivative of component mu_comp along var: {monomial: {col: coeff}}
        out: dict = {}
        for m in mons:
            if m[var]:
                nm = list(m)
                nm[var] -= 1
                out.setdefault(tuple(nm), {})[idx[(mu_comp, m)]] = Fraction(m[var])
        return out

    def combine(a: dict, b: dict, sign: int) -> list[dict]:
        rows = []
        for m in set(a) | set(b):
            r = dict(a.get(m, {}))
            for c, v in b.get(m, {}).items():
                r[c] = r.get(c, 0) + sign * v
            rows.append(r)
        return rows

    rows = []
    for mu in range(1, d):
        rows += combine(dcoef(0, 0), dcoef(mu, mu), -1)
    for mu, nu in combinations(range(d), 2):
        rows += combine(dcoef(nu, mu), dcoef(mu, nu), +1)
    rows.sort(key=lambda r: sorted(r))
    basis_vecs = _rref_nullspace(rows, ncols)
    fields = []
    inv = {i: key for key, i in idx.items()}
    for vec in basis_vecs:
        comps = [dict() for _ in range(d)]
        for c, v in vec.items():
            mu, m = inv[c]
            comps[mu][m] = v
        fields.append([PolyD(cm, d) for cm in comps])
    max_deg = max((max(p.degree for p in f) for f in fields), default=-1)
    ok = all(checkConstraints(f) for f in fields)
    return NullspaceResult(d, maxDeg, len(fields), fields, max_deg, ok)


# ---------------------------------------------------------------------------
# F_2 in d dimensions


def _embed_energy(p: PolyD) -> PolyD:
    """Polynomial in (x1..xd) seen in (x1..xd, E)."""
    return p.embed(p.d + 1)


def F2d_general(V: PolyD, h: Sequence[PolyD]) -> PolyD:
    """General N = 2 expression in variables (x1..xd, E).

    ``F_2 = (2-d)/(2d) Lap(div h) - (2/d) v div h - h . grad v`` with ``v = 2 (V - E)``.
    """
    d = V.d
    E = PolyD.var(d, d + 1)
    v = _embed_energy(V) * 2 - E * 2
    hh = [_embed_energy(c) for c in h]
    div = PolyD({}, d + 1)
    for mu in range(d):
        div = div + hh[mu].diff(mu)
    lap_div = PolyD({}, d + 1)
    for mu in range(d):
        lap_div = lap_div + div.diff(mu).diff(mu)
    out = lap_div * Fraction(2 - d, 2 * d) - v * div * Fraction(2, d)
    for mu in range(d):
        out = out - hh[mu] * v.diff(mu)
    return out


def buildF2d(V: PolyD, fam: H0Family, path: str = "family") -> PolyD:
    """F_2(x, E) for the quadratic family, as a polynomial in (x1..xd, E).

    ``path="family"`` uses ``4 (E - V)(k + l . x) - 2 h0 . grad V``;
    ``path="general"`` evaluates the general expression on ``buildH0(fam)``.
    """
    if V.d != fam.d:
        raise ValueError("dimension mismatch")
    d = fam.d
    if path == "general":
        return F2d_general(V, buildH0(fam))
    if path != "family":
        raise ValueError("path must be 'family' or 'general'")
    h = buildH0(fam)
    E = PolyD.var(d, d + 1)
    Vx = _embed_energy(V)
    lin = PolyD.const(fam.k, d + 1)
    for mu in range(d):
        lin = lin + PolyD.var(mu, d + 1) * fam.l[mu]
    out = (E - Vx) * lin * 4
    for mu in range(d):
        out = out - _embed_energy(h[mu]) * _embed_energy(V.diff(mu)) * 2
    return out


def family_symbolic_F2(V: PolyD) -> tuple[PolyD, int]:
    """F_2 with the family parameters as extra variables: (x1..xd, E, lambda_1..lambda_P)."""
    d = V.d
    P = H0Family.parameter_count(d)
    n = d + 1 + P
    lam = [PolyD.var(d + 1 + j, n) for j in range(P)]
    h0 = lam[:d]
    k = lam[d]
    pairs = list(combinations(range(d), 2))
    A = [[PolyD({}, n) for _ in range(d)] for _ in range(d)]
    for (m, q), a in zip(pairs, lam[d + 1 : d + 1 + len(pairs)]):
        A[m][q] = a
        A[q][m] = -a
    l = lam[d + 1 + len(pairs) :]
    X = [PolyD.var(mu, n) for mu in range(d)]
    r2 = PolyD({}, n)
    lx = PolyD({}, n)
    for mu in range(d):
        r2 = r2 + X[mu] * X[mu]
        lx = lx + X[mu] * l[mu]
    Vx = V.embed(n)
    E = PolyD.var(d, n)
    out = (E - Vx) * (k + lx) * 4
    for mu in range(d):
        h = h0[mu] + X[mu] * k - r2 * l[mu] * Fraction(1, 2) + X[mu] * lx
        for nu in range(d):
            h = h + A[mu][nu] * X[nu]
        out = out - h * Vx.diff(mu) * 2
    return out, P


# ---------------------------------------------------------------------------
# gap-boundary candidates


@dataclass
class CriticalPoint:
    x: tuple
    E: float
    converged: bool
    residual: float
    energy_residual: float
    gradient_residual: float
    iterations: int
    guess: tuple = field(default_factory=tuple)

    @property
    def verified(self) -> bool:
        return self.converged and self.energy_residual <= 1e-8 and self.gradient_residual <= 1e-8

    def to_json(self) -> dict:
        return {
            "x": list(self.x),
            "E": self.E,
            "residuals": {"system": self.residual, "energy": self.energy_residual, "gradient": self.gradient_residual},
            "converged": self.converged,
        }


def criticalReduction(V: PolyD, guesses: Sequence[Sequence[float]], tol: float = 1e-13,
                      max_iter: int = 100) -> list[CriticalPoint]:
    """Solve ``dF_2/dlambda = 0`` in (x, E) by Gauss-Newton from each guess ``(x1..xd, E)``.

    F_2 is linear in the family parameters, so each lambda-derivative is a
    polynomial in (x, E) alone.  Every result carries ``|E - V(x)|`` and
    ``|grad V(x)|`` for verification.
    """
    d = V.d
    if d < 3:
        raise ValueError("criticalReduction needs d >= 3")
    F, P = family_symbolic_F2(V)
    eqs = [F.diff(d + 1 + j).restrict(d + 1) for j in range(P)]
    jac = [[e.diff(s) for s in range(d + 1)] for e in eqs]
    grad = V.grad()
    out = []
    for g in guesses:
        z = np.array([float(t) for t in g], dtype=float)
        if len(z) != d + 1:
            raise ValueError(f"guess needs {d + 1} entries (x and E)")
        r = np.array([e.evalf(*z) for e in eqs], dtype=float)
        it = 0
        for it in range(1, max_iter + 1):
            if np.linalg.norm(r) <= tol:
                break
            J = np.array([[q.evalf(*z) for q in row] for row in jac], dtype=float)
            step = np.linalg.lstsq(J, -r, rcond=None)[0]
            t = 1.0
            nr = np.linalg.norm(r)
            while t > 1e-8:
                zc = z + t * step
                rc = np.array([e.evalf(*zc) for e in eqs], dtype=float)
                if np.linalg.norm(rc) < nr:
                    z, r = zc, rc
                    break
                t *= 0.5
            else:
                break
        x = z[:d]
        e_res = abs(float(z[d]) - float(V.evalf(*x)))
        g_res = float(np.linalg.norm([float(q.evalf(*x)) for q in grad]))
        out.append(
            CriticalPoint(
                x=tuple(float(t) for t in x),
                E=float(z[d]),
                converged=bool(np.linalg.norm(r) <= max(tol, 1e-10)),
                residual=float(np.linalg.norm(r)),
                energy_residual=e_res,
                gradient_residual=g_res,
                iterations=it,
                guess=tuple(float(t) for t in g),
            )
        )
    return out


# ---------------------------------------------------------------------------
# d = 2 level-set integral


class UnboundedRegionError(ValueError):
    pass


def _bounding_box(V: PolyD, E: float, max_radius: float = 1e3) -> float:
    """Half-width R of a square containing {V <= E}, found by expanding until its border is clear."""
    R = 1.0
    ts = np.linspace(-1.0, 1.0, 801)
    while R <= max_radius:
        border = np.concatenate([
            V.evalf(ts * R, np.full_like(ts, R)), V.evalf(ts * R, np.full_like(ts, -R)),
            V.evalf(np.full_like(ts, R), ts * R), V.evalf(np.full_like(ts, -R), ts * R),
        ])
        if np.all(border > E):
            # also require growth just outside, so the set cannot reappear further out
            outer = np.concatenate([V.evalf(ts * 2 * R, np.full_like(ts, 2 * R)), V.evalf(np.full_like(ts, 2 * R), ts * 2 * R),
                                    V.evalf(ts * 2 * R, np.full_like(ts, -2 * R)), V.evalf(np.full_like(ts, -2 * R), ts * 2 * R)])
            if np.all(outer > E):
                return R
        R *= 2.0
    raise UnboundedRegionError(f"sublevel set {{V <= {E}}} escapes every box up to half-width {max_radius}")


def _sublevel_segments(vc: np.ndarray, E: float, R: float) -> list[tuple[float, float]]:
    """Maximal y-intervals in [-R, R] where the univariate polynomial vc(y) <= E."""
    q = vc.copy()
    q[0] -= E
    while len(q) > 1 and q[-1] == 0:
        q = q[:-1]
    if len(q) <= 1:
        return [(-R, R)] if q[0] <= 0 else []
    roots = np.polynomial.polynomial.polyroots(q)
    cuts = sorted({float(r.real) for r in roots if abs(r.imag) <= 1e-9 * (1 + abs(r.real)) and -R < r.real < R})
    pts = [-R] + cuts + [R]
    segs = []
    for a, b in zip(pts, pts[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        if np.polynomial.polynomial.polyval(mid, q) <= 0:
            if segs and segs[-1][1] == a:
                segs[-1] = (segs[-1][0], b)
            else:
                segs.append((a, b))
    return segs


def nullResult2d(V: PolyD, h: Sequence[PolyD], E: float, epsabs: float = 1e-11, limit: int = 400) -> tuple[float, float]:
    """Integral of F_2 over {V <= E} for d = 2; returns (value, error estimate).

    For fixed x the region is a union of y-intervals between real roots of
    ``V(x, .) - E`` (each kept after a sign test at its midpoint) and the
    polynomial F_2(x, .) is integrated exactly on them.  The outer x-integral is
    adaptive Gauss-Kronrod.
    """
    if V.d != 2 or len(h) != 2:
        raise ValueError("nullResult2d works in d = 2")
    if not checkConstraints(h):
        raise ValueError("h does not satisfy the constraints")
    F = F2d_general(V, h)
    # fix E: F is a polynomial in (x, y, E)
    Ef = float(E)
    Fxy: dict = {}
    for k, c in F.terms.items():
        key = k[:2]
        Fxy[key] = Fxy.get(key, 0.0) + float(c) * Ef ** k[2]
    R = _bounding_box(V, Ef)

    def inner(x: float) -> float:
        vc = V.univariate(1, (x, 0.0))
        segs = _sublevel_segments(vc, Ef, R)
        if not segs:
            return 0.0
        deg = max((k[1] for k in Fxy), default=0)
        fc = np.zeros(deg + 1)
        for (i, j), c in Fxy.items():
            fc[j] += c * x**i
        anti = np.polynomial.polynomial.polyint(fc)
        return float(sum(np.polynomial.polynomial.polyval(b, anti) - np.polynomial.polynomial.polyval(a, anti)
                         for a, b in segs))

    # x-extent of the region (sampled), used only to place the outer breakpoints
    xs = np.linspace(-R, R, 2001)
    occupied = [x for x in xs if _sublevel_segments(V.univariate(1, (x, 0.0)), Ef, R)]
    if not occupied:
        return 0.0, 0.0
    lo = max(-R, occupied[0] - 2 * R / 2000)
    hi = min(R, occupied[-1] + 2 * R / 2000)
    val, err = quad(inner, lo, hi, epsabs=epsabs, epsrel=0.0, limit=limit)
    return float(val), float(err)
