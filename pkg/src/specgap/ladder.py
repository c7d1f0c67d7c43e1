"""Operator algebra on (N+1)-vectors of differential polynomials.

A vector ``a = (a_0, ..., a_N)`` encodes the homogeneous form
``sum_n a_n phi'^(N-n) phi^n``.  ``apply_D`` is the total derivative along
solutions of ``phi'' = v phi``; ``apply_R`` lowers the phi'-degree modulo
total derivatives.  ``R^N`` leaves a single component, from which the
gap-certifying expression F_N is read off.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .diffpoly import DiffPoly, a as asym, v as vsym

__all__ = [
    "OpVector",
    "DiagOp",
    "apply_D",
    "apply_R",
    "shift_down",
    "compute_A",
    "generic_vector",
    "kernel_expression",
    "compute_F",
    "compute_J",
    "kernel_check",
    "kernel_scan",
    "rotate_diag",
    "s_plus",
    "s_minus",
    "project",
    "PhiPoly",
    "pi0_reduce",
]


@dataclass(frozen=True)
class OpVector:
    components: tuple

    def __post_init__(self):
        if len(self.components) < 2:
            raise ValueError("an OpVector needs N >= 1, i.e. at least two components")
        object.__setattr__(self, "components", tuple(_dp(c) for c in self.components))

    @property
    def N(self) -> int:
        return len(self.components) - 1

    @classmethod
    def zero(cls, N: int) -> "OpVector":
        return cls((DiffPoly(),) * (N + 1))

    @classmethod
    def unit(cls, N: int, n: int, entry: DiffPoly) -> "OpVector":
        comps = [DiffPoly()] * (N + 1)
        comps[n] = entry
        return cls(tuple(comps))

    def __getitem__(self, n: int) -> DiffPoly:
        return self.components[n]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other: "OpVector") -> "OpVector":
        _same_N(self, other)
        return OpVector(tuple(x + y for x, y in zip(self, other)))

    def __sub__(self, other: "OpVector") -> "OpVector":
        _same_N(self, other)
        return OpVector(tuple(x - y for x, y in zip(self, other)))

    def __neg__(self):
        return OpVector(tuple(-x for x in self))

    def scale(self, c) -> "OpVector":
        return OpVector(tuple(x * c for x in self))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def _dp(c) -> DiffPoly:
    return c if isinstance(c, DiffPoly) else DiffPoly.const(c)


def _same_N(x: OpVector, y: OpVector):
    if x.N != y.N:
        raise ValueError(f"N mismatch: {x.N} vs {y.N}")


@dataclass(frozen=True)
class DiagOp:
    """Diagonal multiplier diag(lambda_0, ..., lambda_N) with DiffPoly entries."""

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(_dp(c) for c in self.entries))

    @property
    def N(self) -> int:
        return len(self.entries) - 1

    @classmethod
    def of(cls, values) -> "DiagOp":
        return cls(tuple(values))

    def __call__(self, a: OpVector) -> OpVector:
        if a.N != self.N:
            raise ValueError("N mismatch")
        return OpVector(tuple(l * x for l, x in zip(self.entries, a)))

    def __mul__(self, other: "DiagOp") -> "DiagOp":
        return DiagOp(tuple(x * y for x, y in zip(self.entries, other.entries)))


def rotate_diag(lam: DiagOp, k: int) -> DiagOp:
    """Entry n of the result is entry (n + k) mod (N + 1) of ``lam``."""
    m = len(lam.entries)
    return DiagOp(tuple(lam.entries[(n + k) % m] for n in range(m)))


def diag_searrow(N: int) -> DiagOp:
    return DiagOp.of(range(N + 1))


def diag_nwarrow(N: int) -> DiagOp:
    return DiagOp.of(range(N, -1, -1))


def diag_a(N: int) -> DiagOp:
    return DiagOp.of(Fraction(1, n + 1) for n in range(N + 1))


def diag_b(N: int) -> DiagOp:
    return DiagOp.of(Fraction(N - n - 1, n + 1) for n in range(N + 1))


def s_minus(a: OpVector) -> OpVector:
    """Lowering shift: component n receives a_{n-1}."""
    return OpVector((DiffPoly(),) + a.components[:-1])


def s_plus(a: OpVector) -> OpVector:
    """Raising shift: component n receives a_{n+1}."""
    return OpVector(a.components[1:] + (DiffPoly(),))


def project(a: OpVector, n: int) -> OpVector:
    """Projector on component n; zero for n outside 0..N."""
    if not 0 <= n <= a.N:
        return OpVector.zero(a.N)
    return OpVector.unit(a.N, n, a[n])


def partial_x(a: OpVector) -> OpVector:
    return OpVector(tuple(c.derive() for c in a))


def apply_D(a: OpVector) -> OpVector:
    """Total derivative: ``(Da)_n = (n+1) a_{n+1} + a_n' + (N-n+1) v a_{n-1}``."""
    N = a.N
    v = vsym()
    out = []
    for n in range(N + 1):
        c = a[n].derive()
        if n < N:
            c = c + a[n + 1] * (n + 1)
        if n > 0:
            c = c + v * a[n - 1] * (N - n + 1)
        out.append(c)
    return OpVector(tuple(out))


def apply_R(a: OpVector) -> OpVector:
    """Reduction operator.

    ``(Ra)_0 = 0``; ``(Ra)_n = -(1/n) a_{n-1}' - ((N-n+1)/(n-1)) v a_{n-2}``
    (second term for n >= 2), and ``a_N`` is carried over into component N.
    """
    N = a.N
    v = vsym()
    out = [DiffPoly()]
    for n in range(1, N + 1):
        c = a[n - 1].derive() * Fraction(-1, n)
        if n >= 2 and a[n - 2]:
            c = c + (v * a[n - 2]) * Fraction(-(N - n + 1), n - 1)
        out.append(c)
    out[N] = out[N] + a[N]
    return OpVector(tuple(out))


def apply_R_power(a: OpVector, k: int) -> OpVector:
    for _ in range(k):
        a = apply_R(a)
    return a


def shift_down(b: OpVector) -> OpVector:
    """Component n+1 of the result is ``b_n / (n+1)``; ``b_N`` drops out."""
    N = b.N
    out = [DiffPoly()] + [b[n] * Fraction(1, n + 1) for n in range(N)]
    return OpVector(tuple(out))


class ReductionInvariantError(AssertionError):
    """R^N left a nonzero component below N; signals a bug in apply_R."""


def compute_A(a: OpVector) -> DiffPoly:
    """``A_N[a] = (R^N a)_N``; all lower components of ``R^N a`` must vanish."""
    r = apply_R_power(a, a.N)
    for n in range(a.N):
        if not r[n].is_zero():
            raise ReductionInvariantError(f"component {n} of R^N a is {r[n]}")
    return r[a.N]


def generic_vector(N: int) -> OpVector:
    """The vector of formal symbols (a_0, ..., a_N)."""
    return OpVector(tuple(asym(n) for n in range(N + 1)))


def seed_vector(N: int, a0: DiffPoly | None = None) -> OpVector:
    return OpVector.unit(N, 0, asym(0) if a0 is None else a0)


@lru_cache(maxsize=None)
def compute_F(N: int) -> DiffPoly:
    """F_N as a differential expression in ``a0`` and ``v``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return compute_A(apply_D(seed_vector(N)))


@lru_cache(maxsize=None)
def compute_J(N: int) -> OpVector:
    """Current J_N as an OpVector: ``a - sum_{k<N} shift_down(R^k D a)`` for ``a = (a0, 0, ..)``.

    The total derivative of the returned form equals ``phi^N F_N``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    a = seed_vector(N)
    b = apply_D(a)
    j = a
    for _ in range(N):
        j = j - shift_down(b)
        b = apply_R(b)
    return j


def kernel_expression(N: int, n: int) -> DiffPoly:
    """``(R^N D Pi_n a)_N`` with ``a_n`` a formal symbol."""
    if not 1 <= n <= N:
        raise ValueError("need 1 <= n <= N")
    b = apply_D(OpVector.unit(N, n, asym(n)))
    return apply_R_power(b, N)[N]


def kernel_check(N: int, n: int) -> bool:
    return kernel_expression(N, n).is_zero()


def _kernel_job(args):
    N, n = args
    return (N, n, kernel_check(N, n))


def kernel_scan(max_N: int, ns: Callable[[int], Sequence[int]] | None = None, workers: int = 1):
    """Run kernel_check over N = 1..max_N; returns ``[(N, n, ok), ...]`` in (N, n) order."""
    jobs = [(N, n) for N in range(1, max_N + 1) for n in (ns(N) if ns else range(1, N + 1))]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_kernel_job, jobs))
    else:
        results = [_kernel_job(j) for j in jobs]
    return sorted(results)


# ---------------------------------------------------------------------------
# Forms in (phi', phi) with DiffPoly coefficients


class PhiPoly:
    """Polynomial in (phi', phi) with DiffPoly coefficients: ``{(i, j): c}`` for ``phi'^i phi^j``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: c for k, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def from_opvector(cls, a: OpVector) -> "PhiPoly":
        N = a.N
        return cls({(N - n, n): a[n] for n in range(N + 1)})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, DiffPoly()) + c
        return PhiPoly(out)

    def __neg__(self):
        return PhiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, PhiPoly) and self.terms == other.terms

    def total_derivative(self) -> "PhiPoly":
        """``D P = v phi dP/dphi' + phi' dP/dphi + dP/dx`` (phi'' replaced by v phi)."""
        v = vsym()
        out: dict = {}

        def put(k, c):
            out[k] = out.get(k, DiffPoly()) + c

        for (i, j), c in self.terms.items():
            if i:
                put((i - 1, j + 1), v * c * i)
            if j:
                put((i + 1, j - 1), c * j)
            put((i, j), c.derive())
        return PhiPoly(out)

    def evalf(self, subst: Callable[[DiffPoly], Callable], dphi, phi, x):
        total = 0.0
        for (i, j), c in self.terms.items():
            total = total + subst(c)(x) * dphi**i * phi**j
        return total


def phi_polynomial(coeffs: Sequence) -> dict:
    """``{k: c_k}`` for ``sum c_k phi^k``; DiffPoly coefficients."""
    return {k: _dp(c) for k, c in enumerate(coeffs) if not _dp(c).is_zero()}


def pi0_reduce(expr: dict) -> dict:
    """Apply ``sum_n (-phi)^n / n! d^n/dphi^n`` to a finite polynomial in phi.

    ``expr`` maps powers of phi to DiffPoly coefficients.  The alternating sum is
    evaluated literally; for any input it collapses to the phi^0 coefficient.
    """
    if not expr:
        return {}
    top = max(expr)
    out: dict = {}
    fact = 1
    for n in range(top + 1):
        if n:
            fact *= n
        # (-phi)^n/n! * d^n/dphi^n of sum c_k phi^k
        for k, c in expr.items():
            if k < n:
                continue
            falling = 1
            for t in range(n):
                falling *= k - t
            coef = Fraction((-1) ** n * falling, fact)
            out[k] = out.get(k, DiffPoly()) + c * coef
    return {k: c for k, c in out.items() if not c.is_zero()}
