"""Exact differential polynomial ring and the concrete polynomial types it maps into.

Formal symbols carry a derivative order, so ``a0'''`` is the symbol
``Symbol("a", 0, 3)``.  ``v`` stands for ``2(V - E)``.  Two auxiliary kinds
exist for printing and golden comparisons: ``V`` (the potential itself) and
``E`` (the energy, a constant), plus ``W`` which prints as ``(V-E)``.

All coefficients are :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Symbol",
    "DiffPoly",
    "Poly1",
    "ParamPoly",
    "SubstitutionError",
    "to_fraction",
    "sym",
    "v",
    "a",
    "substitute",
]

# kinds whose derivative vanishes
_CONSTANT_KINDS = frozenset({"E"})
_KIND_ORDER = {"a": 0, "v": 1, "V": 2, "W": 3, "E": 4}


class SubstitutionError(KeyError):
    """A test-function symbol has no polynomial assigned to it."""


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings and floats exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    return Fraction(value)


@dataclass(frozen=True, order=False)
class Symbol:
    kind: str
    index: int = 0
    order: int = 0

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.order < 0:
            raise ValueError("derivative order must be non-negative")
        if self.kind in _CONSTANT_KINDS and self.order:
            raise ValueError(f"{self.kind} is a constant and has no derivatives")

    @property
    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.index, self.order)

    def __lt__(self, other: "Symbol"):
        return self.sort_key < other.sort_key

    def derived(self) -> "Symbol":
        return Symbol(self.kind, self.index, self.order + 1)

    def __str__(self):
        if self.kind == "a":
            base = f"a{self.index}"
        elif self.kind == "W":
            base = "(V-E)"
        else:
            base = self.kind
        if self.order == 0:
            return base
        if self.order <= 3:
            return base + "'" * self.order
        return f"{base}^({self.order})"


def sym(kind: str, index: int = 0, order: int = 0) -> "DiffPoly":
    return DiffPoly.from_symbol(Symbol(kind, index, order))


def v(order: int = 0) -> "DiffPoly":
    return sym("v", 0, order)


def a(n: int, order: int = 0) -> "DiffPoly":
    return sym("a", n, order)


# A monomial key is a tuple of (Symbol, exponent) pairs sorted by Symbol.
Key = tuple


def _mul_keys(k1: Key, k2: Key) -> Key:
    if not k1:
        return k2
    if not k2:
        return k1
    merged = dict(k1)
    for s, e in k2:
        merged[s] = merged.get(s, 0) + e
    return tuple(sorted(merged.items(), key=lambda item: item[0].sort_key))


class DiffPoly:
    """Element of the differential polynomial ring over ``Q``.

    Instances are immutable; arithmetic returns new objects.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Key, Fraction] | None = None):
        clean = {}
        if terms:
            for key, c in terms.items():
                if c:
                    clean[key] = to_fraction(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def from_symbol(cls, s: Symbol, exponent: int = 1) -> "DiffPoly":
        return cls({((s, exponent),): Fraction(1)})

    @classmethod
    def const(cls, c) -> "DiffPoly":
        return cls({(): to_fraction(c)})

    @classmethod
    def _raw(cls, terms: dict) -> "DiffPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def symbols(self) -> set[Symbol]:
        return {s for key in self._terms for s, _ in key}

    def canonical_terms(self) -> list[tuple[Key, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: _canonical_sort(kv[0]))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffPoly.const(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for key, c in other._terms.items():
            s = out.get(key, 0) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return DiffPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DiffPoly":
        c = to_fraction(c)
        if not c:
            return DiffPoly()
        return DiffPoly._raw({k: c * x for k, x in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                key = _mul_keys(k1, k2)
                s = out.get(key, 0) + c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return DiffPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomial")
        result = DiffPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derive(self) -> "DiffPoly":
        """Formal x-derivative: Leibniz rule, ``s^(k) -> s^(k+1)``."""
        out: dict = {}
        for key, c in self._terms.items():
            for i, (s, e) in enumerate(key):
                if s.kind in _CONSTANT_KINDS:
                    continue
                rest = dict(key)
                if e == 1:
                    del rest[s]
                else:
                    rest[s] = e - 1
                ds = s.derived()
                rest[ds] = rest.get(ds, 0) + 1
                new_key = tuple(sorted(rest.items(), key=lambda item: item[0].sort_key))
                val = out.get(new_key, 0) + c * e
                if val:
                    out[new_key] = val
                else:
                    out.pop(new_key, None)
        return DiffPoly._raw(out)

    def derive_n(self, n: int) -> "DiffPoly":
        p = self
        for _ in range(n):
            p = p.derive()
        return p

    def map_symbols(self, fn) -> "DiffPoly":
        """Replace each symbol ``s`` by the DiffPoly ``fn(s)`` (ring homomorphism)."""
        cache: dict = {}
        total = DiffPoly()
        for key, c in self._terms.items():
            term = DiffPoly.const(c)
            for s, e in key:
                if s not in cache:
                    cache[s] = fn(s)
                term = term * (cache[s] ** e)
            total = total + term
        return total

    # -- printing ---------------------------------------------------------

    def __str__(self):
        return pretty(self)

    def __repr__(self):
        return f"DiffPoly({pretty(self)!r})"


def _coerce(x):
    if isinstance(x, DiffPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return DiffPoly.const(x)
    return NotImplemented


def _canonical_sort(key: Key):
    return tuple((s.sort_key, e) for s, e in key)


def _print_sort(key: Key):
    # a-symbols first by index, highest derivative first; then the rest
    a_part = [(s.index, -s.order, -e) for s, e in key if s.kind == "a"]
    rest = [(s.sort_key, e) for s, e in key if s.kind != "a"]
    return (a_part or [(10**9, 0, 0)], sum(e for _, e in rest), rest)


def _fmt_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


def pretty(p: DiffPoly) -> str:
    """Deterministic text form, e.g. ``(-1/6)*a0''' + (7/6)*v*a0'``."""
    if p.is_zero():
        return "0"
    parts = []
    for i, (key, c) in enumerate(sorted(p._terms.items(), key=lambda kv: _print_sort(kv[0]))):
        # later terms carry their sign in the joining operator
        negate = i > 0 and c < 0
        if negate:
            c = -c
        factors = []
        # non-a factors first (v, V, W), a-factors last, as in the usual notation
        ordered = sorted(key, key=lambda se: (se[0].kind == "a", se[0].sort_key))
        for s, e in ordered:
            factors.append(str(s) if e == 1 else f"{s}^{e}")
        if not factors:
            body = _fmt_coeff(c)
        elif c == 1:
            body = "*".join(factors)
        elif c == -1:
            body = "-" + "*".join(factors)
        else:
            body = _fmt_coeff(c) + "*" + "*".join(factors)
        parts.append((negate, body))
    out = parts[0][1]
    for negate, body in parts[1:]:
        out += (" - " if negate else " + ") + body
    return out


# ---------------------------------------------------------------------------
# Concrete polynomials


class Poly1:
    """Univariate polynomial in x with exact rational coefficients (ascending)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "Poly1":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, Poly1):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly1([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, Poly1) else Poly1([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a_ = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b_ = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly1(x + y for x, y in zip(a_, b_))

    __radd__ = __add__

    def __neg__(self):
        return Poly1(-c for c in self.coeffs)

    def __sub__(self, other):
        other = other if isinstance(other, Poly1) else Poly1([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly1):
            c = to_fraction(other)
            return Poly1(c * x for x in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Poly1()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return Poly1(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Poly1([1])
        for _ in range(n):
            result = result * self
        return result

    def deriv(self, k: int = 1) -> "Poly1":
        cs = list(self.coeffs)
        for _ in range(k):
            cs = [i * c for i, c in enumerate(cs)][1:]
        return Poly1(cs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def as_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    def evalf(self, x):
        """Float evaluation (vectorized over numpy arrays)."""
        return np.polynomial.polynomial.polyval(x, self.as_float()) if self.coeffs else np.zeros_like(np.asarray(x, dtype=float))

    def __str__(self):
        return _poly_text({(i,): c for i, c in enumerate(self.coeffs)}, ("x",))

    def __repr__(self):
        return f"Poly1({str(self)!r})"


class ParamPoly:
    """Polynomial in x whose coefficients are polynomials in E and lambda_1..lambda_p.

    Stored sparsely as ``{(i_x, i_E, e_1, ..., e_p): Fraction}``.
    """

    __slots__ = ("nparams", "terms", "_compiled")

    def __init__(self, terms: Mapping[tuple, object] | None = None, nparams: int = 0):
        self.nparams = nparams
        clean = {}
        for key, c in (terms or {}).items():
            if len(key) != nparams + 2:
                raise ValueError(f"exponent tuple {key} does not match arity {nparams}")
            c = to_fraction(c)
            if c:
                clean[tuple(key)] = clean.get(tuple(key), 0) + c
        self.terms = {k: c for k, c in clean.items() if c}
        self._compiled = None

    # constructors
    @classmethod
    def const(cls, c, nparams: int = 0) -> "ParamPoly":
        return cls({(0, 0) + (0,) * nparams: c}, nparams)

    @classmethod
    def x(cls, nparams: int = 0) -> "ParamPoly":
        return cls({(1, 0) + (0,) * nparams: 1}, nparams)

    @classmethod
    def energy(cls, nparams: int = 0) -> "ParamPoly":
        return cls({(0, 1) + (0,) * nparams: 1}, nparams)

    @classmethod
    def param(cls, j: int, nparams: int) -> "ParamPoly":
        """The parameter lambda_{j+1} (zero-based ``j``)."""
        key = [0, 0] + [0] * nparams
        key[2 + j] = 1
        return cls({tuple(key): 1}, nparams)

    @classmethod
    def from_poly1(cls, p: Poly1, nparams: int = 0) -> "ParamPoly":
        return cls({(i, 0) + (0,) * nparams: c for i, c in enumerate(p.coeffs)}, nparams)

    def with_nparams(self, nparams: int) -> "ParamPoly":
        if nparams < self.nparams:
            if any(any(k[2 + nparams:]) for k in self.terms):
                raise ValueError("cannot drop parameters that are in use")
            return ParamPoly({k[: 2 + nparams]: c for k, c in self.terms.items()}, nparams)
        pad = (0,) * (nparams - self.nparams)
        return ParamPoly({k + pad: c for k, c in self.terms.items()}, nparams)

    # arithmetic
    def _check(self, other: "ParamPoly"):
        if other.nparams != self.nparams:
            raise ValueError("parameter arity mismatch")

    def _lift(self, other):
        if isinstance(other, ParamPoly):
            self._check(other)
            return other
        return ParamPoly.const(other, self.nparams)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return ParamPoly(out, self.nparams)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly({k: -c for k, c in self.terms.items()}, self.nparams)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(x + y for x, y in zip(k1, k2))
                out[key] = out.get(key, 0) + c1 * c2
        return ParamPoly(out, self.nparams)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = ParamPoly.const(1, self.nparams)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            return self.nparams == other.nparams and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == ParamPoly.const(other, self.nparams)
        return NotImplemented

    def __hash__(self):
        return hash((self.nparams, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # calculus: slot 0 = x, slot 1 = E, slot 2+j = lambda_j
    def diff(self, slot: int, times: int = 1) -> "ParamPoly":
        out = dict(self.terms)
        for _ in range(times):
            nxt = {}
            for k, c in out.items():
                e = k[slot]
                if e:
                    nk = list(k)
                    nk[slot] = e - 1
                    nk = tuple(nk)
                    nxt[nk] = nxt.get(nk, 0) + c * e
            out = nxt
        return ParamPoly(out, self.nparams)

    def dx(self, times: int = 1) -> "ParamPoly":
        return self.diff(0, times)

    def dE(self, times: int = 1) -> "ParamPoly":
        return self.diff(1, times)

    def dlam(self, j: int, times: int = 1) -> "ParamPoly":
        return self.diff(2 + j, times)

    def degree_in(self, slot: int) -> int:
        return max((k[slot] for k in self.terms), default=-1)

    def param_degree(self) -> int:
        return max((sum(k[2:]) for k in self.terms), default=-1)

    # evaluation
    def at(self, E, lam: Sequence = ()) -> Poly1:
        """Exact specialization at rational (E, lambda); returns a Poly1 in x."""
        if len(lam) != self.nparams:
            raise ValueError(f"expected {self.nparams} parameters, got {len(lam)}")
        E = to_fraction(E)
        lam = [to_fraction(t) for t in lam]
        deg = self.degree_in(0)
        cs = [Fraction(0)] * (deg + 1)
        for k, c in self.terms.items():
            w = c * E ** k[1]
            for t, e in zip(lam, k[2:]):
                if e:
                    w *= t**e
            cs[k[0]] += w
        return Poly1(cs)

    def substitute_energy(self, E0, scale=1) -> "ParamPoly":
        """Exact affine reparametrization ``E -> E0 + scale*t`` (t stored in the E slot)."""
        E0, scale = to_fraction(E0), to_fraction(scale)
        out: dict = {}
        for k, c in self.terms.items():
            n = k[1]
            # (E0 + s t)^n = sum_j C(n,j) E0^(n-j) s^j t^j
            binom = 1
            for j in range(n + 1):
                key = (k[0], j) + k[2:]
                out[key] = out.get(key, 0) + c * binom * E0 ** (n - j) * scale**j
                binom = binom * (n - j) // (j + 1)
        return ParamPoly(out, self.nparams)

    def _compile(self):
        if self._compiled is None:
            keys = sorted(self.terms)
            exps = np.array(keys, dtype=np.int64).reshape(len(keys), self.nparams + 2)
            coeffs = np.array([float(self.terms[k]) for k in keys], dtype=float)
            self._compiled = (exps, coeffs)
        return self._compiled

    def coeffs_float(self, E: float, lam: Sequence[float] = ()) -> np.ndarray:
        """Float coefficients in x (ascending) at fixed (E, lambda)."""
        exps, coeffs = self._compile()
        if not len(coeffs):
            return np.zeros(0)
        w = coeffs * float(E) ** exps[:, 1]
        for j, t in enumerate(lam):
            w = w * float(t) ** exps[:, 2 + j]
        out = np.bincount(exps[:, 0], weights=w)
        return out

    def float_evaluator(self, E: float):
        """Fast ``lam -> coeffs_float(E, lam)`` for repeated evaluation at one energy."""
        exps, coeffs = self._compile()
        if not len(coeffs):
            return lambda lam: np.zeros(0)
        deg = int(exps[:, 0].max())
        mons = sorted({tuple(k) for k in exps[:, 2:].tolist()})
        index = {m: i for i, m in enumerate(mons)}
        M = np.zeros((deg + 1, len(mons)))
        w = coeffs * float(E) ** exps[:, 1]
        for k, wk in zip(exps.tolist(), w):
            M[k[0], index[tuple(k[2:])]] += wk
        P = np.array(mons, dtype=float).reshape(len(mons), self.nparams)
        if self.nparams == 0:
            return lambda lam: M[:, 0].copy()
        linear = bool(np.all(P.sum(axis=1) <= 1))
        if linear:
            # columns: constant (if present) and lambda_j
            sel = [next((i for i, m in enumerate(mons) if m[j] == 1), None) for j in range(self.nparams)]
            const = index.get((0,) * self.nparams)
            base = M[:, const].copy() if const is not None else np.zeros(deg + 1)
            cols = np.stack([M[:, i] if i is not None else np.zeros(deg + 1) for i in sel], axis=1)
            return lambda lam: base + cols @ np.asarray(lam, dtype=float)
        return lambda lam: M @ np.prod(np.asarray(lam, dtype=float) ** P, axis=1)

    def evalf(self, x: float, E: float, lam: Sequence[float] = ()) -> float:
        cs = self.coeffs_float(E, lam)
        return float(np.polynomial.polynomial.polyval(x, cs)) if len(cs) else 0.0

    def __str__(self):
        names = ("x", "E") + tuple(f"l{j + 1}" for j in range(self.nparams))
        return _poly_text(self.terms, names)

    def __repr__(self):
        return f"ParamPoly({str(self)!r}, nparams={self.nparams})"


def _poly_text(terms: Mapping[tuple, Fraction], names: Sequence[str]) -> str:
    """Render a sparse polynomial in the CLI input grammar (highest x power first)."""
    if not terms:
        return "0"
    parts = []
    order = sorted(terms, key=lambda k: (-k[0], tuple(-e for e in k[1:])))
    for k in order:
        c = terms[k]
        factors = []
        for name, e in zip(names, k):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        cstr = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
        if factors:
            body = "*".join(factors) if mag == 1 else cstr + "*" + "*".join(factors)
        else:
            body = cstr
        parts.append(("-" if c < 0 else "+", body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# substitution into concrete polynomials


def substitute(p: DiffPoly, V: Poly1, assignments: Mapping[int, ParamPoly] | None = None,
               nparams: int | None = None) -> ParamPoly:
    """Evaluate a differential expression on concrete polynomials.

    ``v^(k) -> 2 V^(k)(x) - 2E [k = 0]``; ``a_n^(k)`` becomes the k-th x-derivative of
    ``assignments[n]``.  ``V``/``W``/``E`` symbols are mapped consistently.
    """
    assignments = dict(assignments or {})
    if nparams is None:
        nparams = max((q.nparams for q in assignments.values()), default=0)
    assignments = {n: q.with_nparams(nparams) if q.nparams != nparams else q for n, q in assignments.items()}
    Vp = ParamPoly.from_poly1(V, nparams)
    Ep = ParamPoly.energy(nparams)

    missing = sorted({s.index for s in p.symbols() if s.kind == "a"} - set(assignments))
    if missing:
        raise SubstitutionError(f"no assignment for a{missing[0]}")

    cache: dict[Symbol, ParamPoly] = {}

    def image(s: Symbol) -> ParamPoly:
        if s in cache:
            return cache[s]
        if s.kind == "a":
            img = assignments[s.index].dx(s.order)
        elif s.kind == "v":
            img = 2 * Vp.dx(s.order) - (2 * Ep if s.order == 0 else 0)
        elif s.kind == "V":
            img = Vp.dx(s.order)
        elif s.kind == "W":
            img = Vp.dx(s.order) - (Ep if s.order == 0 else 0)
        else:  # E
            img = Ep
        cache[s] = img
        return img

    total = ParamPoly({}, nparams)
    for key, c in p.canonical_terms():
        term = ParamPoly.const(c, nparams)
        for s, e in key:
            term = term * image(s) ** e
        total = total + term
    return total


def v_to_potential(p: DiffPoly, grouped: bool = True) -> DiffPoly:
    """Rewrite ``v`` in terms of the potential.

    ``grouped=True`` keeps ``(V-E)`` as a single symbol ``W`` (paper-style printing);
    otherwise ``v -> 2V - 2E`` is fully expanded in the symbols ``V`` and ``E``.
    """

    def fn(s: Symbol) -> DiffPoly:
        if s.kind != "v":
            return DiffPoly.from_symbol(s)
        if s.order:
            return 2 * sym("V", 0, s.order)
        if grouped:
            return 2 * sym("W")
        return 2 * sym("V") - 2 * sym("E")

    return p.map_symbols(fn)


def expand_grouped(p: DiffPoly) -> DiffPoly:
    """Expand ``W = V - E`` (and ``W^(k) = V^(k)``) into ``V`` and ``E`` symbols."""

    def fn(s: Symbol) -> DiffPoly:
        if s.kind != "W":
            return DiffPoly.from_symbol(s)
        return sym("V", 0, s.order) - (sym("E") if s.order == 0 else 0)

    return p.map_symbols(fn)


def all_monomials(nvars: int, max_degree: int):
    """Exponent tuples of total degree <= max_degree (graded, deterministic)."""
    for deg in range(max_degree + 1):
        for exps in product(range(deg + 1), repeat=nvars):
            if sum(exps) == deg:
                yield exps
