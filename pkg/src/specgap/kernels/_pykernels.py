"""Pure-Python versions of the compiled kernels, same signatures and results."""
from __future__ import annotations

import math

import numpy as np

_TINY = 1e-300
_BIG = 1e150


def tridiag_count(d, e2, x):
    """Number of eigenvalues strictly below x (LDL^T inertia count)."""
    d = d.tolist() if hasattr(d, "tolist") else d
    e2 = e2.tolist() if hasattr(e2, "tolist") else e2
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0:
            q = _TINY
        q = d[i] - x - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def tridiag_bisect(d, e2, k, lo, hi, tol):
    """k-th (zero-based) eigenvalue by bisection on the inertia count."""
    d, e2 = d.tolist(), e2.tolist()
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if tridiag_count(d, e2, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _step(y1, y0, fi, fprev, fnext, c):
    return (2.0 * y1 * (1.0 + 5.0 * c * fi) - y0 * (1.0 - c * fprev)) / (1.0 - c * fnext)


def numerov_nodes(f, h):
    """Sign changes of the Numerov solution of y'' = f y with y[0] = 0, y[1] = h."""
    f = f.tolist()
    n = len(f)
    c = h * h / 12.0
    y0, y1 = 0.0, h
    nodes = 0
    for i in range(1, n - 1):
        y2 = _step(y1, y0, f[i], f[i - 1], f[i + 1], c)
        if i + 1 < n - 1 and ((y2 < 0 < y1) or (y2 > 0 > y1)):
            nodes += 1
        elif i + 1 < n - 1 and y2 == 0:
            y2 = -_TINY if y1 > 0 else _TINY
        if abs(y2) > _BIG:
            y1 /= _BIG
            y2 /= _BIG
        y0, y1 = y1, y2
    return nodes


def numerov_match(f, h, m):
    """Left and right Numerov solutions at the matching pair (m, m+1)."""
    f = f.tolist()
    n = len(f)
    c = h * h / 12.0
    y0, y1 = 0.0, h
    for i in range(1, m + 1):
        y0, y1 = y1, _step(y1, y0, f[i], f[i - 1], f[i + 1], c)
        if abs(y1) > _BIG:
            y0 /= _BIG
            y1 /= _BIG
    l_m, l_m1 = y0, y1
    y0, y1 = 0.0, h
    for i in range(n - 2, m, -1):
        y0, y1 = y1, _step(y1, y0, f[i], f[i + 1], f[i - 1], c)
        if abs(y1) > _BIG:
            y0 /= _BIG
            y1 /= _BIG
    r_m1, r_m = y0, y1
    s = abs(l_m) + abs(l_m1)
    if s > 0:
        l_m, l_m1 = l_m / s, l_m1 / s
    s = abs(r_m) + abs(r_m1)
    if s > 0:
        r_m, r_m1 = r_m / s, r_m1 / s
    return l_m, l_m1, r_m, r_m1


def _horner(c, x):
    acc = 0.0
    for ci in reversed(c):
        acc = acc * x + ci
    return acc


def rk4(vcoeffs, E, x0, y0, dy0, h, nsteps, limit):
    """Classical RK4 for y'' = 2 (V(x) - E) y; stops early once |y| exceeds ``limit``."""
    c = list(vcoeffs)
    ys = np.empty(nsteps + 1)
    dys = np.empty(nsteps + 1)
    y, p = y0, dy0
    ys[0], dys[0] = y, p
    for i in range(nsteps):
        x = x0 + i * h
        fe = 2.0 * (_horner(c, x) - E)
        fm = 2.0 * (_horner(c, x + 0.5 * h) - E)
        f1 = 2.0 * (_horner(c, x + h) - E)
        k1y, k1p = p, fe * y
        k2y, k2p = p + 0.5 * h * k1p, fm * (y + 0.5 * h * k1y)
        k3y, k3p = p + 0.5 * h * k2p, fm * (y + 0.5 * h * k2y)
        k4y, k4p = p + h * k3p, f1 * (y + h * k3y)
        y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        ys[i + 1], dys[i + 1] = y, p
        if not (abs(y) <= limit and abs(p) <= limit):
            return ys[: i + 2], dys[: i + 2], i + 1
    return ys, dys, nsteps


def _peval(c, x):
    acc = 0.0
    for ci in reversed(c):
        acc = acc * x + ci
    return acc


def _root_in(c, dc, a, b):
    fa = _peval(c, a)
    x = 0.5 * (a + b)
    for _ in range(200):
        fx = _peval(c, x)
        if fx == 0:
            return x
        if (fx < 0) == (fa < 0):
            a, fa = x, fx
        else:
            b = x
        d = _peval(dc, x)
        xn = x - fx / d if d != 0 else 0.5 * (a + b)
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if abs(xn - x) <= 1e-15 * (1.0 + abs(x)) or b - a <= 1e-15 * (1.0 + abs(a)):
            return xn
        x = xn
    return x


def crit_extrema(c):
    """(min, max) of the polynomial over the real roots of its derivative."""
    c = [float(t) for t in c]
    n = len(c) - 1
    if n < 2:
        raise ValueError("need degree >= 2")
    ders = [c]
    for _ in range(n):
        p = ders[-1]
        ders.append([p[i + 1] * (i + 1) for i in range(len(p) - 1)])
    roots = [-ders[n - 1][0] / ders[n - 1][1]]
    for k in range(n - 2, 0, -1):
        q, dq = ders[k], ders[k + 1]
        m = len(q) - 1
        bound = 1.0 + max(abs(q[i] / q[m]) for i in range(m))
        new = []
        a = -bound
        fa = _peval(q, a)
        for b in roots + [bound]:
            if b <= a:
                continue
            fb = _peval(q, b)
            if fa == 0:
                new.append(a)
            elif (fa < 0) != (fb < 0) and fb != 0:
                new.append(_root_in(q, dq, a, b))
            a, fa = b, fb
        if fa == 0 and a < bound:
            new.append(a)
        roots = new
    vals = [_peval(c, r) for r in roots]
    return (min(vals), max(vals)) if vals else (math.inf, -math.inf)
