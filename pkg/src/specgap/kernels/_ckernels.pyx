# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the eigenvalue oracles and the ODE integrator."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

cdef double _TINY = 1e-300
cdef double _BIG = 1e150


def tridiag_count(const double[::1] d, const double[::1] e2, double x):
    """Number of eigenvalues strictly below x (LDL^T inertia count)."""
    cdef Py_ssize_t n = d.shape[0], i
    cdef int count = 0
    cdef double q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, n):
        if q == 0:
            q = _TINY
        q = d[i] - x - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def tridiag_bisect(const double[::1] d, const double[::1] e2, int k,
                   double lo, double hi, double tol):
    """k-th (zero-based) eigenvalue by bisection on the inertia count."""
    cdef double mid
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if tridiag_count(d, e2, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def numerov_nodes(const double[::1] f, double h):
    """Sign changes of the Numerov solution of y'' = f y with y[0] = 0, y[1] = h."""
    cdef Py_ssize_t n = f.shape[0], i
    cdef double c = h * h / 12.0
    cdef double y0 = 0.0, y1 = h, y2
    cdef int nodes = 0
    for i in range(1, n - 1):
        y2 = (2.0 * y1 * (1.0 + 5.0 * c * f[i]) - y0 * (1.0 - c * f[i - 1])) / (1.0 - c * f[i + 1])
        if i + 1 < n - 1 and ((y2 < 0 and y1 > 0) or (y2 > 0 and y1 < 0)):
            nodes += 1
        elif i + 1 < n - 1 and y2 == 0:
            y2 = -_TINY if y1 > 0 else _TINY
        if fabs(y2) > _BIG:
            y1 /= _BIG
            y2 /= _BIG
        y0 = y1
        y1 = y2
    return nodes


def numerov_match(const double[::1] f, double h, Py_ssize_t m):
    """Left and right Numerov solutions at the matching pair (m, m+1).

    Both start from zero at their boundary with a positive second value and are
    rescaled only by positive factors, so the Casoratian keeps its sign.
    """
    cdef Py_ssize_t n = f.shape[0], i
    cdef double c = h * h / 12.0
    cdef double y0, y1, y2, s
    cdef double l_m, l_m1, r_m, r_m1
    y0 = 0.0
    y1 = h
    if m == 0:
        l_m, l_m1 = y0, y1
    for i in range(1, m + 1):
        y2 = (2.0 * y1 * (1.0 + 5.0 * c * f[i]) - y0 * (1.0 - c * f[i - 1])) / (1.0 - c * f[i + 1])
        y0 = y1
        y1 = y2
        if fabs(y1) > _BIG:
            y0 /= _BIG
            y1 /= _BIG
    l_m, l_m1 = y0, y1
    y0 = 0.0
    y1 = h
    for i in range(n - 2, m, -1):
        y2 = (2.0 * y1 * (1.0 + 5.0 * c * f[i]) - y0 * (1.0 - c * f[i + 1])) / (1.0 - c * f[i - 1])
        y0 = y1
        y1 = y2
        if fabs(y1) > _BIG:
            y0 /= _BIG
            y1 /= _BIG
    r_m1, r_m = y0, y1
    s = fabs(l_m) + fabs(l_m1)
    if s > 0:
        l_m /= s
        l_m1 /= s
    s = fabs(r_m) + fabs(r_m1)
    if s > 0:
        r_m /= s
        r_m1 /= s
    return l_m, l_m1, r_m, r_m1


cdef inline double _horner(const double[::1] c, double x) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(c.shape[0] - 1, -1, -1):
        acc = acc * x + c[i]
    return acc


def rk4(const double[::1] vcoeffs, double E, double x0, double y0, double dy0,
        double h, Py_ssize_t nsteps, double limit):
    """Classical RK4 for y'' = 2 (V(x) - E) y; stops early once |y| exceeds ``limit``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ys = np.empty(nsteps + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dys = np.empty(nsteps + 1)
    cdef Py_ssize_t i
    cdef double x = x0, y = y0, p = dy0
    cdef double k1y, k1p, k2y, k2p, k3y, k3p, k4y, k4p, fm, fe
    ys[0] = y
    dys[0] = p
    for i in range(nsteps):
        x = x0 + i * h
        fe = 2.0 * (_horner(vcoeffs, x) - E)
        k1y = p
        k1p = fe * y
        fm = 2.0 * (_horner(vcoeffs, x + 0.5 * h) - E)
        k2y = p + 0.5 * h * k1p
        k2p = fm * (y + 0.5 * h * k1y)
        k3y = p + 0.5 * h * k2p
        k3p = fm * (y + 0.5 * h * k2y)
        fe = 2.0 * (_horner(vcoeffs, x + h) - E)
        k4y = p + h * k3p
        k4p = fe * (y + h * k3y)
        y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        ys[i + 1] = y
        dys[i + 1] = p
        if not (fabs(y) <= limit and fabs(p) <= limit):
            return ys[: i + 2], dys[: i + 2], i + 1
    return ys, dys, nsteps


cdef double _peval(const double* c, int n, double x) nogil:
    cdef int i
    cdef double acc = c[n]
    for i in range(n - 1, -1, -1):
        acc = acc * x + c[i]
    return acc


cdef double _root_in(const double* c, const double* dc, int n, double a, double b) nogil:
    """Root of c (degree n) in [a, b] where c changes sign; Newton steps guarded by bisection."""
    cdef double fa = _peval(c, n, a), fb, x, fx, d, xn
    cdef int it
    x = 0.5 * (a + b)
    for it in range(200):
        fx = _peval(c, n, x)
        if fx == 0:
            return x
        if (fx < 0) == (fa < 0):
            a = x
            fa = fx
        else:
            b = x
        d = _peval(dc, n - 1, x)
        xn = x - fx / d if d != 0 else 0.5 * (a + b)
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if fabs(xn - x) <= 1e-15 * (1.0 + fabs(x)) or b - a <= 1e-15 * (1.0 + fabs(a)):
            return xn
        x = xn
    return x


def crit_extrema(const double[::1] c):
    """(min, max) of the polynomial over the real roots of its derivative.

    Real roots of every derivative are found from the highest derivative down,
    each bracketed by the roots of the next one.  Returns (inf, -inf) when the
    derivative has no real root.
    """
    cdef int n = c.shape[0] - 1, m, k, i, nr, nnew
    if n < 2:
        raise ValueError("need degree >= 2")
    # ders[k] = k-th derivative, stored with stride n + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ders_a = np.zeros((n + 1) * (n + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] roots_a = np.zeros(n + 2)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] new_a = np.zeros(n + 2)
    cdef double* ders = &ders_a[0]
    cdef double* roots = &roots_a[0]
    cdef double* new = &new_a[0]
    cdef double bound, a, b, fa, fb, lo = INFINITY, hi = -INFINITY, val
    for i in range(n + 1):
        ders[i] = c[i]
    for k in range(1, n + 1):
        for i in range(n - k + 1):
            ders[k * (n + 1) + i] = ders[(k - 1) * (n + 1) + i + 1] * (i + 1)
    # roots of the (n-1)-th derivative (linear)
    m = n - 1
    nr = 1
    roots[0] = -ders[m * (n + 1)] / ders[m * (n + 1) + 1]
    for k in range(n - 2, 0, -1):
        # polynomial ders[k] has degree n - k
        m = n - k
        bound = 0.0
        for i in range(m):
            bound = max(bound, fabs(ders[k * (n + 1) + i] / ders[k * (n + 1) + m]))
        bound += 1.0
        nnew = 0
        a = -bound
        fa = _peval(&ders[k * (n + 1)], m, a)
        for i in range(nr + 1):
            b = roots[i] if i < nr else bound
            if b <= a:
                continue
            fb = _peval(&ders[k * (n + 1)], m, b)
            if fa == 0:
                new[nnew] = a
                nnew += 1
            elif (fa < 0) != (fb < 0) and fb != 0:
                new[nnew] = _root_in(&ders[k * (n + 1)], &ders[(k + 1) * (n + 1)], m, a, b)
                nnew += 1
            a = b
            fa = fb
        if fa == 0 and a < bound:
            new[nnew] = a
            nnew += 1
        for i in range(nnew):
            roots[i] = new[i]
        nr = nnew
    for i in range(nr):
        val = _peval(&ders[0], n, roots[i])
        if val < lo:
            lo = val
        if val > hi:
            hi = val
    return lo, hi
