# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid kernel for the brute-force oracle.

For each node ``(u1, u2)`` finds the smallest ``x`` with
``V(u1, u2) - V0(x) >= 0``. With ``x = cosh(t)/2`` the smallest eigenvalue
``g(t)`` of the difference is concave in ``t``, so the feasible set is an
interval: a golden-section search locates a feasible ``t`` (or proves there
is none), bisection brackets the left end to ``xtol`` and a linear
interpolation of the gap inside the final bracket locates it.
"""
import numpy as np

cdef int MAX_SLIDES = 200
cdef double POLISH_TOL = 1e-12

from libc.math cimport sqrt, cosh, acosh, exp, INFINITY, fmin

cdef double GOLD = 0.6180339887498949


cdef double jacobi_min_eig(double[4][4] a) noexcept nogil:
    """Smallest eigenvalue of a symmetric 4x4 matrix (cyclic Jacobi, destroys ``a``)."""
    cdef int sweep, p, q, k
    cdef double off, diag, theta, t, c, s, tau, apq, akp, akq, app, aqq
    for sweep in range(50):
        off = 0.0
        diag = 0.0
        for p in range(4):
            diag += a[p][p] * a[p][p]
            for q in range(p + 1, 4):
                off += a[p][q] * a[p][q]
        if off <= 1e-36 * diag or off < 1e-300:
            break
        for p in range(3):
            for q in range(p + 1, 4):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                app = a[p][p]
                aqq = a[q][q]
                theta = (aqq - app) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + sqrt(1.0 + theta * theta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                tau = s / (1.0 + c)
                a[p][p] = app - t * apq
                a[q][q] = aqq + t * apq
                a[p][q] = 0.0
                a[q][p] = 0.0
                for k in range(4):
                    if k != p and k != q:
                        akp = a[k][p]
                        akq = a[k][q]
                        a[k][p] = akp - s * (akq + tau * akp)
                        a[p][k] = a[k][p]
                        a[k][q] = akq + s * (akp - tau * akq)
                        a[q][k] = a[k][q]
    return fmin(fmin(a[0][0], a[1][1]), fmin(a[2][2], a[3][3]))


cdef double gap(double[4][4] v, double x) noexcept nogil:
    """Smallest eigenvalue of ``v - V0(x)``."""
    cdef double[4][4] m
    cdef int i, j
    cdef double y = sqrt(fmax0((x - 0.5) * (x + 0.5)))
    for i in range(4):
        for j in range(4):
            m[i][j] = v[i][j]
    m[0][0] -= x
    m[1][1] -= x
    m[2][2] -= x
    m[3][3] -= x
    m[0][2] -= y
    m[2][0] -= y
    m[1][3] += y
    m[3][1] += y
    return jacobi_min_eig(m)


cdef inline double fmax0(double a) noexcept nogil:
    return a if a > 0.0 else 0.0


cdef void node(double b1, double b2, double c, double d, double u1, double u2,
               double feas_tol, double xtol, double* x_out, double* g_out) noexcept nogil:
    cdef double[4][4] v
    cdef int i, j, it
    cdef double s = sqrt(u1 * u2)
    cdef double xcap, thi, lo, hi, m1, m2, g1, g2, gbest, tbest, xl, xh, xm, g, g0, gl, gh
    for i in range(4):
        for j in range(4):
            v[i][j] = 0.0
    v[0][0] = b1 * u1
    v[1][1] = b1 / u1
    v[2][2] = b2 * u2
    v[3][3] = b2 / u2
    v[0][2] = c * s
    v[2][0] = c * s
    v[1][3] = d / s
    v[3][1] = d / s

    g = gap(v, 0.5)
    g0 = g
    if g >= -feas_tol:
        x_out[0] = 0.5
        g_out[0] = g
        return
    xcap = fmin(fmin(v[0][0], v[1][1]), fmin(v[2][2], v[3][3]))
    if xcap <= 0.5:
        x_out[0] = INFINITY
        g_out[0] = g
        return
    thi = acosh(2.0 * xcap)
    gbest = g
    tbest = 0.0
    g = gap(v, xcap)
    if g > gbest:
        gbest = g
        tbest = thi
    if gbest < -feas_tol:
        lo = 0.0
        hi = thi
        m1 = hi - GOLD * (hi - lo)
        m2 = lo + GOLD * (hi - lo)
        g1 = gap(v, 0.5 * cosh(m1))
        g2 = gap(v, 0.5 * cosh(m2))
        for it in range(200):
            if g1 > gbest:
                gbest = g1
                tbest = m1
            if g2 > gbest:
                gbest = g2
                tbest = m2
            if gbest >= -feas_tol or hi - lo <= 1e-15 * (1.0 + thi):
                break
            if g1 < g2:
                lo = m1
                m1 = m2
                g1 = g2
                m2 = lo + GOLD * (hi - lo)
                g2 = gap(v, 0.5 * cosh(m2))
            else:
                hi = m2
                m2 = m1
                g2 = g1
                m1 = hi - GOLD * (hi - lo)
                g1 = gap(v, 0.5 * cosh(m1))
    g_out[0] = gbest
    if gbest < -feas_tol:
        x_out[0] = INFINITY
        return
    xl = 0.5
    gl = g0
    xh = 0.5 * cosh(tbest)
    if tbest == thi:
        xh = xcap
    gh = gbest
    while xh - xl > xtol:
        xm = 0.5 * (xl + xh)
        g = gap(v, xm)
        if g >= -feas_tol:
            xh = xm
            gh = g
        else:
            xl = xm
            gl = g
    # the gap is smooth across the final bracket: interpolate to its crossing of -feas_tol
    xm = xl + (xh - xl) * (-feas_tol - gl) / (gh - gl)
    x_out[0] = xm if xl <= xm <= xh else xh


cdef bint better(double x1, double l1, double g1, double x0, double l0, double g0) noexcept nogil:
    """Feasible beats infeasible; then smaller (x, log u2); among infeasible, larger gap."""
    cdef bint ok1 = x1 < INFINITY
    cdef bint ok0 = x0 < INFINITY
    if ok1 != ok0:
        return ok1
    if ok1:
        return x1 < x0 or (x1 == x0 and l1 < l0)
    return g1 > g0


cdef void line_node(double b1, double b2, double c, double d, double u1, int n, double half,
                    int rounds, double shrink, double feas_tol, double xtol,
                    double* x_out, double* l_out, double* g_out) noexcept nogil:
    """Minimize over ``log u2`` at fixed ``u1`` by shrink-and-rescan."""
    cdef double center = 0.0, bx = INFINITY, bl = 0.0, bg = -INFINITY
    cdef double lx, ll, lg, x, g, l, step = 0.0, lo, hi, m1, m2, x1, x2
    cdef int level = 0, slides = 0, k, kbest
    cdef bint improved
    while level <= rounds:
        lx = INFINITY
        ll = 0.0
        lg = -INFINITY
        kbest = -1
        for k in range(n):
            l = center - half + 2.0 * half * k / (n - 1)
            node(b1, b2, c, d, u1, exp(l), feas_tol, xtol, &x, &g)
            if kbest < 0 or better(x, l, g, lx, ll, lg):
                lx = x
                ll = l
                lg = g
                kbest = k
        improved = better(lx, ll, lg, bx, bl, bg)
        if improved:
            bx = lx
            bl = ll
            bg = lg
        center = bl
        # an edge minimum of a refined box may continue outside it: slide instead of shrinking
        if level > 0 and improved and (kbest == 0 or kbest == n - 1) and slides < MAX_SLIDES:
            slides += 1
            continue
        level += 1
        step = 2.0 * half / (n - 1)
        half *= shrink
    if bx < INFINITY:
        # the profile is a unimodal V: golden section within one cell of the best node
        lo = bl - step
        hi = bl + step
        m1 = hi - GOLD * (hi - lo)
        m2 = lo + GOLD * (hi - lo)
        node(b1, b2, c, d, u1, exp(m1), feas_tol, xtol, &x1, &g)
        node(b1, b2, c, d, u1, exp(m2), feas_tol, xtol, &x2, &g)
        for k in range(200):
            if x1 < bx:
                bx = x1
                bl = m1
            if x2 < bx:
                bx = x2
                bl = m2
            if hi - lo <= POLISH_TOL:
                break
            if x1 > x2:
                lo = m1
                m1 = m2
                x1 = x2
                m2 = lo + GOLD * (hi - lo)
                node(b1, b2, c, d, u1, exp(m2), feas_tol, xtol, &x2, &g)
            else:
                hi = m2
                m2 = m1
                x2 = x1
                m1 = hi - GOLD * (hi - lo)
                node(b1, b2, c, d, u1, exp(m1), feas_tol, xtol, &x1, &g)
    x_out[0] = bx
    l_out[0] = bl
    g_out[0] = bg


def line_min(double b1, double b2, double c, double d, u1_values, int n, double half,
             int rounds, double shrink, double feas_tol=1e-12, double xtol=1e-10):
    """For each ``u1`` the smallest feasible ``x`` over ``log u2``.

    The search box is ``[-half, half]`` in ``log u2`` on an ``n``-point grid,
    refined ``rounds`` times by ``shrink``. Returns arrays ``(x, log_u2, gap)``.
    """
    cdef double[::1] u1v = np.ascontiguousarray(u1_values, dtype=np.float64)
    cdef Py_ssize_t m = u1v.shape[0], i
    xs = np.empty(m)
    ls = np.empty(m)
    gs = np.empty(m)
    cdef double[::1] xv = xs
    cdef double[::1] lv = ls
    cdef double[::1] gv = gs
    if n < 2:
        raise ValueError("need at least 2 grid points")
    with nogil:
        for i in range(m):
            line_node(b1, b2, c, d, u1v[i], n, half, rounds, shrink, feas_tol, xtol, &xv[i], &lv[i], &gv[i])
    return xs, ls, gs


def min_x_node(double b1, double b2, double c, double d, double u1, double u2,
               double feas_tol=1e-12, double xtol=1e-10):
    """Return ``(x_min, best_gap)`` at one node; ``x_min`` is ``inf`` if infeasible."""
    cdef double x, g
    node(b1, b2, c, d, u1, u2, feas_tol, xtol, &x, &g)
    return x, g


def scan_grid(double b1, double b2, double c, double d, u1_values, u2_values,
              double feas_tol=1e-12, double xtol=1e-10):
    """Evaluate every node of the tensor grid ``u1_values x u2_values``.

    Returns ``(x, gap)`` arrays of shape ``(len(u1_values), len(u2_values))``.
    """
    cdef double[::1] u1v = np.ascontiguousarray(u1_values, dtype=np.float64)
    cdef double[::1] u2v = np.ascontiguousarray(u2_values, dtype=np.float64)
    cdef Py_ssize_t n1 = u1v.shape[0], n2 = u2v.shape[0], i, j
    xs = np.empty((n1, n2))
    gs = np.empty((n1, n2))
    cdef double[:, ::1] xv = xs
    cdef double[:, ::1] gv = gs
    with nogil:
        for i in range(n1):
            for j in range(n2):
                node(b1, b2, c, d, u1v[i], u2v[j], feas_tol, xtol, &xv[i, j], &gv[i, j])
    return xs, gs
