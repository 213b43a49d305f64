"""Pure numpy implementation of the oracle grid kernel.

Same algorithm and signatures as the compiled ``_kernel`` module, vectorized
over grid nodes instead of looping: every golden-section and bisection step
is one batched ``eigvalsh`` call over all nodes still in play.
"""
import numpy as np

GOLD = 0.6180339887498949


def _scaled(b1, b2, c, d, u1, u2):
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    s = np.sqrt(u1 * u2)
    V = np.zeros(u1.shape + (4, 4))
    V[..., 0, 0] = b1 * u1
    V[..., 1, 1] = b1 / u1
    V[..., 2, 2] = b2 * u2
    V[..., 3, 3] = b2 / u2
    V[..., 0, 2] = V[..., 2, 0] = c * s
    V[..., 1, 3] = V[..., 3, 1] = d / s
    return V


def _gap(V, x):
    """Smallest eigenvalue of ``V - V0(x)`` for a batch of matrices and ``x`` values."""
    x = np.asarray(x, dtype=float)
    y = np.sqrt(np.maximum((x - 0.5) * (x + 0.5), 0.0))
    M = V.copy()
    for k in range(4):
        M[..., k, k] -= x
    M[..., 0, 2] -= y
    M[..., 2, 0] -= y
    M[..., 1, 3] += y
    M[..., 3, 1] += y
    return np.linalg.eigvalsh(M)[..., 0]


def _solve(V, feas_tol, xtol):
    n = V.shape[0]
    x_out = np.full(n, np.inf)
    g0 = _gap(V, np.full(n, 0.5))
    g_out = g0.copy()
    done = g0 >= -feas_tol
    x_out[done] = 0.5

    xcap = np.min(np.diagonal(V, axis1=-2, axis2=-1), axis=-1)
    active = ~done & (xcap > 0.5)
    idx = np.flatnonzero(active)
    if idx.size == 0:
        return x_out, g_out
    Va = V[idx]
    thi = np.arccosh(2.0 * xcap[idx])
    gbest = g0[idx].copy()
    tbest = np.zeros(idx.size)
    gcap = _gap(Va, xcap[idx])
    better = gcap > gbest
    gbest[better] = gcap[better]
    tbest[better] = thi[better]

    lo = np.zeros(idx.size)
    hi = thi.copy()
    m1 = hi - GOLD * (hi - lo)
    m2 = lo + GOLD * (hi - lo)
    g1 = _gap(Va, 0.5 * np.cosh(m1))
    g2 = _gap(Va, 0.5 * np.cosh(m2))
    run = gbest < -feas_tol
    for _ in range(200):
        for g, m in ((g1, m1), (g2, m2)):
            upd = run & (g > gbest)
            gbest[upd] = g[upd]
            tbest[upd] = m[upd]
        run &= (gbest < -feas_tol) & (hi - lo > 1e-15 * (1.0 + thi))
        if not run.any():
            break
        right = run & (g1 < g2)
        left = run & ~(g1 < g2)
        # shift the bracket; only one new interior point per node per step
        lo = np.where(right, m1, lo)
        hi = np.where(left, m2, hi)
        new_m1 = np.where(right, m2, np.where(left, hi - GOLD * (hi - lo), m1))
        new_m2 = np.where(right, lo + GOLD * (hi - lo), np.where(left, m1, m2))
        new_g1 = np.where(right, g2, g1)
        new_g2 = np.where(left, g1, g2)
        r = np.flatnonzero(run)
        if r.size:
            pts = np.where(right[r], new_m2[r], new_m1[r])
            vals = _gap(Va[r], 0.5 * np.cosh(pts))
            new_g2[r] = np.where(right[r], vals, new_g2[r])
            new_g1[r] = np.where(left[r], vals, new_g1[r])
        m1, m2, g1, g2 = new_m1, new_m2, new_g1, new_g2

    g_out[idx] = gbest
    feas = gbest >= -feas_tol
    xl = np.full(idx.size, 0.5)
    gl = g0[idx].copy()
    xh = np.where(tbest == thi, xcap[idx], 0.5 * np.cosh(tbest))
    gh = gbest.copy()
    open_ = feas & (xh - xl > xtol)
    while open_.any():
        o = np.flatnonzero(open_)
        xm = 0.5 * (xl[o] + xh[o])
        gm = _gap(Va[o], xm)
        ok = gm >= -feas_tol
        xh[o] = np.where(ok, xm, xh[o])
        gh[o] = np.where(ok, gm, gh[o])
        xl[o] = np.where(ok, xl[o], xm)
        gl[o] = np.where(ok, gl[o], gm)
        open_ = feas & (xh - xl > xtol)
    # the gap is smooth across the final bracket: interpolate to its crossing of -feas_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        xm = xl + (xh - xl) * (-feas_tol - gl) / (gh - gl)
    xm = np.where((xm >= xl) & (xm <= xh), xm, xh)
    x_out[idx] = np.where(feas, xm, np.inf)
    return x_out, g_out


def min_x_node(b1, b2, c, d, u1, u2, feas_tol=1e-12, xtol=1e-10):
    V = _scaled(b1, b2, c, d, np.array([u1]), np.array([u2]))
    x, g = _solve(V, feas_tol, xtol)
    return float(x[0]), float(g[0])


def scan_grid(b1, b2, c, d, u1_values, u2_values, feas_tol=1e-12, xtol=1e-10):
    U1, U2 = np.meshgrid(np.asarray(u1_values, float), np.asarray(u2_values, float), indexing="ij")
    V = _scaled(b1, b2, c, d, U1.ravel(), U2.ravel())
    x, g = _solve(V, feas_tol, xtol)
    return x.reshape(U1.shape), g.reshape(U1.shape)


MAX_SLIDES = 200
POLISH_TOL = 1e-12


def _better(x1, l1, g1, x0, l0, g0):
    ok1 = np.isfinite(x1)
    ok0 = np.isfinite(x0)
    same = ok1 == ok0
    feas_better = (x1 < x0) | ((x1 == x0) & (l1 < l0))
    return np.where(same, np.where(ok1, feas_better, g1 > g0), ok1)


def _row_best(x, l, g):
    """Best column per row under the same ordering as ``_better``."""
    ok = np.isfinite(x)
    any_ok = ok.any(axis=1)
    # columns are ascending in log u2, so argmin picks the smaller u2 on ties
    k_feas = np.argmin(np.where(ok, x, np.inf), axis=1)
    k_gap = np.argmax(g, axis=1)
    return np.where(any_ok, k_feas, k_gap)


def line_min(b1, b2, c, d, u1_values, n, half, rounds, shrink, feas_tol=1e-12, xtol=1e-10):
    u1 = np.asarray(u1_values, dtype=float)
    m = u1.size
    if n < 2:
        raise ValueError("need at least 2 grid points")
    center = np.zeros(m)
    width = np.full(m, float(half))
    bx = np.full(m, np.inf)
    bl = np.zeros(m)
    bg = np.full(m, -np.inf)
    level = np.zeros(m, dtype=int)
    slides = np.zeros(m, dtype=int)
    step = np.zeros(m)
    steps = np.linspace(-1.0, 1.0, n)
    while True:
        act = np.flatnonzero(level <= rounds)
        if act.size == 0:
            break
        L = center[act, None] + width[act, None] * steps[None, :]
        V = _scaled(b1, b2, c, d, np.repeat(u1[act], n), np.exp(L.ravel()))
        x, g = _solve(V, feas_tol, xtol)
        x = x.reshape(act.size, n)
        g = g.reshape(act.size, n)
        k = _row_best(x, L, g)
        r = np.arange(act.size)
        lx, ll, lg = x[r, k], L[r, k], g[r, k]
        improved = _better(lx, ll, lg, bx[act], bl[act], bg[act])
        bx[act] = np.where(improved, lx, bx[act])
        bl[act] = np.where(improved, ll, bl[act])
        bg[act] = np.where(improved, lg, bg[act])
        center[act] = bl[act]
        slide = (level[act] > 0) & improved & ((k == 0) | (k == n - 1)) & (slides[act] < MAX_SLIDES)
        slides[act] += slide
        shrink_rows = act[~slide]
        level[shrink_rows] += 1
        step[shrink_rows] = 2.0 * width[shrink_rows] / (n - 1)
        width[shrink_rows] *= shrink
    _polish_rows(b1, b2, c, d, u1, bx, bl, step, feas_tol, xtol)
    return bx, bl, bg


def _polish_rows(b1, b2, c, d, u1, bx, bl, step, feas_tol, xtol):
    """Golden section within one cell of each feasible row's best node (updates in place)."""
    rows = np.flatnonzero(np.isfinite(bx))
    if rows.size == 0:
        return

    def f(r, l):
        x, _ = _solve(_scaled(b1, b2, c, d, u1[r], np.exp(l)), feas_tol, xtol)
        return x

    lo = bl[rows] - step[rows]
    hi = bl[rows] + step[rows]
    m1 = hi - GOLD * (hi - lo)
    m2 = lo + GOLD * (hi - lo)
    x1 = f(rows, m1)
    x2 = f(rows, m2)
    run = np.ones(rows.size, dtype=bool)
    for _ in range(200):
        for xv, mv in ((x1, m1), (x2, m2)):
            upd = run & (xv < bx[rows])
            bx[rows[upd]] = xv[upd]
            bl[rows[upd]] = mv[upd]
        run &= hi - lo > POLISH_TOL
        if not run.any():
            break
        right = run & (x1 > x2)
        left = run & ~(x1 > x2)
        lo = np.where(right, m1, lo)
        hi = np.where(left, m2, hi)
        new_m1 = np.where(right, m2, np.where(left, hi - GOLD * (hi - lo), m1))
        new_m2 = np.where(right, lo + GOLD * (hi - lo), np.where(left, m1, m2))
        new_x1 = np.where(right, x2, x1)
        new_x2 = np.where(left, x1, x2)
        r = np.flatnonzero(run)
        pts = np.where(right[r], new_m2[r], new_m1[r])
        vals = f(rows[r], pts)
        new_x2[r] = np.where(right[r], vals, new_x2[r])
        new_x1[r] = np.where(left[r], vals, new_x1[r])
        m1, m2, x1, x2 = new_m1, new_m2, new_x1, new_x2
