"""Brute-force Gaussian entanglement of formation.

An independent check on :mod:`gaussian_eof.solver`: minimize, over the
squeeze factors ``(u1, u2)`` of the scaled standard form, the smallest
squeezed-vacuum parameter ``x`` for which ``V(u1, u2) - V0(x)`` is positive
semidefinite. Feasibility is decided by eigenvalues of the full 4x4
difference; nothing from the algebraic solution is reused.

The per-node work lives in a compiled kernel (``_kernel``) when it has been
built, otherwise in the numpy implementation ``_kernel_py``. Set
``GAUSSIAN_EOF_KERNEL=python`` to force the fallback.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from ..gaussian_core import StandardFormParams, simon_discriminant
from . import _kernel_py

try:
    if os.environ.get("GAUSSIAN_EOF_KERNEL", "").lower() == "python":
        raise ImportError("compiled kernel disabled by GAUSSIAN_EOF_KERNEL")
    from . import _kernel as _kernel_c
except ImportError:
    _kernel_c = None

kernel = _kernel_c if _kernel_c is not None else _kernel_py
BACKEND = "compiled" if _kernel_c is not None else "python"

FEAS_TOL = 1e-12
MAX_SLIDES = 200
POLISH_TOL = 1e-12
GOLD = 0.6180339887498949


def _entropy_nats(x: float) -> float:
    # kept local: the oracle must not share code with the solver
    if x <= 0.5:
        return 0.0
    return (x + 0.5) * math.log(x + 0.5) - (x - 0.5) * math.log(x - 0.5)


def get_kernel(name: str | None = None):
    """Kernel module by name (``"compiled"``, ``"python"``) or the default."""
    if name is None:
        return kernel
    if name == "python":
        return _kernel_py
    if name == "compiled":
        if _kernel_c is None:
            raise ImportError("compiled oracle kernel is not available")
        return _kernel_c
    raise ValueError(f"unknown kernel {name!r}")


@dataclass(frozen=True)
class OracleConfig:
    grid_points_per_axis: int = 81
    log_range: float = 8.0
    refine_iterations: int = 3
    shrink: float = 0.1
    x_bisection_tol: float = 1e-10

    def __post_init__(self):
        if self.grid_points_per_axis < 2 or self.refine_iterations < 0:
            raise ValueError("grid needs at least 2 points per axis")
        if not (self.log_range > 1.0 and 0.0 < self.shrink < 1.0 and self.x_bisection_tol > 0.0):
            raise ValueError("invalid oracle configuration")


@dataclass(frozen=True)
class OracleResult:
    ef_nats: float
    u1: float
    u2: float
    x: float
    resolution: float
    feasible: bool = True


def min_x_given_scaling(sf: StandardFormParams, u1: float, u2: float, tol: float = 1e-10, backend=None) -> float:
    """Smallest ``x`` with ``V(u1, u2) - V0(x) >= 0``; ``math.inf`` when no ``x`` works."""
    if not (u1 > 0.0 and u2 > 0.0):
        raise ValueError("scalings must be positive")
    x, _ = get_kernel(backend).min_x_node(sf.b1, sf.b2, sf.c, sf.d, u1, u2, FEAS_TOL, tol)
    return x


def _better(cand, best):
    """Feasible beats infeasible; then smaller (x, log u1, log u2); among infeasible, larger gap."""
    if best is None:
        return True
    if cand[3] != best[3]:
        return cand[3]
    return cand[:3] < best[:3] if cand[3] else cand[4] > best[4]


def _polish_outer(k, sf, config, best, step, full):
    """Golden section on the outer profile within one cell of the incumbent."""

    def profile(l1):
        xs, l2, gaps = k.line_min(
            sf.b1, sf.b2, sf.c, sf.d, np.array([math.exp(l1)]), config.grid_points_per_axis, full,
            config.refine_iterations, config.shrink, FEAS_TOL, config.x_bisection_tol,
        )
        return (float(xs[0]), l1, float(l2[0]), bool(np.isfinite(xs[0])), float(gaps[0]))

    lo, hi = best[1] - step, best[1] + step
    m1, m2 = hi - GOLD * (hi - lo), lo + GOLD * (hi - lo)
    p1, p2 = profile(m1), profile(m2)
    while True:
        for p in (p1, p2):
            if p[3] and p[0] < best[0]:
                best = p
        if hi - lo <= POLISH_TOL:
            return best
        if p1[0] > p2[0]:
            lo, m1, p1 = m1, m2, p2
            m2 = lo + GOLD * (hi - lo)
            p2 = profile(m2)
        else:
            hi, m2, p2 = m2, m1, p1
            m1 = hi - GOLD * (hi - lo)
            p1 = profile(m1)


def brute_force_eof(sf: StandardFormParams, config: OracleConfig = OracleConfig(), backend=None) -> OracleResult:
    """Nested grid search: outer over ``log u1``, inner over ``log u2``.

    Each level scans ``grid_points_per_axis`` points over ``[-ln L, ln L]``
    and then rescans ``refine_iterations`` times in a box shrunk by
    ``shrink`` around the incumbent, sliding the box instead of shrinking it
    when the incumbent sits on its edge. Searching one axis at a time matters:
    the smallest feasible ``x`` has a sharp, narrow valley in the
    ``(u1, u2)`` plane, so the best node of a 2-D grid tracks the valley
    walls rather than the minimum along the floor, while each 1-D profile is
    unimodal.

    Separable inputs short-circuit to 0. ``resolution`` is the final grid
    spacing in ``log u1``. When no node is feasible the search follows the
    least infeasible node and reports ``feasible=False``.
    """
    if simon_discriminant(sf) >= 0.0:
        return OracleResult(0.0, 1.0, 1.0, 0.5, 0.0)
    k = get_kernel(backend)
    n = config.grid_points_per_axis
    full = math.log(config.log_range)
    half = full
    c1 = 0.0
    best = None
    level = slides = 0
    while level <= config.refine_iterations:
        log_u1 = np.linspace(c1 - half, c1 + half, n)
        xs, log_u2, gaps = k.line_min(
            sf.b1, sf.b2, sf.c, sf.d, np.exp(log_u1), n, full,
            config.refine_iterations, config.shrink, FEAS_TOL, config.x_bisection_tol,
        )
        i = None
        for j in range(n):
            cand = (float(xs[j]), float(log_u1[j]), float(log_u2[j]), bool(np.isfinite(xs[j])), float(gaps[j]))
            if i is None or _better(cand, row):
                i, row = j, cand
        improved = _better(row, best)
        if improved:
            best = row
        c1 = best[1]
        resolution = 2.0 * half / (n - 1)
        if level > 0 and improved and i in (0, n - 1) and slides < MAX_SLIDES:
            slides += 1
            continue
        level += 1
        half *= config.shrink
    if best[3]:
        best = _polish_outer(k, sf, config, best, resolution, full)
    x, l1, l2, ok, _ = best
    ef = _entropy_nats(x) if ok else math.inf
    return OracleResult(ef, math.exp(l1), math.exp(l2), x, resolution, ok)
