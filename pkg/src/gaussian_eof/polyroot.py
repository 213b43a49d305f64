"""Real roots of low-degree polynomials.

Coefficients are always given in ascending order, ``coeffs[k]`` multiplying
``x**k``. Roots come from the eigenvalues of the companion matrix of the
normalized polynomial and are then polished by safeguarded Newton steps.
Nearly coincident roots are merged and polished on the derivative, which
keeps double roots (for instance ``p = 1`` for squeezed thermal states)
accurate to machine precision instead of ``sqrt(eps)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NegativeDiscriminant, ZeroPolynomial

TRIM_TOL = 1e-13
MERGE_TOL = 1e-7
RESIDUAL_TOL = 1e-10
POLISH_TOL = 1e-13
MAX_DEGREE = 4


@dataclass
class RootSet:
    roots: list[tuple[float, int]] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        return [r for r, _ in self.roots]

    def __len__(self):
        return len(self.roots)


class Polished(NamedTuple):
    root: float
    converged: bool
    residual: float


def _as_coeffs(coeffs: Sequence[float]) -> np.ndarray:
    arr = np.asarray(coeffs, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError("polynomial coefficients must be finite")
    return arr


def trim(coeffs: Sequence[float]) -> np.ndarray:
    """Drop leading coefficients below ``TRIM_TOL`` times the largest one."""
    arr = _as_coeffs(coeffs)
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    if scale == 0.0:
        raise ZeroPolynomial("all coefficients vanish")
    n = arr.size
    while n > 1 and abs(arr[n - 1]) <= TRIM_TOL * scale:
        n -= 1
    return arr[:n]


def evaluate(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for a in reversed(coeffs):
        acc = acc * x + a
    return float(acc)


def derivative(coeffs: Sequence[float]) -> np.ndarray:
    arr = _as_coeffs(coeffs)
    if arr.size <= 1:
        return np.zeros(1)
    return arr[1:] * np.arange(1, arr.size)


def polish(coeffs: Sequence[float], x0: float, max_iter: int = 100) -> Polished:
    """Newton iteration with step halving.

    Stops once ``|poly(x)| <= 1e-13 * max|coeff|``. At a multiple root Newton
    only converges linearly and the residual floor is reached before the
    step stagnates; a stagnated iterate is still reported as converged when
    its residual is below ``1e-10 * max|coeff|``.
    """
    arr = _as_coeffs(coeffs)
    scale = float(np.max(np.abs(arr)))
    dcoef = derivative(arr)
    x = float(x0)
    fx = evaluate(arr, x)
    best = (abs(fx), x)
    for _ in range(max_iter):
        if abs(fx) <= POLISH_TOL * scale:
            return Polished(x, True, abs(fx))
        dfx = evaluate(dcoef, x)
        if dfx == 0.0:
            break
        step = fx / dfx
        # halve the step until |f| decreases (bisection-style safeguard)
        for _ in range(60):
            x_new = x - step
            f_new = evaluate(arr, x_new)
            if abs(f_new) < abs(fx):
                break
            step *= 0.5
        else:
            break
        if x_new == x:
            break
        x, fx = x_new, f_new
        if abs(fx) < best[0]:
            best = (abs(fx), x)
    res, x = best
    return Polished(x, res <= RESIDUAL_TOL * scale, res)


def _cluster(values: list[float]) -> list[list[float]]:
    values = sorted(values)
    clusters: list[list[float]] = []
    for v in values:
        if clusters and abs(v - clusters[-1][-1]) <= MERGE_TOL * max(1.0, abs(v)):
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return clusters


def real_roots(coeffs: Sequence[float]) -> RootSet:
    """All real roots with multiplicities, sorted ascending.

    Returns an empty :class:`RootSet` when there are no real roots.
    """
    arr = trim(coeffs)
    if arr.size - 1 > MAX_DEGREE:
        raise ValueError(f"degree {arr.size - 1} exceeds {MAX_DEGREE}")
    arr = arr / float(np.max(np.abs(arr)))
    deg = arr.size - 1
    if deg == 0:
        return RootSet()
    monic = arr[:-1] / arr[-1]
    companion = np.zeros((deg, deg))
    if deg > 1:
        companion[1:, :-1] = np.eye(deg - 1)
    companion[:, -1] = -monic
    eig = np.linalg.eigvals(companion)
    # near-real eigenvalues may hide a double real root; the residual check decides
    candidates = [float(z.real) for z in eig if abs(z.imag) <= 1e-6 * max(1.0, abs(z))]

    out = RootSet()
    for cluster in _cluster(candidates):
        mult = len(cluster)
        start = float(np.mean(cluster))
        target = arr
        for _ in range(mult - 1):
            target = derivative(target)
        root = polish(target, start).root
        res = abs(evaluate(arr, root))
        if res > RESIDUAL_TOL:
            # pair of complex roots close to the axis, or a spurious merge
            if mult > 1:
                for v in cluster:
                    r = polish(arr, v)
                    if r.residual <= RESIDUAL_TOL:
                        _add_root(out, arr, r.root, 1)
            continue
        _add_root(out, arr, root, mult)
    order = np.argsort(out.values)
    out.roots = [out.roots[i] for i in order]
    out.residuals = [out.residuals[i] for i in order]
    return out


def _add_root(out: RootSet, arr, root, mult):
    for i, (v, m) in enumerate(out.roots):
        if abs(v - root) <= MERGE_TOL * max(1.0, abs(root)):
            out.roots[i] = (v, m + mult)
            return
    out.roots.append((float(root), mult))
    out.residuals.append(abs(evaluate(arr, root)))


def smallest_root_quadratic(b0: float, b1: float, b2: float, tol: float = 1e-12) -> float:
    """Smaller real root of ``b2 y^2 + b1 y + b0`` with ``b2 > 0``.

    Uses the cancellation-free pair ``q / b2`` and ``b0 / q`` with
    ``q = -(b1 + sign(b1) sqrt(disc)) / 2``.
    """
    if not b2 > 0.0:
        raise ValueError("leading coefficient must be positive")
    disc = b1 * b1 - 4.0 * b2 * b0
    scale = max(b1 * b1, abs(4.0 * b2 * b0), 1e-300)
    if disc < -tol * scale:
        raise NegativeDiscriminant(f"quadratic has no real roots (discriminant {disc:.3e})")
    root = math.sqrt(max(disc, 0.0))
    q = -0.5 * (b1 + math.copysign(root, b1))
    if q == 0.0:
        return -b1 / (2.0 * b2)
    return min(q / b2, b0 / q)
