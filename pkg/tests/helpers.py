"""State samplers shared by the test modules."""
import math

import numpy as np

from gaussian_eof import StandardFormParams
from gaussian_eof.cli import random_states
from gaussian_eof.gaussian_core import build_scaled_cm, symplectic_spectrum

PHYSICAL_MARGIN = 1e-6
ENTANGLED_MARGIN = 1e-6


def nu_minus(sf):
    return symplectic_spectrum(build_scaled_cm(sf))[0]


def is_physical_entangled(sf):
    return nu_minus(sf) >= 0.5 + PHYSICAL_MARGIN and sf.simon < -ENTANGLED_MARGIN


def entangled_states(n, seed):
    return list(random_states(n, seed, entangled_only=True))


def _draw(rng, n, make, accept=is_physical_entangled, max_draws=1_000_000):
    out = []
    for _ in range(max_draws):
        sf = make(rng)
        if sf is not None and accept(sf):
            out.append(sf)
            if len(out) == n:
                return out
    raise RuntimeError("sampler stalled")


def symmetric_states(n, seed):
    rng = np.random.default_rng(seed)

    def make(rng):
        b = rng.uniform(0.6, 3.0)
        c = rng.uniform(0.0, b)
        ad = c * (1.0 - rng.random())
        return StandardFormParams(b, b, c, -ad)

    return _draw(rng, n, make)


def squeezed_thermal_states(n, seed):
    rng = np.random.default_rng(seed)

    def make(rng):
        b1, b2 = rng.uniform(0.6, 3.0, size=2)
        c = rng.uniform(0.0, math.sqrt(b1 * b2))
        return StandardFormParams(b1, b2, c, -c)

    return _draw(rng, n, make)


def _solve_ad(b1, b2, c, sign):
    """Positive ``|d|`` with ``det V - (b1^2 + b2^2 + 2 sign c |d|)/4 + 1/16 = 0``.

    ``sign = +1`` puts the state on the separability boundary, ``sign = -1``
    on the manifold where the smallest symplectic eigenvalue is 1/2.
    """
    bb = b1 * b2
    a = bb - c * c
    k = a * bb - (b1 * b1 + b2 * b2) / 4.0 + 1.0 / 16.0
    # -a t^2 - sign (c/2) t + k = 0
    roots = np.roots([-a, -sign * c / 2.0, k])
    good = [r.real for r in roots if abs(r.imag) < 1e-14 and 0.0 < r.real <= c]
    return max(good) if good else None


def boundary_states(n, seed):
    rng = np.random.default_rng(seed)

    def make(rng):
        b1, b2 = rng.uniform(0.6, 3.0, size=2)
        c = rng.uniform(0.0, math.sqrt(b1 * b2))
        ad = _solve_ad(b1, b2, c, +1)
        return None if ad is None else StandardFormParams(b1, b2, c, -ad)

    return _draw(rng, n, make, accept=lambda sf: nu_minus(sf) >= 0.5 + PHYSICAL_MARGIN)


def kappa_half_states(n, seed, sign=None):
    """States with smallest symplectic eigenvalue 1/2 and ``b1 >= b2``.

    ``sign`` restricts the sign of ``b2 c - b1 |d|`` (``-1``, ``+1`` or ``None``).
    """
    rng = np.random.default_rng(seed)

    def make(rng):
        b1, b2 = sorted(rng.uniform(0.6, 3.0, size=2), reverse=True)
        c = rng.uniform(0.0, math.sqrt(b1 * b2))
        ad = _solve_ad(b1, b2, c, -1)
        if ad is None:
            return None
        sf = StandardFormParams(b1, b2, c, -ad)
        s = b2 * c - b1 * ad
        if sign is not None and (s < 0.0) != (sign < 0):
            return None
        return sf

    def accept(sf):
        # D = 0 also holds when nu_+ = 1/2 > nu_-; only nu_- = 1/2 is physical
        return sf.simon < -ENTANGLED_MARGIN and abs(sf.rs_det) <= 1e-12 and nu_minus(sf) >= 0.5 - 1e-9

    return _draw(rng, n, make, accept=accept)


OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
FLIP_P2 = np.diag([1.0, 1.0, 1.0, -1.0])


def symplectic_eigs(V):
    """Moduli of the eigenvalues of ``i Omega V``, ascending, one per pair."""
    ev = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ np.asarray(V, float))))
    return float(ev[0]), float(ev[2])


def ppt_kappa_minus(V):
    """Smallest symplectic eigenvalue of the partial transpose, by eigendecomposition."""
    return symplectic_eigs(FLIP_P2 @ np.asarray(V, float) @ FLIP_P2)[0]


def cm(b1, b2, c, d, u1=1.0, u2=1.0):
    s = math.sqrt(u1 * u2)
    return np.array(
        [
            [b1 * u1, 0.0, c * s, 0.0],
            [0.0, b1 / u1, 0.0, d / s],
            [c * s, 0.0, b2 * u2, 0.0],
            [0.0, d / s, 0.0, b2 / u2],
        ]
    )


def tmsvs(x):
    y = math.sqrt(x * x - 0.25)
    return StandardFormParams(x, x, y, -y)
