"""Covariance-matrix algebra for two-mode Gaussian states.

Conventions
-----------
* Quadrature ordering is ``(q1, p1, q2, p2)``.
* The vacuum has covariance ``I/2``; a matrix ``V`` is a physical state iff
  ``V + (i/2) Omega >= 0`` with ``Omega = J (+) J`` and ``J = [[0, 1], [-1, 0]]``.
* Every quantity here is computed from the four local symplectic invariants
  ``det A``, ``det B``, ``det C`` and ``det V`` of the block partition
  ``V = [[A, C], [C^T, B]]``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ComplexSpectrum,
    DegenerateBlocks,
    InconsistentInvariants,
    NonPositiveScaling,
    NonSymmetric,
    NotPositiveDefinite,
    Unphysical,
)

DEFAULT_TOL = 1e-10

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.block([[_J, np.zeros((2, 2))], [np.zeros((2, 2)), _J]])
VACUUM = 0.5 * np.eye(4)


@dataclass(frozen=True)
class StandardFormParams:
    """Local invariants ``(b1, b2, c, d)`` of the unscaled standard form."""

    b1: float
    b2: float
    c: float
    d: float

    @property
    def det_v(self) -> float:
        bb = self.b1 * self.b2
        return (bb - self.c**2) * (bb - self.d**2)

    @property
    def delta(self) -> float:
        """``det A + det B + 2 det C``; also called Z."""
        return self.b1**2 + self.b2**2 + 2.0 * self.c * self.d

    z = delta

    @property
    def delta_tilde(self) -> float:
        return self.b1**2 + self.b2**2 - 2.0 * self.c * self.d

    @property
    def rs_det(self) -> float:
        """``det(V + i Omega / 2)``, non-negative for physical states."""
        return self.det_v - self.delta / 4.0 + 1.0 / 16.0

    @property
    def simon(self) -> float:
        """Determinant of the partially transposed uncertainty matrix."""
        return self.det_v - self.delta_tilde / 4.0 + 1.0 / 16.0

    def swapped(self) -> StandardFormParams:
        """Same state with the two modes exchanged."""
        return StandardFormParams(self.b2, self.b1, self.c, self.d)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.b1, self.b2, self.c, self.d)


@dataclass(frozen=True)
class ScalingFactors:
    u1: float
    u2: float

    def __post_init__(self):
        for name in ("u1", "u2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise NonPositiveScaling(f"{name} must be finite and positive, got {value!r}")

    @property
    def product(self) -> float:
        return self.u1 * self.u2


@dataclass(frozen=True)
class PhysicalityVerdict:
    physical: bool
    nu_minus: float
    nu_plus: float
    rs_det: float


class Separability(str, enum.Enum):
    SEPARABLE = "Separable"
    ENTANGLED = "Entangled"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class SeparabilityVerdict:
    verdict: Separability
    margin: float
    kappa_tilde_minus: float


def as_covariance(V) -> np.ndarray:
    arr = np.asarray(V, dtype=float)
    if arr.shape != (4, 4):
        raise ValueError(f"covariance matrix must be 4x4, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("covariance matrix has non-finite entries")
    return arr


def _det2(m) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def block_invariants(V) -> tuple[float, float, float, float]:
    """Return ``(det A, det B, det C, det V)``."""
    V = as_covariance(V)
    return (
        _det2(V[:2, :2]),
        _det2(V[2:, 2:]),
        _det2(V[:2, 2:]),
        float(np.linalg.det(V)),
    )


def rs_determinant(V) -> float:
    """``det(V + i Omega/2)`` from the block invariants."""
    det_a, det_b, det_c, det_v = block_invariants(V)
    return det_v - (det_a + det_b + 2.0 * det_c) / 4.0 + 1.0 / 16.0


def simon_of_matrix(V) -> float:
    """Simon discriminant of an arbitrary (not necessarily standard-form) CM."""
    det_a, det_b, det_c, det_v = block_invariants(V)
    return det_v - (det_a + det_b - 2.0 * det_c) / 4.0 + 1.0 / 16.0


def _spectrum_from_invariants(delta: float, det_v: float, tol: float) -> tuple[float, float]:
    disc = delta * delta - 4.0 * det_v
    if disc < -tol * max(1.0, delta * delta):
        raise ComplexSpectrum(
            f"complex symplectic spectrum (discriminant {disc:.3e})", margin=disc
        )
    root = math.sqrt(max(disc, 0.0))
    plus2 = 0.5 * (delta + root)
    if plus2 <= 0.0:
        raise ComplexSpectrum("non-positive symplectic invariant", margin=plus2)
    # det_v / plus2 avoids cancellation when the state is nearly pure
    minus2 = max(det_v, 0.0) / plus2
    return math.sqrt(minus2), math.sqrt(plus2)


def symplectic_spectrum(V, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Symplectic eigenvalues ``(nu_minus, nu_plus)`` of ``V``.

    Uses ``nu^2 = (Delta -/+ sqrt(Delta^2 - 4 det V)) / 2`` rather than an
    eigendecomposition of ``i Omega V``.
    """
    det_a, det_b, det_c, det_v = block_invariants(V)
    return _spectrum_from_invariants(det_a + det_b + 2.0 * det_c, det_v, tol)


def ppt_spectrum(V, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Symplectic eigenvalues of the partially transposed CM."""
    det_a, det_b, det_c, det_v = block_invariants(V)
    return _spectrum_from_invariants(det_a + det_b - 2.0 * det_c, det_v, tol)


def validate_physical(V, tol: float = DEFAULT_TOL) -> PhysicalityVerdict:
    """Check symmetry, positivity and the uncertainty principle.

    Raises
    ------
    NonSymmetric, NotPositiveDefinite, Unphysical
        Each carries the offending margin.
    """
    V = as_covariance(V)
    scale = max(1.0, float(np.max(np.abs(V))))
    asym = float(np.max(np.abs(V - V.T)))
    if asym > tol * scale:
        raise NonSymmetric(f"matrix is not symmetric (max |V - V^T| = {asym:.3e})", margin=asym)
    V = 0.5 * (V + V.T)
    lam_min = float(np.linalg.eigvalsh(V)[0])
    if lam_min <= 0.0:
        raise NotPositiveDefinite(
            f"matrix is not positive definite (smallest eigenvalue {lam_min:.3e})", margin=lam_min
        )
    nu_minus, nu_plus = symplectic_spectrum(V, tol)
    if nu_minus < 0.5 - tol:
        raise Unphysical(
            f"smallest symplectic eigenvalue {nu_minus:.6g} is below 1/2", margin=nu_minus - 0.5
        )
    return PhysicalityVerdict(True, nu_minus, nu_plus, rs_determinant(V))


def simon_discriminant(sf: StandardFormParams) -> float:
    """Simon separability discriminant; ``>= 0`` iff separable.

    For ``d <= 0`` this is ``det V - (b1^2 + b2^2 + 2 c|d|)/4 + 1/16``. States with
    ``c d >= 0`` reduce to ``det(V + i Omega/2)``.
    """
    return sf.simon


def classify_separability(V, tol: float = DEFAULT_TOL) -> SeparabilityVerdict:
    validate_physical(V, tol)
    margin = simon_of_matrix(V)
    kappa_minus, _ = ppt_spectrum(V, tol)
    if margin < -tol:
        verdict = Separability.ENTANGLED
    elif margin <= tol:
        verdict = Separability.BOUNDARY
    else:
        verdict = Separability.SEPARABLE
    # the PPT eigenvalue and the discriminant must tell the same story away from the boundary
    if abs(kappa_minus - 0.5) > 1e-6 and (kappa_minus < 0.5) != (margin < 0.0):
        raise InconsistentInvariants(
            f"Simon discriminant {margin:.3e} disagrees with PPT eigenvalue {kappa_minus:.6g}",
            margin=margin,
        )
    return SeparabilityVerdict(verdict, margin, kappa_minus)


def classicality_margin(V) -> float:
    """Smallest eigenvalue of ``V - I/2``; the state is classical iff ``>= 0``."""
    V = as_covariance(V)
    return float(np.linalg.eigvalsh(0.5 * (V + V.T) - VACUUM)[0])


def classicality_minors(V) -> list[float]:
    """Leading principal minors of ``V - I/2`` (orders 1 through 4)."""
    M = as_covariance(V) - VACUUM
    return [float(np.linalg.det(M[:k, :k])) for k in range(1, 5)]


def _whitening(M) -> np.ndarray:
    """``det(M)^(1/4) M^(-1/2)`` for a positive 2x2 block: unit determinant, hence symplectic."""
    w, Q = np.linalg.eigh(M)
    return (Q / np.sqrt(w)) @ Q.T * math.sqrt(math.sqrt(w[0] * w[1]))


def reduce_to_standard_form(V, tol: float = DEFAULT_TOL) -> StandardFormParams:
    """Local invariants ``(b1, b2, c, d)`` with ``c >= |d|`` and ``sign d = sign det C``.

    Local symplectic maps bring ``A`` and ``B`` to ``b1 I`` and ``b2 I``; ``c``
    and ``|d|`` are then the singular values of the transformed correlation
    block. Their squares are the roots of ``w^2 - S w + (det C)^2`` with
    ``S = ((b1 b2)^2 + (det C)^2 - det V) / (b1 b2)``, but solving that
    quadratic loses half the digits as ``c -> 0`` or ``c -> |d|``.
    """
    V = as_covariance(V)
    V = 0.5 * (V + V.T)
    det_a, det_b, m, det_v = block_invariants(V)
    if det_a <= 0.0 or det_b <= 0.0 or V[0, 0] <= 0.0 or V[2, 2] <= 0.0:
        raise DegenerateBlocks("local blocks are not positive definite", margin=min(det_a, det_b))
    b1, b2 = math.sqrt(det_a), math.sqrt(det_b)
    bb = b1 * b2
    if bb < tol:
        raise DegenerateBlocks("vanishing local blocks", margin=bb)
    corr = _whitening(V[:2, :2]) @ V[:2, 2:] @ _whitening(V[2:, 2:])
    c, ad = (float(v) for v in np.linalg.svd(corr, compute_uv=False))
    d = 0.0 if abs(m) <= tol * max(1.0, bb) else math.copysign(ad, m)
    sf = StandardFormParams(b1, b2, c, d)
    err = abs(sf.det_v - det_v)
    if err > tol * max(1.0, bb * bb):
        raise InconsistentInvariants(f"reconstructed det V off by {err:.3e}", margin=err)
    return sf


def build_scaled_cm(sf: StandardFormParams, u: ScalingFactors | tuple[float, float] = (1.0, 1.0)) -> np.ndarray:
    """Scaled standard-form CM with one-mode squeeze factors ``u = (u1, u2)``."""
    if not isinstance(u, ScalingFactors):
        u = ScalingFactors(*map(float, u))
    u1, u2 = u.u1, u.u2
    s = math.sqrt(u1 * u2)
    b1, b2, c, d = sf.as_tuple()
    return np.array(
        [
            [b1 * u1, 0.0, c * s, 0.0],
            [0.0, b1 / u1, 0.0, d / s],
            [c * s, 0.0, b2 * u2, 0.0],
            [0.0, d / s, 0.0, b2 / u2],
        ]
    )


def standard_form_cm(sf: StandardFormParams) -> np.ndarray:
    return build_scaled_cm(sf, (1.0, 1.0))


def local_symplectic(theta1=0.0, r1=0.0, theta2=0.0, r2=0.0) -> np.ndarray:
    """Direct sum of per-mode ``rotation(theta) @ squeeze(r)`` symplectic maps."""

    def one_mode(theta, r):
        ct, st = math.cos(theta), math.sin(theta)
        rot = np.array([[ct, -st], [st, ct]])
        return rot @ np.diag([math.exp(-r), math.exp(r)])

    S = np.zeros((4, 4))
    S[:2, :2] = one_mode(theta1, r1)
    S[2:, 2:] = one_mode(theta2, r2)
    return S


def apply_symplectic(V, S) -> np.ndarray:
    return S @ as_covariance(V) @ S.T


def canonical_standard_form(b1: float, b2: float, c: float, d: float) -> StandardFormParams:
    """Bring arbitrary standard-form entries to ``c >= |d|``.

    A quarter-turn rotation of both modes exchanges ``c`` and ``d``; a
    half-turn of mode 2 flips both signs. Neither changes the state's
    local invariants.
    """
    if abs(d) > abs(c):
        c, d = d, c
    if c < 0.0:
        c, d = -c, -d
    return StandardFormParams(float(b1), float(b2), float(c), float(d))
