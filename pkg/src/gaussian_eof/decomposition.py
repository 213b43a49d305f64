"""Optimal pure-state decomposition at the covariance-matrix level.

A solved state splits as ``V(w1, w2) = V0 + VC - I/2`` where ``V0`` is the
squeezed vacuum and ``VC`` the classical partner whose Gaussian P function
(covariance ``VC - I/2``) distributes the displacements. At the optimum the
partner sits on the classicality threshold (``VC - I/2 >= 0`` and singular)
and on the separability boundary (zero Simon discriminant).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CertificationFailed
from .gaussian_core import (
    VACUUM,
    StandardFormParams,
    as_covariance,
    build_scaled_cm,
    simon_of_matrix,
)
from .solver import OptimalDecomposition, TmsvsParams

DEFAULT_SEED = 20080101
CERT_TOL = 1e-8


@dataclass
class DecompositionCertificate:
    V0: np.ndarray
    VC: np.ndarray
    classicality_boundary_gap: float
    det_gap: float
    simon_of_partner: float
    min_rank3_minor: float
    cf_law_max_residual: float
    case: str = "entangled"
    passed: bool = True


def build_tmsvs_cm(t: TmsvsParams) -> np.ndarray:
    """Standard-form CM ``b1 = b2 = x``, ``c = -d = y`` of a squeezed vacuum."""
    x, y = t.x, t.y
    return build_scaled_cm(StandardFormParams(x, x, y, -y), (1.0, 1.0))


def build_classical_partner(V_scaled, V0) -> np.ndarray:
    return as_covariance(V_scaled) - as_covariance(V0) + VACUUM


def rank3_minors(M) -> list[float]:
    M = as_covariance(M)
    return [float(np.linalg.det(M[np.ix_(idx, idx)])) for idx in itertools.combinations(range(4), 3)]


def verify_multiplication_law(V_scaled, V0, VC, n_samples: int = 64, seed: int = DEFAULT_SEED) -> float:
    """Largest violation of the normally ordered characteristic-function product.

    In log form the law reads ``lam^T (V - I/2) lam = lam^T (V0 - I/2) lam +
    lam^T (VC - I/2) lam`` (times ``-1/2``) for every ``lam``.
    """
    rng = np.random.default_rng(seed)
    lam = rng.standard_normal((n_samples, 4))

    def log_chi_n(M):
        K = as_covariance(M) - VACUUM
        return -0.5 * np.einsum("ni,ij,nj->n", lam, K, lam)

    diff = log_chi_n(V_scaled) - log_chi_n(V0) - log_chi_n(VC)
    return float(np.max(np.abs(diff))) if n_samples else 0.0


def certify(V_scaled, V0, tol: float = CERT_TOL, case: str = "entangled", seed: int = DEFAULT_SEED) -> DecompositionCertificate:
    """Check that the partner is classical and sits on both boundaries.

    ``case`` is ``"entangled"`` (all checks), ``"boundary"`` (the partner is the
    state itself, so its Simon discriminant is not checked independently) or
    ``"separable"`` (only classicality of the partner is required).

    Raises
    ------
    CertificationFailed
        Names the first violated field.
    """
    V_scaled = as_covariance(V_scaled)
    V0 = as_covariance(V0)
    VC = build_classical_partner(V_scaled, V0)
    K = VC - VACUUM
    K = 0.5 * (K + K.T)
    scale = max(1.0, float(np.max(np.abs(V_scaled))))
    cert = DecompositionCertificate(
        V0=V0,
        VC=VC,
        classicality_boundary_gap=float(np.linalg.eigvalsh(K)[0]),
        det_gap=float(np.linalg.det(K)),
        simon_of_partner=simon_of_matrix(VC),
        min_rank3_minor=min(rank3_minors(K)),
        cf_law_max_residual=verify_multiplication_law(V_scaled, V0, VC, seed=seed),
        case=case,
    )
    # det_gap leads: a wrong x moves the determinant off zero before anything else
    checks = []
    if case != "separable":
        checks.append(("det_gap", abs(cert.det_gap) <= tol * scale**4))
        checks.append(("min_rank3_minor", cert.min_rank3_minor >= -tol * scale**3))
    checks.append(("classicality_boundary_gap", cert.classicality_boundary_gap >= -tol * scale))
    if case == "entangled":
        checks.append(("simon_of_partner", abs(cert.simon_of_partner) <= tol * scale**4))
    failed = [name for name, ok in checks if not ok]
    if failed:
        cert.passed = False
        name = failed[0]
        raise CertificationFailed(
            "certificate check failed: " + ", ".join(f"{n} = {getattr(cert, n):.3e}" for n in failed),
            name,
            getattr(cert, name),
        )
    return cert


def certify_solution(dec: OptimalDecomposition, tol: float = CERT_TOL) -> DecompositionCertificate:
    """Certificate for a solver result, choosing the case from its branch."""
    V_scaled = build_scaled_cm(dec.sf, dec.w)
    V0 = build_tmsvs_cm(dec.tmsvs)
    if dec.branch == "separable":
        case = "separable"
    elif dec.branch == "boundary" or dec.ef_nats == 0.0:
        case = "boundary"
    else:
        case = "entangled"
    return certify(V_scaled, V0, tol, case=case)
