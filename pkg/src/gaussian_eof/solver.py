"""Entanglement of formation of a two-mode Gaussian state.

The optimal pure-state decomposition of an entangled state with standard
form ``(b1, b2, c, d)`` displaces a single two-mode squeezed vacuum with
parameters ``(x, y)``, ``x^2 - y^2 = 1/4``, against a classical Gaussian
partner. The unknowns ``(u1, u2, x, y)`` satisfy the purity condition and
three optimality equations::

    (b1 u1 - x)(b2 u2 - x)   - (c sqrt(u1 u2) - y)^2   = 0     (c1)
    (b1/u1 - x)(b2/u2 - x)   - (|d|/sqrt(u1 u2) - y)^2 = 0     (c2)
    (b1 u1 - x)(b2/u2 - x)   - (b2 u2 - x)(b1/u1 - x)  = 0     (c3)

Eliminating variables leaves a quartic in ``p = u1 u2``; ``y`` is the smaller
root of a quadratic in ``y`` at the admissible root, and the entanglement is
the entropy of the squeezed vacuum's one-mode reduction.

Every candidate solution, closed-form or not, must pass the same gate:
all four residuals below ``RESIDUAL_GATE`` and a classical partner
(``V(u) - V0(x) >= 0``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConventionViolation,
    DomainError,
    NegativeDiscriminant,
    NoFeasibleRoot,
    NoPositiveRoot,
    NotOnKappaManifold,
    NotSqueezedThermal,
    NotSymmetric,
    ResidualTooLarge,
)
from .gaussian_core import (
    DEFAULT_TOL,
    ScalingFactors,
    StandardFormParams,
    build_scaled_cm,
)
from .polyroot import evaluate, polish, real_roots, smallest_root_quadratic

LN2 = math.log(2.0)
RESIDUAL_GATE = 1e-9
SCALING_RESIDUAL_MAX = 1e-7
PSD_GATE = 1e-9
MANIFOLD_TOL = 1e-9
ROOT_FLOOR = 1.0 - 1e-9

BRANCH_GENERAL = "general"
BRANCH_SYMMETRIC = "symmetric"
BRANCH_SQUEEZED_THERMAL = "squeezed-thermal"
BRANCH_BOUNDARY = "boundary"
BRANCH_KAPPA_HALF = "kappa-half"
BRANCH_SEPARABLE = "separable"


@dataclass(frozen=True)
class TmsvsParams:
    """Two-mode squeezed vacuum. Only ``y`` is stored; ``x`` follows from purity."""

    y: float

    def __post_init__(self):
        if not (math.isfinite(self.y) and self.y >= 0.0):
            raise DomainError(f"TMSVS parameter y must be >= 0, got {self.y!r}")

    @property
    def x(self) -> float:
        return math.sqrt(self.y * self.y + 0.25)

    @classmethod
    def from_x(cls, x: float, tol: float = DEFAULT_TOL) -> TmsvsParams:
        if x < 0.5 - tol:
            raise DomainError(f"TMSVS parameter x must be >= 1/2, got {x!r}")
        x = max(x, 0.5)
        return cls(math.sqrt((x - 0.5) * (x + 0.5)))


@dataclass
class OptimalDecomposition:
    sf: StandardFormParams
    p_m: float
    w: ScalingFactors
    tmsvs: TmsvsParams
    ef_nats: float
    ef_ebits: float
    residuals: tuple[float, float, float, float]
    branch: str
    alternatives: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def x_m(self) -> float:
        return self.tmsvs.x

    @property
    def y_m(self) -> float:
        return self.tmsvs.y

    @property
    def w1(self) -> float:
        return self.w.u1

    @property
    def w2(self) -> float:
        return self.w.u2


def entropy_of_formation(x: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Entropy of a one-mode reduction of the squeezed vacuum with parameter ``x``.

    Returns ``(nats, ebits)``. The ``x -> 1/2`` limit is 0.
    """
    if not x >= 0.5 - tol:
        raise DomainError(f"x must be >= 1/2, got {x!r}")
    if x <= 0.5:
        return 0.0, 0.0
    hi, lo = x + 0.5, x - 0.5
    nats = hi * math.log(hi) - lo * math.log(lo)
    return nats, nats / LN2


def _check_convention(sf: StandardFormParams) -> float:
    ad = -sf.d
    if not sf.d < 0.0:
        raise ConventionViolation(f"expected d < 0, got d = {sf.d!r}")
    if sf.c < ad - 1e-12 * max(1.0, sf.c):
        raise ConventionViolation(f"expected c >= |d|, got c = {sf.c!r}, |d| = {ad!r}")
    return ad


def _a0(b1, b2, ad):
    e = b1 * b2 - ad * ad
    return e * (b1 * e - b2 / 4.0) * (b2 * e - b1 / 4.0)


def _a1(b1, b2, c, ad):
    e = b1 * b2 - ad * ad
    f = c * e + ad / 4.0
    return -f * ((b1 - b2) ** 2 * f + 2.0 * b1 * b2 * (c - ad) * (e - 0.25))


def quartic_coefficients(sf: StandardFormParams) -> list[float]:
    """Coefficients ``[A0, ..., A4]`` of the quartic in ``p = u1 u2`` (ascending)."""
    ad = _check_convention(sf)
    b1, b2, c = sf.b1, sf.b2, sf.c
    det_v = sf.det_v
    z = sf.z
    a2 = (
        ((b1 * c - b2 * ad) * (b1 * ad - b2 * c) + c * ad * z) * (det_v + 1.0 / 16.0)
        - 2.0 * (b1 * b1 * b2 * b2 - c * c * ad * ad) * sf.rs_det
        - c * ad * det_v
    )
    return [_a0(b1, b2, ad), _a1(b1, b2, c, ad), a2, _a1(b1, b2, ad, c), _a0(b1, b2, c)]


def quartic_at(sf: StandardFormParams, p: float) -> float:
    return evaluate(quartic_coefficients(sf), p)


def y_trinomial(sf: StandardFormParams, p: float) -> tuple[float, float, float]:
    """Coefficients ``(B0, B1, B2)`` of the quadratic whose smaller root is ``y``."""
    b1, b2, c = sf.b1, sf.b2, sf.c
    ad = abs(sf.d)
    bb = b1 * b2
    sp = math.sqrt(p)
    B0 = -sf.simon * p
    B1 = -2.0 * sp * ((ad * (bb - c * c) + c / 4.0) * p + (c * (bb - ad * ad) + ad / 4.0))
    B2 = (bb - c * c) * p * p + sf.z * p + (bb - ad * ad)
    return B0, B1, B2


def residuals(sf: StandardFormParams, u1: float, u2: float, x: float, y: float) -> tuple[float, float, float, float]:
    """``(purity, c1, c2, c3)``; c3 in cross-multiplied form."""
    b1, b2, c = sf.b1, sf.b2, sf.c
    ad = abs(sf.d)
    s = math.sqrt(u1 * u2)
    r_p = x * x - y * y - 0.25
    r1 = (b1 * u1 - x) * (b2 * u2 - x) - (c * s - y) ** 2
    r2 = (b1 / u1 - x) * (b2 / u2 - x) - (ad / s - y) ** 2
    r3 = (b1 * u1 - x) * (b2 / u2 - x) - (b2 * u2 - x) * (b1 / u1 - x)
    return r_p, r1, r2, r3


def recover_scalings(sf: StandardFormParams, p: float, x: float, y: float) -> tuple[float, float]:
    """Squeeze factors ``(u1, u2)`` with ``u1 u2 = p`` for a candidate ``(p, x, y)``.

    ``u1`` is a root of ``-x b1 u1^2 + (b1 b2 p + x^2 - K) u1 - x b2 p = 0`` with
    ``K = (c sqrt(p) - y)^2``. Each root is also Newton-polished on (c3);
    whichever value has the smallest (c1, c2, c3) residual wins.
    """
    b1, b2, c = sf.b1, sf.b2, sf.c
    k = (c * math.sqrt(p) - y) ** 2
    qa = -x * b1
    qb = b1 * b2 * p + x * x - k
    qc = -x * b2 * p
    disc = qb * qb - 4.0 * qa * qc
    if disc < -1e-12 * qb * qb:
        raise NoPositiveRoot(f"no real scaling for p = {p!r} (discriminant {disc:.3e})")
    root = math.sqrt(max(disc, 0.0))
    q = -0.5 * (qb + math.copysign(root, qb))
    roots = [q / qa] + ([qc / q] if q != 0.0 else [])
    # c3 with u2 = p/u1, times p u1^2; its root stays simple where the quadratic's roots merge (b1 = b2)
    c3_poly = [-b1 * b2 * p * p, x * p * (b2 * p + b1), 0.0, -x * (b1 * p + b2), b1 * b2]
    best = None
    for u1 in roots:
        if not (math.isfinite(u1) and u1 > 0.0):
            continue
        for cand in (u1, polish(c3_poly, u1).root):
            if not (math.isfinite(cand) and cand > 0.0):
                continue
            score = max(abs(r) for r in residuals(sf, cand, p / cand, x, y)[1:])
            if best is None or score < best[0]:
                best = (score, cand, p / cand)
    if best is None:
        raise NoPositiveRoot(f"no positive scaling for p = {p!r}")
    if best[0] > SCALING_RESIDUAL_MAX:
        raise ResidualTooLarge(f"scaling residual {best[0]:.3e} for p = {p!r}", residual=best[0])
    return best[1], best[2]


def _jacobian(sf, u1, u2, y):
    """Derivatives of (c1, c2, c3) with respect to ``(u1, u2, y)``, ``x = sqrt(y^2 + 1/4)``."""
    b1, b2, c = sf.b1, sf.b2, sf.c
    ad = abs(sf.d)
    x = math.sqrt(y * y + 0.25)
    dx = y / x
    s = math.sqrt(u1 * u2)
    qa, qb = b1 * u1 - x, b2 * u2 - x
    pa, pb = b1 / u1 - x, b2 / u2 - x
    e1, e2 = c * s - y, ad / s - y
    return np.array(
        [
            [b1 * qb - e1 * c * s / u1, b2 * qa - e1 * c * s / u2, -dx * (qa + qb) + 2.0 * e1],
            [-b1 / u1**2 * pb + e2 * ad / (s * u1), -b2 / u2**2 * pa + e2 * ad / (s * u2), -dx * (pa + pb) + 2.0 * e2],
            [b1 * pb + qb * b1 / u1**2, -qa * b2 / u2**2 - b2 * pa, dx * (pa + qb - pb - qa)],
        ]
    )


def _refine(sf, u1, u2, y, steps=8):
    """Newton steps on (c1, c2, c3) in ``(u1, u2, y)``; a step is kept only if it lowers the residual.

    At a double root of the quartic, ``y`` from the quadratic carries an
    ``O(sqrt(eps))`` error that this removes.
    """

    def score(u1, u2, y):
        return max(abs(r) for r in residuals(sf, u1, u2, math.sqrt(y * y + 0.25), y)[1:])

    best = score(u1, u2, y)
    for _ in range(steps):
        if best <= 1e-15:
            break
        r = np.array(residuals(sf, u1, u2, math.sqrt(y * y + 0.25), y)[1:])
        try:
            delta = np.linalg.solve(_jacobian(sf, u1, u2, y), r)
        except np.linalg.LinAlgError:
            break
        n1, n2, ny = u1 - delta[0], u2 - delta[1], y - delta[2]
        if not (n1 > 0.0 and n2 > 0.0 and ny >= 0.0 and math.isfinite(n1 + n2 + ny)):
            break
        new = score(n1, n2, ny)
        if not new < best:
            break
        u1, u2, y, best = n1, n2, ny, new
    return u1, u2, y


def partner_margin(sf: StandardFormParams, u1: float, u2: float, x: float, y: float) -> float:
    """Smallest eigenvalue of ``V(u1, u2) - V0(x)``, scaled by the matrix size."""
    V = build_scaled_cm(sf, (u1, u2))
    V0 = build_scaled_cm(StandardFormParams(x, x, y, -y), (1.0, 1.0))
    lam = float(np.linalg.eigvalsh(V - V0)[0])
    return lam / max(1.0, float(np.max(np.abs(V))))


def _candidate(sf, u1, u2, y, branch):
    x = math.sqrt(y * y + 0.25)
    res = residuals(sf, u1, u2, x, y)
    margin = partner_margin(sf, u1, u2, x, y)
    ok = max(abs(r) for r in res) <= RESIDUAL_GATE and margin >= -PSD_GATE
    return {
        "branch": branch,
        "p": u1 * u2,
        "u1": u1,
        "u2": u2,
        "x": x,
        "y": y,
        "residuals": res,
        "partner_margin": margin,
        "feasible": ok,
    }


def _finish(sf, cand, branch, alternatives=(), warnings=()):
    tm = TmsvsParams(cand["y"])
    nats, ebits = entropy_of_formation(tm.x)
    warn = list(warnings)
    if cand["u1"] < 1.0 or cand["u2"] < 1.0:
        warn.append("optimal squeeze factor below 1")
    return OptimalDecomposition(
        sf=sf,
        p_m=cand["u1"] * cand["u2"],
        w=ScalingFactors(cand["u1"], cand["u2"]),
        tmsvs=tm,
        ef_nats=nats,
        ef_ebits=ebits,
        residuals=tuple(cand["residuals"]),
        branch=branch,
        alternatives=list(alternatives),
        warnings=warn,
    )


def _y_from_x(x):
    return math.sqrt(max((x - 0.5) * (x + 0.5), 0.0))


def _safe_sqrt_ratio(num, den):
    if den <= 0.0 or num < 0.0:
        return math.nan
    return math.sqrt(num / den)


def _boundary_scalings(sf):
    b1, b2, c, d = sf.as_tuple()
    bb = b1 * b2
    w1 = _safe_sqrt_ratio(b2 * (bb - d * d) - b1 / 4.0, b2 * (bb - c * c) - b1 / 4.0)
    w2 = _safe_sqrt_ratio(b1 * (bb - d * d) - b2 / 4.0, b1 * (bb - c * c) - b2 / 4.0)
    return w1, w2


def _classical_scaling(sf, start=(1.0, 1.0)):
    """Squeeze factors maximizing the classicality margin of ``V(u)``."""
    from scipy.optimize import minimize

    def neg_margin(t):
        V = build_scaled_cm(sf, (math.exp(t[0]), math.exp(t[1])))
        return -float(np.linalg.eigvalsh(V - 0.5 * np.eye(4))[0])

    x0 = [math.log(start[0]), math.log(start[1])]
    res = minimize(neg_margin, x0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    return math.exp(res.x[0]), math.exp(res.x[1])


def _solve_not_entangled(sf, tol):
    boundary = abs(sf.simon) <= tol
    w1, w2 = _boundary_scalings(sf) if sf.d < 0.0 else (math.nan, math.nan)
    if boundary and math.isfinite(w1) and math.isfinite(w2) and w1 > 0 and w2 > 0:
        cand = _candidate(sf, w1, w2, 0.0, BRANCH_BOUNDARY)
        if cand["feasible"]:
            return _finish(sf, cand, BRANCH_BOUNDARY)
    start = (w1, w2) if math.isfinite(w1) and math.isfinite(w2) and w1 > 0 and w2 > 0 else (1.0, 1.0)
    u1, u2 = _classical_scaling(sf, start)
    cand = _candidate(sf, u1, u2, 0.0, BRANCH_SEPARABLE)
    branch = BRANCH_BOUNDARY if boundary else BRANCH_SEPARABLE
    warnings = [] if cand["partner_margin"] >= -PSD_GATE else ["no classical scaling found"]
    return _finish(sf, cand, branch, warnings=warnings)


def solve_special_symmetric(sf: StandardFormParams) -> OptimalDecomposition:
    ad = _check_convention(sf)
    if abs(sf.b1 - sf.b2) > MANIFOLD_TOL * max(sf.b1, sf.b2):
        raise NotSymmetric(f"b1 = {sf.b1!r} differs from b2 = {sf.b2!r}")
    b = 0.5 * (sf.b1 + sf.b2)
    kappa = math.sqrt((b - sf.c) * (b - ad))
    w = math.sqrt((b - ad) / (b - sf.c))
    # y = (1/4 - kappa^2) / (2 kappa) is the purity partner of x = (kappa^2 + 1/4) / (2 kappa)
    y = max((0.25 - kappa * kappa) / (2.0 * kappa), 0.0)
    cand = _candidate(sf, w, w, y, BRANCH_SYMMETRIC)
    return _finish(sf, cand, BRANCH_SYMMETRIC)


def solve_special_squeezed_thermal(sf: StandardFormParams) -> OptimalDecomposition:
    ad = _check_convention(sf)
    c = sf.c
    if abs(c - ad) > MANIFOLD_TOL * c:
        raise NotSqueezedThermal(f"c = {c!r} differs from |d| = {ad!r}")
    b1, b2 = sf.b1, sf.b2
    s = b1 + b2
    x = (s * (b1 * b2 - c * c + 0.25) - 2.0 * c * math.sqrt(max(sf.rs_det, 0.0))) / (s * s - 4.0 * c * c)
    cand = _candidate(sf, 1.0, 1.0, _y_from_x(x), BRANCH_SQUEEZED_THERMAL)
    return _finish(sf, cand, BRANCH_SQUEEZED_THERMAL)


def kappa_half_branches(sf: StandardFormParams) -> dict[str, tuple[float, float, float]]:
    """Closed forms ``(x, w1, w2)`` on ``det(V + i Omega/2) = 0`` for ``b1 >= b2``.

    ``"negative"`` is the solution stated for ``b2 c - b1 |d| < 0``,
    ``"positive"`` the one stated for ``b2 c - b1 |d| >= 0``.
    """
    b1, b2, c = sf.b1, sf.b2, sf.c
    ad = abs(sf.d)
    bb = b1 * b2
    e = bb - ad * ad
    neg_den = 8.0 * (sf.det_v - 1.0 / 16.0)
    x_neg = (b1 * b1 - b2 * b2) / neg_den if neg_den != 0.0 else math.nan
    w1n, w2n = _boundary_scalings(sf)
    x_pos = 0.5 * math.sqrt(bb / e)
    w1p = 2.0 * math.sqrt(b1 / b2 * e)
    w2p = 2.0 * math.sqrt(b2 / b1 * e)
    return {"negative": (x_neg, w1n, w2n), "positive": (x_pos, w1p, w2p)}


def solve_special_kappa_half(sf: StandardFormParams) -> OptimalDecomposition:
    """Closed form for states whose smallest symplectic eigenvalue is 1/2.

    The sign of ``b2 c - b1 |d|`` (after ordering ``b1 >= b2``) picks the
    preferred branch. That branch is still gated: on part of the negative-sign
    region its partner is not classical, and the other branch is then the
    true optimum. Raises :class:`NotOnKappaManifold` if neither passes.
    """
    ad = _check_convention(sf)
    if abs(sf.rs_det) > MANIFOLD_TOL:
        raise NotOnKappaManifold(f"det(V + i Omega/2) = {sf.rs_det!r} is not 0")
    swap = sf.b1 < sf.b2
    work = sf.swapped() if swap else sf
    sign = work.b2 * work.c - work.b1 * ad
    preferred = "negative" if sign < 0.0 else "positive"
    order = [preferred, "positive" if preferred == "negative" else "negative"]
    forms = kappa_half_branches(work)
    tried = []
    for name in order:
        x, w1, w2 = forms[name]
        if not (math.isfinite(x) and x >= 0.5 and w1 > 0 and w2 > 0 and math.isfinite(w1 * w2)):
            tried.append({"branch": name, "feasible": False, "x": x})
            continue
        if swap:
            w1, w2 = w2, w1
        cand = _candidate(sf, w1, w2, _y_from_x(x), BRANCH_KAPPA_HALF)
        cand["formula"] = name
        tried.append(cand)
        if cand["feasible"]:
            warnings = [] if name == preferred else [f"sign rule selected the {preferred} branch; its partner is not classical"]
            return _finish(sf, cand, BRANCH_KAPPA_HALF, alternatives=tried[:-1], warnings=warnings)
    raise NotOnKappaManifold("no kappa-half closed form passes the feasibility gate")


def general_candidates(sf: StandardFormParams) -> list[dict]:
    """Every candidate produced by the quartic route, feasible or not."""
    _check_convention(sf)
    out = []
    for p, mult in real_roots(quartic_coefficients(sf)).roots:
        if p < ROOT_FLOOR:
            continue
        p = max(p, 1.0) if p < 1.0 else p
        info = {"branch": BRANCH_GENERAL, "p": p, "multiplicity": mult, "feasible": False}
        try:
            y = smallest_root_quadratic(*y_trinomial(sf, p))
            y = max(y, 0.0)
            x = math.sqrt(y * y + 0.25)
            u1, u2 = recover_scalings(sf, p, x, y)
        except (NegativeDiscriminant, NoPositiveRoot, ResidualTooLarge) as exc:
            info["error"] = f"{type(exc).__name__}: {exc}"
            out.append(info)
            continue
        u1, u2, y = _refine(sf, u1, u2, y)
        cand = _candidate(sf, u1, u2, y, BRANCH_GENERAL)
        cand["multiplicity"] = mult
        out.append(cand)
    return out


def solve_general(sf: StandardFormParams) -> OptimalDecomposition:
    cands = general_candidates(sf)
    feasible = sorted((c for c in cands if c["feasible"]), key=lambda c: (c["x"], c["u1"], c["u2"]))
    if not feasible:
        raise NoFeasibleRoot("no quartic root yields a consistent decomposition", cands)
    return _finish(sf, feasible[0], BRANCH_GENERAL, alternatives=feasible[1:])


def solve_eof(sf: StandardFormParams, tol: float = DEFAULT_TOL, force_general: bool = False) -> OptimalDecomposition:
    """Optimal decomposition and entanglement of formation of a standard-form state.

    Separable and boundary states return ``EF = 0``. Entangled states go
    through the closed forms on the symmetric, squeezed-thermal and
    ``kappa_- = 1/2`` manifolds unless ``force_general`` is set; the quartic
    route handles everything else.
    """
    if sf.simon >= -tol:
        return _solve_not_entangled(sf, tol)
    _check_convention(sf)
    if not force_general:
        ad = -sf.d
        if abs(sf.b1 - sf.b2) <= MANIFOLD_TOL * max(sf.b1, sf.b2):
            dec = solve_special_symmetric(sf)
            if _gate_ok(dec):
                return dec
        elif abs(sf.c - ad) <= MANIFOLD_TOL * sf.c:
            dec = solve_special_squeezed_thermal(sf)
            if _gate_ok(dec):
                return dec
        elif abs(sf.rs_det) <= MANIFOLD_TOL:
            try:
                return solve_special_kappa_half(sf)
            except NotOnKappaManifold:
                pass
    return solve_general(sf)


def _gate_ok(dec: OptimalDecomposition) -> bool:
    if max(abs(r) for r in dec.residuals) > RESIDUAL_GATE:
        return False
    return partner_margin(dec.sf, dec.w1, dec.w2, dec.x_m, dec.y_m) >= -PSD_GATE


def eof_of_product(*decompositions: OptimalDecomposition) -> float:
    """EF (nats) of a tensor product of independently solved two-mode states.

    The optimal decomposition of a product is the product of the optimal
    decompositions, and the entropy of a product of squeezed vacua is the sum
    of their entropies.
    """
    return math.fsum(d.ef_nats for d in decompositions)
