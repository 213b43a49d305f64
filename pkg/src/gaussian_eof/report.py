"""State input parsing, the analysis pipeline and the serializable report.

Pipeline: validate -> reduce -> classify -> solve -> certify -> (oracle).
Each stage maps its failures to one exit code, so callers can tell a bad
file from an unphysical state from a solver or certificate failure.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .decomposition import DEFAULT_SEED, CERT_TOL, certify_solution
from .errors import CertificationFailed, CovarianceError, EofError, InputError, NonSymmetric
from .gaussian_core import (
    DEFAULT_TOL,
    ScalingFactors,
    StandardFormParams,
    build_scaled_cm,
    canonical_standard_form,
    classify_separability,
    reduce_to_standard_form,
    validate_physical,
)
from .solver import solve_eof

SCHEMA = 1
CONVENTION = "vacuum-half"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNPHYSICAL = 3
EXIT_NO_ROOT = 4
EXIT_CERTIFICATE = 5
EXIT_ORACLE = 6


class AnalysisError(Exception):
    """A pipeline failure tagged with the stage that raised it."""

    def __init__(self, stage: str, exit_code: int, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.exit_code = exit_code
        self.cause = cause

    def as_dict(self) -> dict:
        return {
            "stage": self.stage,
            "kind": type(self.cause).__name__,
            "message": str(self.cause),
            "exit_code": self.exit_code,
        }


@dataclass
class StateInput:
    covariance: np.ndarray | None = None
    standard_form: StandardFormParams | None = None
    scaling: ScalingFactors | None = None
    label: str | None = None

    def matrix(self) -> np.ndarray:
        if self.covariance is not None:
            return self.covariance
        return build_scaled_cm(self.standard_form, self.scaling or (1.0, 1.0))


def _real(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite")
    return value


def parse_state(obj) -> StateInput:
    """Validate a decoded JSON object against the state input schema."""
    if not isinstance(obj, dict):
        raise InputError("state must be a JSON object")
    if obj.get("convention") != CONVENTION:
        raise InputError(f"convention must be {CONVENTION!r}, got {obj.get('convention')!r}")
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise InputError("label must be a string")
    has_cov = "covariance" in obj
    has_sf = "standard_form" in obj
    if has_cov == has_sf:
        raise InputError("give exactly one of 'covariance' and 'standard_form'")
    if has_cov:
        if "scaling" in obj:
            raise InputError("'scaling' only applies to 'standard_form' input")
        flat = obj["covariance"]
        if not isinstance(flat, list) or len(flat) != 16:
            raise InputError("covariance must be a list of 16 numbers (row-major)")
        V = np.array([_real(v, f"covariance[{i}]") for i, v in enumerate(flat)]).reshape(4, 4)
        asym = float(np.max(np.abs(V - V.T)))
        if asym > 1e-12 * max(1.0, float(np.max(np.abs(V)))):
            raise NonSymmetric(f"covariance is not symmetric (max |V - V^T| = {asym:.3e})", margin=asym)
        return StateInput(covariance=0.5 * (V + V.T), label=label)
    sf_obj = obj["standard_form"]
    if not isinstance(sf_obj, dict):
        raise InputError("standard_form must be an object with b1, b2, c, d")
    try:
        b1, b2, c, d = (_real(sf_obj[k], k) for k in ("b1", "b2", "c", "d"))
    except KeyError as exc:
        raise InputError(f"standard_form is missing {exc.args[0]!r}") from None
    scaling = None
    if "scaling" in obj:
        sc = obj["scaling"]
        if not isinstance(sc, dict):
            raise InputError("scaling must be an object with u1, u2")
        try:
            scaling = ScalingFactors(_real(sc["u1"], "u1"), _real(sc["u2"], "u2"))
        except KeyError as exc:
            raise InputError(f"scaling is missing {exc.args[0]!r}") from None
    return StateInput(standard_form=StandardFormParams(b1, b2, c, d), scaling=scaling, label=label)


def parse_state_text(text: str) -> StateInput:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    return parse_state(obj)


@dataclass
class EntanglementReport:
    label: str | None = None
    physicality: dict | None = None
    standard_form: dict | None = None
    separability: dict | None = None
    eof: dict | None = None
    certificate: dict | None = None
    oracle: dict | None = None
    warnings: list = field(default_factory=list)
    error: dict | None = None
    versions: dict = field(default_factory=lambda: {"schema": SCHEMA})

    def to_dict(self) -> dict:
        out = {"label": self.label}
        for key in ("physicality", "standard_form", "separability", "eof", "certificate", "oracle", "error"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.warnings:
            out["warnings"] = list(self.warnings)
        out["versions"] = dict(self.versions)
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> EntanglementReport:
        known = {f for f in cls.__dataclass_fields__}
        extra = set(obj) - known
        if extra:
            raise InputError(f"unknown report fields {sorted(extra)}")
        return cls(**obj)

    def to_json(self, indent: int | None = None) -> str:
        return dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> EntanglementReport:
        return cls.from_dict(json.loads(text))


def _float_text(v: float) -> str:
    if not math.isfinite(v):
        return "null"
    s = "%.17g" % v
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj, indent, level):
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _float_text(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = [(json.dumps(str(k), ensure_ascii=False), _encode(v, indent, level + 1)) for k, v in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ", ".join(f"{k}: {v}" for k, v in items) + "}"
        pad = " " * (indent * (level + 1))
        return "{\n" + ",\n".join(f"{pad}{k}: {v}" for k, v in items) + "\n" + " " * (indent * level) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        parts = [_encode(v, indent, level + 1) for v in obj]
        return "[" + ", ".join(parts) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = None) -> str:
    """JSON text with every float written at 17 significant digits; non-finite floats become null."""
    return _encode(obj, indent, 0)


def _stage(name, code, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except AnalysisError:
        raise
    except Exception as exc:  # every failure inside a stage maps to that stage's exit code
        raise AnalysisError(name, code, exc) from exc


def _validate(state, tol):
    V = state.matrix()
    verdict = validate_physical(V, tol)
    return V, verdict


def _reduce(state, V, tol):
    if state.standard_form is not None:
        sf = state.standard_form
        return canonical_standard_form(sf.b1, sf.b2, sf.c, sf.d)
    sf = reduce_to_standard_form(V, tol)
    return canonical_standard_form(sf.b1, sf.b2, sf.c, sf.d)


def analyze_state(
    state: StateInput,
    tol: float = DEFAULT_TOL,
    force_general: bool = False,
    oracle: bool = False,
    oracle_config=None,
    cert_tol: float = CERT_TOL,
) -> EntanglementReport:
    """Run the full pipeline on one state.

    Raises
    ------
    AnalysisError
        Carries the failing stage and its exit code.
    """
    V, phys = _stage("validate", EXIT_UNPHYSICAL, _validate, state, tol)
    sf = _stage("reduce", EXIT_UNPHYSICAL, _reduce, state, V, tol)
    sep = _stage("classify", EXIT_UNPHYSICAL, classify_separability, V, tol)
    dec = _stage("solve", EXIT_NO_ROOT, solve_eof, sf, tol, force_general)
    cert = _stage("certify", EXIT_CERTIFICATE, certify_solution, dec, cert_tol)

    report = EntanglementReport(
        label=state.label,
        physicality={"nu_minus": phys.nu_minus, "nu_plus": phys.nu_plus, "D": phys.rs_det},
        standard_form={"b1": sf.b1, "b2": sf.b2, "c": sf.c, "d": sf.d},
        separability={
            "verdict": sep.verdict.value,
            "DTilde": sep.margin,
            "kappaTilde_minus": sep.kappa_tilde_minus,
        },
        eof={
            "ef_nats": dec.ef_nats,
            "ef_ebits": dec.ef_ebits,
            "x_m": dec.x_m,
            "y_m": dec.y_m,
            "p_m": dec.p_m,
            "w1": dec.w1,
            "w2": dec.w2,
            "branch": dec.branch,
            "residuals": list(dec.residuals),
            "alternatives": len(dec.alternatives),
        },
        certificate={
            "case": cert.case,
            "classicality_boundary_gap": cert.classicality_boundary_gap,
            "det_gap": cert.det_gap,
            "min_rank3_minor": cert.min_rank3_minor,
            "simon_of_partner": cert.simon_of_partner,
            "cf_law_max_residual": cert.cf_law_max_residual,
            "seed": DEFAULT_SEED,
            "tol": cert_tol,
        },
        warnings=list(dec.warnings),
    )
    if oracle:
        from .oracle import OracleConfig, brute_force_eof

        res = _stage("oracle", EXIT_NO_ROOT, brute_force_eof, sf, oracle_config or OracleConfig())
        report.oracle = {
            "ef_nats": res.ef_nats,
            "u_star": [res.u1, res.u2],
            "x_star": res.x,
            "resolution": res.resolution,
            "feasible": res.feasible,
        }
    return report


def analyze_text(text: str, **kwargs) -> EntanglementReport:
    state = _stage("parse", EXIT_PARSE, parse_state_text, text)
    return analyze_state(state, **kwargs)


def _input_error_code(exc: BaseException) -> int:
    if isinstance(exc, (InputError, NonSymmetric, json.JSONDecodeError)):
        return EXIT_PARSE
    if isinstance(exc, CovarianceError):
        return EXIT_UNPHYSICAL
    if isinstance(exc, CertificationFailed):
        return EXIT_CERTIFICATE
    if isinstance(exc, EofError):
        return EXIT_NO_ROOT
    return EXIT_PARSE


def error_report(err: BaseException, label: str | None = None) -> EntanglementReport:
    if not isinstance(err, AnalysisError):
        err = AnalysisError("parse", _input_error_code(err), err)
    return EntanglementReport(label=label, error=err.as_dict())


def format_text(report: EntanglementReport) -> str:
    """Human-readable report."""
    lines = []
    if report.label:
        lines.append(f"state: {report.label}")
    if report.error:
        e = report.error
        lines.append(f"error ({e['stage']}, {e['kind']}): {e['message']}")
        return "\n".join(lines) + "\n"
    p, sf, sep, ef, cert = report.physicality, report.standard_form, report.separability, report.eof, report.certificate
    lines.append(f"symplectic spectrum: nu- = {p['nu_minus']:.10g}, nu+ = {p['nu_plus']:.10g}")
    lines.append(f"standard form: b1 = {sf['b1']:.10g}, b2 = {sf['b2']:.10g}, c = {sf['c']:.10g}, d = {sf['d']:.10g}")
    lines.append(
        f"separability: {sep['verdict']} (Simon discriminant {sep['DTilde']:.6e}, "
        f"PPT eigenvalue {sep['kappaTilde_minus']:.10g})"
    )
    lines.append(f"entanglement of formation: {ef['ef_nats']:.12g} nats = {ef['ef_ebits']:.12g} ebits")
    lines.append(f"branch: {ef['branch']}")
    lines.append(f"squeezed vacuum: x = {ef['x_m']:.12g}, y = {ef['y_m']:.12g}")
    lines.append(f"scalings: w1 = {ef['w1']:.12g}, w2 = {ef['w2']:.12g} (p = {ef['p_m']:.12g})")
    lines.append("residuals: " + ", ".join(f"{r:.2e}" for r in ef["residuals"]))
    lines.append(f"certificate ({cert['case']}):")
    for key in ("classicality_boundary_gap", "det_gap", "min_rank3_minor", "simon_of_partner", "cf_law_max_residual"):
        lines.append(f"  {key} = {cert[key]:.3e}")
    if report.oracle:
        o = report.oracle
        if o["ef_nats"] is None or not math.isfinite(o["ef_nats"]):
            lines.append("oracle: no feasible grid node")
        else:
            lines.append(
                f"oracle: EF = {o['ef_nats']:.10g} nats at u = ({o['u_star'][0]:.6g}, {o['u_star'][1]:.6g}), "
                f"resolution {o['resolution']:.2e}"
            )
            lines.append(f"oracle - solver: {o['ef_nats'] - ef['ef_nats']:.3e} nats")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"
