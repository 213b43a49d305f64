import math
import sys
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussian_eof import StandardFormParams, TmsvsParams, entropy_of_formation, solve_eof
from gaussian_eof import solver
from gaussian_eof.errors import (
    ConventionViolation,
    DomainError,
    NoFeasibleRoot,
    NotOnKappaManifold,
    NotSqueezedThermal,
    NotSymmetric,
)
from gaussian_eof.oracle import brute_force_eof
from gaussian_eof.solver import (
    eof_of_product,
    kappa_half_branches,
    partner_margin,
    quartic_at,
    quartic_coefficients,
    recover_scalings,
    residuals,
    solve_special_kappa_half,
    solve_special_squeezed_thermal,
    solve_special_symmetric,
    y_trinomial,
)

from helpers import entangled_states, kappa_half_states, squeezed_thermal_states, symmetric_states, tmsvs

SYM = StandardFormParams(1.0, 1.0, 0.8, -0.6)
SQT = StandardFormParams(1.2, 1.0, 0.8, -0.8)
EDGE = StandardFormParams(1.0, 1.0, 0.5, -0.5)

# closed forms evaluated at 40 digits (tests/_derive_values.py)
SYM_X = 0.58336309447890170763069659873650045741
SYM_Y = 0.3005203820042826978703588538945608416961
SYM_EF = 0.293864818388271333343339489091459154647
SQT_X = 0.5756645508614567041321218857185453108337
SQT_EF = 0.2737814434785318487027788798819440937466
# brute-force oracle, 161 points per axis
SYM_EF_ORACLE = 0.2938648183855724
SQT_EF_ORACLE = 0.2737814434758257


class TestQuartic:
    def test_end_coefficients(self):
        A = quartic_coefficients(SYM)
        assert A[0] == pytest.approx(float(Fraction(1521, 15625)), abs=1e-15)
        assert A[4] == pytest.approx(float(Fraction(1089, 250000)), abs=1e-15)

    def test_symmetric_root(self):
        scale = max(map(abs, quartic_coefficients(SYM)))
        assert abs(quartic_at(SYM, 2.0)) <= 1e-12 * scale

    def test_squeezed_thermal_vanishes_at_one(self):
        scale = max(map(abs, quartic_coefficients(SQT)))
        assert abs(quartic_at(SQT, 1.0)) <= 1e-12 * scale

    def test_negative_at_one(self):
        assert quartic_at(SYM, 1.0) < 0.0

    def test_convention_enforced(self):
        with pytest.raises(ConventionViolation):
            quartic_coefficients(StandardFormParams(1.0, 1.0, 0.8, 0.6))
        with pytest.raises(ConventionViolation):
            quartic_coefficients(StandardFormParams(1.0, 1.0, 0.5, -0.6))


class TestTrinomial:
    def test_boundary_state(self):
        B0, B1, B2 = y_trinomial(EDGE, 1.0)
        assert B0 == pytest.approx(0.0, abs=1e-15)
        assert min(np.roots([B2, B1, B0]).real) == pytest.approx(0.0, abs=1e-15)

    def test_signs(self):
        rng = np.random.default_rng(2)
        for sf in entangled_states(1000, 21):
            p = rng.uniform(1.0, 10.0)
            B0, B1, B2 = y_trinomial(sf, p)
            assert B0 >= 0.0 and B1 < 0.0 and B2 > 0.0


class TestScalings:
    def test_symmetric(self):
        assert recover_scalings(SYM, 2.0, SYM_X, SYM_Y) == pytest.approx((math.sqrt(2.0), math.sqrt(2.0)), abs=1e-12)

    def test_squeezed_thermal(self):
        y = math.sqrt(SQT_X**2 - 0.25)
        assert recover_scalings(SQT, 1.0, SQT_X, y) == pytest.approx((1.0, 1.0), abs=1e-12)

    def test_pure_state(self):
        sf = tmsvs(1.3)
        assert recover_scalings(sf, 1.0, sf.b1, sf.c) == pytest.approx((1.0, 1.0), abs=1e-12)


class TestResiduals:
    def test_exact_symmetric_solution(self):
        r = residuals(SYM, math.sqrt(2.0), math.sqrt(2.0), SYM_X, SYM_Y)
        assert max(map(abs, r)) <= 1e-10

    def test_perturbed_purity(self):
        r = residuals(SYM, math.sqrt(2.0), math.sqrt(2.0), SYM_X + 1e-3, SYM_Y)
        assert r[0] == pytest.approx(2.0 * SYM_X * 1e-3 + 1e-6, rel=1e-9)

    def test_boundary(self):
        assert residuals(EDGE, 1.0, 1.0, 0.5, 0.0) == (0.0, 0.0, 0.0, 0.0)


class TestEntropy:
    def test_limit(self):
        assert entropy_of_formation(0.5) == (0.0, 0.0)

    def test_two_ebits(self):
        nats, ebits = entropy_of_formation(1.5)
        assert nats == 2.0 * math.log(2.0)
        assert ebits == 2.0

    def test_symmetric_value(self):
        assert entropy_of_formation(SYM_X)[0] == pytest.approx(SYM_EF, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            entropy_of_formation(0.4)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0.5, 50.0), st.floats(1e-6, 1.0))
    def test_increasing_and_concave(self, x, h):
        f = lambda t: entropy_of_formation(t)[0]
        assert f(x + h) > f(x)
        assert f(x + h) >= 0.5 * (f(x) + f(x + 2 * h)) - 1e-12


class TestExamples:
    def test_symmetric(self):
        dec = solve_eof(SYM)
        assert dec.branch == "symmetric"
        assert dec.p_m == pytest.approx(2.0, abs=1e-14)
        assert (dec.w1, dec.w2) == pytest.approx((math.sqrt(2.0), math.sqrt(2.0)), abs=1e-14)
        assert dec.x_m == pytest.approx(SYM_X, abs=1e-14)
        assert dec.ef_nats == pytest.approx(SYM_EF, abs=1e-14)
        assert dec.ef_ebits == pytest.approx(SYM_EF / math.log(2.0), abs=1e-14)
        assert dec.ef_nats == pytest.approx(SYM_EF_ORACLE, abs=1e-9)

    def test_squeezed_thermal(self):
        dec = solve_eof(SQT)
        assert dec.branch == "squeezed-thermal"
        assert (dec.w1, dec.w2) == (1.0, 1.0)
        assert dec.x_m == pytest.approx(SQT_X, abs=1e-14)
        assert dec.ef_nats == pytest.approx(SQT_EF, abs=1e-14)
        assert dec.ef_nats == pytest.approx(SQT_EF_ORACLE, abs=1e-9)

    def test_boundary(self):
        dec = solve_eof(EDGE)
        assert dec.branch == "boundary"
        assert (dec.ef_nats, dec.x_m, dec.y_m) == (0.0, 0.5, 0.0)
        assert (dec.w1, dec.w2) == (1.0, 1.0)

    @pytest.mark.parametrize("sf", [SYM, SQT])
    def test_forced_general_agrees(self, sf):
        gen = solve_eof(sf, force_general=True)
        dec = solve_eof(sf)
        assert gen.branch == "general"
        assert (gen.x_m, gen.w1, gen.w2) == pytest.approx((dec.x_m, dec.w1, dec.w2), abs=1e-8)

    def test_product_state_is_separable(self):
        dec = solve_eof(StandardFormParams(0.7, 0.9, 0.0, 0.0))
        assert dec.ef_nats == 0.0 and dec.branch == "separable"


class TestSpecialCases:
    @pytest.mark.parametrize("b", [1.0, 1.5, 2.0])
    def test_symmetric_family(self, b):
        # (b - c)(b - |d|) held at 0.08 keeps every member entangled
        sf = StandardFormParams(b, b, b - 0.2, -(b - 0.4))
        assert sf.simon < 0.0
        dec = solve_special_symmetric(sf)
        gen = solve_eof(sf, force_general=True)
        assert (dec.x_m, dec.w1) == pytest.approx((gen.x_m, gen.w1), abs=1e-8)

    def test_symmetric_squeezed_thermal_overlap(self):
        for sf in symmetric_states(30, 31):
            sf = StandardFormParams(sf.b1, sf.b2, sf.c, -sf.c)
            if sf.simon >= -1e-6:
                continue
            a, b = solve_special_symmetric(sf), solve_special_squeezed_thermal(sf)
            assert (a.x_m, a.w1, a.w2) == pytest.approx((b.x_m, b.w1, b.w2), abs=1e-10)

    def test_separable_squeezed_thermal(self):
        assert solve_eof(StandardFormParams(2.0, 2.0, 0.5, -0.5)).ef_nats == 0.0

    def test_off_manifold_errors(self):
        with pytest.raises(NotSymmetric):
            solve_special_symmetric(SQT)
        with pytest.raises(NotSqueezedThermal):
            solve_special_squeezed_thermal(SYM)
        with pytest.raises(NotOnKappaManifold):
            solve_special_kappa_half(SYM)

    @pytest.mark.parametrize("b, c", [(0.8, 0.6), (1.0, 0.85), (1.7, 1.6)])
    def test_kappa_half_symmetric_overlap(self, b, c):
        # nu_-^2 = (b - c)(b + |d|) = 1/4 for a symmetric state
        sf = StandardFormParams(b, b, c, -(0.25 / (b - c) - b))
        assert abs(sf.rs_det) <= 1e-12 and sf.simon < 0.0 and -sf.d <= c
        k, s = solve_special_kappa_half(sf), solve_special_symmetric(sf)
        assert (k.x_m, k.w1, k.w2) == pytest.approx((s.x_m, s.w1, s.w2), abs=1e-8)

    def test_kappa_half_residual_gate(self):
        for sf in kappa_half_states(40, 33):
            dec = solve_special_kappa_half(sf)
            assert max(map(abs, dec.residuals)) <= 1e-9

    def test_kappa_half_agrees_with_general(self):
        for sf in kappa_half_states(40, 34):
            dec, gen = solve_eof(sf), solve_eof(sf, force_general=True)
            assert dec.branch == "kappa-half" and gen.branch == "general"
            # the quartic has a double root here, so both routes pin x only to
            # about sqrt(eps); each must still be an exact, feasible decomposition
            for d in (dec, gen):
                assert max(map(abs, d.residuals)) <= 1e-12
                assert partner_margin(sf, d.w1, d.w2, d.x_m, d.y_m) >= -1e-12
            assert gen.x_m == pytest.approx(dec.x_m, abs=100 * math.sqrt(sys.float_info.epsilon) * dec.x_m)


@lru_cache(maxsize=None)
def _rejected_kappa_half():
    out = []
    for sf in kappa_half_states(60, 4, sign=-1):
        x, w1, w2 = kappa_half_branches(sf)["negative"]
        margin = partner_margin(sf, w1, w2, x, math.sqrt(x * x - 0.25))
        if margin < -1e-3:
            out.append((sf, x))
    assert len(out) >= 5
    return out


class TestKappaHalfFallback:
    """The sign of b2 c - b1 |d| does not always pick the feasible closed form.

    On part of the negative-sign region the indicated formula has a
    non-classical partner. The other formula is then the optimum: the general
    quartic route lands on it, and so does the limit of nearby states off the
    manifold, solved both by the quartic route and by brute force.
    """

    @pytest.fixture
    def rejected(self):
        return _rejected_kappa_half()

    def test_solver_takes_other_branch(self, rejected):
        for sf, x_neg in rejected:
            dec = solve_eof(sf)
            x_pos = kappa_half_branches(sf)["positive"][0]
            assert dec.x_m == pytest.approx(x_pos, abs=1e-12)
            assert x_pos > x_neg
            assert any("sign rule" in w for w in dec.warnings)

    def test_general_route_agrees(self, rejected):
        for sf, _ in rejected:
            gen = solve_eof(sf, force_general=True)
            assert gen.x_m == pytest.approx(solve_eof(sf).x_m, abs=1e-8)

    def test_nearby_states_converge_to_fallback(self, rejected):
        for sf, x_neg in rejected[:5]:
            ef = solve_eof(sf).ef_nats
            ef_sign_rule = entropy_of_formation(x_neg)[0]
            gaps = []
            for eps in (1e-3, 1e-4, 1e-5):
                near = StandardFormParams(sf.b1 + eps, sf.b2 + eps, sf.c, sf.d)
                assert near.rs_det > 0.0 and near.simon < 0.0
                gaps.append(abs(solve_eof(near).ef_nats - ef))
            assert gaps[0] > gaps[1] > gaps[2]
            assert gaps[2] < 1e-3 < abs(ef - ef_sign_rule)

    def test_oracle_off_manifold(self, rejected):
        for sf, _ in rejected[:2]:
            near = StandardFormParams(sf.b1 + 1e-4, sf.b2 + 1e-4, sf.c, sf.d)
            assert brute_force_eof(near).ef_nats == pytest.approx(solve_eof(near).ef_nats, abs=1e-8)


class TestGeneral:
    def test_no_feasible_root(self, monkeypatch):
        # roots 0.2 and 0.5, both below the admissible p >= 1
        monkeypatch.setattr(solver, "quartic_coefficients", lambda sf: [0.1, -0.7, 1.0])
        with pytest.raises(NoFeasibleRoot) as info:
            solver.solve_general(SYM)
        assert info.value.candidates == []

    def test_dispatch_consistency(self):
        for sf in squeezed_thermal_states(50, 41):
            dec, gen = solve_eof(sf), solve_eof(sf, force_general=True)
            assert (gen.x_m, gen.w1, gen.w2) == pytest.approx((dec.x_m, dec.w1, dec.w2), abs=1e-8)

    def test_scalings_at_least_one(self):
        for sf in entangled_states(500, 43):
            dec = solve_eof(sf)
            assert min(dec.w1, dec.w2) >= 1.0 - 1e-9
            assert not dec.warnings

    def test_minimal_x_selected(self):
        for sf in entangled_states(200, 44):
            dec = solve_eof(sf, force_general=True)
            for alt in dec.alternatives:
                assert alt["x"] >= dec.x_m


def test_tmsvs_params():
    t = TmsvsParams.from_x(1.5)
    assert t.y == pytest.approx(math.sqrt(2.0), abs=1e-15)
    assert t.x == pytest.approx(1.5, abs=1e-15)
    with pytest.raises(DomainError):
        TmsvsParams.from_x(0.3)
    with pytest.raises(DomainError):
        TmsvsParams(-1.0)


def test_product_of_states():
    a, b = solve_eof(SYM), solve_eof(SQT)
    assert eof_of_product(a, b) == a.ef_nats + b.ef_nats
    assert eof_of_product() == 0.0
