import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussian_eof import StandardFormParams, reduce_to_standard_form, symplectic_spectrum, validate_physical
from gaussian_eof.errors import NonPositiveScaling, NonSymmetric, Unphysical
from gaussian_eof.gaussian_core import (
    Separability,
    ScalingFactors,
    build_scaled_cm,
    canonical_standard_form,
    classicality_margin,
    classicality_minors,
    classify_separability,
    local_symplectic,
    ppt_spectrum,
    simon_discriminant,
)

from helpers import cm, entangled_states, ppt_kappa_minus, symplectic_eigs, tmsvs

SYM = StandardFormParams(1.0, 1.0, 0.8, -0.6)
SQT = StandardFormParams(1.2, 1.0, 0.8, -0.8)

# 40-digit eigenvalues of i Omega V (tests/_derive_values.py)
SYM_NU = (0.565685424949238019520675489684, 0.848528137423857029281013234526)
SYM_KAPPA = 0.282842712474619009760337744842
SQT_KAPPA = 0.29377422517014503476333867697


def physical_params():
    """(b1, b2, c, |d|, u1, u2) drawn so that most draws are physical."""
    return st.tuples(
        st.floats(0.6, 3.0),
        st.floats(0.6, 3.0),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.0),
        st.floats(0.3, 3.0),
        st.floats(0.3, 3.0),
    ).map(lambda t: (t[0], t[1], t[2] * math.sqrt(t[0] * t[1]) * 0.95, t[3], t[4], t[5]))


def _expected(sf):
    # det C within tolerance of 0 is reported as d = 0
    if abs(sf.c * sf.d) <= 1e-10 * max(1.0, sf.b1 * sf.b2):
        return (sf.b1, sf.b2, sf.c, 0.0)
    return sf.as_tuple()


def _physical(b1, b2, c, frac):
    sf = StandardFormParams(b1, b2, c, -frac * c)
    V = build_scaled_cm(sf)
    if np.linalg.eigvalsh(V)[0] <= 1e-3 or symplectic_eigs(V)[0] < 0.5 + 1e-6:
        return None
    return sf


class TestSpectrum:
    def test_vacuum(self):
        verdict = validate_physical(0.5 * np.eye(4))
        assert verdict.nu_minus == pytest.approx(0.5, abs=1e-15)
        assert verdict.nu_plus == pytest.approx(0.5, abs=1e-15)
        assert verdict.rs_det == pytest.approx(0.0, abs=1e-15)

    def test_symmetric_example(self):
        nu = symplectic_spectrum(build_scaled_cm(SYM))
        assert nu == pytest.approx(SYM_NU, abs=1e-14)

    def test_pure_state_spectrum(self):
        assert symplectic_spectrum(build_scaled_cm(tmsvs(1.5))) == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_unphysical_example(self):
        with pytest.raises(Unphysical) as info:
            validate_physical(cm(1.0, 1.0, 1.2, -0.9))
        assert info.value.margin < 0.0

    def test_below_half_is_unphysical(self):
        # positive definite, but nu_- = 0.3
        with pytest.raises(Unphysical) as info:
            validate_physical(0.3 * np.eye(4))
        assert info.value.margin == pytest.approx(-0.2)

    def test_non_symmetric(self):
        V = build_scaled_cm(SYM)
        V[0, 1] += 1e-6
        with pytest.raises(NonSymmetric):
            validate_physical(V)

    def test_matches_eigendecomposition(self):
        for sf in entangled_states(50, 3):
            V = build_scaled_cm(sf, (1.7, 0.6))
            assert symplectic_spectrum(V) == pytest.approx(symplectic_eigs(V), rel=1e-10)


class TestPPT:
    def test_symmetric_example(self):
        assert ppt_spectrum(build_scaled_cm(SYM))[0] == pytest.approx(SYM_KAPPA, abs=1e-14)
        # symmetric closed form sqrt((b - c)(b - |d|))
        assert SYM_KAPPA == pytest.approx(math.sqrt(0.2 * 0.4), abs=1e-15)

    def test_squeezed_thermal_example(self):
        assert ppt_spectrum(build_scaled_cm(SQT))[0] == pytest.approx(SQT_KAPPA, abs=1e-14)
        assert SQT_KAPPA == pytest.approx(0.5 * (2.2 - math.sqrt(0.04 + 2.56)), abs=1e-15)

    def test_product_state(self):
        assert ppt_spectrum(cm(0.7, 0.9, 0.0, 0.0)) == pytest.approx((0.7, 0.9), abs=1e-15)


class TestSimon:
    def test_symmetric_example(self):
        assert simon_discriminant(SYM) == pytest.approx(-0.4471, abs=1e-15)
        assert SYM.det_v == pytest.approx(0.2304, abs=1e-15)

    def test_boundary_example(self):
        assert simon_discriminant(StandardFormParams(1.0, 1.0, 0.5, -0.5)) == pytest.approx(0.0, abs=1e-15)

    def test_product_state_reduces_to_rs_det(self):
        sf = StandardFormParams(0.7, 0.9, 0.0, 0.0)
        assert simon_discriminant(sf) == sf.rs_det
        assert sf.rs_det > 0.0

    @pytest.mark.parametrize(
        "sf, verdict",
        [
            (SYM, Separability.ENTANGLED),
            (StandardFormParams(1.0, 1.0, 0.5, -0.5), Separability.BOUNDARY),
            (StandardFormParams(0.7, 0.9, 0.0, 0.0), Separability.SEPARABLE),
        ],
    )
    def test_classify(self, sf, verdict):
        assert classify_separability(build_scaled_cm(sf)).verdict is verdict

    def test_simon_sign_matches_ppt_eigenvalue(self):
        rng = np.random.default_rng(5)
        checked = 0
        while checked < 1000:
            b1, b2 = rng.uniform(0.6, 3.0, size=2)
            c = rng.uniform(0.0, math.sqrt(b1 * b2))
            sf = _physical(b1, b2, c, rng.random())
            if sf is None or abs(sf.simon) < 1e-9:
                continue
            checked += 1
            assert (sf.simon < 0.0) == (ppt_kappa_minus(build_scaled_cm(sf)) < 0.5)

    def test_same_sign_correlations_are_separable(self):
        rng = np.random.default_rng(6)
        seen = 0
        while seen < 300:
            b1, b2 = rng.uniform(0.6, 3.0, size=2)
            c = rng.uniform(0.0, math.sqrt(b1 * b2))
            sf = _physical(b1, b2, c, rng.random())
            if sf is None:
                continue
            flipped = StandardFormParams(sf.b1, sf.b2, sf.c, -sf.d)
            if symplectic_eigs(build_scaled_cm(flipped))[0] < 0.5 + 1e-9:
                continue
            seen += 1
            assert classify_separability(build_scaled_cm(flipped)).verdict is not Separability.ENTANGLED


class TestClassicality:
    def test_vacuum(self):
        assert classicality_margin(0.5 * np.eye(4)) == pytest.approx(0.0, abs=1e-15)

    def test_symmetric_example(self):
        assert classicality_margin(build_scaled_cm(SYM)) == pytest.approx(-0.3, abs=1e-14)

    def test_thermal(self):
        assert classicality_margin(cm(1.0, 1.0, 0.0, 0.0)) == pytest.approx(0.5, abs=1e-15)

    def test_minors(self):
        assert classicality_minors(cm(1.0, 1.0, 0.0, 0.0)) == pytest.approx([0.5, 0.25, 0.125, 0.0625])

    def test_classical_states_are_separable(self):
        rng = np.random.default_rng(8)
        for _ in range(500):
            b1, b2 = rng.uniform(0.6, 3.0, size=2)
            c = rng.uniform(0.0, math.sqrt(b1 * b2))
            sf = _physical(b1, b2, c, rng.random())
            if sf is None:
                continue
            V = build_scaled_cm(sf, tuple(rng.uniform(0.5, 2.0, size=2)))
            if classicality_margin(V) >= 0.0:
                assert sf.simon >= -1e-12


class TestReduction:
    def test_fixed_point(self):
        assert reduce_to_standard_form(build_scaled_cm(SQT)).as_tuple() == pytest.approx(SQT.as_tuple(), abs=1e-14)

    def test_scaled_form(self):
        sf = reduce_to_standard_form(build_scaled_cm(SYM, (2.0, 1.0)))
        assert sf.as_tuple() == pytest.approx(SYM.as_tuple(), abs=1e-12)

    def test_phase_rotation(self):
        S = local_symplectic(theta1=math.pi / 3)
        sf = reduce_to_standard_form(S @ build_scaled_cm(SYM) @ S.T)
        assert sf.as_tuple() == pytest.approx(SYM.as_tuple(), abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(physical_params(), st.tuples(st.floats(0, 2 * math.pi), st.floats(-1, 1), st.floats(0, 2 * math.pi), st.floats(-1, 1)))
    def test_local_symplectic_invariance(self, params, moves):
        b1, b2, c, frac, u1, u2 = params
        sf = _physical(b1, b2, c, frac)
        if sf is None:
            return
        S = local_symplectic(*moves)
        V = S @ build_scaled_cm(sf, (u1, u2)) @ S.T
        moved = canonical_standard_form(*reduce_to_standard_form(V).as_tuple())
        assert moved.as_tuple() == pytest.approx(_expected(sf), abs=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(physical_params())
    def test_round_trip(self, params):
        b1, b2, c, frac, u1, u2 = params
        sf = _physical(b1, b2, c, frac)
        if sf is None:
            return
        back = reduce_to_standard_form(build_scaled_cm(sf, (u1, u2)))
        assert back.as_tuple() == pytest.approx(_expected(sf), abs=1e-10)

    def test_canonical_form(self):
        assert canonical_standard_form(1.0, 1.0, -0.3, 0.8).as_tuple() == (1.0, 1.0, 0.8, -0.3)
        assert canonical_standard_form(1.0, 1.0, -0.8, 0.3).as_tuple() == (1.0, 1.0, 0.8, -0.3)
        assert canonical_standard_form(1.0, 1.0, 0.8, -0.3).as_tuple() == (1.0, 1.0, 0.8, -0.3)


class TestScaledForm:
    def test_unit_scaling(self):
        V = build_scaled_cm(SYM)
        assert V[0, 0] == V[1, 1] == V[2, 2] == V[3, 3] == 1.0
        assert V[0, 2] == V[2, 0] == 0.8
        assert V[1, 3] == V[3, 1] == -0.6

    def test_scaling_entries(self):
        V = build_scaled_cm(SYM, (2.0, 1.0))
        assert V[0, 0] == 2.0
        assert V[1, 1] == 0.5
        assert V[0, 2] == pytest.approx(0.8 * math.sqrt(2.0), abs=1e-15)

    @pytest.mark.parametrize("u", [(0.0, 1.0), (1.0, -2.0), (math.inf, 1.0), (math.nan, 1.0)])
    def test_rejects_bad_scaling(self, u):
        with pytest.raises(NonPositiveScaling):
            ScalingFactors(*u)
