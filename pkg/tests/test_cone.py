"""Positivity cone: sigma, the A~ system, t_A paths, and the classifiers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ricciflow import (
    ConeClass,
    ConeVerdict,
    DomainError,
    STriple,
    SingularMatrixError,
    a_tilde,
    a_tilde_inverse_slice,
    classify_2param,
    classify_3param,
    classify_aw_slice,
    classify_berger,
    normalized_region,
    sigma,
    t_a,
    t_a_closed,
    v_vector,
)
from ricciflow.cone import a_tilde_partial, v_partial

triple = st.tuples(*[st.floats(min_value=0.3, max_value=2.0)] * 3)


def cofactor_inverse(m):
    """Independent 3x3 inverse by cofactor expansion (test oracle)."""
    det = np.linalg.det(m)
    cof = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
            cof[i, j] = (-1) ** (i + j) * (minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0])
    return cof.T / det


class TestSigma:
    @pytest.mark.parametrize("s,value", [
        ((1, 1, 1), 3.0),
        ((1, 1, 3), 3.0),
        ((1, 1, 4), 0.0),   # boundary of the sigma-positive region
        ((1, 1, 5), -5.0),
    ])
    def test_values(self, s, value):
        assert sigma(s) == value

    def test_symmetric(self):
        # symmetric polynomial; evaluation order differs by at most an ulp
        assert sigma((0.7, 1.1, 1.9)) == pytest.approx(sigma((1.9, 0.7, 1.1)), rel=1e-15)

    def test_membership_flags(self):
        assert STriple(1, 1, 3).in_omega_sigma
        assert STriple(1, 1, 3).in_d_sigma
        assert not STriple(1, 1, 4).in_omega_sigma  # sigma = 0 is excluded
        assert not STriple(1, 1, 5).in_omega_sigma
        assert STriple(1, 1, 1).in_omega_sigma
        assert not STriple(1, 1, 1).in_d_sigma  # round diagonal excluded

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            sigma((1.0, 0.0, 1.0))


class TestATilde:
    def test_round_point(self):
        with pytest.warns(RuntimeWarning):  # round diagonal is outside D_sigma
            m = a_tilde((1.0, 1.0, 1.0))
        np.testing.assert_allclose(np.diag(m), [4.0, 4.0, 4.0])
        off = m[~np.eye(3, dtype=bool)]
        np.testing.assert_allclose(off, -2.0)

    def test_slice_first_row(self):
        x = 0.7
        m = a_tilde((x, 1.0, 1.0))
        np.testing.assert_allclose(m[0], [4.0 / x, x - 3.0, x - 3.0], rtol=1e-15)
        np.testing.assert_allclose(m[1], [x - 3.0, 4.0, -2.0], rtol=1e-15)

    def test_symmetric_and_degree_minus_one(self):
        s = np.array([0.9, 1.1, 1.3])
        m = a_tilde(s)
        np.testing.assert_allclose(m, m.T, rtol=0, atol=0)
        np.testing.assert_allclose(a_tilde(2.0 * s), m / 2.0, rtol=1e-14)

    def test_warns_outside_d_sigma(self):
        with pytest.warns(RuntimeWarning):
            a_tilde((1.0, 1.0, 5.0))
        with pytest.warns(RuntimeWarning):
            a_tilde((1.0, 1.0, 1.0))


class TestATildePartial:
    def test_finite_difference_oracle(self):
        s = np.array([0.9, 1.1, 1.3])
        h = 1e-6
        for i in range(3):
            sp, sm = s.copy(), s.copy()
            sp[i] += h
            sm[i] -= h
            fd = (a_tilde(sp) - a_tilde(sm)) / (2.0 * h)
            np.testing.assert_allclose(a_tilde_partial(s, i), fd, rtol=1e-6, atol=1e-8)

    @pytest.mark.parametrize("x", [0.5, 0.9])
    def test_slice_closed_forms(self, x):
        # derivatives of A~ at (x, 1, 1) in closed form
        d0 = np.array([[-4.0 / x**2, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        d1 = np.array([
            [0.0, (-x * x + x + 1) / x, -((x - 1) ** 2) / x],
            [(-x * x + x + 1) / x, -4.0, 1.0],
            [-((x - 1) ** 2) / x, 1.0, 0.0],
        ])
        d2 = np.array([
            [0.0, -((x - 1) ** 2) / x, (-x * x + x + 1) / x],
            [-((x - 1) ** 2) / x, 0.0, 1.0],
            [(-x * x + x + 1) / x, 1.0, -4.0],
        ])
        s = (x, 1.0, 1.0)
        np.testing.assert_allclose(a_tilde_partial(s, 0), d0, rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(a_tilde_partial(s, 1), d1, rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(a_tilde_partial(s, 2), d2, rtol=1e-13, atol=1e-14)


class TestVVector:
    def test_xi_one_slice(self):
        x = 0.7
        v = v_vector((x, 1.0, 1.0), 1.0)
        np.testing.assert_allclose(
            v, [-2.0 / (x * math.sqrt(6)), 1.0 / math.sqrt(6), 1.0 / math.sqrt(6)],
            rtol=1e-15)

    def test_xi_one_half(self):
        v = v_vector((1.0, 1.0, 1.0), 0.5)
        root = math.sqrt(3.5)
        np.testing.assert_allclose(v, [-1.5 / root, 0.5 / root, 1.0 / root], rtol=1e-15)

    def test_partial_oracle(self):
        s = np.array([0.8, 1.2, 1.5])
        h = 1e-7
        for i in range(3):
            sp, sm = s.copy(), s.copy()
            sp[i] += h
            sm[i] -= h
            fd = (v_vector(sp, 0.7) - v_vector(sm, 0.7)) / (2.0 * h)
            np.testing.assert_allclose(v_partial(s, 0.7, i), fd, rtol=1e-6, atol=1e-10)


class TestTA:
    def test_slice_closed_form(self):
        for x in (0.1, 0.5, 0.9, 1.5, 3.0):
            expected = x * (4.0 - x) / 3.0
            assert t_a((x, 1.0, 1.0), 1.0) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("xi", [1.0, 0.5, 0.25])
    def test_round_diagonal_is_zero(self, xi):
        assert t_a((1.0, 1.0, 1.0), xi) == 0.0
        assert t_a((2.5, 2.5, 2.5), xi) == 0.0

    def test_cofactor_oracle(self):
        s = (0.9, 1.1, 1.3)
        a = a_tilde(s)
        v = v_vector(s, 2.0 / 3.0)
        oracle = (2.0 / 9.0) / (v @ cofactor_inverse(a) @ v)
        assert t_a(s, 2.0 / 3.0) == pytest.approx(oracle, rel=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(s=triple, xi=st.floats(min_value=0.1, max_value=1.0))
    def test_scale_equivariance(self, s, xi):
        arr = np.asarray(s)
        if sigma(arr) <= 0.05 or np.max(np.abs(arr - arr.mean())) < 1e-3:
            return
        base = t_a(arr, xi)
        for lam in (0.5, 2.0, 10.0):
            assert t_a(lam * arr, xi) == pytest.approx(lam * base, rel=1e-12)

    def test_singular_raises(self):
        # just off the numerical round diagonal: condition > 1e12
        with pytest.raises(SingularMatrixError):
            t_a((1.0, 1.0, 1.0 + 1e-12), 1.0)


class TestTAClosed:
    def test_value(self):
        assert t_a_closed(0.9, 1.0) == pytest.approx(0.93, rel=1e-15)

    def test_scaling_identity(self):
        for x, s in ((0.5, 1.3), (2.0, 0.7), (1.4, 1.2)):
            assert t_a_closed(x / s, 1.0) == pytest.approx(t_a_closed(x, s) / s, rel=1e-13)

    def test_agrees_with_general_path(self):
        for s in (0.7, 1.0, 1.6):
            for u in (0.1, 0.35, 0.6, 0.85, 1.2, 2.0, 3.5):
                x = u * s
                if abs(x - s) < 1e-9 or x >= 4.0 * s:
                    continue
                assert t_a((x, s, s), 1.0) == pytest.approx(t_a_closed(x, s), rel=1e-12)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            t_a_closed(4.0, 1.0)
        with pytest.raises(DomainError):
            t_a_closed(-0.1, 1.0)


class TestInverseSlice:
    def test_product_identity_on_grid(self):
        # both sides of x = s, staying 0.05 away from x = s and x = 4s
        s = 1.0
        xs = np.concatenate([np.arange(0.2, 0.951, 0.05), np.arange(1.05, 3.951, 0.05)])
        for x in xs:
            prod = a_tilde((float(x), s, s)) @ a_tilde_inverse_slice(float(x), s)
            np.testing.assert_allclose(prod, np.eye(3), atol=1e-10)

    def test_matches_displayed_vector(self):
        x = 0.6
        inv_v = a_tilde_inverse_slice(x, 1.0) @ v_vector((x, 1.0, 1.0), 1.0)
        pref = 1.0 / (math.sqrt(6) * (1.0 - x) * (4.0 - x))
        np.testing.assert_allclose(inv_v, pref * np.array([x - 2.0, -1.0, -1.0]), rtol=1e-12)

    def test_entry_value(self):
        # prefactor at (0.5, 1) is 8/7, top-left entry s^3 x * 8/7 = 4/7
        assert a_tilde_inverse_slice(0.5, 1.0)[0, 0] == pytest.approx(4.0 / 7.0, rel=1e-15)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            a_tilde_inverse_slice(1.0, 1.0)
        with pytest.raises(DomainError):
            a_tilde_inverse_slice(4.0, 1.0)


class TestClassifiers:
    def test_two_param(self):
        v = classify_2param(0.9, 1.0)
        assert v.classification is ConeClass.POSITIVELY_CURVED
        assert v.margin == pytest.approx(0.1)
        assert classify_2param(1.0, 1.0).classification is ConeClass.HAS_NONPOSITIVE_PLANE
        assert classify_2param(1.0, 1.0).margin == 0.0
        assert classify_2param(2.0, 1.0).classification is ConeClass.HAS_NONPOSITIVE_PLANE

    def test_three_param(self):
        v = classify_3param(0.9, 0.9, 1.0)
        assert v.classification is ConeClass.POSITIVELY_CURVED
        assert v.margin == pytest.approx(0.03)
        assert classify_3param(0.93, 0.9, 1.0).classification is ConeClass.HAS_NONPOSITIVE_PLANE
        assert classify_3param(0.5, 1.2, 1.0).classification is ConeClass.UNKNOWN
        assert classify_3param(0.5, 1.2, 1.0).margin == 0.0

    @settings(max_examples=50, deadline=None)
    @given(t=st.floats(min_value=0.1, max_value=3.0),
           x=st.floats(min_value=0.1, max_value=3.0),
           s=st.floats(min_value=0.1, max_value=3.0),
           lam=st.floats(min_value=0.1, max_value=10.0))
    def test_three_param_scale_invariance(self, t, x, s, lam):
        a = classify_3param(t, x, s).classification
        b = classify_3param(lam * t, lam * x, lam * s).classification
        assert a is b

    @pytest.mark.parametrize("u", [0.1, 0.4, 0.7, 0.95])
    def test_two_vs_three_param_consistency(self, u):
        # for t/s in (0, 1) both classifiers certify positive curvature
        t, s = u * 1.3, 1.3
        assert classify_2param(t, s).classification is ConeClass.POSITIVELY_CURVED
        assert classify_3param(t, t, s).classification is ConeClass.POSITIVELY_CURVED

    def test_berger(self):
        assert classify_berger((1.9, 1.0)).classification is ConeClass.POSITIVELY_CURVED
        boundary = classify_berger((2.0, 1.0))
        assert boundary.classification is ConeClass.HAS_NONPOSITIVE_PLANE
        assert boundary.margin == 0.0
        assert classify_berger((4.0, 1.0)).classification is ConeClass.HAS_NONPOSITIVE_PLANE

    def test_verdict_invariants(self):
        with pytest.raises(ValueError):
            ConeVerdict(ConeClass.POSITIVELY_CURVED, -0.5)
        with pytest.raises(ValueError):
            ConeVerdict(ConeClass.HAS_NONPOSITIVE_PLANE, 0.5)
        with pytest.raises(ValueError):
            ConeVerdict(ConeClass.UNKNOWN, 1.0)

    def test_near_slice_classifier(self):
        on = classify_aw_slice((0.9, 0.9, 1.0, 1.0), 1.0)
        assert on.classification is classify_3param(0.9, 0.9, 1.0).classification
        near = classify_aw_slice((0.9, 0.9, 1.001, 0.999), 0.9)
        assert near.classification is ConeClass.POSITIVELY_CURVED
        off = classify_aw_slice((0.9, 0.9, 1.2, 0.8), 0.9)
        assert off.classification is ConeClass.UNKNOWN
        wide = classify_aw_slice((0.2, 1.5, 1.0, 1.0), 1.0)
        assert wide.classification is ConeClass.UNKNOWN


class TestNormalizedRegion:
    def test_examples(self):
        assert normalized_region(1.0, 1.2) == "G"
        assert normalized_region(1.0, 1.0) == "P"  # tie 4 - 1 = 3 goes to P
        assert normalized_region(1.3, 1.0) == "W"

    @settings(max_examples=100, deadline=None)
    @given(x=st.floats(min_value=0.1, max_value=3.0),
           s=st.floats(min_value=0.1, max_value=3.0))
    def test_partition(self, x, s):
        region = normalized_region(x, s)
        q = 4.0 * x**3 * s**4 - x**4 * s**3
        expected = "P" if 3.0 >= q else ("G" if x < s else "W")
        assert region == expected
