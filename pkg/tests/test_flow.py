"""Flow systems, integration, events, and cone-exit detection."""

import numpy as np
import pytest

from ricciflow import (
    ConeClass,
    EventSpec,
    IntegratorConfig,
    NoExitWithinHorizon,
    NonPositiveState,
    aw2_rhs,
    aw3_rhs,
    aw_rhs,
    berger_rhs,
    boundary_event,
    classify_3param,
    cone_exit,
    einstein_points,
    integrate,
    make_system,
    normalized_rhs,
    t_a_closed,
)
from ricciflow.flow import post_exit_verdict, window_event

TIGHT = IntegratorConfig(max_time=1.0)


class TestRightHandSides:
    def test_aw_round(self):
        np.testing.assert_allclose(aw_rhs((1.0, 1.0, 1.0, 1.0), 1.0), [-6, -6, -9, -9])

    def test_aw_slice_ratio(self):
        state = (0.7, 0.9, 1.3, 1.3)
        rhs = aw_rhs(state, 1.0)
        assert rhs[2] / state[2] == rhs[3] / state[3]

    def test_aw3_matches_aw4(self):
        full = aw_rhs((0.8, 0.9, 1.1, 1.1), 1.0)
        reduced = aw3_rhs((0.8, 0.9, 1.1))
        np.testing.assert_allclose(reduced, full[:3], rtol=1e-14)

    def test_aw2_matches_aw4(self):
        full = aw_rhs((0.8, 0.8, 1.1, 1.1), 1.0)
        reduced = aw2_rhs((0.8, 1.1))
        np.testing.assert_allclose(reduced, full[[0, 2]], rtol=1e-14)

    def test_berger_values(self):
        np.testing.assert_allclose(berger_rhs((2.0, 1.0)), [-24.0, -15.0])
        np.testing.assert_allclose(berger_rhs((1.0, 1.0)), [-18.0, -17.5])

    @pytest.mark.parametrize("lam", [0.5, 2.0, 7.0])
    def test_berger_rhs_scale_invariant(self, lam):
        base = berger_rhs((1.7, 0.9))
        np.testing.assert_allclose(berger_rhs((lam * 1.7, lam * 0.9)), base, rtol=1e-13)

    def test_normalized_at_round(self):
        np.testing.assert_allclose(normalized_rhs((1.0, 1.0)), [12.0 / 7.0, -9.0 / 7.0],
                                   rtol=1e-15)

    def test_normalized_einstein_equilibria(self):
        e_plus, e_minus = einstein_points()
        assert np.max(np.abs(normalized_rhs(e_plus))) <= 1e-9
        assert np.max(np.abs(normalized_rhs(e_minus))) <= 1e-9


class TestMakeSystem:
    def test_dimensions(self):
        assert make_system("aw2").dim == 2
        assert make_system("aw3").dim == 3
        assert make_system("aw4", 0.5).dim == 4
        assert make_system("berger").dim == 2
        assert make_system("normalized").dim == 2

    def test_slice_systems_require_xi_one(self):
        make_system("aw3", 1.0)
        with pytest.raises(ValueError):
            make_system("aw3", 0.5)
        with pytest.raises(ValueError):
            make_system("aw2", 0.9)

    def test_rejects_unknown_and_extra_xi(self):
        with pytest.raises(ValueError):
            make_system("aw5")
        with pytest.raises(ValueError):
            make_system("berger", 0.5)


class TestIntegrate:
    def test_round_ratio_derivative(self):
        # d/dl (t/s) at the round two-parameter metric equals 3
        h = 1e-6
        fwd = integrate(make_system("aw2"), (1.0, 1.0), IntegratorConfig(max_time=h)).final_state
        bwd = integrate(make_system("aw2"), (1.0, 1.0),
                        IntegratorConfig(max_time=h, direction="backward")).final_state
        fd = (fwd[0] / fwd[1] - bwd[0] / bwd[1]) / (2.0 * h)
        assert fd == pytest.approx(3.0, rel=1e-6)

    def test_berger_ratio_derivative_along_flow(self):
        from ricciflow import berger_ratio_derivative

        h = 1e-6
        fwd = integrate(make_system("berger"), (2.0, 1.0), IntegratorConfig(max_time=h)).final_state
        bwd = integrate(make_system("berger"), (2.0, 1.0),
                        IntegratorConfig(max_time=h, direction="backward")).final_state
        fd = (fwd[0] / (2 * fwd[1]) - bwd[0] / (2 * bwd[1])) / (2.0 * h)
        assert fd == pytest.approx(berger_ratio_derivative(2.0, 1.0), rel=1e-6)

    def test_monotone_times_positive_states(self):
        traj = integrate(make_system("aw3"), (0.8, 0.9, 1.0), IntegratorConfig(max_time=0.05))
        assert np.all(np.diff(traj.times) > 0)
        assert np.all(traj.states > 0)
        assert traj.status == "horizon"

    def test_backward_times_decrease(self):
        traj = integrate(make_system("aw3"), (0.8, 0.9, 1.0),
                         IntegratorConfig(max_time=0.05, direction="backward"))
        assert np.all(np.diff(traj.times) < 0)

    def test_singular_truncation(self):
        # the round two-parameter metric collapses before l = 0.5
        traj = integrate(make_system("aw2"), (1.0, 1.0), IntegratorConfig(max_time=0.5))
        assert traj.status == "singular"
        assert 0.1 < traj.final_time < 0.15
        assert traj.first_event("singular") is not None
        assert np.all(traj.states > 0)
        # t(l) > s(l) for every sampled l > 0
        after = traj.states[traj.times > 0]
        assert np.all(after[:, 0] > after[:, 1])

    def test_rejects_bad_init(self):
        with pytest.raises(NonPositiveState):
            integrate(make_system("aw2"), (-1.0, 1.0))
        with pytest.raises(ValueError):
            integrate(make_system("aw2"), (1.0, 1.0, 1.0))

    def test_time_reversal(self):
        init = np.array([0.8, 0.9, 1.0])
        cfg = IntegratorConfig(max_time=0.05)
        fwd = integrate(make_system("aw3"), init, cfg).final_state
        back = integrate(make_system("aw3"), fwd,
                         IntegratorConfig(max_time=0.05, direction="backward")).final_state
        np.testing.assert_allclose(back, init, rtol=1e-8)

    def test_custom_event_recorded(self):
        crossed = EventSpec("t_below_08", lambda _l, y: y[0] - 0.8, terminal=False)
        traj = integrate(make_system("aw2"), (0.9, 1.0), IntegratorConfig(max_time=0.05),
                         [crossed])
        ev = traj.first_event("t_below_08")
        assert ev is not None
        assert 0.0 < ev.time < 0.05
        assert ev.state[0] == pytest.approx(0.8, abs=1e-9)


class TestSubfamilyInvariance:
    def test_slice_preserved(self):
        traj = integrate(make_system("aw4", 1.0), (4.0, 4.4, 4.0, 4.0),
                         IntegratorConfig(max_time=0.5))
        assert traj.status == "horizon"
        dev = np.max(np.abs(traj.states[:, 2] - traj.states[:, 3])
                     / np.maximum(traj.states[:, 2], traj.states[:, 3]))
        assert dev <= 1e-9

    def test_two_param_preserved(self):
        traj = integrate(make_system("aw4", 1.0), (4.0, 4.0, 5.0, 5.0),
                         IntegratorConfig(max_time=0.5))
        assert traj.status == "horizon"
        for a, b in ((0, 1), (2, 3)):
            dev = np.max(np.abs(traj.states[:, a] - traj.states[:, b])
                         / np.maximum(traj.states[:, a], traj.states[:, b]))
            assert dev <= 1e-9

    def test_slice_broken_at_other_xi(self):
        # at xi != 1 the s1 = s2 slice is not flow-invariant
        traj = integrate(make_system("aw4", 0.5), (0.8, 0.9, 1.0, 1.0),
                         IntegratorConfig(max_time=0.05))
        assert np.max(np.abs(traj.states[:, 2] - traj.states[:, 3])) > 1e-6


class TestVolumeNormalization:
    def test_rescaled_aw3_has_unit_volume(self):
        traj = integrate(make_system("aw3"), (0.8, 0.9, 1.0), IntegratorConfig(max_time=0.1))
        t, x, s = traj.states[:, 0], traj.states[:, 1], traj.states[:, 2]
        factor = (t * x * x * s**4) ** (-1.0 / 7.0)
        tn, xn, sn = t * factor, x * factor, s * factor
        assert np.max(np.abs(tn * xn * xn * sn**4 - 1.0)) <= 1e-9

    def test_rescaled_tangent_aligns_with_normalized_rhs(self):
        traj = integrate(make_system("aw3"), (0.8, 0.9, 1.0), IntegratorConfig(max_time=0.1))
        worst = 1.0
        for state in traj.states[::4]:
            t, x, s = state
            vol = t * x * x * s**4
            factor = vol ** (-1.0 / 7.0)
            tp, xp, sp = aw3_rhs(state)
            vol_p = tp * x * x * s**4 + 2 * t * x * xp * s**4 + 4 * t * x * x * s**3 * sp
            factor_p = -(1.0 / 7.0) * vol ** (-8.0 / 7.0) * vol_p
            tangent = np.array([xp * factor + x * factor_p, sp * factor + s * factor_p])
            nrhs = normalized_rhs((x * factor, s * factor))
            cosine = float(tangent @ nrhs / (np.linalg.norm(tangent) * np.linalg.norm(nrhs)))
            worst = min(worst, cosine)
        assert worst >= 1.0 - 1e-6


class TestEvents:
    def test_aw3_cone_event(self):
        init = (t_a_closed(0.9, 1.0) - 1e-4, 0.9, 1.0)
        traj = integrate(make_system("aw3"), init, TIGHT,
                         [boundary_event("aw3"), window_event(3)])
        hit = traj.first_event("cone_exit")
        assert hit is not None and hit.time > 0.0
        verdict = post_exit_verdict("aw3", hit.state)
        assert verdict.classification is ConeClass.HAS_NONPOSITIVE_PLANE

    def test_berger_cone_event(self):
        traj = integrate(make_system("berger"), (2.0 - 1e-3, 1.0), TIGHT,
                         [boundary_event("berger")])
        hit = traj.first_event("cone_exit")
        assert hit is not None and hit.time > 0.0

    def test_event_state_on_boundary(self):
        init = (t_a_closed(0.9, 1.0) - 1e-4, 0.9, 1.0)
        traj = integrate(make_system("aw3"), init, TIGHT, [boundary_event("aw3")])
        t, x, s = traj.first_event("cone_exit").state
        assert t == pytest.approx(x * (4.0 * s - x) / (3.0 * s), abs=1e-9)


class TestConeExit:
    def test_aw2_from_four_tuple(self):
        exit_time, state = cone_exit("aw2", (0.99, 0.99, 1.0, 1.0), TIGHT)
        assert 0.0 < exit_time < 0.01
        assert state[0] == pytest.approx(state[1], abs=1e-9)
        after = post_exit_verdict("aw2", state)
        assert after.classification is ConeClass.HAS_NONPOSITIVE_PLANE

    def test_aw3(self):
        init = (t_a_closed(0.9, 1.0) - 1e-3, 0.9, 1.0)
        exit_time, state = cone_exit("aw3", init, TIGHT)
        assert exit_time == pytest.approx(0.00182996, abs=1e-6)
        # the returned state sits on the boundary; just beyond it the metric
        # has non-positively curved planes
        after = post_exit_verdict("aw3", state)
        assert after.classification is ConeClass.HAS_NONPOSITIVE_PLANE
        assert abs(classify_3param(*state).margin) < 1e-9

    @pytest.mark.parametrize("xi", [0.9, 0.95])
    def test_aw3_nearby_xi(self, xi):
        from ricciflow import t_a
        init = (t_a((0.9, 1.0, 1.0), xi) - 1e-3, 0.9, 1.0)
        exit_time, state = cone_exit("aw3", init, TIGHT, xi=xi)
        assert 0.0 < exit_time < 0.01
        assert state.shape == (4,)
        # slice spread grows with l but stays small at exit
        assert 0.0 < abs(state[2] - state[3]) < 1e-3

    def test_berger(self):
        exit_time, _state = cone_exit("berger", (1.99, 1.0), TIGHT)
        assert exit_time == pytest.approx(0.0016487, abs=1e-6)

    def test_rejects_outside_cone(self):
        with pytest.raises(ValueError):
            cone_exit("aw2", (1.5, 1.0), TIGHT)

    def test_rejects_mismatched_four_tuple(self):
        with pytest.raises(ValueError):
            cone_exit("aw2", (0.9, 0.8, 1.0, 1.0), TIGHT)

    def test_no_exit_within_horizon(self):
        with pytest.raises(NoExitWithinHorizon):
            cone_exit("aw2", (0.5, 1.0), IntegratorConfig(max_time=1e-4))

    def test_window_exit_reported_first(self):
        # from (0.2, 0.99, 1) the ratio x/s crosses 1 before the boundary
        with pytest.raises(NoExitWithinHorizon, match="certified window"):
            cone_exit("aw3", (0.2, 0.99, 1.0), IntegratorConfig(max_time=2.0))


class TestBackwardPersistence:
    def test_positively_curved_before_boundary_start(self):
        # start on the boundary, step back a hair, then detect how far the
        # backward flow stays positively curved
        system = make_system("aw3")
        start = integrate(system, (t_a_closed(0.9, 1.0), 0.9, 1.0),
                          IntegratorConfig(max_time=1e-6, direction="backward")).final_state
        reentry = EventSpec(
            "reentry", lambda _l, y: y[1] * (4.0 * y[2] - y[1]) / (3.0 * y[2]) - y[0])
        traj = integrate(system, start,
                         IntegratorConfig(max_time=0.5, direction="backward"), [reentry])
        hit = traj.first_event("reentry")
        assert hit is not None
        lbar = -hit.time
        assert 0.1 < lbar < 0.2
        inside = [state for time, state in zip(traj.times, traj.states)
                  if hit.time * 0.95 < time < -1e-5]
        assert inside
        for state in inside:
            assert classify_3param(*state).classification is ConeClass.POSITIVELY_CURVED
