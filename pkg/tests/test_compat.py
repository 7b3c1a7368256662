"""Compatibility conditions, diagnostics, and the builtin families."""

import math

import numpy as np
import pytest

from filamentlab.compat import (
    builtin_initial_data,
    check_A,
    check_compat,
    check_D,
    get_family,
    parse_family_spec,
)
from filamentlab.errors import NotUnitField, OrderTooHigh, UnknownFamily
from filamentlab.geometry import Grid, VectorField
from filamentlab.reflect import extend, restrict


class TestFamilies:
    def test_all_families_unit_length(self):
        rng = np.random.default_rng(5)
        s = rng.uniform(-3.0, 3.0, size=50)
        for name in ("straight", "planar_odd", "planar_bad", "helix", "ring"):
            fam = get_family(name)
            v = fam.tangent(s)
            assert np.allclose(np.sum(v * v, axis=1), 1.0, atol=1e-12), name

    def test_symbolic_derivatives_match_finite_difference(self):
        # sympy derivative vs. centered difference of the closed form
        rng = np.random.default_rng(17)
        s = rng.uniform(0.2, 2.0, size=12)
        eps = 1e-5
        for name in ("planar_odd", "planar_bad", "helix", "ring"):
            fam = get_family(name)
            for k in (1, 2, 3):
                num = (fam.derivative(s + eps, k - 1) - fam.derivative(s - eps, k - 1)) / (
                    2.0 * eps
                )
                assert np.allclose(fam.derivative(s, k), num, rtol=1e-5, atol=1e-5), (
                    name,
                    k,
                )

    def test_planar_odd_angle_derivative_at_zero(self):
        # alpha = a s exp(-s^2): alpha'(0) = a, so dv/ds(0) = (a, 0, 0)
        fam = get_family("planar_odd", a=0.7)
        d = fam.derivative(np.array([0.0]), 1)[0]
        assert np.allclose(d, [0.7, 0.0, 0.0], atol=1e-14)

    def test_planar_bad_second_angle_derivative(self):
        # alpha = (a s + s^2) exp(-s^2): alpha''(0) = 2, the planted violation
        fam = get_family("planar_bad", a=0.5)
        d2 = fam.derivative(np.array([0.0]), 2)[0]
        # v'' (0) = (alpha'' cos a - alpha'^2 sin a, 0, ...) with alpha(0)=0
        assert d2[0] == pytest.approx(2.0, abs=1e-12)

    def test_helix_needs_unit_amplitude(self):
        with pytest.raises(ValueError):
            get_family("helix", a=0.5, c=0.5)

    def test_ring_period(self):
        fam = get_family("ring", r=2.5)
        assert fam.period() == pytest.approx(5.0 * np.pi)

    def test_unknown_family(self):
        with pytest.raises(UnknownFamily):
            get_family("trefoil")

    def test_parse_family_spec(self):
        fam = parse_family_spec("planar_odd:a=0.25")
        assert fam.name == "planar_odd"
        assert fam.params["a"] == 0.25
        assert parse_family_spec("straight").name == "straight"
        with pytest.raises(UnknownFamily):
            parse_family_spec("planar_odd:a")

    def test_builtin_initial_data_shape(self):
        g = Grid.half_line(10.0, 33)
        v0 = builtin_initial_data("planar_odd", g, a=0.5)
        assert v0.values.shape == (33, 3)
        assert v0.grid == g

    def test_label_round_trip(self):
        fam = get_family("helix")
        again = parse_family_spec(fam.label())
        assert again.params == fam.params


class TestCheckCompat:
    def test_straight_passes_exactly(self):
        g = Grid.half_line(10.0, 65)
        fam = get_family("straight")
        report = check_compat(fam.sample(g), 2, resampler=fam.sampler())
        assert report.passed
        assert all(r == 0.0 for r in report.a_residuals)
        assert report.norm_residual == 0.0

    def test_constant_tilt_order_zero_residual(self):
        # v0 = (sin 0.1, 0, cos 0.1): |v0(0) - e3| = 2 sin(0.05)
        g = Grid.half_line(10.0, 65)
        th = 0.1
        vals = np.tile([np.sin(th), 0.0, np.cos(th)], (65, 1))
        report = check_compat(VectorField(g, vals), 0)
        assert report.a_residuals[0] == pytest.approx(2.0 * math.sin(0.05), rel=1e-12)
        assert not report.passed
        assert report.failed_orders() == [0]

    def test_planar_odd_passes_to_order_two(self):
        fam = get_family("planar_odd", a=0.5)
        g = Grid.half_line(20.0, 257)
        report = check_compat(fam.sample(g), 2, resampler=fam.sampler())
        assert report.refined
        assert report.passed
        assert report.failed_orders() == []

    def test_planar_bad_fails_order_one(self):
        fam = get_family("planar_bad", a=0.5)
        g = Grid.half_line(20.0, 257)
        report = check_compat(fam.sample(g), 1, resampler=fam.sampler())
        assert not report.passed
        assert 1 in report.failed_orders()
        assert 0 not in report.failed_orders()
        # residual |v0 x v0''|(0) = alpha''(0) = 2 plus the a-term cross part
        assert report.a_residuals[1] > 1.0

    def test_planar_bad_residual_does_not_contract(self):
        fam = get_family("planar_bad", a=0.5)
        g = Grid.half_line(20.0, 257)
        report = check_compat(fam.sample(g), 1, resampler=fam.sampler())
        coarse = report.a_residuals_coarse[1]
        fine = report.a_residuals[1]
        assert fine > 0.8 * coarse  # converging to a nonzero constant

    def test_planar_odd_residual_contracts(self):
        fam = get_family("planar_odd", a=0.5)
        g = Grid.half_line(20.0, 257)
        report = check_compat(fam.sample(g), 2, resampler=fam.sampler())
        for rc, rf in zip(report.a_residuals_coarse[1:], report.a_residuals[1:]):
            assert rf <= 0.35 * rc or rf <= report.tol

    def test_diagnostics_flag_planar_bad(self):
        # |v0| = 1 holds identically, yet v' . v'' (0) = alpha' alpha'' = a * 2
        fam = get_family("planar_bad", a=0.5)
        g = Grid.half_line(20.0, 257)
        report = check_compat(fam.sample(g), 1, resampler=fam.sampler())
        assert report.d_residuals[(1, 2)] == pytest.approx(1.0, rel=0.05)
        assert not report.d_pass[(1, 2)]

    def test_rotation_about_wall_normal_invariance(self):
        # conditions are covariant under rotations fixing e3
        fam = get_family("planar_odd", a=0.5)
        g = Grid.half_line(20.0, 129)
        v0 = fam.sample(g)
        th = 0.8
        rot = np.array(
            [
                [np.cos(th), -np.sin(th), 0.0],
                [np.sin(th), np.cos(th), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        v_rot = VectorField(g, v0.values @ rot.T)
        r0 = check_compat(v0, 2)
        r1 = check_compat(v_rot, 2)
        assert np.allclose(r0.a_residuals, r1.a_residuals, atol=1e-12)

    def test_extension_round_trip_preserves_report(self):
        fam = get_family("planar_odd", a=0.5)
        g = Grid.half_line(20.0, 129)
        v0 = fam.sample(g)
        back = restrict(extend(v0))
        r0 = check_compat(v0, 2)
        r1 = check_compat(back, 2)
        assert r0.a_residuals == r1.a_residuals

    def test_order_too_high(self):
        g = Grid.half_line(10.0, 65)
        with pytest.raises(OrderTooHigh):
            check_compat(get_family("straight").sample(g), 3)

    def test_non_unit_field_rejected(self):
        g = Grid.half_line(10.0, 65)
        vals = np.tile([0.0, 0.0, 1.3], (65, 1))
        with pytest.raises(NotUnitField):
            check_compat(VectorField(g, vals), 1)

    def test_report_dict_round_trips_through_json(self):
        import json

        fam = get_family("planar_odd", a=0.5)
        g = Grid.half_line(20.0, 129)
        report = check_compat(fam.sample(g), 1, resampler=fam.sampler())
        blob = json.dumps(report.to_dict(), sort_keys=True)
        assert json.loads(blob)["passed"] is True


def test_check_A_and_check_D_split_the_report():
    fam = get_family("planar_odd", a=0.5)
    g = Grid.half_line(20.0, 129)
    a = check_A(fam.sample(g), 1, resampler=fam.sampler())
    d = check_D(fam.sample(g), 1, resampler=fam.sampler())
    assert a.a_residuals and not a.d_residuals
    assert d.d_residuals and not d.a_residuals
