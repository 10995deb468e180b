import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from expbrush.address import ExternalAddress, ZERO_ADDRESS, address
from expbrush.brush import (
    EscapeState,
    ModelPoint,
    NotInJulia,
    PreconditionError,
    SubBrush,
    certify_escape,
    check_forward_stretch,
    classify_point,
    in_julia,
    in_julia_by_tip,
    orbit_lower_bounds,
    step,
    tip,
    tip_by_bisection,
    tips_by_depth,
)
from expbrush.tower import OrbitLeftDomain, f_iter, tower_cmp

TIP_1 = 1.9855683087099188711  # ln(1 + 2 pi)
TIP_11 = 2.2266489170202265534  # ln(1 + 2 pi + ln(1 + 2 pi))
STEP_2_1 = 0.10587079175106375  # e^2 - 1 - 2 pi

small_entries = st.integers(-3, 3)
addresses = st.builds(
    ExternalAddress,
    st.lists(small_entries, min_size=1, max_size=8).map(tuple),
    st.one_of(st.just(()), st.lists(small_entries, min_size=1, max_size=3).map(tuple)),
)


class TestStep:
    def test_strip(self):
        y = step(ModelPoint(2.0, address("1")))
        assert y.potential.value() == pytest.approx(STEP_2_1, rel=1e-12)
        assert y.potential.value() <= STEP_2_1
        assert y.s == ZERO_ADDRESS

    def test_fixed_point(self):
        y = step(ModelPoint(0.0))
        assert y.potential.value() == 0.0

    def test_leaves_domain(self):
        with pytest.raises(OrbitLeftDomain):
            step(ModelPoint(0.5, address("1")))

    def test_negative_potential_rejected(self):
        with pytest.raises(ValueError):
            ModelPoint(-0.1)


class TestOrbitBounds:
    def test_zero_orbit(self):
        assert all(b.value() == 0.0 for b in orbit_lower_bounds(ModelPoint(0.0), 10))

    def test_one_on_zero_hair(self):
        bounds = orbit_lower_bounds(ModelPoint(1.0), 3)
        for i, b in enumerate(bounds):
            assert tower_cmp(b, f_iter(i, 1.0)) == 0
        assert bounds[2].value() == pytest.approx(math.expm1(math.expm1(1.0)), rel=1e-14)

    def test_failure_reports_step(self):
        with pytest.raises(OrbitLeftDomain) as err:
            orbit_lower_bounds(ModelPoint(1.9, address("1,1")), 2)
        assert err.value.step == 1

    def test_bounds_below_exact_orbit(self):
        s = address("1,-2,1")
        t = 2.5
        bounds = orbit_lower_bounds(ModelPoint(t, s), 3)
        with mpmath.workdps(60):
            x = mpmath.mpf(t)
            for i in range(3):
                assert mpmath.mpf(bounds[i].value()) <= x
                x = mpmath.expm1(x) - 2 * mpmath.pi * abs(s.entry(i))


class TestTip:
    def test_values(self):
        assert tip(ZERO_ADDRESS, 10) == 0.0
        assert tip(address("1"), 5) == pytest.approx(TIP_1, rel=1e-15)
        assert tip(address("1,1"), 5) == pytest.approx(TIP_11, rel=1e-15)

    def test_bisection_oracle(self):
        for s in ("1", "1,1", "-2,3", "0,0|1,-1"):
            a = address(s)
            assert tip(a, 32) == pytest.approx(tip_by_bisection(a, 32), abs=1e-9)

    @given(addresses, st.integers(1, 30))
    def test_monotone_in_depth(self, s, n):
        assert tip(s, n) <= tip(s, n + 1)

    @given(st.lists(small_entries, min_size=1, max_size=8), st.data())
    def test_monotone_in_entries(self, prefix, data):
        i = data.draw(st.integers(0, len(prefix) - 1))
        bigger = list(prefix)
        bigger[i] = (abs(bigger[i]) + data.draw(st.integers(1, 3))) * (1 if bigger[i] >= 0 else -1)
        n = len(prefix) + 2
        assert tip(ExternalAddress(tuple(prefix)), n) <= tip(ExternalAddress(tuple(bigger)), n)

    def test_tips_by_depth_stabilize(self):
        tips = tips_by_depth(address("0,0|1,-1"), [8, 16, 32, 64])
        assert abs(tips[64] - tips[32]) < 1e-12

    def test_in_julia_examples(self):
        assert in_julia(ModelPoint(0.0), 5)
        assert not in_julia(ModelPoint(1.98, address("1")), 5)
        assert in_julia(ModelPoint(2.0, address("1")), 5)

    @given(addresses, st.floats(0, 5), st.integers(1, 8))
    def test_two_membership_routes_agree(self, s, t, n):
        x = ModelPoint(t, s)
        # the tower route rounds down, so it can only be more cautious
        if in_julia(x, n):
            assert in_julia_by_tip(x, n)
        elif in_julia_by_tip(x, n):
            assert t - tip(s, n) < 1e-9


class TestEscape:
    def test_zero_hair_one_passes(self):
        cert = certify_escape(ModelPoint(1.0), 6)
        assert cert.passed and [c.k for c in cert.checks] == [5, 6]

    def test_origin_fails_every_check(self):
        cert = certify_escape(ModelPoint(0.0), 6)
        assert not any(c.passed for c in cert.checks)

    def test_past_tip_passes(self):
        s = address("1")
        assert certify_escape(ModelPoint(tip(s, 64) + 1, s), 6).passed

    def test_not_in_julia(self):
        with pytest.raises(NotInJulia) as err:
            certify_escape(ModelPoint(1.0, address("1")), 6)
        assert err.value.step == 1

    def test_three_states(self):
        s = address("-1,2")
        assert classify_point(ModelPoint(3.3, s))[0] is EscapeState.CERTIFIED_ESCAPING
        assert classify_point(ModelPoint(1.0, s))[0] is EscapeState.LEFT_DOMAIN
        assert classify_point(ModelPoint(0.0))[0] is EscapeState.UNKNOWN

    def test_certificate_json(self):
        cert = certify_escape(ModelPoint(1.0), 6)
        assert cert.to_json() == [{"k": 5, "pass": True}, {"k": 6, "pass": True}]


class TestForwardStretch:
    def test_equality_case(self):
        assert check_forward_stretch(ModelPoint(0.0), ModelPoint(1.0), 3)

    def test_half_past_tip(self):
        s = address("1")
        t = tip(s, 64)
        assert check_forward_stretch(ModelPoint(t, s), ModelPoint(t + 0.5, s), 4)

    def test_tiny_gap(self):
        s = address("1,-1")
        t = tip(s, 64) + 0.3
        assert check_forward_stretch(ModelPoint(t, s), ModelPoint(t + 1e-6, s), 6)

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            check_forward_stretch(ModelPoint(1.0), ModelPoint(2.0, address("1")), 2)
        with pytest.raises(PreconditionError):
            check_forward_stretch(ModelPoint(2.0), ModelPoint(1.0), 2)
        with pytest.raises(PreconditionError):
            check_forward_stretch(ModelPoint(0.1, address("2")), ModelPoint(0.2, address("2")), 2)


class TestSubBrush:
    def test_dedupes_semantically(self):
        sb = SubBrush.build(["1|2,1", "1,2|1,2", "0"], depth=16)
        assert len(sb) == 2

    def test_tips_cached(self, fixture_brush):
        for s in fixture_brush:
            assert fixture_brush.tip_of(s) == tip(s, 64)

    def test_depth_validated(self):
        with pytest.raises(ValueError):
            SubBrush.build(["0"], depth=0)
