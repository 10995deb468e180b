import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from expbrush.tower import (
    MANTISSA_FLOOR,
    OrbitLeftDomain,
    TowerScalar,
    ZERO,
    as_tower,
    f_apply,
    f_inv,
    f_inv_iter,
    f_iter,
    fsub_with_slack,
    inverse_orbit,
    partial_sum_inv_squares,
    partial_sums_inv_squares,
    tower,
    tower_cmp,
    tower_fsub,
)

# mpmath at 40 digits
F1 = 1.718281828459045235
F2 = 6.389056098930650227
F_INV4_1 = 0.35279251707864999922
F_INV100_1 = 0.019857233324531704
SUM3 = 1.2369813873382473961
SUM100 = 1.7683259141177571478
F3_1 = 96.022365565026879911
F2_MINUS_2PI = 0.10587079175106375


class TestScalarMaps:
    def test_f_apply_values(self):
        assert f_apply(0.0) == 0.0
        assert f_apply(1.0) == pytest.approx(F1, rel=1e-15)
        assert f_apply(2.0) == pytest.approx(F2, rel=1e-15)

    def test_f_inv_values(self):
        assert f_inv(0.0) == 0.0
        assert f_inv(1.0) == pytest.approx(math.log(2), rel=1e-15)
        assert f_inv(math.e - 1) == pytest.approx(1.0, rel=1e-15)

    def test_inverse_iterates(self):
        assert f_inv_iter(1, 1.0) == pytest.approx(math.log(2), rel=1e-15)
        assert f_inv_iter(4, 1.0) == pytest.approx(F_INV4_1, rel=1e-14)
        assert f_inv_iter(100, 1.0) == pytest.approx(F_INV100_1, rel=1e-12)
        assert f_inv_iter(100, 1.0) < 0.03

    def test_inverse_orbit_matches_iterates(self):
        orbit = inverse_orbit(50)
        assert orbit[0] == 1.0
        assert all(orbit[n] == f_inv_iter(n, 1.0) for n in (1, 7, 50))

    def test_inverse_orbit_strictly_decreasing(self):
        orbit = inverse_orbit(10_000)
        assert all(b < a for a, b in zip(orbit, orbit[1:]))

    @given(st.floats(min_value=0, max_value=700))
    def test_round_trip(self, t):
        assert f_inv(f_apply(t)) == pytest.approx(t, rel=1e-12, abs=1e-300)

    @given(st.floats(min_value=0, max_value=700), st.floats(min_value=0, max_value=700))
    def test_f_apply_monotone(self, s, t):
        if s < t:
            assert f_apply(s) <= f_apply(t)


class TestPartialSums:
    def test_values(self):
        assert partial_sum_inv_squares(1) == pytest.approx(math.log(2), rel=1e-15)
        assert partial_sum_inv_squares(3) == pytest.approx(SUM3, rel=1e-14)
        assert partial_sum_inv_squares(100) == pytest.approx(SUM100, rel=1e-12)

    def test_differences_are_widths(self):
        sums = partial_sums_inv_squares(30)
        diffs = [sums[0]] + [b - a for a, b in zip(sums, sums[1:])]
        for k, d in enumerate(diffs, start=1):
            assert d == pytest.approx(f_inv_iter(k * k, 1.0), rel=1e-9)

    def test_below_half_pi_squared(self):
        assert all(s < math.pi ** 2 / 2 for s in partial_sums_inv_squares(100))


class TestTowerScalar:
    def test_canonical_rejects_bad_mantissa(self):
        with pytest.raises(ValueError):
            TowerScalar(1, 0.1)
        with pytest.raises(ValueError):
            TowerScalar(0, 1.5)

    def test_f_iter_identity_and_zero(self):
        assert f_iter(0, 0.7) == as_tower(0.7)
        assert f_iter(5, 0.0) == ZERO

    def test_f_iter_three_of_one(self):
        # F(1) = 1.718, F(1.718) = 4.575, F(4.575) = 96.02
        t = f_iter(3, 1.0)
        assert t.value() == pytest.approx(F3_1, rel=1e-13)
        assert t.value() <= F3_1

    def test_large_levels_stay_symbolic(self):
        t = f_iter(10, 1.0)
        assert math.isinf(t.value()) and t.level >= 3

    def test_cmp_examples(self):
        assert tower_cmp(tower(0, 0.5), tower(0, 0.5)) == 0
        # F^3(0.2) = 0.2812 < F^2(0.9) = 3.304
        assert tower_cmp(f_iter(3, 0.2), f_iter(2, 0.9)) == -1
        # F(0.69) = 0.99372 > 0.99
        assert tower_cmp(f_iter(1, 0.69), as_tower(0.99)) == 1

    @given(st.floats(min_value=0, max_value=50), st.floats(min_value=0, max_value=50))
    def test_cmp_agrees_with_floats(self, x, y):
        if x != y:
            assert tower_cmp(as_tower(x), as_tower(y)) == (1 if x > y else -1)

    towers = st.builds(lambda n, t: f_iter(n, t), st.integers(0, 6), st.floats(0, 3))

    @given(towers, towers, towers)
    def test_cmp_is_total_order(self, u, v, w):
        assert tower_cmp(u, v) == -tower_cmp(v, u)
        if tower_cmp(u, v) <= 0 and tower_cmp(v, w) <= 0:
            assert tower_cmp(u, w) <= 0

    def test_mantissa_floor(self):
        assert math.expm1(MANTISSA_FLOOR) >= 1.0
        assert math.expm1(math.nextafter(MANTISSA_FLOOR, 0)) < 1.0


class TestFsub:
    def test_direct(self):
        r = tower_fsub(as_tower(2.0), 2 * math.pi)
        assert r.value() == pytest.approx(F2_MINUS_2PI, rel=1e-12)
        assert Fraction(r.value()) <= Fraction(math.expm1(2.0)) - Fraction(2 * math.pi)

    def test_leaves_domain(self):
        with pytest.raises(OrbitLeftDomain):
            tower_fsub(as_tower(0.5), 1.0)

    def test_zero_subtraction_bumps_level(self):
        u = f_iter(7, 1.0)
        assert tower_fsub(u, 0.0) == f_iter(8, 1.0)

    def test_slack_route_on_huge_towers(self):
        u = f_iter(6, 1.0)
        r, slack = fsub_with_slack(u, 2 * math.pi)
        assert r.level == u.level + 1
        assert tower_cmp(r, f_iter(7, 1.0)) <= 0
        assert slack >= 0

    @given(st.floats(min_value=0, max_value=6), st.floats(min_value=0, max_value=20))
    def test_lower_bound_contract(self, t, c):
        with mpmath.workdps(50):
            exact = mpmath.expm1(mpmath.mpf(t)) - mpmath.mpf(c)
        try:
            r = tower_fsub(as_tower(t), c)
        except OrbitLeftDomain:
            # the rounded-down route may give up within a few ulps of zero
            assert exact < 1e-14 * max(1.0, c)
            return
        assert mpmath.mpf(r.value()) <= exact
