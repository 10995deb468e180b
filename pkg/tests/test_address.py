from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from expbrush.address import (
    Cylinder,
    ExternalAddress,
    ZERO_ADDRESS,
    address,
    compare_height,
    cylinder_interval,
    embed_point,
    frac_str,
    height_float,
    lex_cmp,
    parse_frac,
    prepend,
    q_inverse,
    q_map,
    rational_above,
    rational_below,
    rational_digits,
    same_address,
    shift,
)

entries = st.integers(-4, 4)
addresses = st.builds(
    ExternalAddress,
    st.lists(entries, min_size=1, max_size=6).map(tuple),
    st.one_of(st.just(()), st.lists(entries, min_size=1, max_size=3).map(tuple)),
)
rationals = st.fractions(min_value=-6, max_value=6, max_denominator=500)


class TestParsing:
    def test_zero_tail(self):
        s = address("3,1,4")
        assert s.entries(5) == (3, 1, 4, 0, 0)
        assert str(s) == "3,1,4"

    def test_periodic(self):
        s = address("1|2,3")
        assert s.entries(6) == (1, 2, 3, 2, 3, 2)
        assert str(s) == "1|2,3"

    @pytest.mark.parametrize("bad", ["", "1,a", "|1", "1|", "1,,x"])
    def test_malformed(self, bad):
        with pytest.raises(ValueError, match="malformed"):
            address(bad)

    @given(addresses)
    def test_round_trip(self, s):
        assert same_address(address(str(s)), s)


class TestOrderAndShift:
    def test_lex_examples(self):
        assert lex_cmp(ZERO_ADDRESS, address("0,0,0")) == 0
        assert lex_cmp(address("0,1,2"), address("0,2")) == -1
        assert lex_cmp(address("-1,5"), address("0,-9")) == -1

    def test_shift_examples(self):
        assert shift(address("3,1,4")) == address("1,4")
        assert same_address(shift(ZERO_ADDRESS), ZERO_ADDRESS)
        assert same_address(shift(address("1|2,3")), address("2|3,2"))

    def test_periodic_equality_is_semantic(self):
        assert same_address(address("1|2,1"), address("1,2|1,2"))
        assert same_address(address("0|0"), ZERO_ADDRESS)

    @given(entries, addresses)
    def test_shift_undoes_prepend(self, x, s):
        assert same_address(shift(prepend(x, s)), s)

    @given(addresses, addresses)
    def test_lex_antisymmetric(self, s, t):
        assert lex_cmp(s, t) == -lex_cmp(t, s)


class TestEmbedding:
    def test_q_values(self):
        assert q_map(Fraction(0)) == Fraction(1, 2)
        assert q_map(Fraction(1)) == Fraction(3, 4)
        assert q_map(Fraction(-1)) == Fraction(1, 4)

    @given(rationals)
    def test_q_inverse(self, t):
        assert q_inverse(q_map(t)) == t

    def test_cylinder_examples(self):
        iv = cylinder_interval(Cylinder((0,)))
        assert (iv.lo, iv.hi) == (0, 1)
        iv = cylinder_interval((0, 0))
        assert (iv.lo, iv.hi) == (Fraction(1, 2), Fraction(3, 4))
        iv = cylinder_interval((1, -1))
        assert (iv.lo, iv.hi) == (Fraction(5, 4), Fraction(3, 2))

    def test_embed_point_examples(self):
        assert embed_point(ZERO_ADDRESS, 1).to_json() == ["0/1", "1/1"]
        assert embed_point(ZERO_ADDRESS, 2).to_json() == ["1/2", "3/4"]
        iv = embed_point(address("2"), 3)
        assert 2 <= iv.lo < iv.hi <= 3

    @given(st.lists(entries, min_size=1, max_size=6), entries)
    def test_cylinders_nest(self, prefix, x):
        assert cylinder_interval(prefix).contains_interval(cylinder_interval(prefix + [x]))

    @given(st.lists(entries, min_size=1, max_size=5), entries, entries)
    def test_siblings_disjoint_in_order(self, prefix, x, y):
        assume(x < y)
        assert cylinder_interval(prefix + [x]).hi <= cylinder_interval(prefix + [y]).lo

    @given(addresses, addresses)
    def test_order_embedding(self, s, t):
        c = lex_cmp(s, t)
        assume(c != 0)
        lo, hi = (s, t) if c < 0 else (t, s)
        d = lo._compare_horizon(hi) + 1
        assert embed_point(lo, d).hi <= embed_point(hi, d).lo

    @given(addresses, rationals)
    def test_compare_height_matches_intervals(self, s, y):
        sign = compare_height(s, y)
        assert sign in (-1, 1)
        for depth in range(1, 30):
            iv = embed_point(s, depth)
            if iv.hi <= y:
                assert sign == -1
                return
            if iv.lo >= y:
                assert sign == 1
                return

    @given(rationals)
    def test_rational_digits_terminate(self, y):
        digits, done = rational_digits(y)
        assert done
        # y is the lower endpoint of the cylinder spelled by its digits
        assert cylinder_interval(digits).lo == y

    @given(addresses, rationals)
    def test_rationals_strictly_between(self, s, y):
        if compare_height(s, y) < 0:
            r = rational_above(s, y)
            assert compare_height(s, r) < 0 and r < y
        else:
            r = rational_below(s, y)
            assert compare_height(s, r) > 0 and r > y

    def test_height_float_inside_cylinder(self):
        s = address("0,0|1,-1")
        iv = embed_point(s, 5)
        assert float(iv.lo) <= height_float(s) <= float(iv.hi)


class TestFractions:
    def test_frac_str(self):
        assert frac_str(Fraction(-3, 4)) == "-3/4"
        assert frac_str(2) == "2/1"

    def test_parse(self):
        assert parse_frac("3/4") == Fraction(3, 4)
        assert parse_frac("0.5") == Fraction(1, 2)
        with pytest.raises(TypeError):
            parse_frac(0.5)
        with pytest.raises(ValueError):
            parse_frac("pi")
