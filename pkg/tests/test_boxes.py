import dataclasses
from fractions import Fraction

import pytest

from expbrush.address import height_in
from expbrush.boxes import (
    BoxFamily,
    Rect,
    SeedRejected,
    box_width,
    build_families,
    cylinder_depth,
    next_family,
    seed_family,
    validate_family,
)
from expbrush.brush import SubBrush
from expbrush.curve import rational_between, right_edge_recurrence
from expbrush.tower import f_inv_iter, partial_sum_inv_squares


@pytest.fixture(scope="module")
def families(fixture_brush):
    return build_families(Rect.square(1), fixture_brush, 3)


def test_widths_and_depths():
    assert box_width(1) == f_inv_iter(1, 1.0)
    assert box_width(2, offset=1) == f_inv_iter(9, 1.0)
    assert cylinder_depth(3) == 18


class TestSeed:
    def test_accepts_square(self, fixture_brush):
        fam = seed_family(Rect.square(1), fixture_brush)
        assert fam.k == 0 and len(fam.boxes) == 1

    def test_rejects_degenerate(self, fixture_brush):
        with pytest.raises(SeedRejected):
            seed_family(Rect(-1.0, 1.0, Fraction(1, 2), Fraction(1, 2)), fixture_brush)

    def test_rejects_float_sides(self, fixture_brush):
        with pytest.raises((SeedRejected, TypeError)):
            seed_family(Rect(-1.0, 1.0, 0.25, 0.75), fixture_brush)

    def test_rejects_left_side_on_hair(self):
        sb = SubBrush.build(["0,1"], depth=16)
        # tip of 0,1 is below 2, so the left side x=2 meets its hair
        with pytest.raises(SeedRejected) as err:
            seed_family(Rect(2.0, 3.0, Fraction(-1), Fraction(1)), sb)
        assert str(err.value.address) == "0,1"


class TestConstruction:
    def test_level_sizes(self, families):
        assert [len(f) for f in families] == [1, 1, 7, 7]
        assert families[1].boxes[0].c == Fraction(1, 2) and families[1].boxes[0].d == Fraction(3, 4)

    def test_all_conditions_pass(self, families, fixture_brush):
        report = validate_family(families, fixture_brush)
        assert report.ok, "\n".join(report.lines())
        assert report.relative_to == "sub-brush"

    def test_right_edges_follow_partial_sums(self, families):
        edges = [f.right_edge for f in families]
        assert edges == right_edge_recurrence(Rect.square(1), 3)
        for k, e in enumerate(edges):
            assert abs(e - (1.0 + (partial_sum_inv_squares(k) if k else 0.0))) < 1e-12

    def test_disjoint_depth_two_cylinders_split(self):
        sb = SubBrush.build(["0,0", "0,1"], depth=16)
        # tip of 0,1 is ln(1 + ln(1 + 2 pi)) ~ 1.09, so the seed reaches x = 2
        fams = build_families(Rect(-1.0, 2.0, Fraction(-1), Fraction(1)), sb, 1)
        boxes = fams[1].boxes
        assert len(boxes) >= 2
        assert all(a.d <= b.c for a, b in zip(boxes, boxes[1:]))

    def test_empty_right_edge_gives_empty_family(self):
        sb = SubBrush.build(["5", "-5"], depth=16)
        seed = seed_family(Rect.square(1), sb)
        assert next_family(seed, sb).boxes == ()

    def test_boxes_inside_one_cylinder(self, families, fixture_brush):
        for fam in families[1:]:
            for bx in fam.boxes:
                assert any(height_in(s, bx.c, bx.d) for s in fixture_brush)

    def test_json_round_trip(self, families):
        for fam in families:
            assert BoxFamily.from_json(fam.to_json()) == fam

    def test_with_offset(self, fixture_brush):
        fams = build_families(Rect.square(1), fixture_brush, 2, offset=1)
        assert validate_family(fams, fixture_brush, 1).ok
        assert fams[1].right_edge == 1.0 + f_inv_iter(4, 1.0)


class TestPlantedDefects:
    def test_overlap_fails_only_disjointness(self, families, fixture_brush):
        fam = families[2]
        b0 = fam.boxes[0]
        hair = next(s for s in fixture_brush if height_in(s, b0.c, b0.d))
        # a second box sharing b0's bottom, cut just above the same hair
        twin = dataclasses.replace(b0, d=rational_between(hair, b0.d))
        bad = dataclasses.replace(fam, boxes=(b0, twin) + fam.boxes[1:])
        report = validate_family(families[:2] + [bad] + families[3:], fixture_brush)
        assert report.failed() == [6]
        assert report.conditions[6].failures

    def test_widened_last_level_fails_width(self, families, fixture_brush):
        fam = families[3]
        boxes = tuple(dataclasses.replace(b, b=b.b + 1e-9) for b in fam.boxes)
        bad = dataclasses.replace(fam, boxes=boxes)
        report = validate_family(families[:3] + [bad], fixture_brush)
        assert report.failed() == [2]
