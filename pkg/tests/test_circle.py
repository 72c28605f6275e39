import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from knead.circle import (
    IntervalCover,
    MapError,
    PiecewiseLinearMarkovMap,
    circle_dist,
    conjugacy_eval,
    cover_distance,
    cylinder,
    decode,
    hausdorff_distance,
    itinerary,
    joint_check,
    map_image_cover,
    maximality_epsilon,
    orbit_itinerary,
    periodic_points,
    sequence_in_sft,
    sft_cover,
)
from knead.graph import full_shift_graph, sft_from_forbidden
from knead.seq import Seq, parse_seq

F = Fraction
DOUBLING = PiecewiseLinearMarkovMap.linear(1)
TWO_BRANCH = PiecewiseLinearMarkovMap.from_json(
    {"m": 1, "breakpoints": ["0", "1/3", "1"],
     "branches": [{"slope": "3", "intercept": "0"}, {"slope": "3/2", "intercept": "-1/2"}]}
)
GOLDEN = sft_from_forbidden(1, [(1, 1)])
ZERO_ONLY = sft_from_forbidden(1, [(1,)])

rationals = st.fractions(min_value=0, max_value=1, max_denominator=200).filter(lambda x: x < 1)
covers = st.lists(st.tuples(rationals, rationals).map(sorted), min_size=1, max_size=4).map(
    lambda arcs: IntervalCover(tuple(tuple(a) for a in arcs)))


class TestMaps:
    def test_json_roundtrip(self):
        again = PiecewiseLinearMarkovMap.from_json(json.dumps(TWO_BRANCH.to_json()))
        assert again.breakpoints == TWO_BRANCH.breakpoints and again.branches == TWO_BRANCH.branches

    def test_rejects_reversing_branch(self):
        with pytest.raises(MapError):
            PiecewiseLinearMarkovMap.from_json(
                {"m": 1, "breakpoints": ["0", "1/2", "1"],
                 "branches": [{"slope": "2", "intercept": "0"}, {"slope": "-2", "intercept": "2"}]})

    def test_rejects_non_surjective_branch(self):
        with pytest.raises(MapError):
            PiecewiseLinearMarkovMap.from_json(
                {"m": 1, "breakpoints": ["0", "1/2", "1"],
                 "branches": [{"slope": "3/2", "intercept": "0"}, {"slope": "2", "intercept": "-1"}]})

    def test_gamma(self):
        assert TWO_BRANCH.gamma == F(3, 2)
        assert PiecewiseLinearMarkovMap.from_breakpoints(["0", "1/3", "1"]).branches == TWO_BRANCH.branches


class TestCoding:
    def test_itineraries(self):
        assert str(itinerary(DOUBLING, F(2, 3), 4)) == "1010"
        assert str(itinerary(DOUBLING, 0, 5)) == "00000"
        assert str(itinerary(TWO_BRANCH, F(3, 7), 4)) == "1010"

    def test_breakpoint_takes_right_branch(self):
        assert itinerary(DOUBLING, F(1, 2), 1).symbols == (1,)

    def test_decode_exact(self):
        assert decode(DOUBLING, parse_seq("(10)", 1)) == decode(DOUBLING, parse_seq("(10)", 1)).point(F(2, 3))
        assert decode(DOUBLING, Seq(1)).lo == 0
        assert decode(TWO_BRANCH, parse_seq("(10)", 1)).lo == F(3, 7)

    def test_cylinder(self):
        assert cylinder(DOUBLING, (0, 0, 0)) == (0, F(1, 8))
        with pytest.raises(MapError):
            cylinder(DOUBLING, (2,))

    def test_orbit_itinerary(self):
        assert orbit_itinerary(DOUBLING, F(1, 3)) == parse_seq("(01)", 1)
        assert orbit_itinerary(DOUBLING, F(3, 4)) == parse_seq("11", 1)

    def test_conjugacy_examples(self):
        assert conjugacy_eval(DOUBLING, TWO_BRANCH, F(2, 3), 8).lo == F(3, 7)
        assert conjugacy_eval(DOUBLING, TWO_BRANCH, 0, 8).hi == 0
        assert conjugacy_eval(DOUBLING, TWO_BRANCH, F(1, 2), 8).lo == F(1, 3)

    @pytest.mark.parametrize("f", [DOUBLING, TWO_BRANCH])
    @given(x=rationals, k=st.integers(1, 16))
    def test_roundtrip(self, f, x, k):
        enc = decode(f, itinerary(f, x, k))
        assert x in enc
        assert enc.width <= (1 / f.gamma) ** k

    @given(x=rationals, k=st.integers(2, 14))
    def test_conjugacy_equivariant(self, x, k):
        lhs = conjugacy_eval(DOUBLING, TWO_BRANCH, DOUBLING(x), k - 1)
        inner = conjugacy_eval(DOUBLING, TWO_BRANCH, x, k)
        rhs = map_image_cover(TWO_BRANCH, IntervalCover(((inner.lo, inner.hi),)))
        assert any(lo <= lhs.hi and lhs.lo <= hi for lo, hi in rhs.arcs)

    def test_conjugacy_monotone_on_grid(self):
        vals = [conjugacy_eval(DOUBLING, TWO_BRANCH, F(i, 1024), 12) for i in range(1024)]
        assert all(a.lo <= b.hi for a, b in zip(vals, vals[1:]))
        assert all(a.mid < b.mid for a, b in zip(vals, vals[1:]))


class TestCovers:
    def test_golden_cover(self):
        assert sft_cover(DOUBLING, GOLDEN, 2).arcs == ((0, F(3, 4)),)

    def test_full_and_single(self):
        assert sft_cover(DOUBLING, full_shift_graph(1, 2)).arcs == ((0, 1),)
        assert sft_cover(DOUBLING, ZERO_ONLY, 3).arcs == ((0, F(1, 8)),)

    def test_images(self):
        assert map_image_cover(DOUBLING, IntervalCover(((0, F(1, 4)),))).arcs == ((0, F(1, 2)),)
        assert map_image_cover(DOUBLING, IntervalCover.point(0), F(1, 2)).arcs == ((F(1, 2), F(1, 2)),)

    def test_golden_invariance(self):
        cov = sft_cover(DOUBLING, GOLDEN, 3)
        assert cov.contains_cover(map_image_cover(DOUBLING, sft_cover(DOUBLING, GOLDEN, 4)))

    def test_hausdorff_examples(self):
        a = sft_cover(DOUBLING, GOLDEN, 4)
        assert hausdorff_distance(a, a).hi == 0
        assert hausdorff_distance(IntervalCover.point(0), IntervalCover.point(F(1, 2))).lo == F(1, 2)
        assert hausdorff_distance(a, IntervalCover.whole()).lo == F(5, 32)

    def test_json(self):
        cov = IntervalCover(((F(1, 3), F(1, 2)),))
        assert IntervalCover.from_json(cov.to_json()).arcs == cov.arcs
        assert cov.to_json() == [["1/3", "1/2"]]

    @given(covers, covers, covers)
    def test_hausdorff_metric(self, a, b, c):
        dab, dbc, dac = (hausdorff_distance(x, y).lo for x, y in ((a, b), (b, c), (a, c)))
        assert dab == hausdorff_distance(b, a).lo
        assert dac <= dab + dbc

    @given(covers, covers)
    def test_distance_is_min_point_distance(self, a, b):
        pts_a = [p for arc in a.arcs for p in arc]
        d = cover_distance(a, b)
        assert d <= min(b.dist_to_point(p) for p in pts_a)
        assert all(circle_dist(p, q) >= d for p in pts_a for arc in b.arcs for q in arc)


class TestJoint:
    def test_forbid_one(self):
        v = joint_check(DOUBLING, ZERO_ONLY, F(1, 2), 6)
        assert v.verdict == "certified_disjoint"
        assert v.gap >= F(1, 2) - F(1, 64)

    def test_golden_third(self):
        v = joint_check(DOUBLING, GOLDEN, F(1, 3), 8)
        assert v.verdict == "overlap_witness" and v.witness == F(1, 3)

    def test_golden_zero(self):
        assert joint_check(DOUBLING, GOLDEN, 0, 8).verdict == "overlap_witness"

    def test_periodic_points(self):
        pts = list(periodic_points(DOUBLING, GOLDEN, 3))
        assert [p for p, _ in pts] == [0, F(1, 3), F(2, 3), F(1, 7), F(2, 7), F(4, 7)]

    @settings(max_examples=25)
    @given(st.integers(0, 31), st.lists(st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple),
                                        min_size=1, max_size=2))
    def test_never_disjoint_with_periodic_overlap(self, p, words):
        target = sft_from_forbidden(1, words)
        if target.n_vertices == 0:
            return
        eps = F(p, 32)
        v = joint_check(DOUBLING, target, eps, 6)
        if v.verdict != "certified_disjoint":
            return
        for x, _ in periodic_points(DOUBLING, target, 8):
            q = (DOUBLING(x) + eps) % 1
            it = orbit_itinerary(DOUBLING, q)
            assert not sequence_in_sft(it, target)


class TestMaximality:
    def test_golden(self):
        nb = maximality_epsilon(GOLDEN, DOUBLING)
        assert (nb.epsilon, nb.r0) == (F(1, 12), 2)

    def test_full_shift(self):
        nb = maximality_epsilon(full_shift_graph(1, 2), DOUBLING)
        assert nb.neighborhood.arcs == ((0, 1),)

    def test_zero_only(self):
        nb = maximality_epsilon(ZERO_ONLY, DOUBLING)
        assert (nb.epsilon, nb.r0) == (F(1, 6), 1)

    def test_sigma_cover_inside_neighbourhood(self):
        for g in (GOLDEN, ZERO_ONLY, sft_from_forbidden(1, [(1, 0, 1)])):
            nb = maximality_epsilon(g, DOUBLING)
            assert nb.neighborhood.contains_cover(sft_cover(DOUBLING, g, nb.r0))
